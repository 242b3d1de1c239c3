use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rfeig::pencil::{gen_power_grid, gen_spectrum_pencil, load_matrix_market, write_matrix_market};
use rfeig::rational::{
    filter_map_grid, gauss_rule, grid_half_width, optimal_ratio, separation_ratio_closed, separation_ratio_grid,
    trapezoid_rule, zolotarev_eval, zolotarev_params,
};
use rfeig::solver::{solve, EigenReport, Mode, OperationCounts};
use rfeig::{Annulus, DiskRegion, MatrixPencil};
use serde::{Deserialize, Serialize};

use crate::args::{AnalyzeArgs, BenchArgs, PowerGridArgs, SolveArgs, SpectrumArgs};
use crate::error::{CliError, CliResult, EXIT_NOT_CONVERGED, EXIT_OK};
use crate::manifest::{AnalysisParams, CommandKind, FilterRule, RunConfig, RunManifest};
use crate::parse::parse_spectrum;

/// Grid used for the Gauss ratio when `--grid` is not given.
pub const DEFAULT_RATIO_GRID: usize = 1000;

fn create_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

pub fn load_pencil(dir: &Path) -> CliResult<MatrixPencil> {
    let a = load_matrix_market(dir.join("A.mtx"))?;
    let b = load_matrix_market(dir.join("B.mtx"))?;
    Ok(MatrixPencil::new(a, b)?)
}

fn write_pencil(p: &MatrixPencil, dir: &Path) -> CliResult<Vec<PathBuf>> {
    create_dir(dir)?;
    let (a, b) = (dir.join("A.mtx"), dir.join("B.mtx"));
    write_matrix_market(p.a(), &a)?;
    write_matrix_market(p.b(), &b)?;
    Ok(vec![a, b])
}

pub fn gen_powergrid(args: &PowerGridArgs) -> CliResult<i32> {
    let p = gen_power_grid(args.nx, args.seed)?;
    let mut m = RunManifest::new(CommandKind::GenPowergrid, RunConfig::PowerGrid { n_x: args.nx }, args.seed);
    m.outputs = write_pencil(&p, &args.out)?;
    m.write(&args.out.join("manifest.json"))?;
    println!("power grid n_x = {}: dimension {}", args.nx, p.dim());
    Ok(EXIT_OK)
}

/// Ground truth written next to a prescribed-spectrum pencil.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTruth {
    pub schema: u32,
    pub n_inside: usize,
    /// Inside eigenvalues first, then outside.
    pub eigenvalues: Vec<Complex64>,
    pub seed_used: u64,
}

pub fn gen_spectrum(args: &SpectrumArgs) -> CliResult<i32> {
    let inside = parse_spectrum(&args.inside, args.seed.wrapping_add(1)).map_err(CliError::Input)?;
    let outside = parse_spectrum(&args.outside, args.seed.wrapping_add(2)).map_err(CliError::Input)?;
    let sp = gen_spectrum_pencil(&inside, &outside, args.seed)?;
    let truth = SpectrumTruth {
        schema: 1,
        n_inside: inside.len(),
        eigenvalues: sp.eigenvalues.clone(),
        seed_used: sp.seed_used,
    };
    let mut m = RunManifest::new(
        CommandKind::GenSpectrum,
        RunConfig::Spectrum {
            inside,
            outside,
            seed_used: sp.seed_used,
        },
        args.seed,
    );
    m.outputs = write_pencil(&sp.pencil, &args.out)?;
    let truth_path = args.out.join("truth.json");
    write_text(&truth_path, &serde_json::to_string_pretty(&truth).map_err(rfeig::Error::from)?)?;
    m.outputs.push(truth_path);
    m.write(&args.out.join("manifest.json"))?;
    println!("spectrum pencil: dimension {}, {} inside", sp.pencil.dim(), truth.n_inside);
    Ok(EXIT_OK)
}

pub fn solve_cmd(args: &SolveArgs) -> CliResult<i32> {
    let cfg = args.solver.to_config()?;
    let p = load_pencil(&args.pencil)?;
    let r = solve(&p, &cfg)?;
    create_dir(&args.out)?;
    let (report, trace) = (args.out.join("report.json"), args.out.join("trace.csv"));
    r.write_json(&report)?;
    r.trace.write_csv(&trace)?;
    let mut m = RunManifest::new(CommandKind::Solve, RunConfig::Solver(cfg.clone()), cfg.seed);
    m.inputs = vec![args.pencil.join("A.mtx"), args.pencil.join("B.mtx")];
    m.outputs = vec![report, trace];
    m.write(&args.out.join("manifest.json"))?;
    print_summary(&r);
    Ok(if r.converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

fn print_summary(r: &EigenReport) {
    let state = if r.converged { "converged" } else { "not converged" };
    println!(
        "{:?}: {state} after {} iterations (k2 = {}), {} eigenvalues",
        r.mode,
        r.iterations,
        r.final_k2,
        r.eigenvalues.len()
    );
    for (l, res) in r.eigenvalues.iter().zip(&r.residuals) {
        println!("  {:>24.16e} {:+.16e}i  residual {res:.2e}", l.re, l.im);
    }
}

pub fn analyze_filter(args: &AnalyzeArgs) -> CliResult<i32> {
    let annulus = Annulus::new(args.a, args.b)?;
    if args.k.iter().any(|&k| k == 0) {
        return Err(CliError::Input("filter orders must be positive".into()));
    }
    if args.grid.is_some_and(|n| n < 2) {
        return Err(CliError::Input("--grid needs at least 2 points per side".into()));
    }
    create_dir(&args.out)?;
    let unit = DiskRegion::unit();
    let zp = zolotarev_params(&annulus);
    let mut csv = String::from("rule,k,ratio,optimal,ratio_over_optimal\n");
    let mut outputs = Vec::new();
    for &k in &args.k {
        let ratio = match args.rule {
            FilterRule::Trapezoid => separation_ratio_closed(&annulus, k),
            FilterRule::Gauss => separation_ratio_grid(&gauss_rule(&unit, k)?, &annulus, args.grid.unwrap_or(DEFAULT_RATIO_GRID))?,
            FilterRule::Zolotarev => zp.infimum(k),
        };
        let opt = optimal_ratio(&annulus, k);
        let name = format!("{:?}", args.rule).to_lowercase();
        writeln!(csv, "{name},{k},{ratio:.16e},{opt:.16e},{:.16e}", ratio / opt).expect("string write");

        if let Some(n) = args.grid {
            let h = grid_half_width(&annulus);
            let points = match args.rule {
                FilterRule::Trapezoid => filter_map_grid(&trapezoid_rule(&unit, k)?, h, n),
                FilterRule::Gauss => filter_map_grid(&gauss_rule(&unit, k)?, h, n),
                FilterRule::Zolotarev => zolotarev_grid(&zp, k, h, n),
            };
            let mut g = String::from("x,y,abs_r\n");
            for (x, y, v) in points {
                writeln!(g, "{x:.16e},{y:.16e},{v:.16e}").expect("string write");
            }
            let path = args.out.join(format!("grid_{name}_k{k}.csv"));
            write_text(&path, &g)?;
            outputs.push(path);
        }
    }
    let ratios = args.out.join("ratios.csv");
    write_text(&ratios, &csv)?;
    outputs.insert(0, ratios);
    print!("{csv}");

    let params = AnalysisParams {
        rule: args.rule,
        k: args.k.clone(),
        a: args.a,
        b: args.b,
        grid: args.grid,
    };
    let mut m = RunManifest::new(CommandKind::AnalyzeFilter, RunConfig::Analysis(params), 0);
    m.outputs = outputs;
    m.write(&args.out.join("manifest.json"))?;
    Ok(EXIT_OK)
}

fn zolotarev_grid(zp: &rfeig::rational::ZolotarevParams, k: usize, h: f64, n: usize) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            let x = -h + 2.0 * h * ix as f64 / (n - 1) as f64;
            let y = -h + 2.0 * h * iy as f64 / (n - 1) as f64;
            if let Ok(v) = zolotarev_eval(zp, k, Complex64::new(x, y)) {
                out.push((x, y, v.norm()));
            }
        }
    }
    out
}

/// Counts for one outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationCounts {
    pub t: usize,
    pub k2: usize,
    pub solves: usize,
    pub g_applications: usize,
    pub gmres_total: usize,
    pub gmres_iterations: Vec<usize>,
    pub max_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeBench {
    pub mode: Mode,
    pub converged: bool,
    pub iterations: usize,
    pub final_k2: usize,
    pub eigenvalues: usize,
    pub counts: OperationCounts,
    pub per_iteration: Vec<IterationCounts>,
    /// Reported, never asserted.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: u32,
    pub dim: usize,
    pub modes: Vec<ModeBench>,
}

pub fn mode_bench(r: &EigenReport, wall_seconds: f64) -> ModeBench {
    let mut per_iteration = Vec::with_capacity(r.trace.len());
    let (mut solves, mut g) = (0, 0);
    for rec in &r.trace.records {
        per_iteration.push(IterationCounts {
            t: rec.t,
            k2: rec.k2,
            solves: rec.solves - solves,
            g_applications: rec.g_applications - g,
            gmres_total: rec.gmres_total,
            gmres_iterations: rec.gmres_iterations.clone(),
            max_residual: rec.max_residual,
        });
        solves = rec.solves;
        g = rec.g_applications;
    }
    ModeBench {
        mode: r.mode,
        converged: r.converged,
        iterations: r.iterations,
        final_k2: r.final_k2,
        eigenvalues: r.eigenvalues.len(),
        counts: r.counts.clone(),
        per_iteration,
        wall_seconds,
    }
}

pub fn bench(args: &BenchArgs) -> CliResult<i32> {
    let base = args.solver.to_config()?;
    let p = load_pencil(&args.pencil)?;
    let mut modes = Vec::new();
    for &mode in &args.modes {
        let mut cfg = base.clone();
        cfg.mode = mode;
        let start = Instant::now();
        let r = solve(&p, &cfg)?;
        let mb = mode_bench(&r, start.elapsed().as_secs_f64());
        println!(
            "{mode:?}: converged {} iterations {} factorizations {} solves {} G-columns {} GMRES {} ({:.2} s)",
            mb.converged,
            mb.iterations,
            mb.counts.factorizations,
            mb.counts.solves,
            mb.counts.g_columns,
            mb.counts.gmres_iterations,
            mb.wall_seconds
        );
        modes.push(mb);
    }
    let all_converged = modes.iter().all(|m| m.converged);
    let report = BenchReport {
        schema: 1,
        dim: p.dim(),
        modes,
    };
    create_dir(&args.out)?;
    let path = args.out.join("bench.json");
    write_text(&path, &serde_json::to_string_pretty(&report).map_err(rfeig::Error::from)?)?;
    let mut m = RunManifest::new(
        CommandKind::Bench,
        RunConfig::Bench {
            solver: base.clone(),
            modes: args.modes.clone(),
        },
        base.seed,
    );
    m.inputs = vec![args.pencil.join("A.mtx"), args.pencil.join("B.mtx")];
    m.outputs = vec![path];
    m.write(&args.out.join("manifest.json"))?;
    Ok(if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED })
}
