use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rfeig::rational::QuadratureRule;
use rfeig::solver::{Mode, SolverConfig};
use rfeig::DiskRegion;

use crate::error::{CliError, CliResult};
use crate::manifest::FilterRule;
use crate::parse::parse_complex;

#[derive(Debug, Parser)]
#[command(
    name = "rfeig",
    version,
    about = "Interior eigenvalues of sparse non-Hermitian pencils by contour-integral rational filters"
)]
pub struct Cli {
    /// Flat `key = value` file supplying flags; the command line takes precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a test pencil as a Matrix Market pair A.mtx, B.mtx.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Compute the eigenpairs inside a disk.
    Solve(SolveArgs),
    /// Tabulate separation ratios and filter magnitudes on an annulus.
    AnalyzeFilter(AnalyzeArgs),
    /// Run several modes on one pencil and report operation counts.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Quasi-two-dimensional RLC power grid, pencil (−G, C).
    Powergrid(PowerGridArgs),
    /// Dense pencil (X Λ X⁻¹, I) with a prescribed spectrum.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct PowerGridArgs {
    /// Grid points per side.
    #[arg(long)]
    pub nx: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Eigenvalues inside the region: `a,b,...`, `disk:N:R`, `circle:N:R` or a file.
    #[arg(long, allow_hyphen_values = true)]
    pub inside: String,
    /// Eigenvalues outside the region, same syntax.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub outside: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Trapezoid,
    Gauss,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value = "simple")]
    pub mode: Mode,
    /// Center c of the disk.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub center: Complex64,
    /// Radius r of the disk.
    #[arg(long)]
    pub radius: f64,
    /// Expected number s of eigenvalues inside; defaults to --ncol.
    #[arg(long)]
    pub s: Option<usize>,
    /// Oversampling ρ, n_col = ⌊ρ s⌋.
    #[arg(long, default_value_t = 1.2)]
    pub rho: f64,
    #[arg(long)]
    pub ncol: Option<usize>,
    /// Quadrature of the simple rule.
    #[arg(long, value_enum, default_value_t = RuleArg::Trapezoid)]
    pub rule: RuleArg,
    /// Poles of the simple rule, or of the inner filter.
    #[arg(long, default_value_t = 8)]
    pub k1: usize,
    /// Outer order; the starting order in adaptive mode.
    #[arg(long, default_value_t = 8)]
    pub k2: usize,
    #[arg(long, default_value_t = 512)]
    pub k2_max: usize,
    /// Projection shift σ; defaults to c + r(1.372 + 0.891i).
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    pub sigma: Option<Complex64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub ghost_tol: f64,
    #[arg(long, default_value_t = rfeig::msgmres::DEFAULT_TOL)]
    pub gmres_tol: f64,
    #[arg(long, default_value_t = rfeig::msgmres::DEFAULT_MAX_ITER)]
    pub gmres_max_iter: usize,
    #[arg(long, default_value_t = 50)]
    pub max_outer: usize,
    /// Seed of the random starting subspace.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

impl SolverArgs {
    pub fn to_config(&self) -> CliResult<SolverConfig> {
        let region = DiskRegion::new(self.center, self.radius)?;
        let s = self
            .s
            .or(self.ncol)
            .ok_or_else(|| CliError::Input("one of --s or --ncol is required".into()))?;
        let mut cfg = SolverConfig::new(region, s);
        cfg.mode = self.mode;
        cfg.oversampling = self.rho;
        cfg.n_col = self.ncol;
        cfg.rule = match self.rule {
            RuleArg::Trapezoid => QuadratureRule::Trapezoid,
            RuleArg::Gauss => QuadratureRule::GaussSemicircle,
        };
        cfg.k1 = self.k1;
        cfg.k2 = self.k2;
        cfg.k2_max = self.k2_max;
        cfg.sigma = self.sigma;
        cfg.tol = self.tol;
        cfg.ghost_tol = self.ghost_tol;
        cfg.gmres_tol = self.gmres_tol;
        cfg.gmres_max_iter = self.gmres_max_iter;
        cfg.max_outer = self.max_outer;
        cfg.seed = self.seed;
        cfg.threads = self.threads;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Directory holding A.mtx and B.mtx.
    #[arg(long)]
    pub pencil: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for report.json, trace.csv and manifest.json.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory holding A.mtx and B.mtx.
    #[arg(long)]
    pub pencil: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_delimiter = ',', default_value = "simple,composite,adaptive")]
    pub modes: Vec<Mode>,
    /// Directory for bench.json and manifest.json.
    #[arg(long, default_value = "bench")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub rule: FilterRule,
    /// Filter orders, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    /// Inner annulus radius.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Outer annulus radius.
    #[arg(long, default_value_t = 1.1)]
    pub b: f64,
    /// Points per side of a |R| grid written per order.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Directory for ratios.csv, the grids and manifest.json.
    #[arg(long, default_value = "analysis")]
    pub out: PathBuf,
}
