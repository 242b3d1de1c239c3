use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::msgmres::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::pencil::DiskRegion;
use crate::rational::QuadratureRule;

/// Which eigensolver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Subspace iteration with the `k1`-pole filter applied by direct solves.
    Simple,
    /// Subspace iteration with the composite filter at fixed `k1`, `k2`.
    Composite,
    /// Composite filter without subspace iteration; `k2` doubles per round.
    Adaptive,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple" => Ok(Mode::Simple),
            "composite" => Ok(Mode::Composite),
            "adaptive" => Ok(Mode::Adaptive),
            _ => Err(Error::InvalidArgument(format!("unknown mode `{s}`"))),
        }
    }
}

/// Offset of the default projection shift, in units of the radius.
pub const SIGMA_OFFSET: Complex64 = Complex64::new(1.372, 0.891);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub region: DiskRegion,
    /// Expected eigenvalue count `s` inside the region.
    pub s_estimate: usize,
    pub oversampling: f64,
    /// Subspace width; `⌊ρ s⌋` when unset.
    pub n_col: Option<usize>,
    pub mode: Mode,
    /// Quadrature of the simple rule. The composite modes need `Trapezoid`.
    pub rule: QuadratureRule,
    pub k1: usize,
    /// Outer order; the initial order in adaptive mode.
    pub k2: usize,
    pub k2_max: usize,
    /// Projection shift; `c + r(1.372 + 0.891i)` when unset.
    pub sigma: Option<Complex64>,
    pub tol: f64,
    pub ghost_tol: f64,
    pub gmres_tol: f64,
    pub gmres_max_iter: usize,
    pub max_outer: usize,
    pub seed: u64,
    /// Worker threads; `0` means one per core.
    pub threads: usize,
}

impl SolverConfig {
    pub fn new(region: DiskRegion, s_estimate: usize) -> Self {
        Self {
            region,
            s_estimate,
            oversampling: 1.2,
            n_col: None,
            mode: Mode::Simple,
            rule: QuadratureRule::Trapezoid,
            k1: 8,
            k2: 8,
            k2_max: 512,
            sigma: None,
            tol: 1e-8,
            ghost_tol: 1e-2,
            gmres_tol: DEFAULT_TOL,
            gmres_max_iter: DEFAULT_MAX_ITER,
            max_outer: 50,
            seed: 0,
            threads: 1,
        }
    }

    pub fn n_col(&self) -> usize {
        self.n_col
            .unwrap_or_else(|| ((self.oversampling * self.s_estimate as f64).floor() as usize).max(self.s_estimate))
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
            .unwrap_or(self.region.center() + self.region.radius() * SIGMA_OFFSET)
    }

    /// Checks the configuration against a problem of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        let n_col = self.n_col();
        if self.s_estimate == 0 {
            return bad("the eigenvalue estimate must be positive".into());
        }
        if !(self.oversampling >= 1.0) {
            return bad(format!("oversampling {} must be at least 1", self.oversampling));
        }
        if n_col < self.s_estimate {
            return bad(format!("n_col {n_col} is below the eigenvalue estimate {}", self.s_estimate));
        }
        if n_col > dim {
            return bad(format!("n_col {n_col} exceeds the problem dimension {dim}"));
        }
        if self.k1 == 0 || self.k2 == 0 {
            return bad("k1 and k2 must be positive".into());
        }
        if !(self.tol > 0.0 && self.tol < self.ghost_tol) {
            return bad(format!("need 0 < tol < ghost_tol, got {} and {}", self.tol, self.ghost_tol));
        }
        if !(self.gmres_tol > 0.0) || self.gmres_max_iter == 0 || self.max_outer == 0 {
            return bad("GMRES tolerance, GMRES iteration cap and outer iteration cap must be positive".into());
        }
        if self.mode != Mode::Simple && self.rule != QuadratureRule::Trapezoid {
            return bad("the composite rule is defined for the trapezoid quadrature only".into());
        }
        if self.mode == Mode::Adaptive {
            let ratio = self.k2_max / self.k2;
            if self.k2_max < self.k2 || self.k2_max % self.k2 != 0 || !ratio.is_power_of_two() {
                return bad(format!(
                    "k2_max {} must be a power-of-two multiple of k2 {}",
                    self.k2_max, self.k2
                ));
            }
        }
        Ok(())
    }
}
