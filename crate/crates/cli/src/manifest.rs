use std::path::{Path, PathBuf};

use clap::ValueEnum;
use num_complex::Complex64;
use rfeig::solver::{Mode, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MANIFEST_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FilterRule {
    Trapezoid,
    Gauss,
    Zolotarev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    GenPowergrid,
    GenSpectrum,
    Solve,
    AnalyzeFilter,
    Bench,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub rule: FilterRule,
    pub k: Vec<usize>,
    pub a: f64,
    pub b: f64,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunConfig {
    PowerGrid { n_x: usize },
    Spectrum { inside: Vec<Complex64>, outside: Vec<Complex64>, seed_used: u64 },
    Solver(SolverConfig),
    Bench { solver: SolverConfig, modes: Vec<Mode> },
    Analysis(AnalysisParams),
}

/// What a run did, with enough detail to repeat it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: u32,
    pub command: CommandKind,
    pub config: RunConfig,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: u64,
}

impl RunManifest {
    pub fn new(command: CommandKind, config: RunConfig, seed: u64) -> Self {
        Self {
            schema: MANIFEST_SCHEMA,
            command,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest fields serialize")
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json())
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let m: RunManifest = serde_json::from_str(text).map_err(rfeig::Error::from)?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(CliError::Input(format!("unsupported manifest schema {}", m.schema)));
        }
        Ok(m)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
