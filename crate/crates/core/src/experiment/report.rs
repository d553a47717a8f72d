use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{PowerLawFit, Verdict};

use super::ExperimentConfig;

/// A fitted exponent set against its prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Fitted quantity, e.g. `l2_sq` or `hhalf_sq`.
    pub norm: String,
    pub beta: f64,
    pub r_squared: f64,
    pub predicted: f64,
    pub verdict: Verdict,
    /// Run and prediction the fit belongs to.
    pub label: String,
    pub tolerance: f64,
    pub window: [f64; 2],
    pub samples: usize,
}

impl FitResult {
    pub fn new(
        norm: &str,
        label: String,
        fit: PowerLawFit,
        predicted: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            norm: norm.to_string(),
            beta: fit.beta,
            r_squared: fit.r_squared,
            predicted,
            verdict: Verdict::judge(fit.beta, predicted, tolerance),
            label,
            tolerance,
            window: fit.window,
            samples: fit.samples,
        }
    }
}

/// Outcome of an experiment as written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config_echo: ExperimentConfig,
    pub fits: Vec<FitResult>,
    /// Largest relative deviation of the L² curves across a sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2_spread: Option<f64>,
    /// Files written by the experiment, relative to its output directory.
    pub artifacts: Vec<PathBuf>,
    pub timestamp: String,
}

pub const REPORT_FILE: &str = "report.json";

impl Report {
    pub fn new(config: &ExperimentConfig, fits: Vec<FitResult>, artifacts: Vec<PathBuf>) -> Self {
        Self {
            experiment: config.title(),
            config_echo: config.clone(),
            fits,
            l2_spread: None,
            artifacts,
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn has_violation(&self) -> bool {
        self.fits
            .iter()
            .any(|f| f.verdict == Verdict::ViolatesBound)
    }

    /// Process exit status: 0 unless some verdict is `violates_bound`.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.has_violation())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Writes `report.json` into `dir` and returns its path.
pub fn emit_report(report: &Report, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(REPORT_FILE);
    std::fs::write(&path, report.to_json()).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes `t value` lines suitable for gnuplot.
pub fn write_two_column(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    let mut text = String::with_capacity(points.len() * 48);
    for (t, y) in points {
        text.push_str(&format!("{t:.17e} {y:.17e}\n"));
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
