//! Power-law fitting of decay curves and verdicts against predicted rates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares line `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub rms_residual: f64,
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Line {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Line {
        slope,
        intercept,
        r_squared,
        rms_residual: (sse / n).sqrt(),
    }
}

/// Exponent `β` of `y ~ (1+t)^{−β}` fitted on a time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub beta: f64,
    pub r_squared: f64,
    pub window: [f64; 2],
    pub samples: usize,
}

/// Least squares of `log y` against `log(1+t)` over samples with `t ∈ [t₀, t₁]`.
pub fn fit_power_law(series: &[(f64, f64)], window: [f64; 2]) -> Result<PowerLawFit> {
    let [t0, t1] = window;
    if !(t0 <= t1) {
        return Err(Error::Domain(format!("empty fit window [{t0}, {t1}]")));
    }
    let inside: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= t0 && t <= t1)
        .collect();
    if inside.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} samples in window [{t0}, {t1}], need at least 8",
            inside.len()
        )));
    }
    if let Some(&(t, y)) = inside.iter().find(|&&(_, y)| !(y > 0.0)) {
        return Err(Error::Domain(format!("non-positive value {y} at t = {t}")));
    }
    let xs: Vec<f64> = inside.iter().map(|&(t, _)| t.ln_1p()).collect();
    let ys: Vec<f64> = inside.iter().map(|&(_, y)| y.ln()).collect();
    let line = least_squares(&xs, &ys);
    Ok(PowerLawFit {
        beta: -line.slope,
        r_squared: line.r_squared,
        window,
        samples: inside.len(),
    })
}

/// Outcome of comparing a fitted exponent with its prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Matches,
    FasterThanBound,
    ViolatesBound,
}

impl Verdict {
    pub fn judge(beta: f64, predicted: f64, tolerance: f64) -> Self {
        if (beta - predicted).abs() <= tolerance {
            Verdict::Matches
        } else if beta > predicted + tolerance {
            Verdict::FasterThanBound
        } else {
            Verdict::ViolatesBound
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Matches => "matches",
            Verdict::FasterThanBound => "faster_than_bound",
            Verdict::ViolatesBound => "violates_bound",
        })
    }
}
