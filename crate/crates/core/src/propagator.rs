//! Exact solution operator of the linearized Navier–Stokes–Coriolis system.
//!
//! In Fourier variables the linear problem `∂ₜu − Δu + Ω e₃×u + ∇p = 0`,
//! `∇·u = 0` decouples into 3×3 systems per wavevector whose solution is
//!
//! ```text
//! û(ξ,t) = e^{−t|ξ|²} [ cos(Ωξ₃t/|ξ|) I + sin(Ωξ₃t/|ξ|) R(ξ) ] û₀(ξ)
//! ```
//!
//! with `R(ξ)v = v × ξ/|ξ|`. On divergence-free modes `R(ξ)` acts as a
//! quarter turn in the plane `ξ^⊥`, so the bracket is a rotation about
//! `ξ/|ξ|` and the heat factor is the only source of decay.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::modes::{mode_table, ModeTable};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Coriolis parameter; the viscosity is fixed at one.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationParams {
    pub omega: f64,
}

impl RotationParams {
    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::Domain(format!("Ω must be finite, got {omega}")));
        }
        Ok(Self { omega })
    }

    pub fn heat() -> Self {
        Self { omega: 0.0 }
    }
}

/// `cos θ · I + sin θ · R(ξ)` as a row-major 3×3 matrix.
pub fn rotation_matrix(xi: [f64; 3], theta: f64) -> Result<[[f64; 3]; 3]> {
    let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    if k == 0.0 || !k.is_finite() {
        return Err(Error::Domain(
            "rotation matrix is undefined at ξ = 0".to_string(),
        ));
    }
    let (s, c) = theta.sin_cos();
    let [a, b, d] = [xi[0] / k, xi[1] / k, xi[2] / k];
    Ok([[c, s * d, -s * b], [-s * d, c, s * a], [s * b, -s * a, c]])
}

/// Per-mode coefficients of `e^{tM(ξ)}` for one `(t, Ω)` pair.
///
/// Storing `e^{−t|ξ|²}cos θ` and `e^{−t|ξ|²}sin θ/|ξ|` turns each application
/// into one scaled copy plus one cross product with the unnormalized `ξ`.
#[derive(Debug, Clone)]
pub struct SemigroupFactors {
    table: std::sync::Arc<ModeTable>,
    t: f64,
    omega: f64,
    cos_part: Vec<f64>,
    sin_part: Vec<f64>,
}

impl SemigroupFactors {
    pub fn new(grid: crate::Grid, t: f64, params: RotationParams) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!(
                "time must be finite and ≥ 0, got {t}"
            )));
        }
        let table = mode_table(grid);
        let len = grid.len();
        let mut cos_part = vec![0.0; len];
        let mut sin_part = vec![0.0; len];
        for flat in 0..len {
            let k2 = table.k2[flat];
            if k2 == 0.0 || !table.retained[flat] {
                continue;
            }
            let k = k2.sqrt();
            let heat = (-t * k2).exp();
            let theta = params.omega * table.xi[flat][2] / k * t;
            let (s, c) = theta.sin_cos();
            cos_part[flat] = heat * c;
            sin_part[flat] = heat * s / k;
        }
        Ok(Self {
            table,
            t,
            omega: params.omega,
            cos_part,
            sin_part,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    #[inline]
    pub(crate) fn apply_mode(&self, flat: usize, v: [Complex64; 3]) -> [Complex64; 3] {
        let c = self.cos_part[flat];
        let s = self.sin_part[flat];
        let xi = self.table.xi[flat];
        [
            v[0] * c + (v[1] * xi[2] - v[2] * xi[1]) * s,
            v[1] * c + (v[2] * xi[0] - v[0] * xi[2]) * s,
            v[2] * c + (v[0] * xi[1] - v[1] * xi[0]) * s,
        ]
    }

    /// Applies the stored operator without checking divergence.
    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        u.par_map(|flat, v| self.apply_mode(flat, v))
    }

    pub fn apply_in_place(&self, u: &mut SpectralField) {
        u.par_update(|flat, v| *v = self.apply_mode(flat, *v));
    }
}

/// `e^{tM}u₀`: heat decay times the Coriolis rotation, mode by mode.
///
/// The zero mode and the Nyquist planes are mapped to zero.
pub fn semigroup_apply(
    u0: &SpectralField,
    t: f64,
    params: RotationParams,
) -> Result<SpectralField> {
    let factors = SemigroupFactors::new(u0.grid(), t, params)?;
    u0.require_divergence_free()?;
    Ok(factors.apply(u0))
}

/// Spectral representation of `ℙ(e₃ × u)`.
pub fn coriolis_term(u: &SpectralField) -> SpectralField {
    let table = mode_table(u.grid());
    u.par_map(|flat, v| {
        let k2 = table.k2[flat];
        if k2 == 0.0 || !table.retained[flat] {
            return [ZERO; 3];
        }
        let [x1, x2, x3] = table.xi[flat];
        let (a, b) = (v[0], v[1]);
        [
            -(1.0 - x1 * x1 / k2) * b - (x1 * x2 / k2) * a,
            (x1 * x2 / k2) * b + (1.0 - x2 * x2 / k2) * a,
            (x1 * x3 / k2) * b - (x3 * x2 / k2) * a,
        ]
    })
}

/// `p̂(ξ) = iΩ|ξ|⁻²(ξ₂û₁ − ξ₁û₂)`, with `p̂(0) = 0`.
pub fn pressure_spectral(u: &SpectralField, params: RotationParams) -> Vec<Complex64> {
    let table = mode_table(u.grid());
    let i_omega = Complex64::new(0.0, params.omega);
    (0..u.grid().len())
        .map(|flat| {
            let k2 = table.k2[flat];
            if k2 == 0.0 || params.omega == 0.0 {
                return ZERO;
            }
            let [x1, x2, _] = table.xi[flat];
            let v = u.mode(flat);
            i_omega * (v[0] * x2 - v[1] * x1) / k2
        })
        .collect()
}
