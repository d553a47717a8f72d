//! Decay indicators, decay-character estimation and synthetic data.
//!
//! The decay character `r*` of `u₀` is the exponent for which
//! `ρ^{−2r−3} ∫_{B(ρ)} |û₀|²` has a finite positive limit as `ρ → 0`. The
//! limit cannot be observed directly, so [`estimate_decay_character`] fits
//! the slope `m` of `log S(ρ)` against `log ρ` over a finite radius schedule
//! and reports `r* = (m − 3)/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::modes::mode_table;
use crate::profile::RadialProfile;
use crate::spectral::sobolev_seminorm_sq;

/// Residual above which the log-log fit is declared meaningless.
pub const RESIDUAL_THRESHOLD: f64 = 0.1;

/// Value reported for `r*` when no spectral mass is seen near the origin.
pub const R_STAR_CAP: f64 = 50.0;

/// Relative accuracy requested from the radial quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// Anything whose spectral mass in a ball about the origin can be measured.
pub trait BallSpectrum {
    /// `∫_{|ξ|≤ρ} |û|² dξ`.
    fn ball_integral(&self, radius: f64) -> Result<f64>;

    /// Geometric radius schedule used when the caller supplies none.
    fn default_radii(&self) -> Vec<f64>;

    /// Drops radii the source cannot resolve.
    fn admissible_radii(&self, radii: &[f64]) -> Vec<f64> {
        radii.to_vec()
    }

    /// Whether the schedule must cover a full decade of radii.
    fn needs_decade(&self) -> bool {
        true
    }
}

impl BallSpectrum for SpectralField {
    /// Lattice quadrature with soft cell edges: a mode at distance `|ξ|`
    /// carries weight `clamp((ρ − |ξ|)/Δξ + 1/2, 0, 1)`, which makes the
    /// discrete ball volume a continuous function of `ρ`.
    fn ball_integral(&self, radius: f64) -> Result<f64> {
        let grid = self.grid();
        let limit = 2.0 * grid.spacing();
        if !(radius >= limit * (1.0 - 1e-12)) {
            return Err(Error::InsufficientResolution { radius, limit });
        }
        let table = mode_table(grid);
        let inv_d = 1.0 / grid.spacing();
        let reach = (radius + 0.5 * grid.spacing()).powi(2);
        let sum: f64 = (0..grid.len())
            .into_par_iter()
            .with_min_len(crate::field::CHUNK)
            .map(|flat| {
                let k2 = table.k2[flat];
                if k2 > reach {
                    return 0.0;
                }
                let w = ((radius - table.k[flat]) * inv_d + 0.5).clamp(0.0, 1.0);
                let v = self.mode(flat);
                w * (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr())
            })
            .sum();
        Ok(sum * grid.cell_volume())
    }

    fn default_radii(&self) -> Vec<f64> {
        default_lattice_radii(self.grid())
    }

    fn admissible_radii(&self, radii: &[f64]) -> Vec<f64> {
        let g = self.grid();
        let lo = 2.0 * g.spacing() * (1.0 - 1e-12);
        let hi = lattice_rho_max(g);
        radii
            .iter()
            .copied()
            .filter(|&r| r >= lo && r <= hi * (1.0 + 1e-12))
            .collect()
    }

    fn needs_decade(&self) -> bool {
        false
    }
}

impl BallSpectrum for RadialProfile {
    fn ball_integral(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return Err(Error::Domain(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(self
            .weighted_mass(0.0, 0.0, radius, QUADRATURE_TOLERANCE)?
            .value)
    }

    fn default_radii(&self) -> Vec<f64> {
        geometric(1e-2, 0.5, 12)
    }
}

/// `ρ_max = min(1, nΔξ/8)`, never below the `2Δξ` resolution floor.
pub fn lattice_rho_max(grid: Grid) -> f64 {
    (grid.n as f64 * grid.spacing() / 8.0)
        .min(1.0)
        .max(2.0 * grid.spacing())
}

/// Twelve radii with ratio 3/4 from [`lattice_rho_max`], keeping those ≥ 2Δξ.
pub fn default_lattice_radii(grid: Grid) -> Vec<f64> {
    let lo = 2.0 * grid.spacing();
    geometric(lattice_rho_max(grid), 0.75, 12)
        .into_iter()
        .filter(|&r| r >= lo * (1.0 - 1e-12))
        .collect()
}

fn geometric(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| start * ratio.powi(k as i32)).collect()
}

/// Convenience wrapper over [`BallSpectrum::ball_integral`].
pub fn ball_spectrum_integral(source: &impl BallSpectrum, radius: f64) -> Result<f64> {
    source.ball_integral(radius)
}

/// The sequence `ρ_k^{−2r−3} S(ρ_k)` and its tail behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorValue {
    /// Value at the smallest radius.
    pub value: f64,
    /// Relative spread over the last three radii is at most 5%.
    pub converged: bool,
    pub sequence: Vec<f64>,
}

pub fn decay_indicator(
    source: &impl BallSpectrum,
    r: f64,
    radii: &[f64],
) -> Result<IndicatorValue> {
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Precondition(
            "radii must be a non-empty strictly decreasing list".to_string(),
        ));
    }
    let sequence = radii
        .iter()
        .map(|&rho| Ok(rho.powf(-2.0 * r - 3.0) * source.ball_integral(rho)?))
        .collect::<Result<Vec<_>>>()?;
    let value = *sequence.last().expect("radii is non-empty");
    let tail = &sequence[sequence.len().saturating_sub(3)..];
    let hi = tail.iter().copied().fold(f64::MIN, f64::max);
    let lo = tail.iter().copied().fold(f64::MAX, f64::min);
    let converged = tail.len() == 3 && hi.is_finite() && (hi == 0.0 || (hi - lo) <= 0.05 * hi);
    Ok(IndicatorValue {
        value,
        converged,
        sequence,
    })
}

/// Fitted decay character and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayEstimate {
    pub r_star: f64,
    pub slope: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub r_squared: f64,
    pub radii: Vec<f64>,
    /// Decay indicator at the fitted `r*`, evaluated at the smallest radius.
    pub indicator_value: f64,
    /// No mass was found near the origin; `r_star` holds [`R_STAR_CAP`].
    pub unbounded: bool,
}

/// Least-squares slope of `log S(ρ)` against `log ρ`, mapped to `r* = (m−3)/2`.
///
/// With `radii = None` the source's default schedule is used.
pub fn estimate_decay_character(
    source: &impl BallSpectrum,
    radii: Option<&[f64]>,
) -> Result<DecayEstimate> {
    let requested = radii.map_or_else(|| source.default_radii(), <[f64]>::to_vec);
    let radii = source.admissible_radii(&requested);
    if radii.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "need at least 5 usable radii, have {}",
            radii.len()
        )));
    }
    let hi = radii.iter().copied().fold(f64::MIN, f64::max);
    let lo = radii.iter().copied().fold(f64::MAX, f64::min);
    if source.needs_decade() && hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::InsufficientData(format!(
            "radii span [{lo:.3e}, {hi:.3e}] covers less than one decade"
        )));
    }
    let masses = radii
        .iter()
        .map(|&r| source.ball_integral(r))
        .collect::<Result<Vec<_>>>()?;
    let smallest = radii
        .iter()
        .zip(&masses)
        .min_by(|a, b| a.0.total_cmp(b.0))
        .map(|(_, m)| *m)
        .expect("radii is non-empty");
    if smallest <= 0.0 {
        return Ok(DecayEstimate {
            r_star: R_STAR_CAP,
            slope: f64::INFINITY,
            residual: 0.0,
            r_squared: 1.0,
            radii,
            indicator_value: 0.0,
            unbounded: true,
        });
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = masses.iter().map(|m| m.ln()).collect();
    let line = crate::fit::least_squares(&xs, &ys);
    let r_star = (line.slope - 3.0) / 2.0;
    if line.rms_residual > RESIDUAL_THRESHOLD {
        return Err(Error::IllDefinedCharacter {
            residual: line.rms_residual,
            threshold: RESIDUAL_THRESHOLD,
        });
    }
    if r_star <= -1.5 {
        return Err(Error::BelowLowerLimit { r_star });
    }
    Ok(DecayEstimate {
        r_star,
        slope: line.slope,
        residual: line.rms_residual,
        r_squared: line.r_squared,
        indicator_value: lo.powf(-2.0 * r_star - 3.0) * smallest,
        radii,
        unbounded: false,
    })
}

/// Random solenoidal field with `|û(ξ)| ∝ |ξ|^{r*} e^{−|ξ|²}`, rescaled so
/// that `‖u‖_{Ḣ^{1/2}} = amplitude`.
///
/// Each mode points along a seeded random direction in `ξ^⊥` with a seeded
/// random phase; the mirror mode holds the conjugate.
pub fn synthesize_with_character(
    r_star: f64,
    grid: Grid,
    seed: u64,
    amplitude: f64,
) -> Result<SpectralField> {
    if !(r_star > -1.5) {
        return Err(Error::Domain(format!(
            "decay character must exceed −3/2, got {r_star}"
        )));
    }
    synthesize_power(r_star, grid, seed, amplitude)
}

/// Like [`synthesize_with_character`] but parametrised by the character
/// `q*` of `Λ^{1/2}u`, i.e. `|û| ∝ |ξ|^{q*−1/2} e^{−|ξ|²}`, valid for
/// `q* > −3/2`.
pub fn synthesize_with_hhalf_character(
    q_star: f64,
    grid: Grid,
    seed: u64,
    amplitude: f64,
) -> Result<SpectralField> {
    if !(q_star > -1.5) {
        return Err(Error::Domain(format!(
            "Ḣ^{{1/2}} decay character must exceed −3/2, got {q_star}"
        )));
    }
    synthesize_power(q_star - 0.5, grid, seed, amplitude)
}

fn synthesize_power(exponent: f64, grid: Grid, seed: u64, amplitude: f64) -> Result<SpectralField> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::Domain(format!(
            "amplitude must be positive, got {amplitude}"
        )));
    }
    grid.validate()?;
    let table = mode_table(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = SpectralField::zeros(grid);
    for flat in 0..grid.len() {
        let mirror = grid.mirror(flat);
        let k2 = table.k2[flat];
        if mirror < flat || k2 == 0.0 || !table.retained[flat] {
            continue;
        }
        let xi = table.xi[flat];
        let k = k2.sqrt();
        let (e1, e2) = transverse_basis(xi, k);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let psi: f64 = rng.gen_range(0.0..2.0 * PI);
        let mag = k.powf(exponent) * (-k2).exp();
        let phase = Complex64::from_polar(mag, psi);
        let (s, c) = phi.sin_cos();
        let v = [0, 1, 2].map(|i| phase * (c * e1[i] + s * e2[i]));
        u.set_mode(flat, v);
        u.set_mode(mirror, v.map(|z| z.conj()));
    }
    let norm = sobolev_seminorm_sq(&u, 0.5).sqrt();
    if !(norm > 0.0) {
        return Err(Error::Domain(
            "grid has no retained nonzero modes to populate".to_string(),
        ));
    }
    u.scale(amplitude / norm);
    Ok(u)
}

/// Orthonormal basis of the plane perpendicular to `ξ`.
pub(crate) fn transverse_basis(xi: [f64; 3], k: f64) -> ([f64; 3], [f64; 3]) {
    let n = xi.map(|x| x / k);
    // cross with the coordinate axis least aligned with ξ
    let axis = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() <= n[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize(cross(n, axis));
    let e2 = cross(n, e1);
    (e1, e2)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / n)
}

/// `‖e^{tΔ}u₀‖²_{Ḣ^s} = 4π ∫₀^∞ ρ^{2s+2} e^{−2tρ²} a(ρ)² dρ`.
pub fn continuum_linear_norm(profile: &RadialProfile, s: f64, t: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("s must be ≥ 0, got {s}")));
    }
    let q = profile.weighted_mass(s, t, f64::INFINITY, QUADRATURE_TOLERANCE * 0.1)?;
    Ok(q.value)
}
