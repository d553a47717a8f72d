//! Fourier-splitting diagnostics: shrinking ball radii `g(t)`, the share of
//! Ḣ^s energy inside the ball, and the empirical constant of the bilinear
//! estimate `|⟨u, ℙ∇·(u⊗u)⟩_{Ḣ^{1/2}}| ≤ C ‖u‖_{Ḣ^{1/2}} ‖∇u‖²_{Ḣ^{1/2}}`.

use std::f64::consts::{E, FRAC_PI_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::character::transverse_basis;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::solver::nonlinear_term;
use crate::spectral::{sobolev_ball_sq, sobolev_inner, sobolev_seminorm_sq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleVariant {
    /// `g²(t) = (3/2) / ((e+t) ln(e+t))`.
    LogSchedule,
    /// `g²(t) = (α/2) / (1+t)`.
    PowerSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingSchedule {
    pub variant: ScheduleVariant,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    4.0
}

impl SplittingSchedule {
    pub fn log() -> Self {
        Self {
            variant: ScheduleVariant::LogSchedule,
            alpha: default_alpha(),
        }
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("α must be positive, got {alpha}")));
        }
        Ok(Self {
            variant: ScheduleVariant::PowerSchedule,
            alpha,
        })
    }

    pub fn radius(&self, t: f64) -> f64 {
        splitting_radius(t, *self)
    }
}

/// Ball radius `g(t)` of the selected schedule.
pub fn splitting_radius(t: f64, schedule: SplittingSchedule) -> f64 {
    let t = t.max(0.0);
    let g2 = match schedule.variant {
        ScheduleVariant::LogSchedule => 1.5 / ((E + t) * (E + t).ln()),
        ScheduleVariant::PowerSchedule => 0.5 * schedule.alpha / (1.0 + t),
    };
    g2.sqrt()
}

/// Fraction of the Ḣ^s energy carried by modes with `|ξ| ≤ g`; 0 for the zero field.
pub fn low_mode_fraction(u: &SpectralField, s: f64, g: f64) -> f64 {
    let total = sobolev_seminorm_sq(u, s);
    if total == 0.0 {
        return 0.0;
    }
    (sobolev_ball_sq(u, s, g) / total).clamp(0.0, 1.0)
}

/// `⟨Λ^{1/2}u, Λ^{1/2}ℙ∇·(u⊗u)⟩ / (‖u‖_{Ḣ^{1/2}} ‖∇u‖²_{Ḣ^{1/2}})` with a
/// dealiased nonlinearity.
pub fn bilinear_ratio(u: &SpectralField) -> Result<f64> {
    let hhalf = sobolev_seminorm_sq(u, 0.5);
    let h3half = sobolev_seminorm_sq(u, 1.5);
    if hhalf == 0.0 || h3half == 0.0 {
        return Err(Error::Domain(
            "bilinear ratio is undefined for the zero field".to_string(),
        ));
    }
    let n = nonlinear_term(u, true);
    let transfer = sobolev_inner(u, &n, 0.5)?;
    Ok(ratio_from_parts(transfer, hhalf, h3half))
}

/// Ratio from precomputed pieces; `transfer = ⟨u, −ℙ∇·(u⊗u)⟩_{Ḣ^{1/2}}`.
pub(crate) fn ratio_from_parts(transfer: f64, hhalf_sq: f64, h3half_sq: f64) -> f64 {
    if hhalf_sq == 0.0 || h3half_sq == 0.0 {
        return 0.0;
    }
    -transfer / (hhalf_sq.sqrt() * h3half_sq)
}

/// Lattice vectors `k, p, q = −k−p` of the elementary triad.
pub const ELEMENTARY_TRIAD: [[i64; 3]; 3] = [[1, 0, 0], [0, 1, 0], [-1, -1, 0]];

/// A random field supported on the elementary triad.
///
/// Each of the three modes is a helical wave `a (e₁ ± i e₂)` with a random
/// helicity sign, an amplitude uniform in `[0, 1)` and a phase drawn from
/// the quarter turns `{0, π/2, π, 3π/2}`.
pub fn random_triad_field(grid: Grid, rng: &mut impl Rng) -> Result<SpectralField> {
    let mut u = SpectralField::zeros(grid);
    let n = grid.n as i64;
    for m in ELEMENTARY_TRIAD {
        let index = m.map(|x| x.rem_euclid(n) as usize);
        let xi = grid.wavevector(index)?;
        let k = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (e1, e2) = transverse_basis(xi, k);
        let helicity = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let amplitude = Complex64::from_polar(
            rng.gen_range(0.0..1.0),
            FRAC_PI_2 * f64::from(rng.gen_range(0..4u8)),
        );
        let v = [0, 1, 2].map(|i| amplitude * Complex64::new(e1[i], helicity * e2[i]));
        u.set_hermitian_pair(index, v)?;
    }
    Ok(u)
}

/// Largest `|bilinear_ratio|` over `count` seeded random triad fields.
///
/// Fields whose ratio is undefined (a vanishing norm) are skipped.
pub fn empirical_ratio_sup(grid: Grid, count: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = 0.0f64;
    for _ in 0..count {
        let u = random_triad_field(grid, &mut rng)?;
        if let Ok(r) = bilinear_ratio(&u) {
            sup = sup.max(r.abs());
        }
    }
    Ok(sup)
}
