//! Fourier multipliers on spectral vector fields: Leray projection, Riesz
//! potentials, homogeneous Sobolev norms and 2/3-rule dealiasing.
//!
//! All norms use the quadrature weight `(Δξ)³`, so
//! `sobolev_seminorm_sq(u, s) ≈ ∫ |ξ|^{2s} |û(ξ)|² dξ`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::field::{SpectralField, CHUNK};
use crate::modes::mode_table;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Applies `(δ_jk − ξ_jξ_k/|ξ|²)` mode by mode.
///
/// The zero mode and the Nyquist planes are set to zero.
pub fn leray_project(u: &SpectralField) -> SpectralField {
    let table = mode_table(u.grid());
    u.par_map(|flat, v| {
        let k2 = table.k2[flat];
        if k2 == 0.0 || !table.retained[flat] {
            return [ZERO; 3];
        }
        project_mode(table.xi[flat], k2, v)
    })
}

#[inline]
pub(crate) fn project_mode(xi: [f64; 3], k2: f64, v: [Complex64; 3]) -> [Complex64; 3] {
    let dot = (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]) / k2;
    [v[0] - dot * xi[0], v[1] - dot * xi[1], v[2] - dot * xi[2]]
}

/// Multiplies every nonzero mode by `|ξ|^s`; the zero mode is set to zero.
pub fn riesz_apply(u: &SpectralField, s: f64) -> SpectralField {
    let table = mode_table(u.grid());
    u.par_map(|flat, v| {
        let k2 = table.k2[flat];
        if k2 == 0.0 {
            return [ZERO; 3];
        }
        let m = k2.powf(0.5 * s);
        [v[0] * m, v[1] * m, v[2] * m]
    })
}

/// `Σ_ξ |ξ|^{2s} |û(ξ)|² (Δξ)³`. The zero mode contributes only when `s = 0`.
pub fn sobolev_seminorm_sq(u: &SpectralField, s: f64) -> f64 {
    weighted_sum(
        u,
        s,
        |v| v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr(),
        None,
    )
}

/// Real part of the Ḣ^s inner product `Σ |ξ|^{2s} û·conj(v̂) (Δξ)³`.
pub fn sobolev_inner(u: &SpectralField, v: &SpectralField, s: f64) -> Result<f64> {
    u.check_grid(v)?;
    let table = mode_table(u.grid());
    let sum: f64 = (0..u.grid().len())
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(|flat| {
            let k2 = table.k2[flat];
            if k2 == 0.0 && s != 0.0 {
                return 0.0;
            }
            let a = u.mode(flat);
            let b = v.mode(flat);
            let dot = (a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()).re;
            weight(k2, table.k[flat], s) * dot
        })
        .sum();
    Ok(sum * u.grid().cell_volume())
}

/// Ḣ^s mass restricted to `|ξ| ≤ radius`.
pub fn sobolev_ball_sq(u: &SpectralField, s: f64, radius: f64) -> f64 {
    weighted_sum(
        u,
        s,
        |v| v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr(),
        Some(radius * radius),
    )
}

fn weighted_sum(
    u: &SpectralField,
    s: f64,
    density: impl Fn(&[Complex64; 3]) -> f64 + Sync,
    k2_max: Option<f64>,
) -> f64 {
    let table = mode_table(u.grid());
    let sum: f64 = (0..u.grid().len())
        .into_par_iter()
        .with_min_len(CHUNK)
        .map(|flat| {
            let k2 = table.k2[flat];
            if (k2 == 0.0 && s != 0.0) || k2_max.is_some_and(|m| k2 > m) {
                return 0.0;
            }
            weight(k2, table.k[flat], s) * density(&u.mode(flat))
        })
        .sum();
    sum * u.grid().cell_volume()
}

/// `|ξ|^{2s}` with the common half-integer cases spelled out.
#[inline]
fn weight(k2: f64, k: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if s == 0.5 {
        k
    } else if s == 1.0 {
        k2
    } else if s == 1.5 {
        k2 * k
    } else {
        k2.powf(s)
    }
}

/// Zeros every mode with some `|ξ_i| > (n/3)Δξ`.
pub fn dealias(u: &SpectralField) -> SpectralField {
    let table = mode_table(u.grid());
    u.par_map(|flat, v| if table.kept[flat] { v } else { [ZERO; 3] })
}

pub(crate) fn dealias_in_place(u: &mut SpectralField) {
    let table = mode_table(u.grid());
    u.par_update(|flat, v| {
        if !table.kept[flat] {
            *v = [ZERO; 3];
        }
    });
}
