use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::propagator::{RotationParams, SemigroupFactors};
use crate::spectral::sobolev_seminorm_sq;

use super::nonlinear_term;

/// Final iterate and the successive-iterate distances.
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub solution: SpectralField,
    /// `max_i ‖u^{k}(t_i) − u^{k−1}(t_i)‖_{Ḣ^{1/2}}` for `k = 1, 2, …`.
    pub distances: Vec<f64>,
    pub iterations: usize,
}

/// Picard iteration of the mild-solution map
/// `𝒢(u)(t) = e^{tM}u₀ + ∫₀ᵗ e^{(t−s)M} N(u(s)) ds` on `quad_points` equal
/// intervals of `[0, T]`.
///
/// The Duhamel integral at `t_i` uses composite Simpson weights, finishing
/// with a 3/8 panel when `i` is odd (`i = 1` falls back to the trapezoid).
/// Iteration stops after `k_max` sweeps or once the update reaches
/// round-off; three consecutive growing distances above round-off raise
/// [`Error::NonContraction`].
pub fn picard_solve(
    u0: &SpectralField,
    t_final: f64,
    k_max: usize,
    quad_points: usize,
    params: RotationParams,
) -> Result<PicardOutcome> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::Domain(format!(
            "horizon must be positive, got {t_final}"
        )));
    }
    if quad_points < 2 {
        return Err(Error::Domain(
            "need at least 2 quadrature intervals".to_string(),
        ));
    }
    u0.require_divergence_free()?;
    let m = quad_points;
    let grid = u0.grid();
    let time = |i: usize| {
        if i == m {
            t_final
        } else {
            t_final * i as f64 / m as f64
        }
    };
    let h = t_final / m as f64;
    let factors = (0..=m)
        .map(|i| SemigroupFactors::new(grid, time(i), params))
        .collect::<Result<Vec<_>>>()?;

    let linear: Vec<SpectralField> = factors.iter().map(|f| f.apply(u0)).collect();
    let mut iterate = linear.clone();
    let mut distances = Vec::new();
    let scale = sobolev_seminorm_sq(u0, 0.5).sqrt();
    let mut rising = 0;

    for _ in 0..k_max {
        let n_vals: Vec<SpectralField> = iterate.iter().map(|u| nonlinear_term(u, true)).collect();
        let mut next = Vec::with_capacity(m + 1);
        let mut dist = 0.0f64;
        for i in 0..=m {
            let mut v = linear[i].clone();
            for (j, w) in duhamel_weights(i).into_iter().enumerate() {
                if w != 0.0 {
                    v.axpy(w * h, &factors[i - j].apply(&n_vals[j]))?;
                }
            }
            if !v.is_finite() {
                return Err(Error::BlowUp { time: time(i) });
            }
            dist = dist.max(sobolev_seminorm_sq(&v.sub(&iterate[i])?, 0.5).sqrt());
            next.push(v);
        }
        iterate = next;
        let floor = 1e-13 * scale;
        if distances
            .last()
            .is_some_and(|&prev| dist > prev && dist > floor)
        {
            rising += 1;
        } else {
            rising = 0;
        }
        distances.push(dist);
        if rising >= 3 {
            return Err(Error::NonContraction { distances });
        }
        if dist <= 1e-15 * scale {
            break;
        }
    }
    Ok(PicardOutcome {
        solution: iterate.pop().expect("time grid is non-empty"),
        iterations: distances.len(),
        distances,
    })
}

/// Weights `w_j` (before the factor `h`) approximating `∫₀^{t_i} f` from `f(t_0..t_i)`.
fn duhamel_weights(i: usize) -> Vec<f64> {
    let mut w = vec![0.0; i + 1];
    match i {
        0 => {}
        1 => {
            w[0] = 0.5;
            w[1] = 0.5;
        }
        _ => {
            let simpson_end = if i.is_multiple_of(2) { i } else { i - 3 };
            for k in (0..simpson_end).step_by(2) {
                w[k] += 1.0 / 3.0;
                w[k + 1] += 4.0 / 3.0;
                w[k + 2] += 1.0 / 3.0;
            }
            if i % 2 == 1 {
                let s = i - 3;
                for (o, c) in [3.0, 9.0, 9.0, 3.0].into_iter().enumerate() {
                    w[s + o] += c / 8.0;
                }
            }
        }
    }
    w
}
