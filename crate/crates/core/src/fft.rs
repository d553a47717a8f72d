//! Three-dimensional FFTs on the cubic lattice.
//!
//! Normalization: spectral amplitudes approximate the unitary continuum
//! Fourier transform
//!
//! ```text
//! û(ξ) = (2π)^{-3/2} ∫ u(x) e^{-i x·ξ} dx ≈ (Δx)³ (2π)^{-3/2} Σ_x u(x) e^{-i x·ξ}
//! u(x) = (2π)^{-3/2} ∫ û(ξ) e^{ i x·ξ} dξ ≈ (Δξ)³ (2π)^{-3/2} Σ_ξ û(ξ) e^{ i x·ξ}
//! ```
//!
//! with `x = Δx·(i, j, k)`. Under this convention Plancherel reads
//! `Σ_ξ |û|² (Δξ)³ = Σ_x |u|² (Δx)³` exactly, so every spectral norm carries
//! the `(Δξ)³` quadrature weight.
//!
//! Real fields are transformed two at a time by packing them into the real
//! and imaginary parts of one complex array.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid;

/// Planned forward and inverse 3D transforms for one lattice size.
pub struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Columns gathered per batch when transforming a strided axis.
const TILE: usize = 16;

impl Fft3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized forward DFT, in place.
    pub fn forward(&mut self, data: &mut [Complex64]) {
        run(data, self.n, &*self.forward);
    }

    /// Unnormalized inverse DFT, in place.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        run(data, self.n, &*self.inverse);
    }
}

fn run(data: &mut [Complex64], n: usize, plan: &dyn Fft<f64>) {
    assert_eq!(data.len(), n * n * n);
    let scratch_len = plan.get_inplace_scratch_len();
    let zero = Complex64::new(0.0, 0.0);
    // third axis: contiguous rows
    data.par_chunks_mut(n * n).for_each_init(
        || vec![zero; scratch_len],
        |scratch, plane| plan.process_with_scratch(plane, scratch),
    );
    // second axis: stride n inside each plane
    data.par_chunks_mut(n * n).for_each_init(
        || (vec![zero; TILE * n], vec![zero; scratch_len]),
        |(tile, scratch), plane| strided_axis(plane, n, n, plan, tile, scratch),
    );
    // first axis: stride n² across the whole array
    let mut tile = vec![zero; TILE * n];
    let mut scratch = vec![zero; scratch_len];
    strided_axis(data, n, n * n, plan, &mut tile, &mut scratch);
}

/// Transforms `block[a·stride + c]` along `a` for every column `c < stride`,
/// gathering `TILE` neighbouring columns at a time into contiguous rows.
fn strided_axis(
    block: &mut [Complex64],
    n: usize,
    stride: usize,
    plan: &dyn Fft<f64>,
    tile: &mut [Complex64],
    scratch: &mut [Complex64],
) {
    for c0 in (0..stride).step_by(TILE) {
        let width = TILE.min(stride - c0);
        let rows = &mut tile[..width * n];
        for a in 0..n {
            let src = &block[a * stride + c0..a * stride + c0 + width];
            for (cc, v) in src.iter().enumerate() {
                rows[cc * n + a] = *v;
            }
        }
        plan.process_with_scratch(rows, scratch);
        for a in 0..n {
            let dst = &mut block[a * stride + c0..a * stride + c0 + width];
            for (cc, v) in dst.iter_mut().enumerate() {
                *v = rows[cc * n + a];
            }
        }
    }
}

/// Normalized real-field transforms for one grid.
pub struct Transformer {
    grid: Grid,
    fft: Fft3,
    work: Vec<Complex64>,
    mirror: Vec<usize>,
}

impl Transformer {
    pub fn new(grid: Grid) -> Self {
        Self {
            grid,
            fft: Fft3::new(grid.n),
            work: vec![Complex64::new(0.0, 0.0); grid.len()],
            mirror: (0..grid.len()).map(|f| grid.mirror(f)).collect(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn forward_scale(&self) -> f64 {
        self.grid.dx().powi(3) / (2.0 * PI).powf(1.5)
    }

    fn inverse_scale(&self) -> f64 {
        self.grid.cell_volume() / (2.0 * PI).powf(1.5)
    }

    /// Inverse transform of two Hermitian spectra in a single complex FFT.
    pub fn pair_to_physical(
        &mut self,
        a: &[Complex64],
        b: Option<&[Complex64]>,
        out_a: &mut [f64],
        out_b: Option<&mut [f64]>,
    ) {
        let scale = self.inverse_scale();
        let i = Complex64::new(0.0, 1.0);
        match b {
            Some(b) => self
                .work
                .iter_mut()
                .zip(a.iter().zip(b))
                .for_each(|(w, (&x, &y))| *w = x + i * y),
            None => self.work.copy_from_slice(a),
        }
        self.fft.inverse(&mut self.work);
        for (o, w) in out_a.iter_mut().zip(&self.work) {
            *o = w.re * scale;
        }
        if let Some(out_b) = out_b {
            for (o, w) in out_b.iter_mut().zip(&self.work) {
                *o = w.im * scale;
            }
        }
    }

    /// Forward transform of two real arrays in a single complex FFT.
    pub fn pair_to_spectral(
        &mut self,
        p: &[f64],
        q: Option<&[f64]>,
        out_p: &mut [Complex64],
        out_q: Option<&mut [Complex64]>,
    ) {
        let scale = self.forward_scale();
        match q {
            Some(q) => self
                .work
                .iter_mut()
                .zip(p.iter().zip(q))
                .for_each(|(w, (&x, &y))| *w = Complex64::new(x, y)),
            None => self
                .work
                .iter_mut()
                .zip(p)
                .for_each(|(w, &x)| *w = Complex64::new(x, 0.0)),
        }
        self.fft.forward(&mut self.work);
        if q.is_none() {
            for (o, w) in out_p.iter_mut().zip(&self.work) {
                *o = w * scale;
            }
            return;
        }
        let half = 0.5 * scale;
        let out_q = out_q.expect("second output required when packing two inputs");
        for (flat, &m) in self.mirror.iter().enumerate() {
            let z = self.work[flat];
            let zm = self.work[m].conj();
            out_p[flat] = (z + zm) * half;
            // (z − zm) / (2i)
            let d = z - zm;
            out_q[flat] = Complex64::new(d.im, -d.re) * half;
        }
    }

    /// Unpacked complex inverse transform (no Hermitian assumption).
    pub fn complex_to_physical(&mut self, a: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(a);
        self.fft.inverse(out);
        let scale = self.inverse_scale();
        out.iter_mut().for_each(|v| *v *= scale);
    }
}

thread_local! {
    static TRANSFORMERS: RefCell<HashMap<(usize, u64), Transformer>> = RefCell::new(HashMap::new());
}

/// Runs `f` with a cached [`Transformer`] for `grid` on the current thread.
///
/// The transformer is checked out of the cache while `f` runs, so a nested
/// call on the same thread (possible when rayon work-steals into another
/// solver) builds a fresh one instead of aliasing the cached buffers.
pub fn with_transformer<R>(grid: Grid, f: impl FnOnce(&mut Transformer) -> R) -> R {
    let key = (grid.n, grid.box_length.to_bits());
    let mut t = TRANSFORMERS
        .with(|cell| cell.borrow_mut().remove(&key))
        .unwrap_or_else(|| Transformer::new(grid));
    let out = f(&mut t);
    TRANSFORMERS.with(|cell| {
        cell.borrow_mut().insert(key, t);
    });
    out
}
