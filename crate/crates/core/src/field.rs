//! Vector fields on the periodic lattice, in spectral and physical form.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::with_transformer;
use crate::grid::Grid;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Modes handled per parallel work item.
pub(crate) const CHUNK: usize = 4096;

/// Three complex amplitudes per lattice wavevector; component `j` holds `û_j(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    comps: [Vec<Complex64>; 3],
}

/// Three real samples per physical grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    comps: [Vec<f64>; 3],
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        let len = grid.len();
        Self {
            grid,
            comps: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]],
        }
    }

    pub fn from_components(grid: Grid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Precondition(format!(
                "component arrays must have length n³ = {}",
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, j: usize) -> &[Complex64] {
        &self.comps[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.comps[j]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn into_components(self) -> [Vec<Complex64>; 3] {
        self.comps
    }

    pub fn mode(&self, flat: usize) -> [Complex64; 3] {
        [
            self.comps[0][flat],
            self.comps[1][flat],
            self.comps[2][flat],
        ]
    }

    pub fn set_mode(&mut self, flat: usize, v: [Complex64; 3]) {
        for (comp, x) in self.comps.iter_mut().zip(v) {
            comp[flat] = x;
        }
    }

    pub fn mode_at(&self, index: [usize; 3]) -> Result<[Complex64; 3]> {
        self.grid.wavevector(index)?;
        Ok(self.mode(self.grid.flat(index)))
    }

    pub fn set_mode_at(&mut self, index: [usize; 3], v: [Complex64; 3]) -> Result<()> {
        self.grid.wavevector(index)?;
        let flat = self.grid.flat(index);
        self.set_mode(flat, v);
        Ok(())
    }

    /// Sets the mode at `index` and its mirror `−index` to the conjugate.
    pub fn set_hermitian_pair(&mut self, index: [usize; 3], v: [Complex64; 3]) -> Result<()> {
        self.set_mode_at(index, v)?;
        let m = self.grid.mirror(self.grid.flat(index));
        self.set_mode(m, [v[0].conj(), v[1].conj(), v[2].conj()]);
        Ok(())
    }

    /// Returns a new field with `f(ξ, û(ξ))` applied to every mode.
    pub fn map_modes(&self, mut f: impl FnMut([f64; 3], [Complex64; 3]) -> [Complex64; 3]) -> Self {
        let mut out = Self::zeros(self.grid);
        self.grid.for_each_mode(|flat, xi| {
            out.set_mode(flat, f(xi, self.mode(flat)));
        });
        out
    }

    /// Data-parallel variant of [`map_modes`](Self::map_modes) keyed by flat index.
    pub(crate) fn par_map(
        &self,
        f: impl Fn(usize, [Complex64; 3]) -> [Complex64; 3] + Sync + Send,
    ) -> Self {
        let mut out = self.clone();
        out.par_update(|flat, v| *v = f(flat, *v));
        out
    }

    /// In-place data-parallel per-mode update.
    pub(crate) fn par_update(&mut self, f: impl Fn(usize, &mut [Complex64; 3]) + Sync + Send) {
        let [o0, o1, o2] = &mut self.comps;
        (
            o0.par_chunks_mut(CHUNK),
            o1.par_chunks_mut(CHUNK),
            o2.par_chunks_mut(CHUNK),
        )
            .into_par_iter()
            .enumerate()
            .for_each(|(chunk, (a, b, c))| {
                let base = chunk * CHUNK;
                for i in 0..a.len() {
                    let mut v = [a[i], b[i], c[i]];
                    f(base + i, &mut v);
                    a[i] = v[0];
                    b[i] = v[1];
                    c[i] = v[2];
                }
            });
    }

    pub fn scale(&mut self, c: f64) {
        for comp in &mut self.comps {
            comp.iter_mut().for_each(|v| *v *= c);
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c·other`.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        self.check_grid(other)?;
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += c * y);
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    pub(crate) fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        (0..self.grid.len())
            .map(|f| mode_norm(&self.mode(f)))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| *v == ZERO))
    }

    /// `max_ξ |û(−ξ) − conj û(ξ)| / max |û|`; zero for fields of real functions.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for flat in 0..self.grid.len() {
            let m = self.grid.mirror(flat);
            for c in &self.comps {
                worst = worst.max((c[m] - c[flat].conj()).norm());
            }
        }
        worst / scale
    }

    /// `max_ξ |ξ·û(ξ)| / (|ξ||û(ξ)|)` over nonzero retained modes.
    pub fn divergence_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        let nyq = self.grid.nyquist_mask();
        self.grid.for_each_mode(|flat, xi| {
            if nyq[flat] {
                return;
            }
            let u = self.mode(flat);
            let mag = mode_norm(&u);
            let k = norm3(xi);
            // amplitudes in the subnormal range carry no relative precision
            if k == 0.0 || mag < 1e-290 {
                return;
            }
            let dot = u[0] * xi[0] + u[1] * xi[1] + u[2] * xi[2];
            worst = worst.max(dot.norm() / (k * mag));
        });
        worst
    }

    /// Errors unless the field passes the divergence-free invariant.
    pub fn require_divergence_free(&self) -> Result<()> {
        let d = self.divergence_defect();
        if d > DIVERGENCE_TOLERANCE {
            return Err(Error::Precondition(format!(
                "field is not divergence-free (relative defect {d:.3e})"
            )));
        }
        Ok(())
    }

    /// Transforms to physical space (the field must be Hermitian).
    pub fn to_physical(&self) -> RealField {
        let grid = self.grid;
        let len = grid.len();
        let mut comps = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        with_transformer(grid, |t| {
            let [c0, c1, c2] = &mut comps;
            t.pair_to_physical(&self.comps[0], Some(&self.comps[1]), c0, Some(c1));
            t.pair_to_physical(&self.comps[2], None, c2, None);
        });
        RealField { grid, comps }
    }
}

/// Relative per-mode tolerance for the divergence-free invariant.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;

impl RealField {
    pub fn zeros(grid: Grid) -> Self {
        let len = grid.len();
        Self {
            grid,
            comps: [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
        }
    }

    pub fn from_components(grid: Grid, comps: [Vec<f64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::Precondition(format!(
                "component arrays must have length n³ = {}",
                grid.len()
            )));
        }
        Ok(Self { grid, comps })
    }

    /// Samples `f(x)` at the grid points `x = Δx·(i, j, k)`.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        let dx = grid.dx();
        for flat in 0..grid.len() {
            let [i, j, k] = grid.unflat(flat);
            let v = f([i as f64 * dx, j as f64 * dx, k as f64 * dx]);
            for (comp, x) in out.comps.iter_mut().zip(v) {
                comp[flat] = x;
            }
        }
        out
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, j: usize) -> &[f64] {
        &self.comps[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.comps[j]
    }

    /// `∫|u|² dx` by the rectangle rule (exact for trigonometric polynomials).
    pub fn l2_norm_sq(&self) -> f64 {
        let w = self.grid.dx().powi(3);
        self.comps
            .iter()
            .map(|c| c.iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            * w
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn to_spectral(&self) -> SpectralField {
        let grid = self.grid;
        let mut out = SpectralField::zeros(grid);
        with_transformer(grid, |t| {
            let [c0, c1, c2] = &mut out.comps;
            t.pair_to_spectral(&self.comps[0], Some(&self.comps[1]), c0, Some(c1));
            t.pair_to_spectral(&self.comps[2], None, c2, None);
        });
        out
    }
}

/// A field in either representation.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Spectral(SpectralField),
    Physical(RealField),
}

/// Maps a field to the other representation.
pub fn transform(field: &Field) -> Field {
    match field {
        Field::Spectral(u) => Field::Physical(u.to_physical()),
        Field::Physical(u) => Field::Spectral(u.to_spectral()),
    }
}

pub(crate) fn mode_norm(v: &[Complex64; 3]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()).sqrt()
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
