//! Periodic-box geometry and the index/wavevector correspondence.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cubic periodic box of edge `box_length` sampled with `n` points per axis.
///
/// Lattice index `k` on an axis corresponds to the wavenumber `Δξ·k` for
/// `k ≤ n/2` and `Δξ·(k − n)` otherwise, with `Δξ = 2π/L`. Flat storage is
/// row-major with the third axis fastest.
///
/// Modes with any index component equal to `n/2` (the Nyquist planes) have
/// no signed partner on the lattice. They are excluded from the *retained*
/// lattice: projection-type operators annihilate them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n: usize,
    pub box_length: f64,
}

impl Grid {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::Grid(format!("n must be even and >= 8, got {n}")));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::Grid(format!(
                "box length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self { n, box_length })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.n, self.box_length).map(|_| ())
    }

    /// Mode spacing `Δξ = 2π/L`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Quadrature weight `(Δξ)³` of one lattice mode.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Physical grid spacing `L/n`.
    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Number of lattice points, `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn flat(&self, index: [usize; 3]) -> usize {
        (index[0] * self.n + index[1]) * self.n + index[2]
    }

    pub fn unflat(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        [flat / (n * n), (flat / n) % n, flat % n]
    }

    /// Signed integer wavenumber of a single-axis index.
    pub fn signed_index(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Signed wavevector of a lattice index.
    pub fn wavevector(&self, index: [usize; 3]) -> Result<[f64; 3]> {
        if index.iter().any(|&k| k >= self.n) {
            return Err(Error::Index { index, n: self.n });
        }
        Ok(self.wavevector_unchecked(index))
    }

    pub(crate) fn wavevector_unchecked(&self, index: [usize; 3]) -> [f64; 3] {
        let d = self.spacing();
        [
            d * self.signed_index(index[0]) as f64,
            d * self.signed_index(index[1]) as f64,
            d * self.signed_index(index[2]) as f64,
        ]
    }

    /// Per-axis wavenumbers, indexed by lattice position.
    pub fn axis_wavenumbers(&self) -> Vec<f64> {
        let d = self.spacing();
        (0..self.n)
            .map(|k| d * self.signed_index(k) as f64)
            .collect()
    }

    /// Flat index of the mode `−k` (index negation modulo `n`).
    pub fn mirror(&self, flat: usize) -> usize {
        let n = self.n;
        let [i, j, k] = self.unflat(flat);
        self.flat([(n - i) % n, (n - j) % n, (n - k) % n])
    }

    pub fn is_nyquist(&self, index: [usize; 3]) -> bool {
        index.contains(&(self.n / 2))
    }

    /// Largest `|ξ|` on the lattice, `√3·(n/2)·Δξ`.
    pub fn max_wavenumber(&self) -> f64 {
        3f64.sqrt() * (self.n / 2) as f64 * self.spacing()
    }

    /// Largest per-axis wavenumber kept by the 2/3 rule, `(n/3)·Δξ`.
    pub fn dealias_cutoff(&self) -> f64 {
        self.n as f64 / 3.0 * self.spacing()
    }

    /// Calls `f(flat, ξ)` for every lattice mode, in storage order.
    pub fn for_each_mode(&self, mut f: impl FnMut(usize, [f64; 3])) {
        let k = self.axis_wavenumbers();
        let mut flat = 0;
        for &kx in &k {
            for &ky in &k {
                for &kz in &k {
                    f(flat, [kx, ky, kz]);
                    flat += 1;
                }
            }
        }
    }

    /// Boolean mask of Nyquist-plane modes, in storage order.
    pub fn nyquist_mask(&self) -> Vec<bool> {
        let h = self.n / 2;
        let mut mask = Vec::with_capacity(self.len());
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    mask.push(i == h || j == h || k == h);
                }
            }
        }
        mask
    }
}
