//! Pseudo-spectral evaluation of `−ℙ∇·(u⊗u)`.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fft::with_transformer;
use crate::field::{SpectralField, CHUNK};
use crate::grid::Grid;
use crate::modes::mode_table;
use crate::spectral::project_mode;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Scratch arrays reused across evaluations on one thread.
struct Workspace {
    velocity: [Vec<f64>; 3],
    left: Vec<f64>,
    right: Vec<f64>,
    /// Spectra of `u₁u₁, u₂u₂, u₃u₃, u₁u₂, u₁u₃, u₂u₃`.
    products: [Vec<Complex64>; 6],
}

impl Workspace {
    fn new(len: usize) -> Self {
        Self {
            velocity: std::array::from_fn(|_| vec![0.0; len]),
            left: vec![0.0; len],
            right: vec![0.0; len],
            products: std::array::from_fn(|_| vec![ZERO; len]),
        }
    }
}

thread_local! {
    static WORKSPACES: RefCell<HashMap<(usize, u64), Workspace>> = RefCell::new(HashMap::new());
}

fn with_workspace<R>(grid: Grid, f: impl FnOnce(&mut Workspace) -> R) -> R {
    let key = (grid.n, grid.box_length.to_bits());
    let mut ws = WORKSPACES
        .with(|c| c.borrow_mut().remove(&key))
        .unwrap_or_else(|| Workspace::new(grid.len()));
    let out = f(&mut ws);
    WORKSPACES.with(|c| {
        c.borrow_mut().insert(key, ws);
    });
    out
}

type ProductBatch<'a> = (
    &'a [f64],
    &'a [f64],
    &'a [f64],
    &'a [f64],
    &'a mut Vec<Complex64>,
    &'a mut Vec<Complex64>,
);

/// `−ℙ∇·(u⊗u)` for a real (Hermitian) spectral field.
///
/// Two inverse FFTs bring the three velocity components to physical space,
/// the six distinct products `u_iu_j` are formed and returned to spectral
/// space with three packed forward FFTs, and the divergence
/// `iξ_j (u_iu_j)^` is projected. With `dealias` the 2/3 rule is applied
/// to the result. The zero mode and the Nyquist planes are always zero.
pub fn nonlinear_term(u: &SpectralField, dealias: bool) -> SpectralField {
    let grid = u.grid();
    let table = mode_table(grid);
    let mut out = SpectralField::zeros(grid);
    with_workspace(grid, |ws| {
        with_transformer(grid, |t| {
            let [v0, v1, v2] = &mut ws.velocity;
            t.pair_to_physical(u.component(0), Some(u.component(1)), v0, Some(v1));
            t.pair_to_physical(u.component(2), None, v2, None);

            let [v0, v1, v2] = &ws.velocity;
            let [p11, p22, p33, p12, p13, p23] = &mut ws.products;
            let batches: [ProductBatch; 3] = [
                (v0, v0, v1, v1, p11, p22),
                (v2, v2, v0, v1, p33, p12),
                (v0, v2, v1, v2, p13, p23),
            ];
            for (a1, b1, a2, b2, out1, out2) in batches {
                ws.left
                    .par_chunks_mut(CHUNK)
                    .zip(ws.right.par_chunks_mut(CHUNK))
                    .enumerate()
                    .for_each(|(c, (l, r))| {
                        let base = c * CHUNK;
                        for i in 0..l.len() {
                            l[i] = a1[base + i] * b1[base + i];
                            r[i] = a2[base + i] * b2[base + i];
                        }
                    });
                t.pair_to_spectral(&ws.left, Some(&ws.right), out1, Some(out2));
            }
        });

        let [p11, p22, p33, p12, p13, p23] = &ws.products;
        out.par_update(|flat, w| {
            let k2 = table.k2[flat];
            if k2 == 0.0 || !table.retained[flat] || (dealias && !table.kept[flat]) {
                return;
            }
            let xi = table.xi[flat];
            // −i ξ_j (u_iu_j)^, then projected
            let div = [
                p11[flat] * xi[0] + p12[flat] * xi[1] + p13[flat] * xi[2],
                p12[flat] * xi[0] + p22[flat] * xi[1] + p23[flat] * xi[2],
                p13[flat] * xi[0] + p23[flat] * xi[1] + p33[flat] * xi[2],
            ]
            .map(|z| Complex64::new(z.im, -z.re));
            *w = project_mode(xi, k2, div);
        });
    });
    out
}
