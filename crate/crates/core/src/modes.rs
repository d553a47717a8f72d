//! Per-grid lookup tables shared by the per-mode kernels.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::grid::Grid;

/// Wavevectors and masks for every lattice mode, in storage order.
#[derive(Debug)]
pub(crate) struct ModeTable {
    pub xi: Vec<[f64; 3]>,
    pub k2: Vec<f64>,
    /// `|ξ|`.
    pub k: Vec<f64>,
    /// False on the Nyquist planes.
    pub retained: Vec<bool>,
    /// True where the 2/3 rule keeps the mode.
    pub kept: Vec<bool>,
}

impl ModeTable {
    fn build(grid: Grid) -> Self {
        let len = grid.len();
        let mut xi = Vec::with_capacity(len);
        grid.for_each_mode(|_, k| xi.push(k));
        let k2: Vec<f64> = xi
            .iter()
            .map(|k| k[0] * k[0] + k[1] * k[1] + k[2] * k[2])
            .collect();
        let k = k2.iter().map(|v| v.sqrt()).collect();
        let retained = grid.nyquist_mask().into_iter().map(|m| !m).collect();
        // compare in index units so the cutoff is exact
        let cut = grid.n as f64 / 3.0;
        let d = grid.spacing();
        let kept = xi
            .iter()
            .map(|k| k.iter().all(|c| (c / d).abs() <= cut))
            .collect();
        Self {
            xi,
            k2,
            k,
            retained,
            kept,
        }
    }
}

type Cache = Mutex<HashMap<(usize, u64), Arc<ModeTable>>>;

pub(crate) fn mode_table(grid: Grid) -> Arc<ModeTable> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    Arc::clone(
        map.entry((grid.n, grid.box_length.to_bits()))
            .or_insert_with(|| Arc::new(ModeTable::build(grid))),
    )
}
