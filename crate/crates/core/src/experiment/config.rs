use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::profile::ProfileSpec;
use crate::solver::SolverConfig;

/// Pipeline selected by an [`ExperimentConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Heat flow of radial profiles evaluated by quadrature.
    LinearContinuum,
    /// Heat–Coriolis flow on the torus with the nonlinearity switched off.
    LinearLattice,
    /// Navier–Stokes (`Ω = 0`).
    NsDecay,
    /// Navier–Stokes–Coriolis at the solver's `Ω`.
    NscDecay,
    /// Navier–Stokes–Coriolis for every `Ω` in `omegas`, same initial data.
    NscOmegaSweep,
    /// Decay-character estimates only.
    CharacterEstimation,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::LinearContinuum => "linear_continuum",
            ExperimentKind::LinearLattice => "linear_lattice",
            ExperimentKind::NsDecay => "ns_decay",
            ExperimentKind::NscDecay => "nsc_decay",
            ExperimentKind::NscOmegaSweep => "nsc_omega_sweep",
            ExperimentKind::CharacterEstimation => "character_estimation",
        }
    }

    pub fn uses_solver(self) -> bool {
        matches!(
            self,
            ExperimentKind::LinearLattice
                | ExperimentKind::NsDecay
                | ExperimentKind::NscDecay
                | ExperimentKind::NscOmegaSweep
        )
    }
}

/// Random lattice data with a prescribed low-frequency power law.
///
/// Exactly one of `r_star` (character of `u₀`) and `q_star` (character of
/// `Λ^{1/2}u₀`, equal to `r* + 1/2`) must be given. The field is scaled to
/// `‖u₀‖_{Ḣ^{1/2}} = amplitude`, which defaults to the solver's budget `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

impl SyntheticSpec {
    /// Nominal L² decay character.
    pub fn r_star(&self) -> f64 {
        match (self.r_star, self.q_star) {
            (Some(r), _) => r,
            (None, Some(q)) => q - 0.5,
            (None, None) => f64::NAN,
        }
    }
}

/// Initial data of one experiment entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Profile(ProfileSpec),
    Synthetic(SyntheticSpec),
    /// A field stored with [`crate::field_file::write_field`].
    FieldFile(PathBuf),
}

/// A complete experiment description, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Report title; defaults to the kind's name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub data: Vec<DataSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    /// Lattice for synthetic data in `character_estimation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omegas: Vec<f64>,
    /// Sobolev orders `s` fitted by `linear_continuum`.
    #[serde(default = "default_orders")]
    pub orders: Vec<f64>,
    /// Sample count of continuum curves (log-spaced over the window).
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    /// Overrides the kind's default verdict tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_orders() -> Vec<f64> {
    vec![0.0, 0.5]
}

fn default_samples() -> usize {
    64
}

/// Verdict tolerance for quadrature-based fits.
pub const CONTINUUM_TOLERANCE: f64 = 0.05;
/// Verdict tolerance for fits of torus simulations.
pub const TORUS_TOLERANCE: f64 = 0.15;
/// Verdict tolerance for decay-character estimates.
pub const CHARACTER_TOLERANCE: f64 = 0.1;

impl ExperimentConfig {
    /// Parses and validates a config; relative paths are kept as written.
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file, resolving relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Self = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.output_dir);
        for d in &mut config.data {
            if let DataSpec::FieldFile(p) = d {
                resolve(p);
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs always serialize")
    }

    pub fn title(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(match self.kind {
            ExperimentKind::LinearContinuum => CONTINUUM_TOLERANCE,
            ExperimentKind::CharacterEstimation => CHARACTER_TOLERANCE,
            _ => TORUS_TOLERANCE,
        })
    }

    /// The solver settings of a run at rotation speed `omega`.
    pub fn solver_for(&self, omega: f64) -> Result<SolverConfig> {
        let mut solver = self
            .solver
            .ok_or_else(|| Error::config("solver", "required for this kind"))?;
        solver.omega = omega;
        if self.kind == ExperimentKind::LinearLattice {
            solver.nonlinear = false;
        }
        Ok(solver)
    }

    /// Rotation speeds of the runs, one per entry.
    pub fn run_omegas(&self) -> Vec<f64> {
        match self.kind {
            ExperimentKind::NscOmegaSweep => self.omegas.clone(),
            ExperimentKind::NsDecay => vec![0.0],
            _ => vec![self.solver.map_or(0.0, |s| s.omega)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        if self.data.is_empty() {
            return Err(Error::config("data", "at least one entry is required"));
        }
        for (i, d) in self.data.iter().enumerate() {
            let field = format!("data[{i}]");
            match d {
                DataSpec::Profile(p) => {
                    if kind != ExperimentKind::LinearContinuum
                        && kind != ExperimentKind::CharacterEstimation
                    {
                        return Err(Error::config(
                            &field,
                            "profiles are only valid for continuum kinds",
                        ));
                    }
                    p.build()
                        .map_err(|e| Error::config(&field, e.to_string()))?;
                }
                DataSpec::Synthetic(s) => {
                    if kind == ExperimentKind::LinearContinuum {
                        return Err(Error::config(&field, "linear_continuum needs profile data"));
                    }
                    if s.r_star.is_some() == s.q_star.is_some() {
                        return Err(Error::config(
                            &field,
                            "give exactly one of r_star and q_star",
                        ));
                    }
                    if !(s.r_star() + 0.5 > -1.5) {
                        return Err(Error::config(&field, "q* = r* + 1/2 must exceed −3/2"));
                    }
                    if let Some(a) = s.amplitude {
                        if !(a > 0.0 && a.is_finite()) {
                            return Err(Error::config(&field, "amplitude must be positive"));
                        }
                    }
                }
                DataSpec::FieldFile(_) => {
                    if kind == ExperimentKind::LinearContinuum {
                        return Err(Error::config(&field, "linear_continuum needs profile data"));
                    }
                }
            }
        }
        if kind.uses_solver() {
            let solver = self
                .solver
                .ok_or_else(|| Error::config("solver", "required for this kind"))?;
            solver.validate()?;
            if kind == ExperimentKind::NsDecay && solver.omega != 0.0 {
                return Err(Error::config(
                    "solver.omega",
                    "ns_decay runs without rotation",
                ));
            }
            if matches!(
                kind,
                ExperimentKind::NsDecay | ExperimentKind::NscDecay | ExperimentKind::NscOmegaSweep
            ) && !solver.nonlinear
            {
                return Err(Error::config(
                    "solver.nonlinear",
                    "must be true for nonlinear kinds",
                ));
            }
            let [t0, t1] = self.window()?;
            if !(0.0 <= t0 && t1 <= solver.t_final * (1.0 + 1e-12)) {
                return Err(Error::config(
                    "fit_window",
                    format!("[{t0}, {t1}] must lie within [0, {}]", solver.t_final),
                ));
            }
        }
        if kind == ExperimentKind::NscOmegaSweep {
            if self.omegas.is_empty() {
                return Err(Error::config("omegas", "must not be empty for a sweep"));
            }
            if let Some(w) = self.omegas.iter().find(|w| !w.is_finite()) {
                return Err(Error::config("omegas", format!("{w} is not finite")));
            }
        } else if !self.omegas.is_empty() {
            return Err(Error::config("omegas", "only valid for nsc_omega_sweep"));
        }
        if kind == ExperimentKind::LinearContinuum {
            let [t0, _] = self.window()?;
            if !(t0 > 0.0) {
                return Err(Error::config(
                    "fit_window",
                    "continuum windows start at t > 0",
                ));
            }
            if self.samples < 8 {
                return Err(Error::config("samples", "at least 8 are needed for a fit"));
            }
            if self.orders.is_empty() || self.orders.iter().any(|s| !(*s >= 0.0)) {
                return Err(Error::config("orders", "need one or more orders s ≥ 0"));
            }
        }
        if kind == ExperimentKind::CharacterEstimation
            && self.grid.is_none()
            && self
                .data
                .iter()
                .any(|d| matches!(d, DataSpec::Synthetic(_)))
        {
            return Err(Error::config("grid", "synthetic data needs a grid"));
        }
        if let Some(g) = self.grid {
            g.validate()
                .map_err(|e| Error::config("grid", e.to_string()))?;
        }
        if let Some(tol) = self.tolerance {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Error::config("tolerance", "must be positive"));
            }
        }
        Ok(())
    }

    /// The fit window; required by every kind except `character_estimation`.
    pub fn window(&self) -> Result<[f64; 2]> {
        let [t0, t1] = self
            .fit_window
            .ok_or_else(|| Error::config("fit_window", "required for this kind"))?;
        if !(t0 < t1 && t0.is_finite() && t1.is_finite()) {
            return Err(Error::config(
                "fit_window",
                format!("[{t0}, {t1}] is not an interval"),
            ));
        }
        Ok([t0, t1])
    }
}
