use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::propagator::RotationParams;
use crate::spectral::{dealias_in_place, sobolev_inner, sobolev_seminorm_sq};
use crate::splitting::{low_mode_fraction, ratio_from_parts, SplittingSchedule};

use super::{Integrator, Record, TimeSeries};

/// Parameters of one time integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub grid: Grid,
    #[serde(default)]
    pub omega: f64,
    pub dt: f64,
    /// Final time `T`.
    pub t_final: f64,
    pub record_interval: f64,
    /// Required bound on `‖u₀‖_{Ḣ^{1/2}}`.
    pub epsilon_budget: f64,
    #[serde(default = "yes")]
    pub dealias: bool,
    /// With `false` only the exact linear propagator is applied.
    #[serde(default = "yes")]
    pub nonlinear: bool,
    /// `α` of the power splitting schedule.
    #[serde(default = "default_alpha")]
    pub splitting_alpha: f64,
}

fn yes() -> bool {
    true
}

fn default_alpha() -> f64 {
    4.0
}

impl SolverConfig {
    /// Desk-scale defaults: `n = 64`, `L = 16π`, `dt = 2·10⁻³`, `ε = 0.05`.
    pub fn desk_default() -> Self {
        Self {
            grid: Grid {
                n: 64,
                box_length: 16.0 * std::f64::consts::PI,
            },
            omega: 0.0,
            dt: 2e-3,
            t_final: 6.4,
            record_interval: 0.05,
            epsilon_budget: 0.05,
            dealias: true,
            nonlinear: true,
            splitting_alpha: 4.0,
        }
    }

    /// Largest time step allowed by the guard `dt ≤ 0.5/ξ_max²`.
    pub fn max_dt(grid: Grid) -> f64 {
        0.5 / grid.max_wavenumber().powi(2)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid
            .validate()
            .map_err(|e| Error::config("grid", e.to_string()))?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(
                    name,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        positive("dt", self.dt)?;
        positive("t_final", self.t_final)?;
        positive("record_interval", self.record_interval)?;
        positive("epsilon_budget", self.epsilon_budget)?;
        positive("splitting_alpha", self.splitting_alpha)?;
        if !self.omega.is_finite() {
            return Err(Error::config("omega", "must be finite"));
        }
        let guard = Self::max_dt(self.grid);
        if self.dt > guard * (1.0 + 1e-12) {
            return Err(Error::config(
                "dt",
                format!(
                    "{} exceeds the stability guard 0.5/ξ_max² = {guard:.4e}",
                    self.dt
                ),
            ));
        }
        if self.record_interval < self.dt * (1.0 - 1e-12) {
            return Err(Error::config("record_interval", "must be at least dt"));
        }
        Ok(())
    }

    pub fn rotation(&self) -> RotationParams {
        RotationParams { omega: self.omega }
    }

    /// Number of steps and the exact step size that lands on `t_final`.
    fn schedule(&self) -> (usize, f64, usize) {
        let steps = ((self.t_final / self.dt) - 1e-9).ceil().max(1.0) as usize;
        let h = self.t_final / steps as f64;
        let every = ((self.record_interval / h).round() as usize).max(1);
        (steps, h, every)
    }
}

/// Advances `u0` to `t_final` and returns the recorded series.
pub fn run_simulation(config: &SolverConfig, u0: &SpectralField) -> Result<TimeSeries> {
    integrate(config, u0).map(|(series, _)| series)
}

/// Like [`run_simulation`] but also returns the final state.
pub fn integrate(config: &SolverConfig, u0: &SpectralField) -> Result<(TimeSeries, SpectralField)> {
    config.validate()?;
    if u0.grid() != config.grid {
        return Err(Error::GridMismatch);
    }
    u0.require_divergence_free()?;
    let norm0 = sobolev_seminorm_sq(u0, 0.5).sqrt();
    if norm0 > config.epsilon_budget * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!(
            "‖u₀‖_Ḣ^1/2 = {norm0:.4e} exceeds the budget ε = {}",
            config.epsilon_budget
        )));
    }
    let (steps, h, every) = config.schedule();
    let stepper = Integrator::new(
        config.grid,
        h,
        config.rotation(),
        config.nonlinear,
        config.dealias,
    )?;
    let g1 = SplittingSchedule::log();
    let g2 = SplittingSchedule::power(config.splitting_alpha)?;

    let mut u = u0.clone();
    if config.dealias {
        dealias_in_place(&mut u);
    }
    let mut series = TimeSeries::default();
    for k in 0..=steps {
        let t = k as f64 * h;
        let mut k1 = None;
        if k % every == 0 || k == steps {
            let n_u = stepper.rhs(&u);
            series.records.push(observe(&u, &n_u, t, config, g1, g2)?);
            k1 = Some(n_u);
        }
        if k == steps {
            break;
        }
        u = stepper.step_from(&u, k1.filter(|_| config.nonlinear), t)?;
    }
    series.fill_energy_residual();
    Ok((series, u))
}

fn observe(
    u: &SpectralField,
    n_u: &SpectralField,
    t: f64,
    config: &SolverConfig,
    g1: SplittingSchedule,
    g2: SplittingSchedule,
) -> Result<Record> {
    let l2_sq = sobolev_seminorm_sq(u, 0.0);
    let hhalf_sq = sobolev_seminorm_sq(u, 0.5);
    let h3half_sq = sobolev_seminorm_sq(u, 1.5);
    let transfer = sobolev_inner(u, n_u, 0.5)?;
    // the diagnostic ratio always uses the true nonlinearity
    let ratio_transfer = if config.nonlinear {
        transfer
    } else if hhalf_sq > 0.0 {
        sobolev_inner(u, &super::nonlinear_term(u, config.dealias), 0.5)?
    } else {
        0.0
    };
    Ok(Record {
        t,
        l2_sq,
        hhalf_sq,
        h3half_sq,
        lowfrac_g1: low_mode_fraction(u, 0.5, g1.radius(t)),
        lowfrac_g2: low_mode_fraction(u, 0.5, g2.radius(t)),
        bilinear_ratio: ratio_from_parts(ratio_transfer, hhalf_sq, h3half_sq),
        energy_residual: 0.0,
        smallness_flag: u8::from(hhalf_sq.sqrt() >= 2.0 * config.epsilon_budget),
        transfer,
    })
}
