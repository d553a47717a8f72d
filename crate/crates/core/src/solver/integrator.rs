//! Integrating-factor Runge–Kutta stepping with the exact linear propagator.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::propagator::{RotationParams, SemigroupFactors};

use super::nonlinear_term;

/// Fourth-order integrating-factor RK stepper (Lawson RK4).
///
/// Writing `E(τ) = e^{τM}` for the exact heat–Coriolis propagator and
/// `N` for the projected nonlinearity, one step of size `h` is
///
/// ```text
/// k₁ = N(u)
/// k₂ = N(E(h/2)(u + h/2·k₁))
/// k₃ = N(E(h/2)u + h/2·k₂)
/// k₄ = N(E(h)u + h·E(h/2)k₃)
/// u⁺ = E(h)u + h/6·(E(h)k₁ + 2E(h/2)(k₂ + k₃) + k₄)
/// ```
///
/// so the linear part is integrated exactly and only `N` carries RK error.
#[derive(Debug, Clone)]
pub struct Integrator {
    grid: Grid,
    dt: f64,
    nonlinear: bool,
    dealias: bool,
    half: SemigroupFactors,
    full: SemigroupFactors,
}

impl Integrator {
    pub fn new(
        grid: Grid,
        dt: f64,
        params: RotationParams,
        nonlinear: bool,
        dealias: bool,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!(
                "time step must be positive, got {dt}"
            )));
        }
        Ok(Self {
            grid,
            dt,
            nonlinear,
            dealias,
            half: SemigroupFactors::new(grid, 0.5 * dt, params)?,
            full: SemigroupFactors::new(grid, dt, params)?,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// The nonlinearity used by this stepper (zero when disabled).
    pub fn rhs(&self, u: &SpectralField) -> SpectralField {
        if self.nonlinear {
            nonlinear_term(u, self.dealias)
        } else {
            SpectralField::zeros(u.grid())
        }
    }

    /// Advances `u` by one step; `k1` may carry a precomputed `N(u)`.
    pub fn step_from(
        &self,
        u: &SpectralField,
        k1: Option<SpectralField>,
        time: f64,
    ) -> Result<SpectralField> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let out = if self.nonlinear {
            let h = self.dt;
            let k1 = k1.unwrap_or_else(|| self.rhs(u));

            let mut a = u.clone();
            a.axpy(0.5 * h, &k1)?;
            self.half.apply_in_place(&mut a);
            let k2 = self.rhs(&a);

            let eu_half = self.half.apply(u);
            let mut b = eu_half.clone();
            b.axpy(0.5 * h, &k2)?;
            let k3 = self.rhs(&b);

            let eu_full = self.full.apply(u);
            let mut c = eu_full.clone();
            c.axpy(h, &self.half.apply(&k3))?;
            let k4 = self.rhs(&c);

            let mut mid = k2;
            mid.axpy(1.0, &k3)?;
            let mut next = eu_full;
            next.axpy(h / 6.0, &self.full.apply(&k1))?;
            next.axpy(h / 3.0, &self.half.apply(&mid))?;
            next.axpy(h / 6.0, &k4)?;
            next
        } else {
            self.full.apply(u)
        };
        if !out.is_finite() {
            return Err(Error::BlowUp {
                time: time + self.dt,
            });
        }
        Ok(out)
    }

    pub fn step(&self, u: &SpectralField) -> Result<SpectralField> {
        self.step_from(u, None, 0.0)
    }
}

/// One integrating-factor RK4 step of the full nonlinear system.
pub fn step(u: &SpectralField, dt: f64, params: RotationParams) -> Result<SpectralField> {
    Integrator::new(u.grid(), dt, params, true, true)?.step(u)
}
