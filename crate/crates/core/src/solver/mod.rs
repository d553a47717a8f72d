//! Pseudo-spectral Navier–Stokes(–Coriolis) solver on the periodic box.

mod integrator;
mod nonlinear;
mod picard;
mod run;
mod series;

pub use integrator::{step, Integrator};
pub use nonlinear::nonlinear_term;
pub use picard::{picard_solve, PicardOutcome};
pub use run::{integrate, run_simulation, SolverConfig};
pub use series::{Record, RunMetadata, TimeSeries, CSV_HEADER};
