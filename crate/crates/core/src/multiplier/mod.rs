//! Resonant intervals, the time-dependent weight `w_k(t, eta)`, the multipliers
//! `J`, `J~`, `A`, `A~`, the radius `lambda(t)`, and numerical certification sweeps.

mod interval;
mod lambda;
mod multipliers;
mod params;
mod profile;
pub mod sweep;
pub mod toolbox;
mod weight;

pub use interval::{
    critical_interval, critical_time, floor_sqrt, resonant_index, resonant_k, IntervalKind,
    ResonantInterval,
};
pub use lambda::LambdaSchedule;
pub use multipliers::{ModeMultipliers, Multipliers, Which};
pub use params::WeightParams;
pub use profile::{weight_profile, WeightRow};
pub use sweep::{lemma_sweep, LemmaId, LemmaReport, Status, SweepSpec};
pub use toolbox::{inequality_toolbox_check, ToolId};
pub use weight::{Branch, ModeWeight, Weight};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultiplierError {
    #[error("parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error(
        "delta_lambda = {delta} lets lambda(t) fall to (lambda0 + lambda')/2 at t = {horizon}"
    )]
    LambdaBound { delta: f64, horizon: f64 },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
