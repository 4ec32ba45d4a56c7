//! Pseudo-spectral integration of the zero-mean nonlinear system in the moving frame
//! `z = x - t y`: `d_t f + u . grad_{z,y} f = 0`, `u = grad^perp phi`, `Delta_L phi = f`.

mod checks;
mod config;
mod dynamics;
mod energy;
mod run;

pub use checks::{
    elliptic_sweep, energy_identity_check, random_gevrey_field, EllipticSweep, IdentityCheck,
    POPULATED_SHARE,
};
pub use config::{
    lattice_index, EchoSpec, GridConfig, ProductBackend, Profile, SeedMode, SimConfig, SimParams,
    ZeroModePolicy,
};
pub use dynamics::{
    advect, advect_direct, biot_savart_moving, gradient, lab_velocity, sheared_laplacian,
    NonlinearOp, Rhs,
};
pub use energy::{
    elliptic_ratio, energy_report, triad_diagnostic, EnergyFunctional, EnergyReport,
    MultiplierTable, Triads,
};
pub use run::{
    bootstrap_threshold, run_simulation, BootstrapReport, BootstrapRow, EchoMode, EchoReport,
    EchoSample, SimOutput, Snapshot, BLOWUP_FACTOR, BOOTSTRAP_DAMPING_SLACK,
};

use crate::multiplier::MultiplierError;
use crate::spectral::SpectralError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("state became non-finite at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
}
