use super::SimError;
use crate::linear::gaussian_data;
use crate::multiplier::WeightParams;
use crate::spectral::{Grid, SpectralField};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Lattice description as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub k_max: usize,
    pub eta_max: f64,
    /// Half-period of `y`; the lattice spacing is `pi / l_y`.
    pub l_y: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            k_max: 4,
            eta_max: 16.0,
            l_y: std::f64::consts::PI,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid, SimError> {
        Ok(Grid::new(self.k_max, self.eta_max, self.l_y)?)
    }
}

/// What happens to the `k = 0` row of the nonlinear term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroModePolicy {
    /// Zero the row every evaluation and log its norm.
    #[default]
    Project,
    /// Keep the row and report its growth.
    Monitor,
}

/// How the quadratic term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductBackend {
    /// FFT on a (dealiased) physical grid; round-off sits at an absolute floor.
    #[default]
    Transform,
    /// Direct lattice convolution; round-off is relative to each output mode.
    Direct,
}

/// One seeded Fourier mode; its conjugate partner is added automatically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedMode {
    pub k: i64,
    pub eta: f64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Gaussian-in-`eta` profile `e^{-eta^2 / (2 width^2)} / |k|` on `1 <= |k| <= k_modes`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub k_modes: usize,
    pub width: f64,
}

/// Two-mode echo experiment: track `|f_k(eta_star)|` for `k < k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EchoSpec {
    pub k0: i64,
    pub eta_star: f64,
    /// Wavenumber `(k, eta)` of the low background mode.
    #[serde(default = "EchoSpec::default_background")]
    pub background: (i64, f64),
}

impl EchoSpec {
    fn default_background() -> (i64, f64) {
        (1, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub epsilon: f64,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub policy: ZeroModePolicy,
    pub dealias: bool,
    pub products: ProductBackend,
    /// Switch off `u . grad f` to recover the linear dynamics.
    pub nonlinear: bool,
    /// Emit an energy report every this many steps.
    pub report_every: usize,
    /// Keep a snapshot every this many steps; 0 keeps none.
    pub snapshot_every: usize,
    /// Add paraproduct triad magnitudes to each report.
    pub triads: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            dt: 0.05,
            t_start: 0.0,
            t_end: 10.0,
            policy: ZeroModePolicy::Project,
            dealias: true,
            products: ProductBackend::Transform,
            nonlinear: true,
            report_every: 1,
            snapshot_every: 0,
            triads: false,
        }
    }
}

/// Complete description of one simulation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub weight: WeightParams,
    pub sim: SimParams,
    pub seed: Vec<SeedMode>,
    pub profile: Option<Profile>,
    pub echo: Option<EchoSpec>,
}

fn bad(field: &'static str, reason: impl Into<String>) -> SimError {
    SimError::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

/// Lattice column of `eta`, if `eta` is a lattice point.
pub fn lattice_index(grid: &Grid, eta: f64) -> Option<i64> {
    let x = eta / grid.d_eta();
    let j = x.round();
    ((x - j).abs() <= 1e-9 * x.abs().max(1.0) && j.abs() <= grid.j_max() as f64).then_some(j as i64)
}

impl SimConfig {
    pub fn validate(&self) -> Result<Grid, SimError> {
        let grid = self.grid.build()?;
        self.weight.validate()?;
        let s = &self.sim;
        if !(s.epsilon >= 0.0 && s.epsilon.is_finite()) {
            return Err(bad(
                "sim.epsilon",
                format!("must be finite and nonnegative, got {}", s.epsilon),
            ));
        }
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            return Err(bad("sim.dt", format!("must be positive, got {}", s.dt)));
        }
        if !(s.t_start >= 0.0 && s.t_end > s.t_start && s.t_end.is_finite()) {
            return Err(bad(
                "sim.t_end",
                format!(
                    "need 0 <= t_start < t_end, got [{}, {}]",
                    s.t_start, s.t_end
                ),
            ));
        }
        if s.report_every == 0 {
            return Err(bad("sim.report_every", "must be at least 1"));
        }
        if self.seed.is_empty() && self.profile.is_none() {
            return Err(bad("seed", "give seed modes or a profile"));
        }
        for m in &self.seed {
            if m.k == 0 {
                return Err(bad(
                    "seed",
                    format!("k = 0 modes are excluded (eta = {})", m.eta),
                ));
            }
            if m.k.unsigned_abs() as usize > grid.k_max() || lattice_index(&grid, m.eta).is_none() {
                return Err(bad(
                    "seed",
                    format!("({}, {}) is not a lattice mode", m.k, m.eta),
                ));
            }
            if !(m.re.is_finite() && m.im.is_finite()) {
                return Err(bad(
                    "seed",
                    format!("non-finite amplitude at ({}, {})", m.k, m.eta),
                ));
            }
        }
        if let Some(p) = &self.profile {
            if p.k_modes == 0 || !(p.width > 0.0 && p.width.is_finite()) {
                return Err(bad("profile", "need k_modes >= 1 and width > 0"));
            }
        }
        if let Some(e) = &self.echo {
            if e.k0 < 2
                || e.k0 as usize > grid.k_max()
                || lattice_index(&grid, e.eta_star).is_none()
            {
                return Err(bad(
                    "echo",
                    format!(
                        "need 2 <= k0 <= k_max and eta_star on the lattice, got ({}, {})",
                        e.k0, e.eta_star
                    ),
                ));
            }
        }
        Ok(grid)
    }

    /// Initial vorticity: `epsilon` times the seeds plus the profile.
    pub fn initial_field(&self) -> Result<SpectralField, SimError> {
        let grid = self.validate()?;
        let mut f = match &self.profile {
            Some(p) => gaussian_data(grid, p.k_modes, p.width, 1.0),
            None => SpectralField::zeros(grid),
        };
        for m in &self.seed {
            let j = lattice_index(&grid, m.eta).expect("validated");
            let v = f.get(m.k, j) + Complex64::new(m.re, m.im);
            f.set_real_mode(m.k, j, v);
        }
        f.scale(self.sim.epsilon);
        f.clear_zero_row();
        f.time = self.sim.t_start;
        Ok(f)
    }

    /// The two-mode echo configuration: `(k0, eta_star)` plus a background mode.
    pub fn echo_preset(k0: i64, eta_star: f64, amplitude: f64, background: f64) -> Self {
        let grid = GridConfig {
            k_max: (k0 + 1) as usize,
            eta_max: eta_star + 8.0,
            l_y: std::f64::consts::PI,
        };
        Self {
            grid,
            sim: SimParams {
                epsilon: 1.0,
                dt: 0.02,
                t_end: 1.5 * eta_star,
                ..SimParams::default()
            },
            seed: vec![
                SeedMode {
                    k: k0,
                    eta: eta_star,
                    re: amplitude,
                    im: 0.0,
                },
                SeedMode {
                    k: 1,
                    eta: 0.0,
                    re: background,
                    im: 0.0,
                },
            ],
            echo: Some(EchoSpec {
                k0,
                eta_star,
                background: (1, 0.0),
            }),
            ..Self::default()
        }
    }
}
