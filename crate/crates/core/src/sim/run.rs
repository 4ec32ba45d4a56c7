use super::config::lattice_index;
use super::dynamics::{sheared_laplacian, NonlinearOp};
use super::energy::{energy_report, triad_diagnostic, EnergyFunctional, EnergyReport};
use super::{SimConfig, SimError};
use crate::multiplier::{critical_interval, IntervalKind};
use crate::spectral::SpectralField;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Runs abort once `E` exceeds this multiple of its initial value.
pub const BLOWUP_FACTOR: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub field: SpectralField,
}

/// Time series of one tracked echo mode `(k, eta_star)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoSample {
    pub t: f64,
    pub k: i64,
    pub amplitude: f64,
    pub velocity: f64,
}

/// Echo measurement for mode `k`, driven by mode `k + 1` at the same `eta_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EchoMode {
    pub k: i64,
    pub orr_time: f64,
    /// Time of the largest `|U_k(eta_star)|` over the run.
    pub peak_time: f64,
    pub peak_velocity: f64,
    /// The peak is interior: the velocity rises into it and falls after it.
    pub transient: bool,
    /// `|peak_time - orr_time| <= 0.2 orr_time`.
    pub near_orr_time: bool,
    /// Resonant window `I_{k+1, eta_star}` of the driving mode.
    pub window: (f64, f64),
    /// `|f_k(t_hi) - f_k(t_lo)|` across the window.
    pub gain: f64,
    /// `(d_eta / 2 pi) |f_background|` at the window start.
    pub coupling: f64,
    /// `|f_{k+1}(eta_star)|` at the window start.
    pub source: f64,
    /// `gain / (coupling * source)`.
    pub amplification: f64,
    /// `eta_star / k^2`.
    pub toy_prediction: f64,
    /// `pi eta_star / (k+1)^2`, the integral of the driving velocity across the resonance.
    pub toy_integral: f64,
    pub ratio_to_prediction: f64,
    /// Transient near the Orr time and amplification within a factor 4 of the prediction.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoReport {
    pub k0: i64,
    pub eta_star: f64,
    pub modes: Vec<EchoMode>,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub reports: Vec<EnergyReport>,
    pub snapshots: Vec<Snapshot>,
    pub echo_series: Vec<EchoSample>,
    pub echo: Option<EchoReport>,
    /// Why the run stopped early, if it did.
    pub abort: Option<String>,
    pub steps: usize,
    pub dt: f64,
    pub max_cfl: f64,
    pub final_field: SpectralField,
}

struct EchoTracker {
    k0: i64,
    j: i64,
    eta: f64,
    bg: (i64, i64),
    samples: Vec<EchoSample>,
    // (t, f_k, f_{k+1}, f_bg) for every k < k0
    raw: Vec<(f64, Vec<num_complex::Complex64>, num_complex::Complex64)>,
}

impl EchoTracker {
    fn record(&mut self, f: &SpectralField) {
        let t = f.time;
        let coeffs: Vec<_> = (1..=self.k0).map(|k| f.get(k, self.j)).collect();
        for k in 1..self.k0 {
            let c = coeffs[(k - 1) as usize];
            let velocity = c.norm() / sheared_laplacian(k, self.eta, t).sqrt();
            self.samples.push(EchoSample {
                t,
                k,
                amplitude: c.norm(),
                velocity,
            });
        }
        self.raw.push((t, coeffs, f.get(self.bg.0, self.bg.1)));
    }

    fn at(&self, t: f64) -> &(f64, Vec<num_complex::Complex64>, num_complex::Complex64) {
        let i = self
            .raw
            .partition_point(|r| r.0 < t)
            .min(self.raw.len() - 1);
        if i > 0 && (self.raw[i - 1].0 - t).abs() < (self.raw[i].0 - t).abs() {
            &self.raw[i - 1]
        } else {
            &self.raw[i]
        }
    }

    fn report(&self, d_eta: f64) -> EchoReport {
        let mut modes = vec![];
        for k in (1..self.k0).rev() {
            let series: Vec<&EchoSample> = self.samples.iter().filter(|s| s.k == k).collect();
            let (imax, peak) = series
                .iter()
                .enumerate()
                .fold((0, series[0]), |acc, (i, s)| {
                    if s.velocity > acc.1.velocity {
                        (i, *s)
                    } else {
                        acc
                    }
                });
            let transient = imax > 0
                && imax + 1 < series.len()
                && series[0].velocity < peak.velocity
                && series[series.len() - 1].velocity < peak.velocity;
            let orr_time = self.eta / k as f64;
            let near_orr_time = (peak.t - orr_time).abs() <= 0.2 * orr_time;
            let iv = critical_interval(k + 1, self.eta, IntervalKind::I);
            let window = (iv.t_lo, iv.t_hi);
            let (lo, hi) = (self.at(window.0), self.at(window.1));
            let idx = (k - 1) as usize;
            let gain = (hi.1[idx] - lo.1[idx]).norm();
            let coupling = d_eta / (2.0 * PI) * lo.2.norm();
            let source = lo.1[idx + 1].norm();
            let amplification = gain / (coupling * source);
            let toy_prediction = self.eta / (k * k) as f64;
            let ratio = amplification / toy_prediction;
            modes.push(EchoMode {
                k,
                orr_time,
                peak_time: peak.t,
                peak_velocity: peak.velocity,
                transient,
                near_orr_time,
                window,
                gain,
                coupling,
                source,
                amplification,
                toy_prediction,
                toy_integral: PI * self.eta / ((k + 1) * (k + 1)) as f64,
                ratio_to_prediction: ratio,
                pass: transient && near_orr_time && (0.25..=4.0).contains(&ratio),
            });
        }
        let pass = modes.first().map(|m| m.pass).unwrap_or(false);
        EchoReport {
            k0: self.k0,
            eta_star: self.eta,
            modes,
            pass,
        }
    }
}

/// Integrate the configured experiment from `t_start` to `t_end`.
///
/// The step count is `ceil((t_end - t_start) / dt)` with the step shortened so the
/// run ends exactly at `t_end`.
pub fn run_simulation(config: &SimConfig) -> Result<SimOutput, SimError> {
    let grid = config.validate()?;
    let p = &config.sim;
    let mut f = config.initial_field()?;
    let op = NonlinearOp::new(grid, p.dealias, p.policy, p.nonlinear).with_backend(p.products);
    let energy = EnergyFunctional::new(grid, config.weight, p.t_start)?;
    let span = p.t_end - p.t_start;
    let steps = ((span / p.dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = span / steps as f64;

    let mut echo = config.echo.map(|e| EchoTracker {
        k0: e.k0,
        j: lattice_index(&grid, e.eta_star).expect("validated"),
        eta: e.eta_star,
        bg: (
            -e.background.0,
            -lattice_index(&grid, e.background.1).unwrap_or(0),
        ),
        samples: vec![],
        raw: vec![],
    });

    let mut out = SimOutput {
        reports: vec![],
        snapshots: vec![],
        echo_series: vec![],
        echo: None,
        abort: None,
        steps: 0,
        dt,
        max_cfl: 0.0,
        final_field: f.clone(),
    };
    let mut ck_integral = 0.0;
    let report = |f: &SpectralField, ck_integral: f64| -> Result<EnergyReport, SimError> {
        let mut r = energy_report(&energy, &op, f);
        r.ck_integral = ck_integral;
        if p.triads {
            let tr = triad_diagnostic(&energy, f, p.products)?;
            r.triad_transport = Some(tr.transport);
            r.triad_reaction = Some(tr.reaction);
            r.triad_remainder = Some(tr.remainder);
        }
        Ok(r)
    };
    let first = report(&f, 0.0)?;
    let e0 = first.energy;
    out.reports.push(first);
    if p.snapshot_every > 0 {
        out.snapshots.push(Snapshot {
            step: 0,
            field: f.clone(),
        });
    }
    if let Some(tr) = echo.as_mut() {
        tr.record(&f);
    }
    let mut warned = false;

    for n in 1..=steps {
        let next = match op.step(&f, dt) {
            Ok(g) => g,
            Err(e) => {
                out.abort = Some(e.to_string());
                break;
            }
        };
        let mut mid = f.clone();
        mid.axpy(1.0, &next);
        mid.scale(0.5);
        let tm = f.time + 0.5 * dt;
        let (_, ckl, ckw) = energy.energy_terms(&energy.table(tm), &mid);
        ck_integral += dt * (ckl + ckw);
        f = next;
        f.time = p.t_start + n as f64 * dt;
        out.steps = n;
        if let Some(tr) = echo.as_mut() {
            tr.record(&f);
        }

        if n % p.report_every == 0 || n == steps {
            let cfl = op.cfl(&f, dt);
            out.max_cfl = out.max_cfl.max(cfl);
            if cfl > 1.0 && !warned {
                log::warn!("CFL number {cfl:.3} exceeds 1 at t = {}", f.time);
                warned = true;
            }
            let r = report(&f, ck_integral)?;
            let blowup = e0 > 0.0 && r.energy > BLOWUP_FACTOR * e0;
            let nonfinite = !r.energy.is_finite();
            out.reports.push(r);
            if nonfinite || blowup {
                out.abort = Some(format!(
                    "energy {} left the admissible range at t = {}",
                    r.energy, r.t
                ));
                break;
            }
        }
        if p.snapshot_every > 0 && n % p.snapshot_every == 0 {
            out.snapshots.push(Snapshot {
                step: n,
                field: f.clone(),
            });
        }
    }
    if let Some(tr) = echo {
        if out.abort.is_none() {
            out.echo = Some(tr.report(grid.d_eta()));
        }
        out.echo_series = tr.samples;
    }
    out.final_field = f;
    Ok(out)
}

/// Outcome of one amplitude in the bootstrap threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapRow {
    /// Size of the data in the weighted norm, `||A f(t_start)|| = (2 E)^{1/2}`.
    pub weighted_size: f64,
    /// Seed amplitude that realizes `weighted_size`.
    pub epsilon: f64,
    /// `max_{t in [1, t_end]} E(t) / E(1)`.
    pub energy_ratio: f64,
    /// `max ||U^x|| <t>` divided by its linear counterpart.
    pub ux_vs_linear: f64,
    /// `max ||U^y|| <t>^2` divided by its linear counterpart.
    pub uy_vs_linear: f64,
    /// `CK` integral divided by `weighted_size^2`.
    pub ck_over_eps2: f64,
    pub aborted: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub rows: Vec<BootstrapRow>,
    /// Largest tested `weighted_size` at and below which every tested size passed.
    pub threshold: Option<f64>,
}

/// The damping ratios may exceed the linear ones by at most this factor.
pub const BOOTSTRAP_DAMPING_SLACK: f64 = 2.0;

fn damping_sup(reports: &[EnergyReport]) -> (f64, f64) {
    reports
        .iter()
        .filter(|r| r.t >= 1.0 - 1e-12)
        .fold((0.0f64, 0.0f64), |(x, y), r| {
            let jt2 = 1.0 + r.t * r.t;
            (x.max(r.norm_ux * jt2.sqrt()), y.max(r.norm_uy * jt2))
        })
}

/// Measure `E(t) <= 4 E(1)` and bounded damping ratios along a ladder of data sizes.
///
/// Sizes are measured in the weighted norm `||A f(t_start)||`, which is what the energy
/// controls; the seed amplitude is rescaled to hit each size. Each run is compared with
/// the same data evolved linearly; the run must start at or before `t = 1` and report
/// at `t = 1`.
pub fn bootstrap_threshold(base: &SimConfig, sizes: &[f64]) -> Result<BootstrapReport, SimError> {
    let mut unit = base.clone();
    unit.sim.epsilon = 1.0;
    let f1 = unit.initial_field()?;
    let energy = EnergyFunctional::new(*f1.grid(), base.weight, base.sim.t_start)?;
    let unit_size = (2.0 * energy.energy_terms(&energy.table(base.sim.t_start), &f1).0).sqrt()
        * energy.log_scale().exp();
    if !(unit_size > 0.0 && unit_size.is_finite()) {
        return Err(SimError::InvalidConfig {
            field: "seed",
            reason: format!("initial data has weighted size {unit_size}"),
        });
    }
    let rows = sizes
        .par_iter()
        .map(|&weighted_size| -> Result<BootstrapRow, SimError> {
            let epsilon = weighted_size / unit_size;
            let mut cfg = base.clone();
            cfg.sim.epsilon = epsilon;
            cfg.sim.report_every = 1;
            cfg.sim.triads = false;
            let run = run_simulation(&cfg)?;
            cfg.sim.nonlinear = false;
            let lin = run_simulation(&cfg)?;
            let e1 = match run.reports.iter().find(|r| (r.t - 1.0).abs() < 1e-9) {
                Some(r) => r.energy,
                None if run.abort.is_some() => f64::NAN,
                None => {
                    return Err(SimError::InvalidConfig {
                        field: "sim.dt",
                        reason: "no report lands on t = 1".into(),
                    })
                }
            };
            let energy_ratio = if e1.is_nan() {
                f64::NAN
            } else {
                run.reports
                    .iter()
                    .filter(|r| r.t >= 1.0 - 1e-12)
                    .map(|r| r.energy / e1)
                    .fold(0.0, f64::max)
            };
            let (nx, ny) = damping_sup(&run.reports);
            let (lx, ly) = damping_sup(&lin.reports);
            let ck = run
                .reports
                .last()
                .map(|r| r.ck_integral)
                .unwrap_or(f64::NAN);
            let aborted = run.abort.is_some();
            Ok(BootstrapRow {
                weighted_size,
                epsilon,
                energy_ratio,
                ux_vs_linear: nx / lx,
                uy_vs_linear: ny / ly,
                ck_over_eps2: ck * (2.0 * energy.log_scale()).exp()
                    / (weighted_size * weighted_size),
                aborted,
                pass: !aborted
                    && energy_ratio <= 4.0
                    && nx / lx <= BOOTSTRAP_DAMPING_SLACK
                    && ny / ly <= BOOTSTRAP_DAMPING_SLACK,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<&BootstrapRow> = rows.iter().collect();
    order.sort_by(|a, b| a.weighted_size.total_cmp(&b.weighted_size));
    let mut threshold = None;
    for r in order {
        if !r.pass {
            break;
        }
        threshold = Some(r.weighted_size);
    }
    Ok(BootstrapReport { rows, threshold })
}
