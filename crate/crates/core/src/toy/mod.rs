//! Two-mode echo toy model and its growth envelopes.
//!
//! In the shifted time `tau = t - eta/k` with `gamma = |eta|/k^2` the resonant and
//! non-resonant amplitudes obey
//! `f_R' = (beta/gamma) f_NR` and `f_NR' = beta gamma / (1 + tau^2) f_R`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ToyError {
    #[error("invalid toy parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },
    #[error("initial data must be positive, got f_R = {f_r}, f_NR = {f_nr}")]
    NonPositiveData { f_r: f64, f_nr: f64 },
    #[error("integration window [{tau0}, {tau1}] with step {step} is empty or degenerate")]
    BadWindow { tau0: f64, tau1: f64, step: f64 },
    #[error("trajectory does not start from the canonical data f_R = f_NR = 1 at tau = -gamma")]
    NotCanonical,
    #[error("max_growth needs eta >= 1 and c > 0, got eta = {eta}, c = {c}")]
    BadGrowthArgs { eta: f64, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToyParams {
    pub beta: f64,
    pub gamma: f64,
    /// Growth constant whose envelope exponent `C beta` is compared with the fitted one.
    pub c_growth: f64,
}

impl ToyParams {
    /// `beta = 0` is accepted as the decoupled limit.
    pub fn validate(&self) -> Result<(), ToyError> {
        if !(0.0..0.5).contains(&self.beta) {
            return Err(ToyError::InvalidParams {
                field: "beta",
                reason: format!("{} not in [0, 1/2)", self.beta),
            });
        }
        if !(self.gamma >= 1.0 && self.gamma.is_finite()) {
            return Err(ToyError::InvalidParams {
                field: "gamma",
                reason: format!("{} < 1", self.gamma),
            });
        }
        if !(self.c_growth > 0.0 && self.c_growth.is_finite()) {
            return Err(ToyError::InvalidParams {
                field: "c_growth",
                reason: format!("{} not positive", self.c_growth),
            });
        }
        Ok(())
    }

    /// Default step `gamma / 2048`.
    pub fn default_step(&self) -> f64 {
        self.gamma / 2048.0
    }

    fn rhs(&self, tau: f64, f: [f64; 2]) -> [f64; 2] {
        [
            self.beta / self.gamma * f[1],
            self.beta * self.gamma / (1.0 + tau * tau) * f[0],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyPoint {
    pub tau: f64,
    pub f_r: f64,
    pub f_nr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToyTrajectory {
    pub params: ToyParams,
    pub points: Vec<ToyPoint>,
}

impl ToyTrajectory {
    pub fn last(&self) -> ToyPoint {
        *self.points.last().expect("trajectories are never empty")
    }

    /// Point closest to `tau`.
    pub fn at(&self, tau: f64) -> ToyPoint {
        *self
            .points
            .iter()
            .min_by(|a, b| (a.tau - tau).abs().total_cmp(&(b.tau - tau).abs()))
            .expect("trajectories are never empty")
    }

    /// `(gamma/beta) f_R^2 - (1 + tau^2)/(beta gamma) f_NR^2`, nondecreasing for `tau < 0`.
    pub fn lyapunov(&self) -> Vec<(f64, f64)> {
        let ToyParams { beta, gamma, .. } = self.params;
        self.points
            .iter()
            .map(|p| {
                (
                    p.tau,
                    gamma / beta * p.f_r * p.f_r
                        - (1.0 + p.tau * p.tau) / (beta * gamma) * p.f_nr * p.f_nr,
                )
            })
            .collect()
    }
}

/// Classical RK4 from `tau0` to `tau1`; the step is shrunk so it divides the window.
pub fn toy_integrate(
    params: &ToyParams,
    tau0: f64,
    tau1: f64,
    f_r0: f64,
    f_nr0: f64,
    step: f64,
) -> Result<ToyTrajectory, ToyError> {
    params.validate()?;
    if !(f_r0 > 0.0 && f_nr0 > 0.0) {
        return Err(ToyError::NonPositiveData {
            f_r: f_r0,
            f_nr: f_nr0,
        });
    }
    if !(tau1 > tau0 && step > 0.0 && step.is_finite()) {
        return Err(ToyError::BadWindow { tau0, tau1, step });
    }
    let n = ((tau1 - tau0) / step).ceil() as usize;
    let h = (tau1 - tau0) / n as f64;
    let mut f = [f_r0, f_nr0];
    let mut points = Vec::with_capacity(n + 1);
    points.push(ToyPoint {
        tau: tau0,
        f_r: f[0],
        f_nr: f[1],
    });
    for i in 0..n {
        let tau = tau0 + i as f64 * h;
        let add = |f: [f64; 2], k: [f64; 2], c: f64| [f[0] + c * k[0], f[1] + c * k[1]];
        let k1 = params.rhs(tau, f);
        let k2 = params.rhs(tau + h / 2.0, add(f, k1, h / 2.0));
        let k3 = params.rhs(tau + h / 2.0, add(f, k2, h / 2.0));
        let k4 = params.rhs(tau + h, add(f, k3, h));
        for j in 0..2 {
            f[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        points.push(ToyPoint {
            tau: tau0 + (i + 1) as f64 * h,
            f_r: f[0],
            f_nr: f[1],
        });
    }
    Ok(ToyTrajectory {
        params: *params,
        points,
    })
}

/// Integrate the canonical problem on `[-gamma, gamma]` from `(1, 1)` with the default step.
pub fn toy_canonical(params: &ToyParams) -> Result<ToyTrajectory, ToyError> {
    toy_integrate(
        params,
        -params.gamma,
        params.gamma,
        1.0,
        1.0,
        params.default_step(),
    )
}

/// Fitted and prescribed constants of the four envelope inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeConstants {
    /// `f_R <= C ((1+|tau|)/gamma)^{-C beta}` on `tau <= 0`.
    pub resonant_before: f64,
    /// `f_NR <= C ((1+|tau|)/gamma)^{-C beta - 1}` on `tau <= 0`.
    pub nonresonant_before: f64,
    /// `f_R <= C gamma^{C beta} (1+tau)^{C beta + 1}` on `tau >= 0`.
    pub resonant_after: f64,
    /// `f_NR <= C gamma^{C beta + 1} (1+tau)^{C beta}` on `tau >= 0`.
    pub nonresonant_after: f64,
    /// `max(f_R, f_NR)(gamma) <= C gamma^{1 + 2 C beta}`.
    pub overall: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub beta: f64,
    pub gamma: f64,
    /// Smallest `C` (prefactor and exponent alike) for which each bound holds.
    pub fitted: EnvelopeConstants,
    /// Smallest prefactor when the exponent uses `c_growth` instead.
    pub prefactor_at_c_growth: EnvelopeConstants,
    /// `gamma f_R / f_NR` at the Orr time; order one when `f_R ~ f_NR / gamma`.
    pub orr_ratio: f64,
    /// Smallest `C` with `f_NR <= C gamma / (1+|tau|) f_R` on `tau <= 0`.
    pub nonresonant_over_resonant: f64,
    /// Largest decrease of the Lyapunov quantity on `tau < 0` relative to its scale.
    pub lyapunov_defect: f64,
    pub amplification: f64,
}

/// Envelope bound `ln RHS = ln C + a(C) ln x + b(C) ln y` as a function of `C`.
type LogBound<'a> = &'a dyn Fn(f64, &ToyPoint) -> f64;

/// Smallest `C` with `ln f(p) <= bound(C, p)` for every point; the bound must increase with `C`.
fn fit_constant(points: &[&ToyPoint], value: impl Fn(&ToyPoint) -> f64, bound: LogBound) -> f64 {
    let holds = |c: f64| points.iter().all(|p| value(p).ln() <= bound(c, p) + 1e-14);
    let (mut lo, mut hi) = (1e-12, 1.0);
    while !holds(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return f64::INFINITY;
        }
    }
    if holds(lo) {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    hi
}

/// Check the growth envelopes along a canonical trajectory.
pub fn growth_envelope(traj: &ToyTrajectory) -> Result<EnvelopeReport, ToyError> {
    let params = traj.params;
    params.validate()?;
    let first = traj.points[0];
    if (first.tau + params.gamma).abs() > 1e-12 * params.gamma
        || first.f_r != 1.0
        || first.f_nr != 1.0
    {
        return Err(ToyError::NotCanonical);
    }
    let (beta, gamma) = (params.beta, params.gamma);
    let lg = gamma.ln();
    let before: Vec<&ToyPoint> = traj.points.iter().filter(|p| p.tau <= 0.0).collect();
    let after: Vec<&ToyPoint> = traj.points.iter().filter(|p| p.tau >= 0.0).collect();
    let lx = |p: &ToyPoint| (1.0 + p.tau.abs()).ln() - lg;
    let l1 = |p: &ToyPoint| (1.0 + p.tau.abs()).ln();
    let end = traj.last();
    let amplification = end.f_r.max(end.f_nr);
    let end_pts = [&end];

    let b1 = |c: f64, e: f64, p: &ToyPoint| c.ln() - e * beta * lx(p);
    let b2 = |c: f64, e: f64, p: &ToyPoint| c.ln() - (e * beta + 1.0) * lx(p);
    let b3 = |c: f64, e: f64, p: &ToyPoint| c.ln() + e * beta * lg + (e * beta + 1.0) * l1(p);
    let b4 = |c: f64, e: f64, p: &ToyPoint| c.ln() + (e * beta + 1.0) * lg + e * beta * l1(p);
    let b5 = |c: f64, e: f64, _: &ToyPoint| c.ln() + (1.0 + 2.0 * e * beta) * lg;
    let fr = |p: &ToyPoint| p.f_r;
    let fnr = |p: &ToyPoint| p.f_nr;
    let fmax = |p: &ToyPoint| p.f_r.max(p.f_nr);

    let fitted = EnvelopeConstants {
        resonant_before: fit_constant(&before, fr, &|c, p| b1(c, c, p)),
        nonresonant_before: fit_constant(&before, fnr, &|c, p| b2(c, c, p)),
        resonant_after: fit_constant(&after, fr, &|c, p| b3(c, c, p)),
        nonresonant_after: fit_constant(&after, fnr, &|c, p| b4(c, c, p)),
        overall: fit_constant(&end_pts, fmax, &|c, p| b5(c, c, p)),
    };
    let e = params.c_growth;
    let prefactor = |pts: &[&ToyPoint],
                     v: &dyn Fn(&ToyPoint) -> f64,
                     b: &dyn Fn(f64, f64, &ToyPoint) -> f64| {
        pts.iter()
            .map(|p| (v(p).ln() - b(1.0, e, p)).exp())
            .fold(0.0, f64::max)
    };
    let prefactor_at_c_growth = EnvelopeConstants {
        resonant_before: prefactor(&before, &fr, &b1),
        nonresonant_before: prefactor(&before, &fnr, &b2),
        resonant_after: prefactor(&after, &fr, &b3),
        nonresonant_after: prefactor(&after, &fnr, &b4),
        overall: prefactor(&end_pts, &fmax, &b5),
    };
    let orr = traj.at(0.0);
    let nonresonant_over_resonant = before
        .iter()
        .map(|p| p.f_nr * (1.0 + p.tau.abs()) / (gamma * p.f_r))
        .fold(0.0, f64::max);
    let lyapunov_defect = if beta > 0.0 {
        let l: Vec<(f64, f64)> = traj
            .lyapunov()
            .into_iter()
            .filter(|(t, _)| *t < 0.0)
            .collect();
        let scale = l
            .iter()
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        l.windows(2)
            .map(|w| (w[0].1 - w[1].1).max(0.0))
            .fold(0.0, f64::max)
            / scale
    } else {
        0.0
    };
    Ok(EnvelopeReport {
        beta,
        gamma,
        fitted,
        prefactor_at_c_growth,
        orr_ratio: gamma * orr.f_r / orr.f_nr,
        nonresonant_over_resonant,
        lyapunov_defect,
        amplification,
    })
}

/// Accumulated resonant growth `M_G = (sqrt(eta)^N / N!)^{2c}` with `N = floor(sqrt(eta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxGrowth {
    pub eta: f64,
    pub c: f64,
    pub n: u64,
    pub log_m_g: f64,
    /// `ln(M_G eta^{mu/8} e^{-(mu/2) sqrt(eta)})` with `mu = 4c`.
    pub log_envelope_ratio: f64,
}

impl MaxGrowth {
    pub fn m_g(&self) -> f64 {
        self.log_m_g.exp()
    }
    pub fn envelope_ratio(&self) -> f64 {
        self.log_envelope_ratio.exp()
    }
    /// Stirling form `2c (N ln(sqrt(eta)/N) + N - ln sqrt(2 pi N))` of `ln M_G`.
    pub fn stirling(&self) -> f64 {
        let n = self.n as f64;
        2.0 * self.c
            * (n * (0.5 * self.eta.ln() - n.ln()) + n - 0.5 * (2.0 * std::f64::consts::PI * n).ln())
    }
}

/// Evaluated entirely in log space, so `eta = 10^6` does not overflow.
pub fn max_growth(eta: f64, c: f64) -> Result<MaxGrowth, ToyError> {
    if !(eta >= 1.0 && eta.is_finite() && c > 0.0 && c.is_finite()) {
        return Err(ToyError::BadGrowthArgs { eta, c });
    }
    let n = crate::multiplier::floor_sqrt(eta);
    let log_fact: f64 = (2..=n).map(|i| (i as f64).ln()).sum();
    let log_m_g = 2.0 * c * (n as f64 * 0.5 * eta.ln() - log_fact);
    let mu = 4.0 * c;
    let log_envelope_ratio = log_m_g + mu / 8.0 * eta.ln() - mu / 2.0 * eta.sqrt();
    Ok(MaxGrowth {
        eta,
        c,
        n,
        log_m_g,
        log_envelope_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(beta: f64, gamma: f64) -> ToyParams {
        ToyParams {
            beta,
            gamma,
            c_growth: 1.5,
        }
    }

    #[test]
    fn zero_coupling_is_constant() {
        let traj = toy_canonical(&params(0.0, 16.0)).unwrap();
        assert!(traj.points.iter().all(|p| p.f_r == 1.0 && p.f_nr == 1.0));
    }

    #[test]
    fn trajectories_are_monotone() {
        let traj = toy_canonical(&params(0.3, 32.0)).unwrap();
        for w in traj.points.windows(2) {
            assert!(w[1].f_r >= w[0].f_r && w[1].f_nr >= w[0].f_nr);
        }
        assert!(traj.last().f_r >= 1.0 && traj.last().f_nr >= 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        let p = params(0.25, 16.0);
        assert!(matches!(
            toy_integrate(&p, -1.0, 1.0, 0.0, 1.0, 0.1),
            Err(ToyError::NonPositiveData { .. })
        ));
        assert!(matches!(
            toy_integrate(&p, 1.0, -1.0, 1.0, 1.0, 0.1),
            Err(ToyError::BadWindow { .. })
        ));
        assert!(params(0.5, 16.0).validate().is_err());
        assert!(params(0.1, 0.5).validate().is_err());
        let shifted = toy_integrate(&p, -8.0, 16.0, 1.0, 1.0, 0.01).unwrap();
        assert_eq!(growth_envelope(&shifted), Err(ToyError::NotCanonical));
    }

    #[test]
    fn zero_coupling_constants() {
        let gamma = 16.0;
        let report = growth_envelope(&toy_canonical(&params(0.0, gamma)).unwrap()).unwrap();
        let f = report.fitted;
        // f_NR = 1 <= C gamma / (1 + |tau|) is tight at tau = -gamma
        assert!((f.nonresonant_before - (1.0 + gamma) / gamma).abs() < 1e-10);
        for c in [
            f.resonant_before,
            f.resonant_after,
            f.nonresonant_after,
            f.overall,
        ] {
            assert!(c <= 1.0, "{f:?}");
        }
    }

    #[test]
    fn max_growth_examples() {
        let one = max_growth(1.0, 1.6).unwrap();
        assert_eq!(one.n, 1);
        assert_eq!(one.m_g(), 1.0);
        let four = max_growth(4.0, 1.2).unwrap();
        assert!((four.m_g() - 2f64.powf(2.4)).abs() < 1e-12);
        let big = max_growth(1e6, 4.0).unwrap();
        assert!(big.log_m_g.is_finite() && big.log_envelope_ratio.is_finite());
        assert!(max_growth(0.5, 2.0).is_err());
    }
}
