//! Randomized certification of the weight lemmas.
//!
//! Every sweep draws tuples `(k, l, eta, xi, t)` from a seeded generator, keeps the
//! ones satisfying the lemma's side conditions and records `LHS / RHS`. Chunks of
//! samples are processed in parallel, each with its own stream of the seed, and
//! merged in chunk order so reports are reproducible.

use super::interval::{critical_interval, floor_sqrt, resonant_index, IntervalKind};
use super::{ModeWeight, MultiplierError};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LemmaId {
    Trichotomy,
    DtwRatio,
    DtwExchange,
    WnrRatio,
    JGeneral,
    JImproved,
    JLxi,
    JCap,
    HalfDerivative,
}

impl LemmaId {
    pub const ALL: [LemmaId; 9] = [
        LemmaId::Trichotomy,
        LemmaId::DtwRatio,
        LemmaId::DtwExchange,
        LemmaId::WnrRatio,
        LemmaId::JGeneral,
        LemmaId::JImproved,
        LemmaId::JLxi,
        LemmaId::JCap,
        LemmaId::HalfDerivative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::Trichotomy => "TRICHOTOMY",
            LemmaId::DtwRatio => "DTW_RATIO",
            LemmaId::DtwExchange => "DTW_EXCHANGE",
            LemmaId::WnrRatio => "WNR_RATIO",
            LemmaId::JGeneral => "J_GENERAL",
            LemmaId::JImproved => "J_IMPROVED",
            LemmaId::JLxi => "J_LXI",
            LemmaId::JCap => "J_CAP",
            LemmaId::HalfDerivative => "HALF_DERIVATIVE",
        }
    }
}

impl FromStr for LemmaId {
    type Err = MultiplierError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LemmaId::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| MultiplierError::InvalidSweep(format!("unknown lemma id `{s}`")))
    }
}

/// Sampling ranges, side-condition knobs and the pass ceiling.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Admissible samples to collect.
    pub samples: usize,
    /// Range of `|eta|` (log-uniform); for inequality tools the range of `x, y`.
    pub eta_range: (f64, f64),
    pub seed: u64,
    pub mu: f64,
    /// Gevrey index used by the general exchange estimate and the toolbox.
    pub s: f64,
    /// Frequency ratio bound `1/alpha <= xi/eta <= alpha` for TRICHOTOMY.
    pub alpha: f64,
    /// TRICHOTOMY: force `k = l`; WNR_RATIO: force `xi = eta`.
    pub force_equal: bool,
    /// Pass threshold on the reported constant; `None` only requires a finite constant.
    pub ceiling: Option<f64>,
    /// Toolbox: the constant `C` of the improved triangle inequality.
    pub c_ratio: f64,
    /// Toolbox: exponents and constants of the exponential absorption.
    pub exp_alpha: f64,
    pub exp_beta: f64,
    pub exp_c: f64,
    pub delta: f64,
    /// Toolbox: Sobolev index for the absorption and convolution tools.
    pub sigma: f64,
    /// Toolbox: half-width of the 1D lattice for convolution tools.
    pub lattice: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            samples: 100_000,
            eta_range: (16.0, 2048.0),
            seed: 20_240_601,
            mu: 7.0,
            s: 1.0,
            alpha: 2.0,
            force_equal: false,
            ceiling: None,
            c_ratio: 2.0,
            exp_alpha: 1.0,
            exp_beta: 0.5,
            exp_c: 1.0,
            delta: 0.1,
            sigma: 2.0,
            lattice: 32,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), MultiplierError> {
        let (lo, hi) = self.eta_range;
        if self.samples == 0 {
            return Err(MultiplierError::InvalidSweep(
                "samples must be positive".into(),
            ));
        }
        if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
            return Err(MultiplierError::InvalidSweep(format!(
                "bad range ({lo}, {hi})"
            )));
        }
        if !(self.mu > 0.0 && self.alpha >= 1.0) {
            return Err(MultiplierError::InvalidSweep(
                "need mu > 0 and alpha >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
}

/// Outcome of a sweep. `max_ratio` is the empirical implied constant.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lemma_id: String,
    pub samples: usize,
    pub max_ratio: f64,
    pub argmax_tuple: BTreeMap<String, f64>,
    pub seed: u64,
    pub pass: bool,
    pub status: Status,
    pub attempted: usize,
    pub ceiling: Option<f64>,
    pub uncovered: Option<usize>,
    pub details: BTreeMap<String, f64>,
}

impl LemmaReport {
    pub(crate) fn finish(
        id: &str,
        spec: &SweepSpec,
        acc: Acc,
        max_ratio: f64,
        argmax: Tuple,
        uncovered: Option<usize>,
        details: BTreeMap<String, f64>,
    ) -> Self {
        let status = if acc.count == 0 {
            Status::Vacuous
        } else if max_ratio.is_finite()
            && spec.ceiling.is_none_or(|c| max_ratio <= c)
            && uncovered.is_none_or(|u| u == 0)
        {
            Status::Pass
        } else {
            Status::Fail
        };
        LemmaReport {
            lemma_id: id.to_string(),
            samples: acc.count,
            max_ratio,
            argmax_tuple: argmax.to_map(),
            seed: spec.seed,
            pass: status == Status::Pass,
            status,
            attempted: acc.attempted,
            ceiling: spec.ceiling,
            uncovered,
            details,
        }
    }
}

/// Sampled point; `NaN` marks unused coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tuple {
    pub k: f64,
    pub l: f64,
    pub eta: f64,
    pub xi: f64,
    pub t: f64,
}

impl Tuple {
    pub(crate) const NONE: Tuple = Tuple {
        k: f64::NAN,
        l: f64::NAN,
        eta: f64::NAN,
        xi: f64::NAN,
        t: f64::NAN,
    };

    fn to_map(self) -> BTreeMap<String, f64> {
        [
            ("k", self.k),
            ("l", self.l),
            ("eta", self.eta),
            ("xi", self.xi),
            ("t", self.t),
        ]
        .into_iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(n, v)| (n.to_string(), v))
        .collect()
    }
}

/// One admissible sample: the main ratio and up to two auxiliary values.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Eval {
    pub ratio: f64,
    pub aux: [f64; 2],
    pub flag: bool,
    pub tuple: Tuple,
}

/// Running reduction over samples.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Acc {
    pub count: usize,
    pub attempted: usize,
    pub excluded: usize,
    pub flagged: usize,
    pub max: f64,
    pub argmax: Tuple,
    pub min: f64,
    pub argmin: Tuple,
    pub aux_max: [f64; 2],
    pub aux_min: [f64; 2],
    /// Best distinct samples, largest first.
    pub top: [(f64, Tuple); TOP],
}

const TOP: usize = 8;

impl Acc {
    fn new() -> Self {
        Acc {
            count: 0,
            attempted: 0,
            excluded: 0,
            flagged: 0,
            max: f64::NEG_INFINITY,
            argmax: Tuple::NONE,
            min: f64::INFINITY,
            argmin: Tuple::NONE,
            aux_max: [f64::NEG_INFINITY; 2],
            aux_min: [f64::INFINITY; 2],
            top: [(f64::NEG_INFINITY, Tuple::NONE); TOP],
        }
    }

    fn offer(&mut self, ratio: f64, tuple: Tuple) {
        if !(ratio > self.top[TOP - 1].0) {
            return;
        }
        let pos = self
            .top
            .iter()
            .position(|(r, _)| ratio > *r)
            .unwrap_or(TOP - 1);
        self.top.copy_within(pos..TOP - 1, pos + 1);
        self.top[pos] = (ratio, tuple);
    }

    fn push(&mut self, e: Eval) {
        self.count += 1;
        self.offer(e.ratio, e.tuple);
        if e.flag {
            self.flagged += 1;
        }
        // NaN ratios count as the worst case
        if e.ratio > self.max || (e.ratio.is_nan() && !self.max.is_nan()) {
            self.max = e.ratio;
            self.argmax = e.tuple;
        }
        if e.ratio < self.min {
            self.min = e.ratio;
            self.argmin = e.tuple;
        }
        for i in 0..2 {
            self.aux_max[i] = self.aux_max[i].max(e.aux[i]);
            self.aux_min[i] = self.aux_min[i].min(e.aux[i]);
        }
    }

    pub(crate) fn merge(mut self, o: Acc) -> Acc {
        self.count += o.count;
        self.attempted += o.attempted;
        self.excluded += o.excluded;
        self.flagged += o.flagged;
        if o.max > self.max || (o.max.is_nan() && !self.max.is_nan()) {
            self.max = o.max;
            self.argmax = o.argmax;
        }
        if o.min < self.min {
            self.min = o.min;
            self.argmin = o.argmin;
        }
        for i in 0..2 {
            self.aux_max[i] = self.aux_max[i].max(o.aux_max[i]);
            self.aux_min[i] = self.aux_min[i].min(o.aux_min[i]);
        }
        for (r, t) in o.top {
            self.offer(r, t);
        }
        self
    }
}

/// Result of one draw.
pub(crate) enum Draw {
    Skip,
    /// Admissible by the sampling rule but excluded by a positivity requirement.
    Excluded,
    Sample(Eval),
}

const CHUNK: usize = 2048;

/// Run `draw` until `spec.samples` admissible samples are collected (or the attempt budget runs out).
pub(crate) fn run_sweep<F>(spec: &SweepSpec, draw: F) -> Acc
where
    F: Fn(&mut ChaCha8Rng) -> Draw + Sync,
{
    let chunks = spec.samples.div_ceil(CHUNK);
    let accs: Vec<Acc> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let target = CHUNK.min(spec.samples - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(c as u64);
            let mut acc = Acc::new();
            let budget = 200 * target;
            while acc.count < target && acc.attempted < budget {
                acc.attempted += 1;
                match draw(&mut rng) {
                    Draw::Skip => {}
                    Draw::Excluded => acc.excluded += 1,
                    Draw::Sample(e) => acc.push(e),
                }
            }
            acc
        })
        .collect();
    accs.into_iter().fold(Acc::new(), Acc::merge)
}

pub(crate) fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let lo = lo.max(1e-300);
    (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Option<f64> {
    (hi > lo).then(|| lo + rng.gen::<f64>() * (hi - lo))
}

fn jb(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// `ln J_k(t, eta)` computed without forming `J`.
fn log_j(mu: f64, k: i64, eta: f64, t: f64) -> f64 {
    let (lw, _) = ModeWeight::new(k, eta).eval_log(mu, t);
    let a = mu * eta.abs().sqrt() - lw;
    let b = mu * (k.unsigned_abs() as f64).sqrt();
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `|k - l, eta - xi|^{1/2}` in the l1 length.
fn gap(k: i64, l: i64, eta: f64, xi: f64) -> f64 {
    ((k - l).unsigned_abs() as f64 + (eta - xi).abs()).sqrt()
}

fn in_i(k: i64, eta: f64, t: f64) -> bool {
    critical_interval(k, eta, IntervalKind::I).contains(t)
}

/// Uniform time inside `I_{k,eta}`.
fn time_in_i(rng: &mut ChaCha8Rng, k: u64, eta: f64) -> Option<f64> {
    let i = critical_interval(k as i64, eta, IntervalKind::I);
    time_window(rng, i.t_lo, i.t_hi)
}

/// Frequencies `xi` (within `[lo, hi]`) for which `t` lies in `I_{k,xi}`.
fn xi_window(t: f64, k: u64, lo: f64, hi: f64) -> (f64, f64) {
    let kf = k as f64;
    let upper = t * 2.0 * kf * (kf + 1.0) / (2.0 * kf + 1.0);
    let lower = if k == 1 {
        t / 2.0
    } else {
        t * 2.0 * kf * (kf - 1.0) / (2.0 * kf - 1.0)
    };
    (lower.max(lo).max(kf * kf), upper.min(hi))
}

/// Time in `[a, b)`; half the draws land log-close to an endpoint, where the
/// lemma ratios typically peak.
fn time_window(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Option<f64> {
    if !(b > a) {
        return None;
    }
    let u: f64 = rng.gen();
    let off = (b - a) * 10f64.powf(-rng.gen_range(0.0..8.0));
    let t = if u < 0.25 {
        a + off
    } else if u < 0.5 {
        b - off
    } else {
        a + rng.gen::<f64>() * (b - a)
    };
    (t >= a && t < b).then_some(t)
}

/// Frequency partner with `xi / eta` in `[1/r, r]`; a third of the draws land
/// log-close to `eta`, where the exponential slack vanishes.
fn partner(rng: &mut ChaCha8Rng, eta: f64, r: f64) -> f64 {
    if rng.gen::<f64>() < 0.3 {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        eta * (1.0 + sign * 10f64.powf(-rng.gen_range(1.0..9.0)))
    } else {
        eta * r.powf(rng.gen_range(-1.0..=1.0))
    }
}

/// Frequency in `[lo, hi]`; a fifth of the draws sit just above a perfect square,
/// where the resonant slope `1 - k^2/eta` degenerates.
fn resonant_eta(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if rng.gen::<f64>() < 0.2 {
        let n = rng.gen_range(lo.sqrt().ceil()..=hi.sqrt().floor());
        let eta = n * n * (1.0 + 10f64.powf(-rng.gen_range(1.0..9.0)));
        if eta <= hi {
            return eta;
        }
    }
    log_uniform(rng, lo, hi)
}

fn near(rng: &mut ChaCha8Rng, k: i64, spread: i64) -> i64 {
    k + rng.gen_range(-spread..=spread)
}

/// Result of checking a tuple against a lemma's side conditions.
enum Outcome {
    Inadmissible,
    Excluded,
    Value(Eval),
}

impl Outcome {
    fn draw(self) -> Draw {
        match self {
            Outcome::Inadmissible => Draw::Skip,
            Outcome::Excluded => Draw::Excluded,
            Outcome::Value(e) => Draw::Sample(e),
        }
    }
}

fn value(ratio: f64, tuple: Tuple) -> Outcome {
    Outcome::Value(Eval {
        ratio,
        aux: [ratio, 0.0],
        flag: false,
        tuple,
    })
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo && x <= hi
}

fn ratio_within(a: f64, b: f64, r: f64) -> bool {
    let q = a / b;
    q >= 1.0 / r && q <= r
}

/// Sampled constant plus a seeded local search around the best tuple.
///
/// The search perturbs the continuous coordinates (and the integer ones when
/// `int_free`) and keeps admissible improvements, so the reported constant is a
/// sharper estimate of the supremum than the raw sampling maximum.
fn sweep_and_refine<S, E>(spec: &SweepSpec, int_free: bool, sample: S, eval: E) -> (Acc, f64, Tuple)
where
    S: Fn(&mut ChaCha8Rng) -> Option<Tuple> + Sync,
    E: Fn(Tuple) -> Outcome + Sync,
{
    let acc = run_sweep(spec, |rng| match sample(rng) {
        Some(t) => eval(t).draw(),
        None => Draw::Skip,
    });
    if acc.count == 0 || !acc.max.is_finite() {
        return (acc, acc.max, acc.argmax);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(u64::MAX);
    let (mut best, mut arg) = (acc.max, acc.argmax);
    for &(start_ratio, start) in acc.top.iter().filter(|(r, _)| r.is_finite()) {
        let (mut local, mut at) = (start_ratio, start);
        for h in [0.3, 0.1, 0.03, 0.01, 0.003, 0.001, 1e-4, 1e-5, 1e-6, 1e-7] {
            for _ in 0..400 {
                let mut p = at;
                // single axis, all axes independently, or a common rescaling
                let which = rng.gen_range(0..5);
                let common = (h * rng.gen_range(-1.0..1.0f64)).exp();
                let mut jitter = |x: f64, axis: usize| match which {
                    4 => x * common,
                    3 => x * (h * rng.gen_range(-1.0..1.0f64)).exp(),
                    w if w == axis => x * (h * rng.gen_range(-1.0..1.0f64)).exp(),
                    _ => x,
                };
                p.eta = jitter(p.eta, 0);
                p.xi = jitter(p.xi, 1);
                p.t = jitter(p.t, 2);
                if int_free && rng.gen::<f64>() < 0.1 {
                    let step = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    if rng.gen::<bool>() {
                        p.k += step;
                    } else {
                        p.l += step;
                    }
                }
                if let Outcome::Value(e) = eval(p) {
                    if e.ratio > local {
                        local = e.ratio;
                        at = e.tuple;
                    }
                }
            }
        }
        if local > best {
            best = local;
            arg = at;
        }
    }
    (acc, best, arg)
}

fn finish_constant(
    id: LemmaId,
    spec: &SweepSpec,
    run: (Acc, f64, Tuple),
    mut details: BTreeMap<String, f64>,
) -> LemmaReport {
    let (acc, best, arg) = run;
    details.insert("sampled_max".into(), acc.max);
    LemmaReport::finish(id.as_str(), spec, acc, best, arg, None, details)
}

fn random_k(rng: &mut ChaCha8Rng, eta: f64) -> Option<i64> {
    let n = floor_sqrt(eta);
    (n > 0).then(|| rng.gen_range(1..=n) as i64)
}

pub fn lemma_sweep(id: LemmaId, spec: &SweepSpec) -> Result<LemmaReport, MultiplierError> {
    spec.validate()?;
    let range = spec.eta_range;
    let (lo, hi) = range;
    if lo < 1.0 {
        return Err(MultiplierError::InvalidSweep(
            "lemma sweeps need eta >= 1".into(),
        ));
    }
    let mu = spec.mu;
    let mut details = BTreeMap::new();
    let report = match id {
        LemmaId::Trichotomy => {
            let alpha = spec.alpha;
            let c_alpha = 1.0 / (20.0 * alpha);
            let acc = run_sweep(spec, |rng| {
                let eta = log_uniform(rng, lo, hi);
                let (xi, t) = if spec.force_equal {
                    let Some(k) = random_k(rng, eta) else {
                        return Draw::Skip;
                    };
                    let Some(t) = time_in_i(rng, k as u64, eta) else {
                        return Draw::Skip;
                    };
                    let (a, b) = xi_window(t, k as u64, eta / alpha, eta * alpha);
                    let Some(xi) = uniform(rng, a, b) else {
                        return Draw::Skip;
                    };
                    (xi, t)
                } else {
                    let xi = eta * alpha.powf(rng.gen_range(-1.0..=1.0));
                    let t_lo = critical_time_floor(eta).max(critical_time_floor(xi));
                    let Some(t) = uniform(rng, t_lo, 2.0 * eta.min(xi)) else {
                        return Draw::Skip;
                    };
                    (xi, t)
                };
                let (Some(k), Some(l)) = (resonant_index(t, eta), resonant_index(t, xi)) else {
                    return Draw::Skip;
                };
                if spec.force_equal && k != l {
                    return Draw::Skip;
                }
                let (kf, lf) = (k as f64, l as f64);
                let case_a = k == l;
                let case_b = (t - eta / kf).abs() >= eta / (10.0 * alpha * kf * kf)
                    && (t - xi / lf).abs() >= xi / (10.0 * alpha * lf * lf);
                let sep = (eta - xi).abs() * lf / eta;
                let covered_ab = case_a || case_b;
                let ratio = if covered_ab { 0.0 } else { c_alpha / sep };
                Draw::Sample(Eval {
                    ratio,
                    aux: [if covered_ab { f64::INFINITY } else { sep }, 0.0],
                    flag: ratio > 1.0,
                    tuple: Tuple {
                        k: kf,
                        l: lf,
                        eta,
                        xi,
                        t,
                    },
                })
            });
            // uncovered: none of (a), (b), (c) holds, i.e. ratio > 1
            details.insert("c_alpha".into(), c_alpha);
            details.insert("min_separation_uncovered_by_ab".into(), acc.aux_min[0]);
            let (max, arg, unc) = (acc.max, acc.argmax, acc.flagged);
            LemmaReport::finish(id.as_str(), spec, acc, max, arg, Some(unc), details)
        }
        LemmaId::DtwRatio => {
            let eval = |p: Tuple| {
                let (k, eta, t) = (p.k, p.eta, p.t);
                if !within(eta, range)
                    || k < 1.0
                    || k > floor_sqrt(eta) as f64
                    || t <= 2.0 * eta.sqrt()
                    || !in_i(k as i64, eta, t)
                {
                    return Outcome::Inadmissible;
                }
                let (_, rate) = ModeWeight::new(0, eta).eval_log_envelope(mu, t);
                let r = rate * (1.0 + (t - eta / k).abs());
                Outcome::Value(Eval {
                    ratio: r.max(1.0 / r),
                    aux: [r, r],
                    flag: false,
                    tuple: p,
                })
            };
            let run = sweep_and_refine(
                spec,
                true,
                |rng| {
                    let eta = resonant_eta(rng, lo, hi);
                    let k = random_k(rng, eta)?;
                    let i = critical_interval(k, eta, IntervalKind::I);
                    let t = time_window(rng, i.t_lo.max(2.0 * eta.sqrt()), i.t_hi)?;
                    Some(Tuple {
                        k: k as f64,
                        eta,
                        t,
                        ..Tuple::NONE
                    })
                },
                eval,
            );
            details.insert("sup".into(), run.0.aux_max[0]);
            details.insert("inf".into(), run.0.aux_min[0]);
            finish_constant(id, spec, run, details)
        }
        LemmaId::DtwExchange => {
            // restricted window: both rates on the NR envelope
            let restricted = |p: Tuple| {
                let (eta, xi, t) = (p.eta, p.xi, p.t);
                let t_lo = (2.0 * xi.sqrt()).max(eta.sqrt()).max(1.0);
                if !within(eta, range) || !within(xi, range) || t <= t_lo || t >= 2.0 * xi.min(eta)
                {
                    return Outcome::Inadmissible;
                }
                let (_, re) = ModeWeight::new(0, eta).eval_log_envelope(mu, t);
                let (_, rx) = ModeWeight::new(0, xi).eval_log_envelope(mu, t);
                value(re / rx / jb(eta - xi), p)
            };
            let general = |p: Tuple| {
                let (eta, xi, t) = (p.eta, p.xi, p.t);
                if !within(eta, range)
                    || !ratio_within(xi, eta, 2.0)
                    || t < 1.0
                    || t > 2.5 * eta.max(xi)
                {
                    return Outcome::Inadmissible;
                }
                let (_, re) = ModeWeight::new(0, eta).eval_log_envelope(mu, t);
                let (_, rx) = ModeWeight::new(0, xi).eval_log_envelope(mu, t);
                let rhs = (re.sqrt() + eta.powf(spec.s / 2.0) / jb(t).powf(spec.s)) * jb(eta - xi);
                value(rx.sqrt() / rhs, p)
            };
            let r1 = sweep_and_refine(
                spec,
                false,
                |rng| {
                    let eta = log_uniform(rng, lo, hi);
                    let xi = if rng.gen::<bool>() {
                        log_uniform(rng, lo, hi)
                    } else {
                        partner(rng, eta, 4.0)
                    };
                    let t_lo = (2.0 * xi.sqrt()).max(eta.sqrt()).max(1.0);
                    let t = time_window(rng, t_lo, 2.0 * xi.min(eta))?;
                    Some(Tuple {
                        eta,
                        xi,
                        t,
                        ..Tuple::NONE
                    })
                },
                restricted,
            );
            let r2 = sweep_and_refine(
                spec,
                false,
                |rng| {
                    let eta = log_uniform(rng, lo, hi);
                    let xi = partner(rng, eta, 2.0);
                    let t = time_window(rng, 1.0, 2.5 * eta.max(xi))?;
                    Some(Tuple {
                        eta,
                        xi,
                        t,
                        ..Tuple::NONE
                    })
                },
                general,
            );
            details.insert("max_ratio_restricted_window".into(), r1.1);
            details.insert("max_ratio_general".into(), r2.1);
            let acc = r1.0.merge(r2.0);
            let (best, arg) = if r1.1 >= r2.1 {
                (r1.1, r1.2)
            } else {
                (r2.1, r2.2)
            };
            finish_constant(id, spec, (acc, best, arg), details)
        }
        LemmaId::WnrRatio => {
            let eval = |p: Tuple| {
                let (eta, xi, t) = (p.eta, p.xi, p.t);
                if !within(eta, range)
                    || !within(xi, range)
                    || (spec.force_equal && xi != eta)
                    || !(0.0..=2.5 * eta.max(xi)).contains(&t)
                {
                    return Outcome::Inadmissible;
                }
                let (le, _) = ModeWeight::new(0, eta).eval_log_envelope(mu, t);
                let (lx, _) = ModeWeight::new(0, xi).eval_log_envelope(mu, t);
                value((lx - le - mu * (eta - xi).abs().sqrt()).exp(), p)
            };
            let run = sweep_and_refine(
                spec,
                false,
                |rng| {
                    let eta = log_uniform(rng, lo, hi);
                    let xi = if spec.force_equal {
                        eta
                    } else if rng.gen::<bool>() {
                        log_uniform(rng, lo, hi)
                    } else {
                        partner(rng, eta, 4.0)
                    };
                    let t = time_window(rng, 0.0, 2.5 * eta.max(xi))?;
                    Some(Tuple {
                        eta,
                        xi,
                        t,
                        ..Tuple::NONE
                    })
                },
                eval,
            );
            finish_constant(id, spec, run, details)
        }
        LemmaId::JGeneral => {
            let eval = |p: Tuple| {
                let (k, l, eta, xi, t) = (p.k as i64, p.l as i64, p.eta, p.xi, p.t);
                if !within(eta, range)
                    || k < 1
                    || !in_i(k, eta, t)
                    || !ratio_within(xi, eta, 4.0)
                    || (k - l).abs() > 3
                {
                    return Outcome::Inadmissible;
                }
                let kf = p.k;
                let pre = eta / (kf * kf * (1.0 + (t - eta / kf).abs()));
                let lr = log_j(mu, k, eta, t)
                    - log_j(mu, l, xi, t)
                    - pre.ln()
                    - 9.0 * mu * gap(k, l, eta, xi);
                value(lr.exp(), p)
            };
            let run = sweep_and_refine(
                spec,
                true,
                |rng| {
                    let eta = resonant_eta(rng, lo, hi);
                    let k = random_k(rng, eta)?;
                    let t = time_in_i(rng, k as u64, eta)?;
                    let xi = partner(rng, eta, 4.0);
                    let l = near(rng, k, 3);
                    Some(Tuple {
                        k: k as f64,
                        l: l as f64,
                        eta,
                        xi,
                        t,
                    })
                },
                eval,
            );
            finish_constant(id, spec, run, details)
        }
        LemmaId::JImproved => {
            let eval = |p: Tuple| {
                let (k, l, eta, xi, t) = (p.k as i64, p.l as i64, p.eta, p.xi, p.t);
                let in_k = in_i(k, eta, t);
                let close = ratio_within(xi, eta, 2.0);
                let side = !in_k || k == l || close;
                if !within(eta, range)
                    || !ratio_within(xi.abs(), eta, 4.0)
                    || (k - l).abs() > 3
                    || !(0.0..=2.5 * eta).contains(&t)
                    || !side
                {
                    return Outcome::Inadmissible;
                }
                let lr =
                    log_j(mu, k, eta, t) - log_j(mu, l, xi, t) - 10.0 * mu * gap(k, l, eta, xi);
                value(lr.exp(), p)
            };
            let run = sweep_and_refine(
                spec,
                true,
                |rng| {
                    let eta = log_uniform(rng, lo, hi);
                    let n = floor_sqrt(eta) as i64;
                    let k = rng.gen_range(-(n + 2)..=(n + 2));
                    let l = if rng.gen::<f64>() < 0.25 {
                        k
                    } else {
                        near(rng, k, 3)
                    };
                    let sign = if rng.gen::<f64>() < 0.1 { -1.0 } else { 1.0 };
                    let xi = sign * partner(rng, eta, 4.0);
                    let t = time_window(rng, 0.0, 2.5 * eta)?;
                    Some(Tuple {
                        k: k as f64,
                        l: l as f64,
                        eta,
                        xi,
                        t,
                    })
                },
                eval,
            );
            finish_constant(id, spec, run, details)
        }
        LemmaId::JLxi => {
            let eval = |p: Tuple| {
                let (k, l, eta, xi, t) = (p.k as i64, p.l as i64, p.eta, p.xi, p.t);
                if !within(xi, range)
                    || l < 1
                    || !in_i(l, xi, t)
                    || in_i(k, eta, t)
                    || !ratio_within(eta, xi, 2.0)
                    || (k - l).abs() > 3
                {
                    return Outcome::Inadmissible;
                }
                let lf = p.l;
                let pre = lf * lf * (1.0 + (t - xi / lf).abs()) / xi;
                let lr = log_j(mu, k, eta, t)
                    - log_j(mu, l, xi, t)
                    - pre.ln()
                    - 11.0 * mu * gap(k, l, eta, xi);
                value(lr.exp(), p)
            };
            let run = sweep_and_refine(
                spec,
                true,
                |rng| {
                    let xi = resonant_eta(rng, lo, hi);
                    let l = random_k(rng, xi)?;
                    let t = time_in_i(rng, l as u64, xi)?;
                    let eta = partner(rng, xi, 2.0);
                    let k = near(rng, l, 3);
                    Some(Tuple {
                        k: k as f64,
                        l: l as f64,
                        eta,
                        xi,
                        t,
                    })
                },
                eval,
            );
            finish_constant(id, spec, run, details)
        }
        LemmaId::JCap => {
            let eval = |p: Tuple| {
                let (k, l, eta, xi, t) = (p.k as i64, p.l as i64, p.eta, p.xi, p.t);
                if !within(eta, range)
                    || k < 1
                    || !in_i(k, eta, t)
                    || !in_i(k, xi, t)
                    || !ratio_within(xi, eta, 2.0)
                    || (k - l).abs() > 3
                {
                    return Outcome::Inadmissible;
                }
                let (_, rk) = ModeWeight::new(k, eta).eval_log(mu, t);
                let (_, rl) = ModeWeight::new(l, xi).eval_log(mu, t);
                if !(rk > 0.0 && rl > 0.0) {
                    return Outcome::Excluded;
                }
                let kf = p.k;
                let pre = eta / (kf * kf) * rk.sqrt() * rl.sqrt();
                let lr = log_j(mu, k, eta, t)
                    - log_j(mu, l, xi, t)
                    - pre.ln()
                    - 11.0 * mu * gap(k, l, eta, xi);
                value(lr.exp(), p)
            };
            let run = sweep_and_refine(
                spec,
                true,
                |rng| {
                    let eta = resonant_eta(rng, lo, hi);
                    let k = random_k(rng, eta)?;
                    let t = time_in_i(rng, k as u64, eta)?;
                    let (a, b) = xi_window(t, k as u64, eta / 2.0, eta * 2.0);
                    let xi = if rng.gen::<f64>() < 0.3 {
                        partner(rng, eta, 1.0 + 1e-3)
                    } else {
                        uniform(rng, a, b)?
                    };
                    let l = near(rng, k, 3);
                    Some(Tuple {
                        k: k as f64,
                        l: l as f64,
                        eta,
                        xi,
                        t,
                    })
                },
                eval,
            );
            details.insert("excluded_nonpositive_dtw".into(), run.0.excluded as f64);
            finish_constant(id, spec, run, details)
        }
        LemmaId::HalfDerivative => {
            let eval = |p: Tuple| {
                let (k, l, eta, xi, t) = (p.k as i64, p.l as i64, p.eta, p.xi, p.t);
                let kk = 2 * floor_sqrt(eta.max(xi)) as i64 + 2;
                if !within(eta, range)
                    || !within(xi, range)
                    || !(0.0..=0.5 * eta.sqrt().min(xi.sqrt())).contains(&t)
                    || k.abs() > kk
                    || l.abs() > kk
                {
                    return Outcome::Inadmissible;
                }
                let d = log_j(mu, k, eta, t) - log_j(mu, l, xi, t);
                // ln |e^d - 1| without overflow
                let ln_diff = if d > 0.0 {
                    d + (-(-d).exp_m1()).ln()
                } else {
                    (-d.exp_m1()).ln()
                };
                let bracket = jb((k - l).unsigned_abs() as f64 + (eta - xi).abs());
                let size = (xi + eta + (k.unsigned_abs() + l.unsigned_abs()) as f64).sqrt();
                let lr = ln_diff - (bracket / size).ln() - 11.0 * mu * gap(k, l, eta, xi);
                value(lr.exp(), p)
            };
            let run = sweep_and_refine(
                spec,
                true,
                |rng| {
                    let eta = log_uniform(rng, lo, hi);
                    let xi = if rng.gen::<f64>() < 0.5 {
                        partner(rng, eta, 2.0)
                    } else {
                        log_uniform(rng, lo, hi)
                    };
                    let t = time_window(rng, 0.0, 0.5 * eta.sqrt().min(xi.sqrt()))?;
                    let kk = 2 * floor_sqrt(eta.max(xi)) as i64 + 2;
                    let k = rng.gen_range(-kk..=kk);
                    let l = if rng.gen::<bool>() {
                        near(rng, k, 3)
                    } else {
                        rng.gen_range(-kk..=kk)
                    };
                    Some(Tuple {
                        k: k as f64,
                        l: l as f64,
                        eta,
                        xi,
                        t,
                    })
                },
                eval,
            );
            finish_constant(id, spec, run, details)
        }
    };
    Ok(report)
}

fn critical_time_floor(eta: f64) -> f64 {
    super::interval::critical_time(floor_sqrt(eta), eta)
}
