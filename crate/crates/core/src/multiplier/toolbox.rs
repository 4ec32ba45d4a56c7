//! Numerical checks of the elementary inequalities used in the energy estimates.
//!
//! Scalar tools sample `x, y >= 0` log-uniformly over `spec.eta_range` (plus the
//! degenerate point `0`); the argmax tuple reports them as `x`, `y` and, where
//! relevant, `delta`. Convolution tools draw Gaussian vectors on the lattice
//! `{-L..=L}` and compare against directly computed sums.

use super::sweep::{log_uniform, run_sweep, Draw, Eval, LemmaReport, SweepSpec, Tuple};
use super::MultiplierError;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ToolId {
    TriangleS,
    Concavity,
    ImprovedTriangle,
    SplitTriangle,
    ExpAbsorb,
    SobolevAbsorb,
    YoungL2,
    CsYoung,
    Cs2young,
}

impl ToolId {
    pub const ALL: [ToolId; 9] = [
        ToolId::TriangleS,
        ToolId::Concavity,
        ToolId::ImprovedTriangle,
        ToolId::SplitTriangle,
        ToolId::ExpAbsorb,
        ToolId::SobolevAbsorb,
        ToolId::YoungL2,
        ToolId::CsYoung,
        ToolId::Cs2young,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ToolId::TriangleS => "TRIANGLE_S",
            ToolId::Concavity => "CONCAVITY",
            ToolId::ImprovedTriangle => "IMPROVED_TRIANGLE",
            ToolId::SplitTriangle => "SPLIT_TRIANGLE",
            ToolId::ExpAbsorb => "EXP_ABSORB",
            ToolId::SobolevAbsorb => "SOBOLEV_ABSORB",
            ToolId::YoungL2 => "YOUNG_L2",
            ToolId::CsYoung => "CS_YOUNG",
            ToolId::Cs2young => "CS_2YOUNG",
        }
    }

    /// Sharp ceiling of the tool, if it has an explicit constant.
    pub fn default_ceiling(self, spec: &SweepSpec) -> Option<f64> {
        match self {
            ToolId::TriangleS | ToolId::SplitTriangle | ToolId::ExpAbsorb => Some(1.0),
            ToolId::ImprovedTriangle => Some(spec.s / (spec.c_ratio - 1.0).powf(1.0 - spec.s)),
            _ => None,
        }
    }
}

impl FromStr for ToolId {
    type Err = MultiplierError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ToolId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| MultiplierError::InvalidSweep(format!("unknown tool id `{s}`")))
    }
}

fn br(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

fn sample_x(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if rng.gen::<f64>() < 0.05 {
        lo
    } else {
        log_uniform(rng, lo.max(1e-6), hi)
    }
}

fn xy(x: f64, y: f64, delta: f64) -> Tuple {
    Tuple {
        k: f64::NAN,
        l: f64::NAN,
        eta: x,
        xi: y,
        t: delta,
    }
}

fn sample(ratio: f64, tuple: Tuple) -> Draw {
    Draw::Sample(Eval {
        ratio,
        aux: [0.0; 2],
        flag: false,
        tuple,
    })
}

/// Sample the tool's hypotheses and report the largest `LHS / RHS`.
///
/// When `spec.ceiling` is `None` the tool's explicit constant (if any) is used.
pub fn inequality_toolbox_check(
    tool: ToolId,
    spec: &SweepSpec,
) -> Result<LemmaReport, MultiplierError> {
    spec.validate()?;
    let mut spec = spec.clone();
    if spec.ceiling.is_none() {
        spec.ceiling = tool.default_ceiling(&spec);
    }
    let spec = &spec;
    let s = spec.s;
    if !(s > 0.0 && s <= 1.0) {
        return Err(MultiplierError::InvalidSweep(format!(
            "s = {s} outside (0, 1]"
        )));
    }
    let (lo, hi) = spec.eta_range;
    let mut details = BTreeMap::new();
    let acc = match tool {
        ToolId::TriangleS => run_sweep(spec, |rng| {
            let (x, y) = (sample_x(rng, lo, hi), sample_x(rng, lo, hi));
            let sub = br(x + y).powf(s) / (br(x).powf(s) + br(y).powf(s));
            let diff = (br(x).powf(s) - br(y).powf(s)).abs() / br(x - y).powf(s);
            sample(sub.max(diff), xy(x, y, f64::NAN))
        }),
        ToolId::Concavity => run_sweep(spec, |rng| {
            let (x, y) = (sample_x(rng, lo, hi), sample_x(rng, lo, hi));
            let lhs = (br(x).powf(s) - br(y).powf(s)).abs();
            let rhs = br(x - y) / (br(x).powf(1.0 - s) + br(y).powf(1.0 - s));
            sample(lhs / rhs, xy(x, y, f64::NAN))
        }),
        ToolId::ImprovedTriangle => {
            let c = spec.c_ratio;
            if c <= 1.0 {
                return Err(MultiplierError::InvalidSweep(
                    "IMPROVED_TRIANGLE needs c_ratio > 1".into(),
                ));
            }
            run_sweep(spec, |rng| {
                let x = sample_x(rng, lo, hi);
                let y = x + (2.0 * rng.gen::<f64>() - 1.0) * x / c;
                let lhs = (br(x).powf(s) - br(y).powf(s)).abs();
                sample(lhs / br(x - y).powf(s), xy(x, y, f64::NAN))
            })
        }
        ToolId::SplitTriangle => run_sweep(spec, |rng| {
            let (a, b) = (sample_x(rng, lo, hi), sample_x(rng, lo, hi));
            let (x, y) = (a.max(b), a.min(b));
            let (bx, by) = (br(x), br(y));
            let rhs = (bx / (bx + by)).powf(1.0 - s) * (bx.powf(s) + by.powf(s));
            sample(br(x + y).powf(s) / rhs, xy(x, y, f64::NAN))
        }),
        ToolId::ExpAbsorb => {
            let (a, b, c, d) = (spec.exp_alpha, spec.exp_beta, spec.exp_c, spec.delta);
            if !(a > b && b >= 0.0 && c > 0.0 && d > 0.0) {
                return Err(MultiplierError::InvalidSweep(
                    "EXP_ABSORB needs alpha > beta >= 0, C, delta > 0".into(),
                ));
            }
            let shift = c * (c / d).powf(b / (a - b));
            // the extremal point x* = (C beta / (delta alpha))^{1/(alpha - beta)} is always probed
            details.insert("log_constant".into(), shift);
            run_sweep(spec, |rng| {
                let x = sample_x(rng, lo, hi);
                sample(
                    (c * x.powf(b) - d * x.powf(a) - shift).exp(),
                    xy(x, f64::NAN, d),
                )
            })
        }
        ToolId::SobolevAbsorb => {
            let (a, sigma, dmax) = (spec.exp_alpha, spec.sigma, spec.delta);
            if !(a > 0.0 && sigma > 0.0 && dmax > 0.0 && dmax <= 1.0) {
                return Err(MultiplierError::InvalidSweep(
                    "SOBOLEV_ABSORB needs alpha, sigma > 0 and 0 < delta <= 1".into(),
                ));
            }
            run_sweep(spec, |rng| {
                let x = sample_x(rng, lo, hi);
                let d = log_uniform(rng, dmax * 1e-4, dmax);
                let lr = sigma * br(x).ln() + sigma / a * d.ln() - d * x.powf(a);
                sample(lr.exp(), xy(x, f64::NAN, d))
            })
        }
        ToolId::YoungL2 | ToolId::CsYoung | ToolId::Cs2young => {
            let l = spec.lattice;
            if l == 0 || spec.sigma <= 0.5 {
                return Err(MultiplierError::InvalidSweep(
                    "convolution tools need lattice > 0 and sigma > 1/2".into(),
                ));
            }
            let small = young_sweep(tool, spec, l);
            let double = young_sweep(tool, spec, 2 * l);
            details.insert("constant_lattice".into(), small.max);
            details.insert("constant_doubled_lattice".into(), double.max);
            details.insert("doubling_drift".into(), double.max / small.max);
            details.insert(
                "weight_l2_bound".into(),
                weight_norm(spec.sigma, 2 * l).powi(if tool == ToolId::Cs2young { 2 } else { 1 }),
            );
            small.merge(double)
        }
    };
    let max = acc.max;
    let mut report = LemmaReport::finish(tool.as_str(), spec, acc, max, acc.argmax, None, details);
    report.argmax_tuple = rename(report.argmax_tuple);
    Ok(report)
}

fn rename(map: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    map.into_iter()
        .map(|(k, v)| {
            let name = match k.as_str() {
                "eta" => "x",
                "xi" => "y",
                "t" => "delta",
                "k" => "lattice",
                other => other,
            };
            (name.to_string(), v)
        })
        .collect()
}

/// `|| <.>^{-sigma} ||` on `{-L..=L}`.
fn weight_norm(sigma: f64, l: usize) -> f64 {
    let l = l as i64;
    (-l..=l)
        .map(|n| br(n as f64).powf(-2.0 * sigma))
        .sum::<f64>()
        .sqrt()
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // random per-vector decay exponent spreads mass between smooth and rough vectors
    let p: f64 = rng.gen_range(0.0..3.0);
    let half = (n / 2) as f64;
    (0..n)
        .map(|i| {
            let g: f64 = rng.sample(StandardNormal);
            g / br(i as f64 - half).powf(p)
        })
        .collect()
}

/// Full linear convolution; index `i` of the result is lattice point `i - (la/2 + lb/2)`.
fn conv(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sobolev(v: &[f64], sigma: f64) -> f64 {
    let half = (v.len() / 2) as f64;
    v.iter()
        .enumerate()
        .map(|(i, x)| (x * br(i as f64 - half).powf(sigma)).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Restrict a centred full convolution back to the central `n` points.
fn centre(v: &[f64], n: usize) -> &[f64] {
    let off = (v.len() - n) / 2;
    &v[off..off + n]
}

fn young_sweep(tool: ToolId, spec: &SweepSpec, l: usize) -> super::sweep::Acc {
    let n = 2 * l + 1;
    let sigma = spec.sigma;
    let mut sub = spec.clone();
    sub.samples = spec.samples.min(20_000);
    run_sweep(&sub, |rng| {
        let f = gaussian(rng, n);
        let g = gaussian(rng, n);
        let h = gaussian(rng, n);
        let ratio = match tool {
            ToolId::YoungL2 => l2(&conv(&f, &h)) / (l2(&f) * sobolev(&h, sigma)),
            ToolId::CsYoung => {
                let gh = conv(&g, &h);
                let ip: f64 = f.iter().zip(centre(&gh, n)).map(|(a, b)| a * b).sum();
                ip.abs() / (l2(&f) * l2(&g) * sobolev(&h, sigma))
            }
            _ => {
                let b = gaussian(rng, n);
                let ghb = conv(&conv(&g, &h), &b);
                let ip: f64 = f.iter().zip(centre(&ghb, n)).map(|(a, b)| a * b).sum();
                ip.abs() / (l2(&f) * l2(&g) * sobolev(&h, sigma) * sobolev(&b, sigma))
            }
        };
        sample(
            ratio,
            Tuple {
                k: l as f64,
                ..Tuple::NONE
            },
        )
    })
}
