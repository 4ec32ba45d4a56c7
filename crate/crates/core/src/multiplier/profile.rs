use super::{LambdaSchedule, MultiplierError, Weight, WeightParams};
use crate::spectral::{bracket, l1_len};
use serde::Serialize;

/// One sample of the weight and its multipliers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightRow {
    pub t: f64,
    pub k: i64,
    pub eta: f64,
    pub w: f64,
    /// Non-resonant envelope `w_NR`; `w / w_nr` is the resonant dip.
    pub w_nr: f64,
    pub dt_w: f64,
    pub j: f64,
    /// `A = e^{lambda(t) |k,eta|^s} <k,eta>^sigma J`; `inf` when it overflows, see `ln_a`.
    pub a: f64,
    pub ln_a: f64,
}

/// Sample `w_k(t, eta)`, `w_NR`, `dw/dt`, `J` and `A` on a time grid for every `k` in `ks`.
///
/// `mu` is taken as given rather than derived from `params`, so profiles can be drawn
/// for parameter pairs outside the validated set; `params` supplies `lambda`, `sigma`
/// and `s` for `A`.
pub fn weight_profile(
    params: &WeightParams,
    mu: f64,
    eta: f64,
    ks: &[i64],
    times: &[f64],
) -> Result<Vec<WeightRow>, MultiplierError> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(MultiplierError::InvalidParams {
            field: "mu",
            reason: format!("{mu} is not positive"),
        });
    }
    if !eta.is_finite() {
        return Err(MultiplierError::InvalidParams {
            field: "eta",
            reason: format!("{eta} is not finite"),
        });
    }
    let lambda = LambdaSchedule::new(params)?;
    let weight = Weight::new(mu);
    let mut rows = Vec::with_capacity(ks.len() * times.len());
    for &k in ks {
        let mode = weight.mode(k, eta);
        let (kf, size, br) = (k as f64, l1_len(k as f64, eta), bracket(k as f64, eta));
        for &t in times {
            let (w, dt_w) = mode.eval(mu, t);
            let (ln_w, _) = mode.eval_log(mu, t);
            let ln_jt = mu * eta.abs().sqrt() - ln_w;
            let ln_j = ln_jt + (mu * kf.abs().sqrt() - ln_jt).exp().ln_1p();
            let ln_a = lambda.at(t) * size.powf(params.s) + params.sigma * br.ln() + ln_j;
            rows.push(WeightRow {
                t,
                k,
                eta,
                w,
                w_nr: weight.w_nr(t, eta),
                dt_w,
                j: ln_j.exp(),
                a: ln_a.exp(),
                ln_a,
            });
        }
    }
    Ok(rows)
}
