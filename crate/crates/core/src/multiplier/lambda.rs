use super::{MultiplierError, WeightParams};

/// Radius of Gevrey regularity `lambda(t)`.
///
/// Constant `(3/4) lambda0 + (1/4) lambda'` up to `t = 1`, then
/// `1 + lambda(t) = (1 + lambda(1)) exp(-delta int_1^t <tau>^{-2s} dtau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSchedule {
    lambda1: f64,
    delta: f64,
    s: f64,
    floor: f64,
    head: f64,
}

impl LambdaSchedule {
    pub fn new(params: &WeightParams) -> Result<Self, MultiplierError> {
        params.validate()?;
        let sched = Self::unchecked(params);
        if sched.limit() <= sched.floor {
            return Err(MultiplierError::LambdaBound {
                delta: sched.delta,
                horizon: sched.crossing_time(),
            });
        }
        Ok(sched)
    }

    fn unchecked(p: &WeightParams) -> Self {
        let s = p.s;
        let head = simpson(&|x: f64| (1.0 + x * x).powf(-s), 1.0, 2.0, 1e-15);
        Self {
            lambda1: 0.75 * p.lambda0 + 0.25 * p.lambda_prime,
            delta: p.delta_lambda(),
            s,
            floor: 0.5 * (p.lambda0 + p.lambda_prime),
            head,
        }
    }

    /// `int_1^t (1 + tau^2)^{-s} dtau`.
    pub fn integral(&self, t: f64) -> f64 {
        let s = self.s;
        if t <= 1.0 {
            0.0
        } else if t <= 2.0 {
            simpson(&|x: f64| (1.0 + x * x).powf(-s), 1.0, t, 1e-15)
        } else if t.is_infinite() {
            self.head + tail(s, 2.0)
        } else {
            self.head + tail(s, 2.0) - tail(s, t)
        }
    }

    pub fn at(&self, t: f64) -> f64 {
        if t <= 1.0 {
            self.lambda1
        } else {
            (1.0 + self.lambda1) * (-self.delta * self.integral(t)).exp() - 1.0
        }
    }

    /// `d lambda / dt`; zero up to `t = 1`.
    pub fn dot(&self, t: f64) -> f64 {
        if t <= 1.0 {
            0.0
        } else {
            -self.delta * (1.0 + self.at(t)) * (1.0 + t * t).powf(-self.s)
        }
    }

    pub fn limit(&self) -> f64 {
        self.at(f64::INFINITY)
    }

    /// `(lambda0 + lambda') / 2`, the level `lambda` must stay above.
    pub fn floor(&self) -> f64 {
        self.floor
    }

    fn crossing_time(&self) -> f64 {
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        while self.at(hi) > self.floor && hi < 1e300 {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.at(mid) > self.floor {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// `int_T^inf (1 + tau^2)^{-s} dtau` for `T >= 2`, by the binomial series in `tau^{-2}`.
fn tail(s: f64, t: f64) -> f64 {
    let mut coef = 1.0;
    let mut sum = 0.0;
    for j in 0..200 {
        let jf = j as f64;
        let term = coef * t.powf(1.0 - 2.0 * s - 2.0 * jf) / (2.0 * s + 2.0 * jf - 1.0);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        coef *= -(s + jf) / (jf + 1.0);
    }
    sum
}

/// Adaptive Simpson quadrature.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, delta: Option<f64>) -> WeightParams {
        WeightParams {
            s,
            delta_lambda: delta,
            ..WeightParams::default()
        }
    }

    #[test]
    fn constant_before_one() {
        let l = LambdaSchedule::new(&params(1.0, None)).unwrap();
        assert_eq!(l.at(0.5), 0.75 + 0.125);
        assert_eq!(l.dot(0.5), 0.0);
    }

    #[test]
    fn closed_form_for_s_one() {
        let l = LambdaSchedule::new(&params(1.0, None)).unwrap();
        for &t in &[1.2f64, 1.9, 2.0, 2.5, 10.0, 1e3, 1e6] {
            let exact = t.atan() - std::f64::consts::FRAC_PI_4;
            assert!((l.integral(t) - exact).abs() < 1e-13, "t={t}");
        }
        assert!((l.integral(f64::INFINITY) - std::f64::consts::FRAC_PI_4).abs() < 1e-13);
    }

    #[test]
    fn tail_matches_quadrature() {
        for &s in &[0.55, 0.7, 0.9] {
            let q = simpson(&|x: f64| (1.0 + x * x).powf(-s), 2.0, 50.0, 1e-14);
            assert!((tail(s, 2.0) - tail(s, 50.0) - q).abs() < 1e-11, "s={s}");
        }
    }

    #[test]
    fn strictly_decreasing_and_bounded() {
        let l = LambdaSchedule::new(&params(1.0, None)).unwrap();
        let mut prev = l.at(1.0);
        for i in 1..200 {
            let t = 1.0 + i as f64 * 0.5;
            let v = l.at(t);
            assert!(v < prev);
            assert!(v > l.floor());
            prev = v;
        }
        assert!(l.limit() > l.floor());
    }

    #[test]
    fn rejects_fast_decay() {
        match LambdaSchedule::new(&params(1.0, Some(2.0))) {
            Err(MultiplierError::LambdaBound { horizon, .. }) => {
                assert!(horizon > 1.0 && horizon.is_finite())
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }
}
