use super::interval::resonant_k;

/// Piecewise branch of the weight at a given time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `t < sqrt(eta)`: `w = e^{-mu sqrt(eta)}`.
    Constant,
    /// Quadratic connection `w_NR` on `[sqrt(eta), 2 eta]`.
    Envelope,
    /// Resonant branch, left of the Orr time.
    ResonantLeft,
    /// Resonant branch, from the Orr time to the right edge.
    ResonantRight,
    /// `t >= 2 eta`: `w = 1`.
    Settled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Resonance {
    center: f64,
    lo: f64,
    hi: f64,
    depth: f64,
    slope_left: f64,
    slope_right: f64,
}

/// Precomputed ladder data for one mode `(k, eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeWeight {
    e: f64,
    sqrt_e: f64,
    inv_span2: f64,
    res: Option<Resonance>,
}

/// Evaluator for `w_k(t, eta)` and its time derivative at a fixed `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    mu: f64,
}

impl Weight {
    pub fn new(mu: f64) -> Self {
        Self { mu }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mode(&self, k: i64, eta: f64) -> ModeWeight {
        ModeWeight::new(k, eta)
    }

    pub fn w(&self, k: i64, t: f64, eta: f64) -> f64 {
        self.mode(k, eta).eval(self.mu, t).0
    }

    pub fn dt_w(&self, k: i64, t: f64, eta: f64) -> f64 {
        self.mode(k, eta).eval(self.mu, t).1
    }

    /// Non-resonant envelope `w_NR` extended by its constant branches.
    pub fn w_nr(&self, t: f64, eta: f64) -> f64 {
        ModeWeight::new(0, eta).eval(self.mu, t).0
    }

    pub fn dt_w_nr(&self, t: f64, eta: f64) -> f64 {
        ModeWeight::new(0, eta).eval(self.mu, t).1
    }
}

impl ModeWeight {
    pub fn new(k: i64, eta: f64) -> Self {
        let e = eta.abs();
        let sqrt_e = e.sqrt();
        let span = 2.0 * e - sqrt_e;
        let res = if e > 1.0 {
            resonant_k(k, eta).map(|r| {
                let r2 = (r * r) as f64;
                let center = e / r as f64;
                let half = e / r2;
                let lo = (center - half).max(sqrt_e);
                let peak = e / r2 - 1.0;
                Resonance {
                    center,
                    lo,
                    hi: center + half,
                    depth: r2 / e,
                    slope_left: if center > lo {
                        peak / (center - lo)
                    } else {
                        0.0
                    },
                    slope_right: peak / half,
                }
            })
        } else {
            None
        };
        Self {
            e,
            sqrt_e,
            inv_span2: 1.0 / (span * span),
            res,
        }
    }

    /// `|eta| <= 1`: the weight is identically one.
    pub fn is_trivial(&self) -> bool {
        self.e <= 1.0
    }

    pub fn is_resonant(&self) -> bool {
        self.res.is_some()
    }

    /// Orr time `eta/k` for resonant modes.
    pub fn orr_time(&self) -> Option<f64> {
        self.res.map(|r| r.center)
    }

    /// Resonant window actually used by the weight, `I~` clipped to `[sqrt(eta), 2 eta]`.
    pub fn resonant_window(&self) -> Option<(f64, f64)> {
        self.res.map(|r| (r.lo, r.hi))
    }

    /// Dip depth `k^2 / eta` of `w / w_NR` at the Orr time.
    pub fn depth(&self) -> Option<f64> {
        self.res.map(|r| r.depth)
    }

    pub fn branch(&self, t: f64) -> Branch {
        if self.is_trivial() {
            return Branch::Settled;
        }
        if t < self.sqrt_e {
            return Branch::Constant;
        }
        if t >= 2.0 * self.e {
            return Branch::Settled;
        }
        match self.res {
            Some(r) if t >= r.lo && t < r.center => Branch::ResonantLeft,
            Some(r) if t >= r.center && t < r.hi => Branch::ResonantRight,
            _ => Branch::Envelope,
        }
    }

    /// `(w, dw/dt)` evaluated with the formula of a given branch.
    pub fn eval_branch(&self, mu: f64, branch: Branch, t: f64) -> (f64, f64) {
        match branch {
            Branch::Constant => ((-mu * self.sqrt_e).exp(), 0.0),
            Branch::Settled => (1.0, 0.0),
            Branch::Envelope => self.envelope(mu, t),
            Branch::ResonantLeft | Branch::ResonantRight => {
                let r = self.res.expect("resonant branch on a non-resonant mode");
                let (w, dw) = self.envelope(mu, t);
                let (slope, sign) = if branch == Branch::ResonantLeft {
                    (r.slope_left, -1.0)
                } else {
                    (r.slope_right, 1.0)
                };
                let f = r.depth * (1.0 + slope * (t - r.center).abs());
                let df = r.depth * slope * sign;
                (f * w, df * w + f * dw)
            }
        }
    }

    /// `(ln w, (dw/dt) / w)` with the formula of a given branch; never underflows.
    pub fn eval_log_branch(&self, mu: f64, branch: Branch, t: f64) -> (f64, f64) {
        match branch {
            Branch::Constant => (-mu * self.sqrt_e, 0.0),
            Branch::Settled => (0.0, 0.0),
            Branch::Envelope => self.log_envelope(mu, t),
            Branch::ResonantLeft | Branch::ResonantRight => {
                let r = self.res.expect("resonant branch on a non-resonant mode");
                let (lw, rate) = self.log_envelope(mu, t);
                let (slope, sign) = if branch == Branch::ResonantLeft {
                    (r.slope_left, -1.0)
                } else {
                    (r.slope_right, 1.0)
                };
                let g = 1.0 + slope * (t - r.center).abs();
                (lw + (r.depth * g).ln(), rate + sign * slope / g)
            }
        }
    }

    /// `(ln w, (dw/dt) / w)`.
    pub fn eval_log(&self, mu: f64, t: f64) -> (f64, f64) {
        self.eval_log_branch(mu, self.branch(t), t)
    }

    /// `(ln w_NR, (dw_NR/dt) / w_NR)` including the constant branches.
    pub fn eval_log_envelope(&self, mu: f64, t: f64) -> (f64, f64) {
        if self.is_trivial() || t >= 2.0 * self.e {
            (0.0, 0.0)
        } else if t < self.sqrt_e {
            (-mu * self.sqrt_e, 0.0)
        } else {
            self.log_envelope(mu, t)
        }
    }

    fn log_envelope(&self, mu: f64, t: f64) -> (f64, f64) {
        let d = t - self.sqrt_e;
        (
            -mu * (self.sqrt_e - self.sqrt_e * d * d * self.inv_span2),
            2.0 * mu * self.sqrt_e * d * self.inv_span2,
        )
    }

    fn envelope(&self, mu: f64, t: f64) -> (f64, f64) {
        let d = t - self.sqrt_e;
        let w = (-mu * (self.sqrt_e - self.sqrt_e * d * d * self.inv_span2)).exp();
        (w, w * 2.0 * mu * self.sqrt_e * d * self.inv_span2)
    }

    /// `(w, dw/dt)`; at kinks the right derivative is returned.
    pub fn eval(&self, mu: f64, t: f64) -> (f64, f64) {
        self.eval_branch(mu, self.branch(t), t)
    }

    /// Envelope `w_NR` (with constant branches) at `t`.
    pub fn eval_envelope(&self, mu: f64, t: f64) -> (f64, f64) {
        if self.is_trivial() || t >= 2.0 * self.e {
            (1.0, 0.0)
        } else if t < self.sqrt_e {
            ((-mu * self.sqrt_e).exp(), 0.0)
        } else {
            self.envelope(mu, t)
        }
    }

    /// Every seam `(t, branch on the left, branch on the right)` in increasing time.
    pub fn seams(&self) -> Vec<(f64, Branch, Branch)> {
        if self.is_trivial() {
            return vec![];
        }
        let mut out = vec![];
        let first = match self.res {
            Some(r) if r.lo <= self.sqrt_e => Branch::ResonantLeft,
            _ => Branch::Envelope,
        };
        out.push((self.sqrt_e, Branch::Constant, first));
        if let Some(r) = self.res {
            if r.lo > self.sqrt_e {
                out.push((r.lo, Branch::Envelope, Branch::ResonantLeft));
            }
            out.push((r.center, Branch::ResonantLeft, Branch::ResonantRight));
            if r.hi < 2.0 * self.e {
                out.push((r.hi, Branch::ResonantRight, Branch::Envelope));
                out.push((2.0 * self.e, Branch::Envelope, Branch::Settled));
            } else {
                out.push((2.0 * self.e, Branch::ResonantRight, Branch::Settled));
            }
        } else {
            out.push((2.0 * self.e, Branch::Envelope, Branch::Settled));
        }
        out
    }

    /// Times where `w` or `dw/dt` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.seams().into_iter().map(|s| s.0).collect()
    }
}
