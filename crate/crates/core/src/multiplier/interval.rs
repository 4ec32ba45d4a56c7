/// Which family of resonant interval to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum IntervalKind {
    /// `I_{k,eta} = [t_{|k|,eta}, t_{|k|-1,eta}]`.
    I,
    /// `I~_{k,eta} = [eta/k - eta/k^2, eta/k + eta/k^2]`.
    ITilde,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ResonantInterval {
    pub k: i64,
    pub eta: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub kind: IntervalKind,
}

impl ResonantInterval {
    pub fn is_empty(&self) -> bool {
        self.kind == IntervalKind::Empty
    }

    pub fn contains(&self, t: f64) -> bool {
        !self.is_empty() && t >= self.t_lo && t <= self.t_hi
    }

    pub fn len(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.t_hi - self.t_lo
        }
    }
}

/// `floor(sqrt(x))` for `x >= 0`, exact for perfect squares.
pub fn floor_sqrt(x: f64) -> u64 {
    if x < 1.0 {
        return 0;
    }
    let mut n = x.sqrt().floor() as u64;
    while ((n + 1) * (n + 1)) as f64 <= x {
        n += 1;
    }
    while n > 0 && (n * n) as f64 > x {
        n -= 1;
    }
    n
}

/// `|k|` when mode `(k, eta)` has a resonant interval: `k eta > 0` and `|k| <= floor(sqrt|eta|)`.
pub fn resonant_k(k: i64, eta: f64) -> Option<u64> {
    let r = k.unsigned_abs();
    (k != 0 && eta * k as f64 > 0.0 && r <= floor_sqrt(eta.abs())).then_some(r)
}

/// `t_{k,eta} = |eta|/k - |eta|/(2k(k+1))` for `k >= 1`, and `t_{0,eta} = 2|eta|`.
pub fn critical_time(k: u64, eta: f64) -> f64 {
    let e = eta.abs();
    if k == 0 {
        2.0 * e
    } else {
        let k = k as f64;
        e / k - e / (2.0 * k * (k + 1.0))
    }
}

pub fn critical_interval(k: i64, eta: f64, kind: IntervalKind) -> ResonantInterval {
    let empty = ResonantInterval {
        k,
        eta,
        t_lo: f64::NAN,
        t_hi: f64::NAN,
        kind: IntervalKind::Empty,
    };
    let Some(r) = resonant_k(k, eta) else {
        return empty;
    };
    let e = eta.abs();
    match kind {
        IntervalKind::I => ResonantInterval {
            k,
            eta,
            t_lo: critical_time(r, e),
            t_hi: critical_time(r - 1, e),
            kind,
        },
        IntervalKind::ITilde => {
            let rf = r as f64;
            ResonantInterval {
                k,
                eta,
                t_lo: e / rf - e / (rf * rf),
                t_hi: e / rf + e / (rf * rf),
                kind,
            }
        }
        IntervalKind::Empty => empty,
    }
}

/// The `k >= 1` with `t_{k,eta} <= t < t_{k-1,eta}` (with `t = 2|eta|` assigned to `k = 1`).
pub fn resonant_index(t: f64, eta: f64) -> Option<u64> {
    let e = eta.abs();
    let n = floor_sqrt(e);
    if n == 0 || t < critical_time(n, e) || t > 2.0 * e {
        return None;
    }
    let mut k = ((e / t).round() as u64).clamp(1, n);
    while k < n && t < critical_time(k, e) {
        k += 1;
    }
    while k > 1 && t >= critical_time(k - 1, e) {
        k -= 1;
    }
    Some(k)
}
