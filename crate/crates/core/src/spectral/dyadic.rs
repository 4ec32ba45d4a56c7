use super::{l1_len, SpectralField};

/// Dyadic frequency `N = 2^e` with `e >= -1`; `N = 1/2` is the low-frequency block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dyadic(pub i32);

impl Dyadic {
    pub const HALF: Dyadic = Dyadic(-1);

    pub fn value(self) -> f64 {
        2f64.powi(self.0)
    }

    /// All blocks `1/2, 1, 2, ..., N_max` with `N_max` the smallest power of two `>= max_freq`.
    pub fn up_to(max_freq: f64) -> Vec<Dyadic> {
        let mut e = 0;
        while 2f64.powi(e) < max_freq {
            e += 1;
        }
        (-1..=e).map(Dyadic).collect()
    }

    /// `N / 8` if it is still a member of the dyadic set.
    pub fn eighth(self) -> Option<Dyadic> {
        (self.0 - 3 >= -1).then_some(Dyadic(self.0 - 3))
    }
}

/// Smooth cutoff: 1 on `[0, 1/2]`, 0 on `[3/4, inf)`, C^3 smoothstep in between.
pub fn chi(xi: f64) -> f64 {
    let xi = xi.abs();
    if xi <= 0.5 {
        1.0
    } else if xi >= 0.75 {
        0.0
    } else {
        let x = (xi - 0.5) * 4.0;
        let x4 = x * x * x * x;
        1.0 - x4 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)))
    }
}

/// Block profile `phi_N(xi)`; the `N = 1/2` block is `chi` itself.
pub fn phi(n: Dyadic, xi: f64) -> f64 {
    if n == Dyadic::HALF {
        chi(xi)
    } else {
        let s = xi / n.value();
        chi(s / 2.0) - chi(s)
    }
}

/// Which part of the Littlewood-Paley decomposition to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    /// `f_N`.
    Block(Dyadic),
    /// `f_{<N}`, the sum of all blocks strictly below `N`.
    Below(Dyadic),
    /// `f_{~N}`, the blocks `N'` with `N/8 <= N' <= 8N`.
    Near(Dyadic),
}

impl Selector {
    pub fn symbol(self, xi: f64) -> f64 {
        match self {
            Selector::Block(n) => phi(n, xi),
            Selector::Below(n) => {
                if n == Dyadic::HALF {
                    0.0
                } else {
                    chi(xi / n.value())
                }
            }
            Selector::Near(n) => {
                let lo = (n.0 - 3).max(-1);
                (lo..=n.0 + 3).map(|e| phi(Dyadic(e), xi)).sum()
            }
        }
    }
}

/// Multiply a field by the chosen dyadic symbol of `|k, eta|`.
pub fn dyadic_project(field: &SpectralField, sel: Selector) -> SpectralField {
    field.multiplied(|k, eta| sel.symbol(l1_len(k as f64, eta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_plateaus() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(0.75), 0.0);
        assert_eq!(chi(3.0), 0.0);
        assert!((chi(0.625) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chi_monotone() {
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = chi(0.5 + 0.25 * i as f64 / 1000.0);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn blocks_at_one() {
        assert_eq!(phi(Dyadic(0), 1.0), 1.0);
        assert_eq!(phi(Dyadic(1), 1.0), 0.0);
        assert_eq!(chi(1.0), 0.0);
    }

    #[test]
    fn support_of_block() {
        for e in 0..6 {
            let n = Dyadic(e);
            let nv = n.value();
            for i in 0..2000 {
                let xi = i as f64 * 4.0 * nv / 2000.0;
                if xi < nv / 2.0 || xi > 1.5 * nv {
                    assert_eq!(phi(n, xi), 0.0, "N={nv} xi={xi}");
                }
            }
        }
    }

    #[test]
    fn telescoping() {
        let blocks = Dyadic::up_to(100.0);
        assert_eq!(blocks.last().unwrap().value(), 128.0);
        for i in 0..1000 {
            let xi = i as f64 * 0.128;
            let s: f64 = blocks.iter().map(|&n| phi(n, xi)).sum();
            assert!((s - 1.0).abs() < 1e-12, "xi={xi} sum={s}");
        }
    }

    #[test]
    fn below_matches_block_sum() {
        let n = Dyadic(4);
        for i in 0..500 {
            let xi = i as f64 * 0.05;
            let direct: f64 = (-1..4).map(|e| phi(Dyadic(e), xi)).sum();
            assert!((Selector::Below(n).symbol(xi) - direct).abs() < 1e-14);
        }
        assert_eq!(Selector::Below(Dyadic::HALF).symbol(0.1), 0.0);
    }
}
