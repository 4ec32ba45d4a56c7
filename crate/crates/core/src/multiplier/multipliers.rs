use super::{LambdaSchedule, ModeWeight, MultiplierError, Weight, WeightParams};
use crate::spectral::{bracket, l1_len};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    J,
    JTilde,
    A,
    ATilde,
}

/// Validated parameter set with the weight and radius evaluators built from it.
#[derive(Debug, Clone, Copy)]
pub struct Multipliers {
    params: WeightParams,
    weight: Weight,
    lambda: LambdaSchedule,
}

impl Multipliers {
    pub fn new(params: WeightParams) -> Result<Self, MultiplierError> {
        let lambda = LambdaSchedule::new(&params)?;
        Ok(Self {
            params,
            weight: Weight::new(params.mu()),
            lambda,
        })
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }
    pub fn weight(&self) -> &Weight {
        &self.weight
    }
    pub fn lambda(&self) -> &LambdaSchedule {
        &self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.weight.mu()
    }

    /// `J` and `J~` from a precomputed weight value.
    pub fn j_pair(&self, k: f64, eta: f64, w: f64) -> (f64, f64) {
        let mu = self.mu();
        let jt = (mu * eta.abs().sqrt()).exp() / w;
        (jt + (mu * k.abs().sqrt()).exp(), jt)
    }

    /// `e^{lambda |k,eta|^s} <k,eta>^sigma`.
    pub fn gevrey_factor(&self, k: f64, eta: f64, lambda: f64) -> f64 {
        (lambda * l1_len(k, eta).powf(self.params.s)).exp()
            * bracket(k, eta).powf(self.params.sigma)
    }

    pub fn evaluate(&self, which: Which, k: i64, t: f64, eta: f64) -> f64 {
        let w = self.weight.w(k, t, eta);
        let (j, jt) = self.j_pair(k as f64, eta, w);
        match which {
            Which::J => j,
            Which::JTilde => jt,
            Which::A => self.gevrey_factor(k as f64, eta, self.lambda.at(t)) * j,
            Which::ATilde => self.gevrey_factor(k as f64, eta, self.lambda.at(t)) * jt,
        }
    }

    /// Everything the energy functional needs at one mode and time.
    pub fn mode_data(
        &self,
        mode: &ModeWeight,
        k: f64,
        eta: f64,
        t: f64,
        lambda: f64,
    ) -> ModeMultipliers {
        let (w, dw) = mode.eval(self.mu(), t);
        let (j, jt) = self.j_pair(k, eta, w);
        let g = self.gevrey_factor(k, eta, lambda);
        ModeMultipliers {
            w,
            dw,
            a: g * j,
            a_tilde: g * jt,
        }
    }
}

/// Weight and multipliers of one mode at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMultipliers {
    pub w: f64,
    pub dw: f64,
    pub a: f64,
    pub a_tilde: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settled_j() {
        let m = Multipliers::new(WeightParams::default()).unwrap();
        let mu = m.mu();
        let j = m.evaluate(Which::J, 3, 100.0, 20.0);
        assert!((j - ((mu * 20f64.sqrt()).exp() + (mu * 3f64.sqrt()).exp())).abs() < 1e-12 * j);
    }

    #[test]
    fn a_decreases_on_constant_branch() {
        let m = Multipliers::new(WeightParams::default()).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let t = 0.1 * i as f64;
            let a = m.evaluate(Which::A, 2, t, 400.0);
            assert!(a <= prev);
            prev = a;
        }
    }
}
