use super::MultiplierError;
use serde::{Deserialize, Serialize};

/// Constants of the weighted energy: Gevrey index, Sobolev shift, radii and growth rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightParams {
    pub s: f64,
    pub sigma: f64,
    pub lambda0: f64,
    pub lambda_prime: f64,
    /// Decay rate of `lambda(t)`; `None` means `(lambda0 - lambda') s / 8`.
    pub delta_lambda: Option<f64>,
    pub beta: f64,
    pub c_growth: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self {
            s: 1.0,
            sigma: 11.0,
            lambda0: 1.0,
            lambda_prime: 0.5,
            delta_lambda: None,
            beta: 0.25,
            c_growth: 1.5,
        }
    }
}

fn bad(field: &'static str, reason: impl Into<String>) -> MultiplierError {
    MultiplierError::InvalidParams {
        field,
        reason: reason.into(),
    }
}

impl WeightParams {
    /// `c = 1 + 2 C beta`.
    pub fn c(&self) -> f64 {
        1.0 + 2.0 * self.c_growth * self.beta
    }

    /// `mu = 4c`.
    pub fn mu(&self) -> f64 {
        4.0 * self.c()
    }

    pub fn delta_lambda(&self) -> f64 {
        self.delta_lambda
            .unwrap_or((self.lambda0 - self.lambda_prime) * self.s / 8.0)
    }

    pub fn validate(&self) -> Result<(), MultiplierError> {
        if !(self.s > 0.5 && self.s <= 1.0) {
            return Err(bad("s", format!("must lie in (1/2, 1], got {}", self.s)));
        }
        if !(self.sigma > 10.0 && self.sigma.is_finite()) {
            return Err(bad("sigma", format!("must exceed 10, got {}", self.sigma)));
        }
        if !(self.lambda_prime > 0.0
            && self.lambda0 > self.lambda_prime
            && self.lambda0.is_finite())
        {
            return Err(bad(
                "lambda0",
                format!(
                    "need lambda0 > lambda' > 0, got {} and {}",
                    self.lambda0, self.lambda_prime
                ),
            ));
        }
        let d = self.delta_lambda();
        if !(d > 0.0 && d.is_finite()) {
            return Err(bad("delta_lambda", format!("must be positive, got {d}")));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(bad(
                "beta",
                format!("must lie in (0, 1/2), got {}", self.beta),
            ));
        }
        if !(self.c_growth > 0.0) {
            return Err(bad(
                "c_growth",
                format!("must be positive, got {}", self.c_growth),
            ));
        }
        let c = self.c();
        if !(c > 1.5 && c < 10.0) {
            return Err(bad(
                "c_growth",
                format!("c = 1 + 2 C beta = {c} must lie in (3/2, 10)"),
            ));
        }
        Ok(())
    }
}
