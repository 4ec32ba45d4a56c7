use super::{ProductBackend, SimError, ZeroModePolicy};
use crate::spectral::{convolve_direct, ProductPlan, SpectralField};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `k^2 + (eta - k t)^2`, the symbol of `-Delta_L`.
#[inline]
pub fn sheared_laplacian(k: i64, eta: f64, t: f64) -> f64 {
    let kf = k as f64;
    kf * kf + (eta - kf * t) * (eta - kf * t)
}

/// Moving-frame Biot-Savart law: `Delta_L phi = f`, `u = grad^perp_{z,y} phi`.
///
/// Returns `([u_z, u_y], phi)`; the `k = 0` row of `f` is ignored.
pub fn biot_savart_moving(f: &SpectralField, t: f64) -> ([SpectralField; 2], SpectralField) {
    let mut phi = f.multiplied(|k, eta| {
        if k == 0 {
            0.0
        } else {
            -1.0 / sheared_laplacian(k, eta, t)
        }
    });
    phi.time = t;
    let uz = phi.multiplied_complex(|_, eta| -I * eta);
    let uy = phi.multiplied_complex(|k, _| I * k as f64);
    ([uz, uy], phi)
}

/// Lab-frame velocity `(U^x, U^y) = (-(d_y - t d_z) phi, d_z phi)` written in the moving frame.
pub fn lab_velocity(f: &SpectralField, t: f64) -> (SpectralField, SpectralField) {
    let (_, phi) = biot_savart_moving(f, t);
    (
        phi.multiplied_complex(|k, eta| -I * (eta - k as f64 * t)),
        phi.multiplied_complex(|k, _| I * k as f64),
    )
}

/// `(d_z f, d_y f)`.
pub fn gradient(f: &SpectralField) -> [SpectralField; 2] {
    [
        f.multiplied_complex(|k, _| I * k as f64),
        f.multiplied_complex(|_, eta| I * eta),
    ]
}

/// `u . grad g` as a dealiased (or aliased) spectral product.
pub fn advect(
    plan: &ProductPlan,
    u: &[SpectralField; 2],
    g: &SpectralField,
    time: f64,
) -> SpectralField {
    let [gz, gy] = gradient(g);
    plan.sum_of_products(&[(&u[0], &gz), (&u[1], &gy)], time)
}

/// `u . grad g` by direct lattice convolution.
pub fn advect_direct(u: &[SpectralField; 2], g: &SpectralField, time: f64) -> SpectralField {
    let [gz, gy] = gradient(g);
    let mut out = convolve_direct(&u[0], &gz).expect("same lattice");
    out.axpy(1.0, &convolve_direct(&u[1], &gy).expect("same lattice"));
    out.scale(g.grid().d_eta() / (2.0 * std::f64::consts::PI));
    out.time = time;
    out
}

/// Right-hand side `-(u . grad f)` with a zero-mode policy.
#[derive(Debug)]
pub struct NonlinearOp {
    plan: ProductPlan,
    backend: ProductBackend,
    policy: ZeroModePolicy,
    nonlinear: bool,
}

/// Result of one right-hand-side evaluation.
#[derive(Debug, Clone)]
pub struct Rhs {
    pub value: SpectralField,
    /// Norm of the `k = 0` row of `u . grad f` before any projection.
    pub zero_mode_residual: f64,
}

impl NonlinearOp {
    pub fn new(
        grid: crate::spectral::Grid,
        dealias: bool,
        policy: ZeroModePolicy,
        nonlinear: bool,
    ) -> Self {
        Self {
            plan: ProductPlan::new(grid, dealias),
            backend: ProductBackend::Transform,
            policy,
            nonlinear,
        }
    }

    pub fn with_backend(mut self, backend: ProductBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn plan(&self) -> &ProductPlan {
        &self.plan
    }

    pub fn policy(&self) -> ZeroModePolicy {
        self.policy
    }

    pub fn eval(&self, f: &SpectralField, t: f64) -> Rhs {
        if !self.nonlinear {
            let mut value = SpectralField::zeros(*f.grid());
            value.time = t;
            return Rhs {
                value,
                zero_mode_residual: 0.0,
            };
        }
        let (u, _) = biot_savart_moving(f, t);
        let mut value = match self.backend {
            ProductBackend::Transform => advect(&self.plan, &u, f, t),
            ProductBackend::Direct => advect_direct(&u, f, t),
        };
        value.scale(-1.0);
        let zero_mode_residual = value.zero_row_norm();
        if self.policy == ZeroModePolicy::Project {
            value.clear_zero_row();
        }
        Rhs {
            value,
            zero_mode_residual,
        }
    }

    /// One classical fourth-order Runge-Kutta step.
    pub fn step(&self, f: &SpectralField, dt: f64) -> Result<SpectralField, SimError> {
        let t = f.time;
        let k1 = self.eval(f, t).value;
        let mut y = f.clone();
        y.axpy(0.5 * dt, &k1);
        let k2 = self.eval(&y, t + 0.5 * dt).value;
        let mut y = f.clone();
        y.axpy(0.5 * dt, &k2);
        let k3 = self.eval(&y, t + 0.5 * dt).value;
        let mut y = f.clone();
        y.axpy(dt, &k3);
        let k4 = self.eval(&y, t + dt).value;
        let mut out = f.clone();
        out.axpy(dt / 6.0, &k1);
        out.axpy(dt / 3.0, &k2);
        out.axpy(dt / 3.0, &k3);
        out.axpy(dt / 6.0, &k4);
        out.time = t + dt;
        if out.check_finite().is_err() {
            return Err(SimError::NonFinite { t: out.time });
        }
        Ok(out)
    }

    /// `dt * max|u|` over the physical sample grid divided by the finest sample spacing.
    pub fn cfl(&self, f: &SpectralField, dt: f64) -> f64 {
        let (u, _) = biot_savart_moving(f, f.time);
        let scale = f.grid().d_eta() / (2.0 * std::f64::consts::PI);
        let uz = self.plan.synthesize(&u[0]);
        let uy = self.plan.synthesize(&u[1]);
        let umax = uz
            .iter()
            .zip(&uy)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).sqrt())
            .fold(0.0, f64::max)
            * scale;
        let (mx, my) = self.plan.shape();
        let h = (2.0 * std::f64::consts::PI / mx as f64).min(2.0 * f.grid().l_y() / my as f64);
        dt * umax / h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn single_mode_biot_savart() {
        let grid = Grid::new(1, 1.0, PI).unwrap();
        let mut f = SpectralField::zeros(grid);
        f.set(1, 0, Complex64::new(2.0, 1.0));
        let ([uz, uy], phi) = biot_savart_moving(&f, 0.0);
        assert_eq!(phi.get(1, 0), -Complex64::new(2.0, 1.0));
        assert_eq!(uz.get(1, 0), Complex64::new(0.0, 0.0));
        assert_eq!(uy.get(1, 0), -I * Complex64::new(2.0, 1.0));
    }

    #[test]
    fn zero_field_stays_zero() {
        let grid = Grid::new(2, 3.0, PI).unwrap();
        let op = NonlinearOp::new(grid, true, ZeroModePolicy::Project, true);
        let f = SpectralField::zeros(grid);
        assert_eq!(op.eval(&f, 0.3).value.max_abs(), 0.0);
        assert_eq!(op.step(&f, 0.1).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn linear_limit_is_frozen() {
        let grid = Grid::new(2, 3.0, PI).unwrap();
        let op = NonlinearOp::new(grid, true, ZeroModePolicy::Project, false);
        let mut f = SpectralField::zeros(grid);
        f.set_real_mode(1, 2, Complex64::new(0.3, -0.1));
        let g = op.step(&f, 0.25).unwrap();
        assert_eq!(g.coeffs(), f.coeffs());
        assert_eq!(g.time, 0.25);
    }
}
