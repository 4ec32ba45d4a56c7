//! Exact linear evolution around Couette flow.
//!
//! In the moving frame `z = x - t y` the linearized vorticity is constant,
//! `f(t) = omega_in`, and the velocity follows from the sheared Biot-Savart law.

use crate::spectral::{bracket, SpectralError, SpectralField};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinearError {
    #[error("the Orr time is undefined for k = 0")]
    ZeroWavenumber,
    #[error("initial vorticity has nonzero mean: |omega(0,0)| = {0}")]
    NonzeroMean(f64),
    #[error("times must be positive and increasing")]
    BadTimes,
    #[error("need at least two samples in [{t_lo}, {t_hi}] to fit a slope")]
    TooFewSamples { t_lo: f64, t_hi: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Orr critical time `eta / k`.
pub fn orr_time(k: i64, eta: f64) -> Result<f64, LinearError> {
    if k == 0 {
        return Err(LinearError::ZeroWavenumber);
    }
    Ok(eta / k as f64)
}

/// Moving-frame velocity `(U^x, U^y)` of the linear solution at time `t`.
///
/// `U^x = i(eta - kt)/(k^2 + (eta - kt)^2) omega`, `U^y = -ik/(k^2 + (eta - kt)^2) omega`;
/// the `k = 0` row carries no velocity.
pub fn linear_velocity(omega_in: &SpectralField, t: f64) -> (SpectralField, SpectralField) {
    let symbol = |k: i64, eta: f64| {
        if k == 0 {
            return None;
        }
        let kf = k as f64;
        let shear = eta - kf * t;
        Some((shear, kf, kf * kf + shear * shear))
    };
    let mut ux = omega_in.multiplied_complex(|k, eta| match symbol(k, eta) {
        Some((shear, _, d)) => Complex64::new(0.0, shear / d),
        None => Complex64::new(0.0, 0.0),
    });
    let mut uy = omega_in.multiplied_complex(|k, eta| match symbol(k, eta) {
        Some((_, kf, d)) => Complex64::new(0.0, -kf / d),
        None => Complex64::new(0.0, 0.0),
    });
    ux.time = t;
    uy.time = t;
    (ux, uy)
}

/// `|| <k, eta>^s omega ||`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    field
        .multiplied(|k, eta| bracket(k as f64, eta).powf(s))
        .l2_norm()
}

/// Mean-free initial vorticity with its exact linear evolution.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    omega_in: SpectralField,
}

impl LinearSolution {
    pub fn new(omega_in: SpectralField) -> Result<Self, LinearError> {
        let mean = omega_in.get(0, 0).norm();
        if mean > 1e-14 * omega_in.max_abs().max(1.0) {
            return Err(LinearError::NonzeroMean(mean));
        }
        omega_in.check_finite()?;
        Ok(Self { omega_in })
    }

    pub fn omega_in(&self) -> &SpectralField {
        &self.omega_in
    }

    pub fn velocity(&self, t: f64) -> (SpectralField, SpectralField) {
        linear_velocity(&self.omega_in, t)
    }

    /// Lab-frame vorticity `omega(t, x, y) = omega_in(x - t y, y)`.
    pub fn vorticity_at(&self, t: f64, x: f64, y: f64) -> f64 {
        self.omega_in.eval_at(x - t * y, y).re
    }

    pub fn damping_series(&self, times: &[f64]) -> Result<Vec<DampingRow>, LinearError> {
        linear_damping_series(&self.omega_in, times)
    }
}

/// One row of the inviscid damping table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingRow {
    pub t: f64,
    pub norm_ux: f64,
    pub norm_uy: f64,
    /// `||omega_in||_{H^1} / <t>`.
    pub bound_ux: f64,
    /// `||omega_in||_{H^2} / <t>^2`.
    pub bound_uy: f64,
}

pub fn linear_damping_series(
    omega_in: &SpectralField,
    times: &[f64],
) -> Result<Vec<DampingRow>, LinearError> {
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LinearError::BadTimes);
    }
    let (h1, h2) = (sobolev_norm(omega_in, 1.0), sobolev_norm(omega_in, 2.0));
    Ok(times
        .iter()
        .map(|&t| {
            let (ux, uy) = linear_velocity(omega_in, t);
            let jt = (1.0 + t * t).sqrt();
            DampingRow {
                t,
                norm_ux: ux.l2_norm(),
                norm_uy: uy.l2_norm(),
                bound_ux: h1 / jt,
                bound_uy: h2 / (jt * jt),
            }
        })
        .collect())
}

/// Least-squares slope of `ln y` against `ln t` over rows with `t` in `[t_lo, t_hi]`.
pub fn loglog_slope(
    points: impl IntoIterator<Item = (f64, f64)>,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64, LinearError> {
    let pts: Vec<(f64, f64)> = points
        .into_iter()
        .filter(|(t, y)| *t >= t_lo && *t <= t_hi && *y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(LinearError::TooFewSamples { t_lo, t_hi });
    }
    let n = pts.len() as f64;
    let (mx, my) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    Ok(sxy / sxx)
}

/// Real, mean-free data `omega(k, eta) = amplitude e^{-eta^2 / (2 width^2)} / |k|` for `1 <= |k| <= k_modes`.
pub fn gaussian_data(
    grid: crate::spectral::Grid,
    k_modes: usize,
    width: f64,
    amplitude: f64,
) -> SpectralField {
    SpectralField::from_fn(grid, |k, eta| {
        if k == 0 || k.unsigned_abs() as usize > k_modes {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(
                amplitude * (-eta * eta / (2.0 * width * width)).exp() / k.abs() as f64,
                0.0,
            )
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn orr_time_examples() {
        assert_eq!(orr_time(1, 5.0).unwrap(), 5.0);
        assert_eq!(orr_time(2, 5.0).unwrap(), 2.5);
        assert_eq!(orr_time(-2, -6.0).unwrap(), 3.0);
        assert!(matches!(orr_time(0, 1.0), Err(LinearError::ZeroWavenumber)));
    }

    #[test]
    fn single_mode_velocity() {
        let grid = Grid::new(2, 4.0, 2.0 * std::f64::consts::PI).unwrap();
        let mut omega = SpectralField::zeros(grid);
        omega.set(1, 0, Complex64::new(1.0, 0.0));
        let (ux, uy) = linear_velocity(&omega, 0.0);
        assert_eq!(ux.get(1, 0), Complex64::new(0.0, 0.0));
        assert_eq!(uy.get(1, 0), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn orr_time_kills_ux() {
        let grid = Grid::new(3, 6.0, 2.0 * std::f64::consts::PI).unwrap();
        let omega = gaussian_data(grid, 3, 2.0, 1.0);
        let j = 6;
        let t = orr_time(2, grid.eta(j)).unwrap();
        let (ux, _) = linear_velocity(&omega, t);
        assert_eq!(ux.get(2, j).norm(), 0.0);
    }

    #[test]
    fn rejects_mean() {
        let grid = Grid::new(1, 2.0, 2.0 * std::f64::consts::PI).unwrap();
        let mut omega = SpectralField::zeros(grid);
        omega.set(0, 0, Complex64::new(1.0, 0.0));
        assert!(matches!(
            LinearSolution::new(omega),
            Err(LinearError::NonzeroMean(_))
        ));
    }

    #[test]
    fn slope_of_power_law() {
        let pts = (1..50).map(|i| (i as f64, 3.0 * (i as f64).powf(-1.5)));
        assert!((loglog_slope(pts, 1.0, 100.0).unwrap() + 1.5).abs() < 1e-12);
    }
}
