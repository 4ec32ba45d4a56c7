use super::energy::{elliptic_ratio, EnergyFunctional};
use super::run::SimOutput;
use super::SimError;
use crate::spectral::{bracket, l1_len, Grid, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Modes carrying less than this share of `E` do not veto a window.
pub const POPULATED_SHARE: f64 = 1e-12;

/// Comparison of the finite-differenced energy with `-CK_lambda - CK_w - <Af, A(u . grad f)>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// Largest `|dE/dt - rhs| / (|CK_lambda| + |CK_w| + |NL|)` over checked steps.
    pub worst: f64,
    pub t_worst: f64,
    pub checked: usize,
    /// Steps whose stencil straddles a weight breakpoint of a populated mode.
    pub skipped: usize,
}

/// Five-point check of the energy identity along a run that reported and snapshotted
/// every step.
///
/// `dE/dt` jumps where a populated mode crosses a breakpoint of its weight or where
/// `lambda` starts to decay (`t = 1`); stencils containing such a time are skipped.
pub fn energy_identity_check(
    out: &SimOutput,
    energy: &EnergyFunctional,
) -> Result<IdentityCheck, SimError> {
    let r = &out.reports;
    let snaps = &out.snapshots;
    if r.len() < 5 || snaps.len() != r.len() {
        return Err(SimError::InvalidConfig {
            field: "sim.snapshot_every",
            reason: "the identity check needs a report and a snapshot at every step".into(),
        });
    }
    let dt = out.dt;
    let de = energy.grid().d_eta();
    let mut check = IdentityCheck {
        worst: 0.0,
        t_worst: f64::NAN,
        checked: 0,
        skipped: 0,
    };
    for n in 2..r.len() - 2 {
        let (lo, hi) = (r[n - 2].t, r[n + 2].t);
        let table = energy.table(r[n].t);
        let field = &snaps[n].field;
        let e = r[n].energy;
        let kinked = (lo..=hi).contains(&1.0)
            || field.coeffs().iter().enumerate().any(|(i, c)| {
                let share = 0.5 * table.a[i] * table.a[i] * c.norm_sqr() * de;
                share >= POPULATED_SHARE * e
                    && energy.modes()[i]
                        .breakpoints()
                        .iter()
                        .any(|b| (lo..=hi).contains(b))
            });
        if kinked {
            check.skipped += 1;
            continue;
        }
        let fd = (r[n - 2].energy - 8.0 * r[n - 1].energy + 8.0 * r[n + 1].energy
            - r[n + 2].energy)
            / (12.0 * dt);
        let rhs = -r[n].ck_lambda - r[n].ck_w - r[n].nonlinear;
        let scale = r[n].ck_lambda.abs() + r[n].ck_w.abs() + r[n].nonlinear.abs();
        let rel = (fd - rhs).abs() / scale;
        check.checked += 1;
        if rel > check.worst || check.t_worst.is_nan() {
            check.worst = rel;
            check.t_worst = r[n].t;
        }
    }
    Ok(check)
}

/// Largest elliptic ratio over a family of random fields and sample times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticSweep {
    pub sup: f64,
    pub t_sup: f64,
    pub fields: usize,
    pub times: usize,
}

/// Random conjugate-symmetric field one unit of Gevrey radius smoother than `G^{lambda, sigma}`:
/// `|f| = r e^{-(lambda + 1) |k,eta|^s} <k,eta>^{-sigma}` with `r` log-uniform on `[1e-3, 1]`,
/// so its weighted spectrum has a limit under lattice refinement.
pub fn random_gevrey_field(
    grid: Grid,
    lambda: f64,
    sigma: f64,
    s: f64,
    seed: u64,
) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid);
    for (k, j) in grid.modes().collect::<Vec<_>>() {
        if k > 0 || (k == 0 && j > 0) {
            let (kf, eta) = (k as f64, grid.eta(j));
            let r = 10f64.powf(rng.gen_range(-3.0..0.0));
            let amp = r
                * (-(lambda + 1.0) * l1_len(kf, eta).powf(s) - sigma * bracket(kf, eta).ln()).exp();
            f.set_real_mode(
                k,
                j,
                Complex64::from_polar(amp, rng.gen_range(0.0..2.0 * PI)),
            );
        }
    }
    f.clear_zero_row();
    f
}

/// `sup` of [`elliptic_ratio`] over `fields` random fields and the given times.
pub fn elliptic_sweep(
    grid: Grid,
    lambda: f64,
    sigma: f64,
    s: f64,
    fields: usize,
    times: &[f64],
    seed: u64,
) -> Result<EllipticSweep, SimError> {
    let per_field = (0..fields)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64), SimError> {
            let f = random_gevrey_field(grid, lambda, sigma, s, seed.wrapping_add(i as u64));
            let mut best = (0.0, f64::NAN);
            for &t in times {
                let r = elliptic_ratio(&f, t, lambda, sigma, s)?;
                if !r.is_finite() {
                    return Err(SimError::NonFinite { t });
                }
                if r > best.0 {
                    best = (r, t);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (sup, t_sup) = per_field
        .into_iter()
        .fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
    Ok(EllipticSweep {
        sup,
        t_sup,
        fields,
        times: times.len(),
    })
}
