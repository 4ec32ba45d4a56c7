use super::dynamics::{advect, advect_direct, biot_savart_moving, lab_velocity, NonlinearOp};
use super::{ProductBackend, SimError};
use crate::multiplier::{ModeWeight, Multipliers, WeightParams};
use crate::spectral::{
    bracket, gevrey_norm, l1_len, paraproduct_split, paraproduct_split_direct, Grid, ProductPlan,
    SpectralField,
};
use serde::Serialize;

/// Largest `ln A` kept unscaled; larger multipliers are divided by a fixed `e^{log_scale}`.
const LOG_HEADROOM: f64 = 300.0;

/// Per-mode multipliers of one time, scaled by `e^{-log_scale}`.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    pub t: f64,
    pub lambda_dot: f64,
    pub a: Vec<f64>,
    pub a_tilde: Vec<f64>,
    /// `d_t w / w`.
    pub dw_over_w: Vec<f64>,
    /// `|k, eta|^s`.
    pub len_s: Vec<f64>,
}

/// The weighted energy `E = 1/2 ||A f||^2` and its Cauchy-Kovalevskaya terms on one lattice.
///
/// All `A`-weighted outputs carry a fixed factor `e^{-2 log_scale}`, chosen once so that
/// `A^2` cannot overflow; it is zero on desk-scale lattices.
#[derive(Debug, Clone)]
pub struct EnergyFunctional {
    grid: Grid,
    mult: Multipliers,
    modes: Vec<ModeWeight>,
    log_scale: f64,
}

impl EnergyFunctional {
    pub fn new(grid: Grid, params: WeightParams, t_ref: f64) -> Result<Self, SimError> {
        let mult = Multipliers::new(params)?;
        let modes = grid
            .modes()
            .map(|(k, j)| ModeWeight::new(k, grid.eta(j)))
            .collect();
        let mut this = Self {
            grid,
            mult,
            modes,
            log_scale: 0.0,
        };
        let peak = this
            .log_a(t_ref)
            .iter()
            .map(|x| x.0)
            .fold(f64::NEG_INFINITY, f64::max);
        this.log_scale = (peak - LOG_HEADROOM).max(0.0);
        Ok(this)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn multipliers(&self) -> &Multipliers {
        &self.mult
    }
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// Weight data of every lattice mode.
    pub fn modes(&self) -> &[ModeWeight] {
        &self.modes
    }

    /// `(ln A, ln A~, d_t w / w)` per mode.
    fn log_a(&self, t: f64) -> Vec<(f64, f64, f64)> {
        let p = self.mult.params();
        let mu = self.mult.mu();
        let lambda = self.mult.lambda().at(t);
        self.grid
            .modes()
            .zip(&self.modes)
            .map(|((k, j), mode)| {
                let (kf, eta) = (k as f64, self.grid.eta(j));
                let (ln_w, dw) = mode.eval_log(mu, t);
                let ln_g = lambda * l1_len(kf, eta).powf(p.s) + p.sigma * bracket(kf, eta).ln();
                let ln_jt = mu * eta.abs().sqrt() - ln_w;
                let other = mu * kf.abs().sqrt();
                let ln_j = ln_jt.max(other) + (-(ln_jt - other).abs()).exp().ln_1p();
                (ln_g + ln_j, ln_g + ln_jt, dw)
            })
            .collect()
    }

    pub fn table(&self, t: f64) -> MultiplierTable {
        let s = self.mult.params().s;
        let logs = self.log_a(t);
        MultiplierTable {
            t,
            lambda_dot: self.mult.lambda().dot(t),
            a: logs.iter().map(|x| (x.0 - self.log_scale).exp()).collect(),
            a_tilde: logs.iter().map(|x| (x.1 - self.log_scale).exp()).collect(),
            dw_over_w: logs.iter().map(|x| x.2).collect(),
            len_s: self
                .grid
                .modes()
                .map(|(k, j)| l1_len(k as f64, self.grid.eta(j)).powf(s))
                .collect(),
        }
    }

    /// `A f` (scaled).
    pub fn apply(&self, table: &MultiplierTable, f: &SpectralField) -> SpectralField {
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&table.a)
            .map(|(c, a)| c * a)
            .collect();
        SpectralField::from_coeffs(*f.grid(), coeffs, f.time).expect("same lattice")
    }

    /// `(E, CK_lambda, CK_w)` at the table's time.
    pub fn energy_terms(&self, table: &MultiplierTable, f: &SpectralField) -> (f64, f64, f64) {
        let de = self.grid.d_eta();
        let (mut e, mut ckl, mut ckw) = (0.0, 0.0, 0.0);
        for (i, c) in f.coeffs().iter().enumerate() {
            let n2 = c.norm_sqr();
            if n2 == 0.0 {
                continue;
            }
            let a2 = table.a[i] * table.a[i];
            e += a2 * n2;
            ckl += table.len_s[i] * a2 * n2;
            ckw += table.dw_over_w[i] * table.a_tilde[i] * table.a[i] * n2;
        }
        (0.5 * e * de, -table.lambda_dot * ckl * de, ckw * de)
    }
}

/// Triad magnitudes and their consistency with the full commutator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triads {
    /// `sum_N |T_N|`.
    pub transport: f64,
    /// `sum_N |R_N|`.
    pub reaction: f64,
    /// `sum_{N,N'} |R_{N,N'}|`.
    pub remainder: f64,
    /// `sum T_N + sum R_N + sum R_{N,N'}`.
    pub signed_sum: f64,
    /// `<A f, A(u . grad f) - u . grad(A f)>`.
    pub commutator: f64,
}

/// Paraproduct decomposition of the commutator `<Af, A(u . grad f) - u . grad(Af)>`.
///
/// `T_N` takes `u_{<N/8}` against `f_N`, `R_N` takes `u_N` against `f_{<N/8}`, and the
/// remainder pairs comparable blocks. Use [`ProductBackend::Direct`] whenever `A` spans
/// many orders of magnitude: the commutator is then a small difference of huge terms.
pub fn triad_diagnostic(
    energy: &EnergyFunctional,
    f: &SpectralField,
    backend: ProductBackend,
) -> Result<Triads, SimError> {
    let t = f.time;
    let table = energy.table(t);
    let af = energy.apply(&table, f);
    let (u, _) = biot_savart_moving(f, t);
    let grad = super::dynamics::gradient(f);
    let grad_a = super::dynamics::gradient(&af);
    let split = match backend {
        ProductBackend::Transform => paraproduct_split,
        ProductBackend::Direct => paraproduct_split_direct,
    };
    let splits = [
        split(&u[0], &grad[0])?,
        split(&u[1], &grad[1])?,
        split(&u[0], &grad_a[0])?,
        split(&u[1], &grad_a[1])?,
    ];
    // <Af, A(p0 + p1) - (p2 + p3)> for the four members sharing one label
    let pairing = |p: [&SpectralField; 4]| {
        let mut plain = p[0].clone();
        plain.axpy(1.0, p[1]);
        let mut x = energy.apply(&table, &plain);
        x.axpy(-1.0, p[2]);
        x.axpy(-1.0, p[3]);
        af.inner(&x).re
    };
    let family = |members: [Vec<&SpectralField>; 4]| -> (f64, f64) {
        (0..members[0].len())
            .map(|i| pairing([members[0][i], members[1][i], members[2][i], members[3][i]]))
            .fold((0.0, 0.0), |(abs, sum), v| (abs + v.abs(), sum + v))
    };
    let (transport, st) = family(
        splits
            .each_ref()
            .map(|s| s.low_high.iter().map(|x| &x.1).collect()),
    );
    let (reaction, sr) = family(
        splits
            .each_ref()
            .map(|s| s.high_low.iter().map(|x| &x.1).collect()),
    );
    let (remainder, srem) = family(
        splits
            .each_ref()
            .map(|s| s.remainder.iter().map(|x| &x.2).collect()),
    );

    let (plain, weighted) = match backend {
        ProductBackend::Transform => {
            let plan = ProductPlan::new(*f.grid(), true);
            (advect(&plan, &u, f, t), advect(&plan, &u, &af, t))
        }
        ProductBackend::Direct => (advect_direct(&u, f, t), advect_direct(&u, &af, t)),
    };
    let mut x = energy.apply(&table, &plain);
    x.axpy(-1.0, &weighted);
    let commutator = af.inner(&x).re;
    Ok(Triads {
        transport,
        reaction,
        remainder,
        signed_sum: st + sr + srem,
        commutator,
    })
}

/// One row of the simulation time series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    pub energy: f64,
    pub ck_lambda: f64,
    pub ck_w: f64,
    /// `<A f, A(u . grad f)>` with the projected right-hand side.
    pub nonlinear: f64,
    /// Midpoint-rule accumulation of `CK_lambda + CK_w` since the start.
    pub ck_integral: f64,
    pub zero_mode_residual: f64,
    pub zero_mode_norm: f64,
    pub l2: f64,
    pub norm_ux: f64,
    pub norm_uy: f64,
    pub log_scale: f64,
    pub triad_transport: Option<f64>,
    pub triad_reaction: Option<f64>,
    pub triad_remainder: Option<f64>,
}

/// Energy, CK terms, damping norms and zero-mode diagnostics of one state.
pub fn energy_report(
    energy: &EnergyFunctional,
    op: &NonlinearOp,
    f: &SpectralField,
) -> EnergyReport {
    let t = f.time;
    let table = energy.table(t);
    let (e, ckl, ckw) = energy.energy_terms(&table, f);
    let rhs = op.eval(f, t);
    // the right-hand side is -(u . grad f)
    let nonlinear = -energy
        .apply(&table, f)
        .inner(&energy.apply(&table, &rhs.value))
        .re;
    let (ux, uy) = lab_velocity(f, t);
    EnergyReport {
        t,
        energy: e,
        ck_lambda: ckl,
        ck_w: ckw,
        nonlinear,
        ck_integral: 0.0,
        zero_mode_residual: rhs.zero_mode_residual,
        zero_mode_norm: f.zero_row_norm(),
        l2: f.l2_norm(),
        norm_ux: ux.l2_norm(),
        norm_uy: uy.l2_norm(),
        log_scale: energy.log_scale(),
        triad_transport: None,
        triad_reaction: None,
        triad_remainder: None,
    }
}

/// `||u||_{G^{lambda, sigma-3}} <t>^2 / ||f||_{G^{lambda, sigma}}` with `u` from the moving-frame Biot-Savart law.
pub fn elliptic_ratio(
    f: &SpectralField,
    t: f64,
    lambda: f64,
    sigma: f64,
    s: f64,
) -> Result<f64, SimError> {
    let (u, _) = biot_savart_moving(f, t);
    let nu = gevrey_norm(&u[0], lambda, sigma - 3.0, s)?.hypot(gevrey_norm(
        &u[1],
        lambda,
        sigma - 3.0,
        s,
    )?);
    let nf = gevrey_norm(f, lambda, sigma, s)?;
    Ok(nu * (1.0 + t * t) / nf)
}
