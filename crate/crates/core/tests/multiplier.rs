//! Weight, multiplier and sweep checks against independent oracles.

use couette_lab::multiplier::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn near_breakpoint(mode: &ModeWeight, t: f64, gap: f64) -> bool {
    mode.breakpoints().iter().any(|b| (t - b).abs() < gap)
}

#[test]
fn dt_w_matches_central_difference() {
    let weight = Weight::new(7.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let eta: f64 = rng.gen_range(2.0..1000.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let n = floor_sqrt(eta.abs()) as i64 + 2;
        let k = rng.gen_range(-n..=n);
        let t = rng.gen_range(0.0..2.5 * eta.abs());
        let h = 1e-6 * t.max(1.0);
        let mode = weight.mode(k, eta);
        if near_breakpoint(&mode, t, 10.0 * h) {
            continue;
        }
        let analytic = weight.dt_w(k, t, eta);
        let fd = (weight.w(k, t + h, eta) - weight.w(k, t - h, eta)) / (2.0 * h);
        let scale = analytic.abs().max(1e-9 * weight.w(k, t, eta));
        assert!(
            (analytic - fd).abs() <= 1e-6 * scale,
            "k={k} eta={eta} t={t}: {analytic} vs {fd}"
        );
        checked += 1;
    }
}

#[test]
fn a_tilde_below_a() {
    let m = Multipliers::new(WeightParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10_000 {
        let eta: f64 = rng.gen_range(-200.0..200.0);
        let k = rng.gen_range(-40..=40);
        let t = rng.gen_range(0.0..450.0);
        let a = m.evaluate(Which::A, k, t, eta);
        let at = m.evaluate(Which::ATilde, k, t, eta);
        assert!(at > 0.0 && at <= a, "k={k} eta={eta} t={t}");
        assert!(m.evaluate(Which::JTilde, k, t, eta) <= m.evaluate(Which::J, k, t, eta));
    }
}

#[test]
fn a_bounded_by_a_tilde_when_k_below_eta() {
    let m = Multipliers::new(WeightParams::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut fitted: f64 = 0.0;
    for _ in 0..10_000 {
        let eta: f64 = rng.gen_range(1.0..300.0);
        let k = rng.gen_range(-(eta as i64)..=eta as i64);
        let t = rng.gen_range(0.0..650.0);
        fitted = fitted.max(m.evaluate(Which::A, k, t, eta) / m.evaluate(Which::ATilde, k, t, eta));
    }
    // J / J~ = 1 + w e^{mu (sqrt|k| - sqrt|eta|)} <= 2
    assert!(fitted > 1.0 && fitted <= 2.0, "fitted constant {fitted}");
}

#[test]
fn lambda_matches_rk4_integration() {
    let params = WeightParams {
        delta_lambda: Some(0.01),
        ..WeightParams::default()
    };
    let lambda = LambdaSchedule::new(&params).unwrap();
    let delta = params.delta_lambda();
    let s = params.s;
    let rhs = |t: f64, l: f64| -delta * (1.0 + l) / (1.0 + t * t).powf(s);
    let (mut t, mut l) = (1.0, lambda.at(1.0));
    let h = 1e-3;
    while t < 20.0 - 1e-12 {
        let k1 = rhs(t, l);
        let k2 = rhs(t + h / 2.0, l + h / 2.0 * k1);
        let k3 = rhs(t + h / 2.0, l + h / 2.0 * k2);
        let k4 = rhs(t + h, l + h * k3);
        l += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    assert!(
        (l - lambda.at(20.0)).abs() < 1e-10,
        "{l} vs {}",
        lambda.at(20.0)
    );
}

#[test]
fn trichotomy_forced_equal_is_case_a() {
    for alpha in [1.0, 2.0, 4.0] {
        let spec = SweepSpec {
            samples: 5000,
            alpha,
            force_equal: true,
            eta_range: (16.0, 1024.0),
            ..Default::default()
        };
        let report = lemma_sweep(LemmaId::Trichotomy, &spec).unwrap();
        // alpha = 1 forces xi = eta, which leaves no admissible window
        if alpha == 1.0 {
            assert_eq!(report.status, Status::Vacuous);
            assert!(!report.pass);
            continue;
        }
        assert_eq!(report.uncovered, Some(0));
        assert_eq!(report.max_ratio, 0.0);
        assert!(report.pass);
    }
}

#[test]
fn wnr_ratio_at_equal_frequencies_is_one() {
    let spec = SweepSpec {
        samples: 2000,
        force_equal: true,
        ..Default::default()
    };
    let report = lemma_sweep(LemmaId::WnrRatio, &spec).unwrap();
    assert_eq!(report.max_ratio, 1.0);
}

#[test]
fn sweeps_are_reproducible() {
    let spec = SweepSpec {
        samples: 3000,
        eta_range: (16.0, 512.0),
        ..Default::default()
    };
    let a = lemma_sweep(LemmaId::JGeneral, &spec).unwrap();
    let b = lemma_sweep(LemmaId::JGeneral, &spec).unwrap();
    assert_eq!(a.max_ratio, b.max_ratio);
    assert_eq!(a.argmax_tuple, b.argmax_tuple);
    assert_eq!(a.samples, 3000);
}

#[test]
fn ceiling_decides_pass() {
    let base = SweepSpec {
        samples: 2000,
        eta_range: (16.0, 256.0),
        ..Default::default()
    };
    let open = lemma_sweep(LemmaId::JImproved, &base).unwrap();
    assert!(open.pass && open.max_ratio.is_finite());
    let tight = SweepSpec {
        ceiling: Some(open.max_ratio / 2.0),
        ..base
    };
    let report = lemma_sweep(LemmaId::JImproved, &tight).unwrap();
    assert_eq!(report.status, Status::Fail);
}

#[test]
fn triangle_at_origin_is_finite() {
    let spec = SweepSpec {
        samples: 2000,
        eta_range: (0.0, 1e-12),
        s: 0.5,
        ..Default::default()
    };
    let report = inequality_toolbox_check(ToolId::TriangleS, &spec).unwrap();
    assert!(report.max_ratio.is_finite() && report.pass);
}

#[test]
fn improved_triangle_constant() {
    let spec = SweepSpec {
        samples: 20_000,
        eta_range: (0.0, 1e6),
        s: 0.5,
        c_ratio: 2.0,
        ..Default::default()
    };
    let report = inequality_toolbox_check(ToolId::ImprovedTriangle, &spec).unwrap();
    assert_eq!(report.ceiling, Some(0.5));
    assert!(report.pass, "max ratio {}", report.max_ratio);
}

#[test]
fn cs_young_stable_under_doubling() {
    let spec = SweepSpec {
        samples: 4000,
        sigma: 2.0,
        lattice: 16,
        ..Default::default()
    };
    let report = inequality_toolbox_check(ToolId::CsYoung, &spec).unwrap();
    let drift = report.details["doubling_drift"];
    assert!((0.75..=1.25).contains(&drift), "drift {drift}");
    assert!(report.max_ratio <= report.details["weight_l2_bound"]);
}

#[test]
fn every_tool_runs() {
    for tool in ToolId::ALL {
        let spec = SweepSpec {
            samples: 2000,
            eta_range: (0.0, 1e4),
            s: 0.75,
            lattice: 8,
            ..Default::default()
        };
        let report = inequality_toolbox_check(tool, &spec).unwrap();
        assert!(
            report.pass,
            "{} failed: {}",
            tool.as_str(),
            report.max_ratio
        );
        assert_eq!(tool.as_str().parse::<ToolId>().unwrap(), tool);
    }
}

#[test]
fn rejects_bad_specs() {
    let spec = SweepSpec {
        samples: 0,
        ..Default::default()
    };
    assert!(lemma_sweep(LemmaId::JCap, &spec).is_err());
    let spec = SweepSpec {
        eta_range: (0.5, 10.0),
        ..Default::default()
    };
    assert!(lemma_sweep(LemmaId::JCap, &spec).is_err());
    assert!("NOT_A_LEMMA".parse::<LemmaId>().is_err());
    assert_eq!("j_cap".parse::<LemmaId>().unwrap(), LemmaId::JCap);
}

#[test]
fn weight_profile_agrees_with_evaluator() {
    let params = WeightParams::default();
    let m = Multipliers::new(params).unwrap();
    let ks = [-3, 1, 2, 7];
    let times: Vec<f64> = (0..400).map(|i| 0.37 + i as f64).collect();
    let rows = weight_profile(&params, m.mu(), 60.0, &ks, &times).unwrap();
    assert_eq!(rows.len(), ks.len() * times.len());
    for r in &rows {
        assert_eq!(r.w, m.weight().w(r.k, r.t, r.eta));
        let j = m.evaluate(Which::J, r.k, r.t, r.eta);
        assert!((r.j / j - 1.0).abs() < 1e-12, "J at {r:?}");
        let a = m.evaluate(Which::A, r.k, r.t, r.eta);
        assert!(
            (r.ln_a - a.ln()).abs() < 1e-12 * a.ln().abs().max(1.0),
            "A at {r:?}"
        );
    }
    assert!(weight_profile(&params, 0.0, 60.0, &ks, &times).is_err());
    assert!(weight_profile(&params, 4.0, f64::NAN, &ks, &times).is_err());
}
