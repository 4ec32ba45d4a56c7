//! Toy model integration and envelope checks.

use couette_lab::toy::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn step_halving_changes_endpoint_below_1e8() {
    for (beta, gamma) in [(0.1, 4.0), (0.25, 16.0), (0.45, 64.0)] {
        let p = ToyParams {
            beta,
            gamma,
            c_growth: 1.5,
        };
        let coarse = toy_canonical(&p).unwrap().last();
        let fine = toy_integrate(&p, -gamma, gamma, 1.0, 1.0, p.default_step() / 2.0)
            .unwrap()
            .last();
        assert!(rel(coarse.f_r, fine.f_r) < 1e-8 && rel(coarse.f_nr, fine.f_nr) < 1e-8);
    }
}

#[test]
fn matches_fine_step_oracle() {
    let p = ToyParams {
        beta: 0.25,
        gamma: 16.0,
        c_growth: 1.5,
    };
    let traj = toy_canonical(&p).unwrap().last();
    let oracle = toy_integrate(&p, -16.0, 16.0, 1.0, 1.0, 1e-4)
        .unwrap()
        .last();
    assert!(rel(traj.f_r, oracle.f_r) < 1e-6 && rel(traj.f_nr, oracle.f_nr) < 1e-6);
}

#[test]
fn lyapunov_quantity_nondecreasing_before_orr_time() {
    for gamma in [4.0, 16.0, 64.0] {
        let p = ToyParams {
            beta: 0.3,
            gamma,
            c_growth: 1.5,
        };
        let report = growth_envelope(&toy_canonical(&p).unwrap()).unwrap();
        assert!(
            report.lyapunov_defect < 1e-10,
            "defect {}",
            report.lyapunov_defect
        );
    }
}

#[test]
fn resonant_to_nonresonant_ratio_at_orr_time() {
    // f_R ~ (1/gamma) f_NR at tau = 0 up to a gamma-independent factor
    let ratios: Vec<f64> = [4.0, 16.0, 64.0, 256.0]
        .iter()
        .map(|&gamma| {
            growth_envelope(
                &toy_canonical(&ToyParams {
                    beta: 0.1,
                    gamma,
                    c_growth: 1.5,
                })
                .unwrap(),
            )
            .unwrap()
            .orr_ratio
        })
        .collect();
    for r in &ratios {
        assert!((0.5..20.0).contains(r), "{ratios:?}");
    }
}

#[test]
fn nonresonant_bound_uniform_in_gamma() {
    let cs: Vec<f64> = [4.0, 16.0, 64.0]
        .iter()
        .map(|&gamma| {
            growth_envelope(
                &toy_canonical(&ToyParams {
                    beta: 0.25,
                    gamma,
                    c_growth: 1.5,
                })
                .unwrap(),
            )
            .unwrap()
            .nonresonant_over_resonant
        })
        .collect();
    let (lo, hi) = cs
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &c| (a.min(c), b.max(c)));
    assert!(hi / lo < 2.0, "{cs:?}");
}

#[test]
fn log_growth_rate_approaches_two_c() {
    for c in [1.6, 2.0, 4.0] {
        for eta in [1e4, 1e6] {
            let m = max_growth(eta, c).unwrap();
            assert!(rel(m.log_m_g / eta.sqrt(), 2.0 * c) < 0.05);
        }
        // at eta = 100 the finite-N correction is still ~20%, captured by Stirling
        let m = max_growth(100.0, c).unwrap();
        assert!(rel(m.stirling(), m.log_m_g) < 2e-3);
    }
}

#[test]
fn trajectory_exports_as_csv() {
    let traj = toy_canonical(&ToyParams {
        beta: 0.1,
        gamma: 4.0,
        c_growth: 1.5,
    })
    .unwrap();
    let csv = couette_lab::report::emit(&traj.points, couette_lab::report::Format::Csv).unwrap();
    assert!(csv.starts_with("tau,f_r,f_nr\n"));
    assert_eq!(csv.lines().count(), traj.points.len() + 1);
}
