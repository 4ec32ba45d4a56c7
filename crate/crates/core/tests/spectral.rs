//! Lattice products, dyadic blocks, norms and snapshots against brute-force oracles.

use couette_lab::sim::{advect, advect_direct, biot_savart_moving};
use couette_lab::spectral::io::{read_snapshot, write_snapshot};
use couette_lab::spectral::*;
use couette_lab::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_field(grid: Grid, seed: u64, real: bool) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::from_fn(grid, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    if real {
        let g = f.clone();
        for (k, j) in grid.modes() {
            f.set(k, j, 0.5 * (g.get(k, j) + g.get(-k, -j).conj()));
        }
    }
    f
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Relative error of the transform convolution against direct summation.
fn convolution_error(grid: Grid, seed: u64) -> f64 {
    let f = random_field(grid, seed, false);
    let g = random_field(grid, seed + 1, false);
    let fast = convolve_fields(&f, &g).unwrap();
    let slow = convolve_direct(&f, &g).unwrap();
    max_diff(&fast, &slow) / slow.max_abs()
}

/// Relative error of `u . grad f` through the transform against direct summation.
fn advection_error(grid: Grid, seed: u64, t: f64) -> f64 {
    let mut f = random_field(grid, seed, true);
    f.clear_zero_row();
    let (u, _) = biot_savart_moving(&f, t);
    let fast = advect(&ProductPlan::new(grid, true), &u, &f, t);
    let slow = advect_direct(&u, &f, t);
    max_diff(&fast, &slow) / slow.max_abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_convolution_matches_direct(k_max in 1usize..6, j_max in 1usize..40, l_y in 0.5f64..8.0, seed in any::<u64>()) {
        let grid = Grid::new(k_max, (j_max as f64 + 0.5) * PI / l_y, l_y).unwrap();
        prop_assert!(convolution_error(grid, seed) <= 1e-12);
    }

    #[test]
    fn transform_advection_matches_direct(k_max in 1usize..5, j_max in 1usize..24, t in 0.0f64..30.0, seed in any::<u64>()) {
        let grid = Grid::new(k_max, j_max as f64 + 0.5, PI).unwrap();
        prop_assert!(advection_error(grid, seed, t) <= 1e-12);
    }

    #[test]
    fn products_of_real_fields_are_real(k_max in 1usize..5, j_max in 1usize..20, seed in any::<u64>()) {
        let grid = Grid::new(k_max, j_max as f64, PI).unwrap();
        let f = random_field(grid, seed, true);
        let g = random_field(grid, seed ^ 7, true);
        let p = ProductPlan::new(grid, true).product(&f, &g);
        prop_assert!(p.conjugate_asymmetry() <= 1e-13 * p.max_abs().max(1e-300));
    }

    #[test]
    fn dyadic_blocks_partition_unity(xi in 0.0f64..5000.0) {
        let s: f64 = Dyadic::up_to(xi.max(1.0) * 2.0).into_iter().map(|n| phi(n, xi)).sum();
        prop_assert!((s - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn paraproduct_families_sum_to_product(k_max in 1usize..4, j_max in 1usize..30, seed in any::<u64>()) {
        let grid = Grid::new(k_max, j_max as f64, PI).unwrap();
        let f = random_field(grid, seed, true);
        let g = random_field(grid, seed ^ 3, true);
        let total = paraproduct_split(&f, &g).unwrap().total();
        let p = ProductPlan::new(grid, true).product(&f, &g);
        prop_assert!(max_diff(&total, &p) <= 1e-12 * p.max_abs());
    }

    #[test]
    fn snapshot_round_trip(k_max in 1usize..4, j_max in 1usize..10, t in -5.0f64..5.0, seed in any::<u64>()) {
        let grid = Grid::new(k_max, j_max as f64, PI).unwrap();
        let mut f = random_field(grid, seed, false);
        f.time = t;
        let mut buf = vec![];
        write_snapshot(&f, &mut buf).unwrap();
        let g = read_snapshot(buf.as_slice()).unwrap();
        prop_assert_eq!(g.coeffs(), f.coeffs());
        prop_assert_eq!(g.time, t);
        prop_assert!(g.grid().same_lattice(f.grid()));
    }
}

#[test]
fn oracle_on_small_advection_grid() {
    // k_max = 2 with 9 eta samples
    let grid = Grid::new(2, 4.0, PI).unwrap();
    assert_eq!(grid.n_eta(), 9);
    for seed in 0..20 {
        assert!(advection_error(grid, seed, 0.3 * seed as f64) <= 1e-12);
    }
}

#[test]
fn oracle_on_largest_grid() {
    // 21 x 475 = 9975 lattice points
    let grid = Grid::new(10, 237.0, PI).unwrap();
    assert!(grid.len() <= 10_000);
    assert!(convolution_error(grid, 11) <= 1e-12);
    assert!(advection_error(grid, 12, 7.0) <= 1e-12);
}

#[test]
fn two_mode_product_support() {
    let grid = Grid::new(4, 12.0, PI).unwrap();
    let mut f = SpectralField::zeros(grid);
    f.set_real_mode(1, 3, Complex64::new(1.0, 0.2));
    f.set_real_mode(2, -5, Complex64::new(-0.4, 0.7));
    let p = ProductPlan::new(grid, true).product(&f, &f);
    let freqs = [(1, 3), (-1, -3), (2, -5), (-2, 5)];
    for (k, j) in grid.modes() {
        let reachable = freqs
            .iter()
            .any(|a| freqs.iter().any(|b| (a.0 + b.0, a.1 + b.1) == (k, j)));
        if !reachable {
            assert!(p.get(k, j).norm() < 1e-15, "({k}, {j})");
        }
    }
    assert!(p.get(3, -2).norm() > 1e-3);
}

#[test]
fn aliased_plan_folds_high_sums() {
    let grid = Grid::new(2, 2.0, PI).unwrap();
    let mut f = SpectralField::zeros(grid);
    f.set(2, 0, Complex64::new(1.0, 0.0));
    // (2,0) * (2,0) lands on (4,0), outside the lattice
    let dealiased = ProductPlan::new(grid, true).convolve(&f, &f);
    let aliased = ProductPlan::new(grid, false).convolve(&f, &f);
    assert!(dealiased.max_abs() < 1e-15);
    assert!((aliased.get(-1, 0).norm() - 1.0).abs() < 1e-14);
}

#[test]
fn gevrey_norm_survives_huge_weights() {
    let grid = Grid::new(4, 4096.0, PI).unwrap();
    let mut f = SpectralField::zeros(grid);
    // e^{2 lambda |k,eta|} = e^{800} overflows on its own, the norm does not
    f.set(1, 4000, Complex64::new(1e-150, 0.0));
    let n = gevrey_norm(&f, 0.1, 11.0, 1.0).unwrap();
    let log_expected =
        0.1 * l1_len(1.0, 4000.0) + 11.0 * bracket(1.0, 4000.0).ln() + (1e-150f64).ln();
    assert!(n.is_finite());
    assert!((n.ln() - log_expected).abs() < 1e-12 * log_expected.abs());
    assert!(gevrey_norm(&f, -1.0, 1.0, 0.5).is_err());
    assert!(gevrey_norm(&f, 1.0, 1.0, 1.5).is_err());
}

#[test]
fn snapshot_rejects_truncation() {
    let grid = Grid::new(1, 2.0, PI).unwrap();
    let f = random_field(grid, 1, false);
    let mut buf = vec![];
    write_snapshot(&f, &mut buf).unwrap();
    buf.pop();
    assert!(read_snapshot(buf.as_slice()).is_err());
    buf.extend([0, 0]);
    assert!(read_snapshot(buf.as_slice()).is_err());
}
