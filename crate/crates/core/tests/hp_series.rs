mod common;

use common::{SeriesOracle, PINNED_SUP_DEVIATION};
use dicke_mf::hp_series::{eval_f, eval_f_full, eval_f_limit, eval_f_windowed, sup_deviation};
use dicke_mf::Spin;
use proptest::prelude::*;

fn spin(twice: u64) -> Spin {
    Spin::from_twice(twice).unwrap()
}

#[test]
fn oracle_reproduces_pinned_sup_deviations() {
    for (two_j, pinned) in PINNED_SUP_DEVIATION {
        let got = SeriesOracle::new(two_j).sup_deviation(1001);
        assert!((got - pinned).abs() <= 1e-15 * pinned, "2j = {two_j}: {got} vs {pinned}");
    }
}

#[test]
fn library_matches_pinned_sup_deviations() {
    for (two_j, pinned) in PINNED_SUP_DEVIATION {
        let got: f64 = sup_deviation(spin(two_j), 1001).unwrap();
        assert!((got - pinned).abs() <= 1e-12 * pinned, "2j = {two_j}: {got} vs {pinned}");
    }
}

#[test]
fn library_matches_oracle_pointwise() {
    for two_j in [1, 2, 7, 20, 201] {
        let oracle = SeriesOracle::new(two_j);
        // rho^2 = k * 2j / 40, k = 0..=60 covers past the edge of the limit's domain
        for k in 0..=60u64 {
            let (f_ref, lim_ref) = oracle.eval(k * two_j, 40);
            let rho = ((k * two_j) as f64 / 40.0).sqrt();
            let f: f64 = eval_f(rho, spin(two_j)).unwrap();
            assert!(
                (f - f_ref).abs() <= 1e-13 * f_ref.max(1e-300) + 1e-300,
                "2j = {two_j}, k = {k}: {f} vs {f_ref}"
            );
            if k <= 40 {
                let lim: f64 = eval_f_limit(rho, spin(two_j)).unwrap();
                assert!((lim - lim_ref).abs() <= 1e-15, "limit 2j = {two_j}, k = {k}");
            }
        }
    }
}

#[test]
fn spin_half_is_a_gaussian() {
    let j = spin(1);
    for i in 0..100 {
        let rho = 0.05 * i as f64;
        let f: f64 = eval_f(rho, j).unwrap();
        let want = (-rho * rho).exp();
        assert!((f - want).abs() <= 4.0 * f64::EPSILON * want, "rho = {rho}: {f} vs {want}");
    }
}

#[test]
fn windowed_mass_bound_is_respected() {
    for two_j in [10, 1000, 10_000] {
        for u in [0.1, 0.5, 0.9, 1.0, 1.1] {
            let rho = u * (two_j as f64).sqrt();
            let ev = eval_f_windowed(rho, spin(two_j), 1e-15).unwrap();
            assert!(ev.truncated_mass <= 1e-15, "2j = {two_j}, u = {u}: {}", ev.truncated_mass);
            assert!(ev.terms_used as u64 <= two_j + 1);
        }
    }
}

#[test]
fn sup_deviation_shrinks_with_j() {
    let devs: Vec<f64> = [20u64, 200, 2000, 20_000]
        .iter()
        .map(|&t| sup_deviation(spin(t), 1001).unwrap())
        .collect();
    assert!(devs.windows(2).all(|w| w[1] < w[0]), "{devs:?}");
}

#[test]
fn single_precision_tracks_double() {
    for two_j in [1u64, 20, 2000] {
        for k in 0..=20 {
            let u = k as f64 / 20.0;
            let rho = u * (two_j as f64).sqrt();
            let f64v: f64 = eval_f(rho, spin(two_j)).unwrap();
            let f32v: f32 = eval_f(rho as f32, spin(two_j)).unwrap();
            assert!((f64::from(f32v) - f64v).abs() <= 2e-5, "2j = {two_j}, u = {u}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn f_is_a_decreasing_weight(two_j in 1u64..4000, u in 0.0f64..1.5, du in 1e-6f64..0.2) {
        let j = spin(two_j);
        let scale = (two_j as f64).sqrt();
        let a: f64 = eval_f(u * scale, j).unwrap();
        let b: f64 = eval_f((u + du) * scale, j).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a * (1.0 + 1e-13), "F({}) = {b} > F({u}) = {a}", u + du);
    }

    #[test]
    fn windowed_equals_full(two_j in 1u64..=10_000, u in 0.0f64..1.2) {
        let j = spin(two_j);
        let rho = u * (two_j as f64).sqrt();
        let fast: f64 = eval_f(rho, j).unwrap();
        let slow: f64 = eval_f_full(rho, j).unwrap();
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.abs() + 1e-300, "{fast} vs {slow}");
    }

    #[test]
    fn f_approaches_limit_inside_domain(two_j in 2u64..4000, u in 0.0f64..0.9) {
        // below the edge the deviation is bounded by its value at the edge of a much smaller system
        let j = spin(two_j);
        let rho = u * (two_j as f64).sqrt();
        let f: f64 = eval_f(rho, j).unwrap();
        let lim: f64 = eval_f_limit(rho, j).unwrap();
        prop_assert!((f - lim).abs() < 0.2);
    }
}
