mod common;

use approx::assert_relative_eq;
use common::{cofactor_det, explicit_rho, rng, simpson_g};
use proptest::prelude::*;
use rand::Rng;
use xychain::state::hermitian_eigenvalues;
use xychain::thermo::{self, GTable, ModelPoint};
use nalgebra::DMatrix;

fn toeplitz(table: &GTable, r: usize, shift: i64) -> Vec<Vec<f64>> {
    (0..r)
        .map(|i| (0..r).map(|j| table.get(i as i64 - j as i64 + shift).unwrap()).collect())
        .collect()
}

#[test]
fn toeplitz_matches_cofactor_expansion() {
    let mut rng = rng(11);
    let model = ModelPoint::ground(1.0, 0.5).unwrap();
    for _ in 0..100 {
        let r_max = 5;
        let values: Vec<f64> = (0..2 * r_max + 1).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let table = GTable::from_values(model, values, rng.random::<f64>() - 0.5).unwrap();
        for r in 1..=r_max {
            let xx = thermo::xx_correlator(&table, r).unwrap();
            let yy = thermo::yy_correlator(&table, r).unwrap();
            let xx_ref = cofactor_det(&toeplitz(&table, r, -1));
            let yy_ref = cofactor_det(&toeplitz(&table, r, 1));
            assert!((xx - xx_ref).abs() <= 1e-10 * xx_ref.abs().max(1e-3), "{xx} {xx_ref}");
            assert!((yy - yy_ref).abs() <= 1e-10 * yy_ref.abs().max(1e-3), "{yy} {yy_ref}");
        }
    }
}

#[test]
fn g_function_matches_simpson() {
    let mut rng = rng(12);
    let mut checked = 0;
    while checked < 10 {
        let lambda = rng.random::<f64>() * 3.0;
        let gamma = rng.random::<f64>();
        let t = if rng.random::<bool>() { 0.0 } else { 0.05 + rng.random::<f64>() };
        if (lambda - 1.0).abs() < 0.1 || gamma < 0.1 {
            continue;
        }
        let model = ModelPoint::new(lambda, gamma, t).unwrap();
        for k in [-3i64, 0, 1, 4] {
            let g = thermo::g_function(&model, k).unwrap();
            let s = simpson_g(&model, k, 40_000);
            assert!((g - s).abs() < 1e-8, "λ={lambda} γ={gamma} T={t} k={k}: {g} vs {s}");
        }
        checked += 1;
    }
}

#[test]
fn lambda_zero_gives_product_state() {
    let model = ModelPoint::ground(0.0, 0.6).unwrap();
    for r in 1..=6 {
        let s = thermo::reduced_state(&model, r).unwrap();
        let m = s.matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == 3 && j == 3 { 1.0 } else { 0.0 };
                assert!((m[(i, j)].re - expected).abs() < 1e-10 && m[(i, j)].im.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn purity_decreases_with_temperature_at_zero_coupling() {
    let mut last = f64::INFINITY;
    for i in 1..=20 {
        let model = ModelPoint::new(0.0, 0.5, 0.1 * i as f64).unwrap();
        let p = thermo::reduced_state(&model, 2).unwrap().purity();
        assert!(p < last, "T={}", 0.1 * i as f64);
        last = p;
    }
}

#[test]
fn zero_coupling_magnetization_is_thermal_spin() {
    for t in [0.1, 0.5, 2.0] {
        let model = ModelPoint::new(0.0, 0.3, t).unwrap();
        assert_relative_eq!(
            thermo::magnetization(&model).unwrap(),
            -(0.5 / t).tanh(),
            epsilon = 1e-12
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reduced_state_is_a_valid_symmetric_density_matrix(
        lambda in 0.0f64..3.0,
        gamma in 0.0f64..=1.0,
        t in prop_oneof![Just(0.0), 0.01f64..2.0],
        r in 1usize..=12,
    ) {
        let model = ModelPoint::new(lambda, gamma, t).unwrap();
        let table = GTable::build(&model, r).unwrap();
        let cs = thermo::correlators(&table, r).unwrap();
        let raw = explicit_rho(cs.sigma_z_mean, cs.xx, cs.yy, cs.zz);
        let trace: f64 = (0..4).map(|i| raw[(i, i)].re).sum();
        prop_assert!((trace - 1.0).abs() < 1e-12);
        prop_assert!((raw - raw.adjoint()).iter().all(|z| z.norm() < 1e-12));
        let ev = hermitian_eigenvalues(&DMatrix::from_iterator(4, 4, raw.iter().cloned()));
        prop_assert!(ev[0] >= -1e-9, "min eigenvalue {}", ev[0]);

        let state = thermo::reduced_state_from(&table, r).unwrap();
        prop_assert!(state.max_abs_diff(&state.swapped()) == 0.0);
        let diff = state.matrix() - raw;
        prop_assert!(diff.iter().all(|z| z.norm() < 1e-8));
    }
}
