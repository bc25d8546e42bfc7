use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use xychain::finite::{self, ChainSpec};
use xychain::thermo::{factorization_field, ModelPoint};

fn spec(n: usize, lambda: f64, gamma: f64) -> ChainSpec {
    ChainSpec::new(n, ModelPoint::ground(lambda, gamma).unwrap()).unwrap()
}

// Real-valued single-site operators: σx, iσy, σz.
fn site_op(n: usize, site: usize, op: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::identity(1, 1);
    for k in 0..n {
        let f = if k == site { op.clone() } else { DMatrix::identity(2, 2) };
        m = m.kronecker(&f);
    }
    m
}

/// Hamiltonian from explicit Kronecker products, with σy⊗σy = −(iσy)⊗(iσy).
fn kron_hamiltonian(n: usize, lambda: f64, gamma: f64) -> DMatrix<f64> {
    let sx = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let isy = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let sz = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let dim = 1 << n;
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..n {
        let j = (i + 1) % n;
        let xx = site_op(n, i, &sx) * site_op(n, j, &sx);
        let yy = -(site_op(n, i, &isy) * site_op(n, j, &isy));
        h -= xx * (lambda / 2.0 * (1.0 + gamma)) + yy * (lambda / 2.0 * (1.0 - gamma)) + site_op(n, i, &sz);
    }
    h
}

#[test]
fn hamiltonian_matches_kronecker_construction() {
    for n in [3, 4, 5] {
        for &(l, g) in &[(0.7, 0.3), (1.4, 0.9), (2.0, 0.0)] {
            let diff = finite::build_hamiltonian(&spec(n, l, g)) - kron_hamiltonian(n, l, g);
            assert!(diff.amax() < 1e-14, "n={n}");
        }
    }
}

#[test]
fn crossing_counts_follow_ring_size() {
    for gamma in [0.3, 0.5, 0.8] {
        for n in 3..=8 {
            let report = finite::find_crossings(gamma, n, None).unwrap();
            assert_eq!(report.count, n / 2, "γ={gamma} N={n}: {:?}", report.crossings);
        }
    }
}

#[test]
fn reduced_states_coincide_at_factorization_field() {
    let lf = factorization_field(0.5).unwrap();
    let s = finite::diagonalize(&spec(5, lf, 0.5)).unwrap();
    let rho = finite::thermal_state(&s, 0.0);
    let reference = finite::reduce_to_pair(&rho, 0, 1).unwrap();
    for r in 2..5 {
        let other = finite::reduce_to_pair(&rho, 0, r).unwrap();
        assert!(reference.max_abs_diff(&other) < 1e-8, "r={r}");
    }
}

#[test]
fn low_temperature_state_matches_ground_projector() {
    let s = finite::diagonalize(&spec(6, 0.6, 0.5)).unwrap();
    assert!(s.gap() > 0.1);
    let diff = finite::thermal_state(&s, 0.01) - finite::thermal_state(&s, 0.0);
    let trace_distance: f64 = 0.5 * diff.symmetric_eigenvalues().iter().map(|v| v.abs()).sum::<f64>();
    assert!(trace_distance < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hamiltonian_commutes_with_parity(n in 2usize..=7, lambda in 0.0f64..4.0, gamma in 0.0f64..=1.0) {
        let h = finite::build_hamiltonian(&spec(n, lambda, gamma));
        let p = DMatrix::from_diagonal(&finite::parity_operator(n));
        prop_assert!((&h * &p - &p * &h).amax() < 1e-10);
    }

    #[test]
    fn ground_state_has_definite_parity_and_gap_is_nonnegative(
        n in 3usize..=7, lambda in 0.0f64..3.0, gamma in 0.05f64..=1.0,
    ) {
        let s = finite::diagonalize(&spec(n, lambda, gamma)).unwrap();
        prop_assert!(s.gap() >= -1e-12);
        let p = finite::parity_operator(n);
        let v: DVector<f64> = s.states.column(0).into();
        let pv = v.component_mul(&p);
        prop_assert!((&pv - &v).norm() < 1e-8 || (&pv + &v).norm() < 1e-8);
    }

    #[test]
    fn pair_states_are_translation_invariant(
        n in 3usize..=7, lambda in 0.0f64..3.0, gamma in 0.0f64..=1.0, t in prop_oneof![Just(0.0), 0.05f64..1.0],
    ) {
        let s = finite::diagonalize(&ChainSpec::new(n, ModelPoint::new(lambda, gamma, t).unwrap()).unwrap()).unwrap();
        let rho = finite::thermal_state(&s, t);
        for r in 1..n {
            let base = finite::reduce_to_pair(&rho, 0, r).unwrap();
            for k in 1..n {
                let (a, b) = (k, (k + r) % n);
                let shifted = if a < b {
                    finite::reduce_to_pair(&rho, a, b).unwrap()
                } else {
                    finite::reduce_to_pair(&rho, b, a).unwrap().swapped()
                };
                prop_assert!(base.max_abs_diff(&shifted) < 1e-10, "n={} r={} k={}", n, r, k);
            }
        }
    }
}
