#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xychain::measures::{self, MeasurementDirection, Side};
use xychain::state::{c, identity2, pauli_x, pauli_y, pauli_z, C64};
use xychain::thermo::{dispersion, ModelPoint};
use xychain::TwoQubitState;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => 1.0,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &v)| v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// Composite Simpson rule for G_k with `intervals` panels on [0, π].
pub fn simpson_g(model: &ModelPoint, k: i64, intervals: usize) -> f64 {
    let (l, g) = (model.lambda(), model.gamma());
    let f = |phi: f64| {
        let w = dispersion(model, phi);
        let th = if model.is_ground() { 1.0 } else { (w / model.temperature()).tanh() };
        let kp = k as f64 * phi;
        th / (2.0 * PI * w) * (kp.cos() * (1.0 + l * phi.cos()) - l * g * kp.sin() * phi.sin())
    };
    let n = intervals + intervals % 2;
    let h = PI / n as f64;
    let mut s = f(0.0) + f(PI);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

/// ρ assembled entry by entry in the |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ basis.
pub fn explicit_rho(m: f64, xx: f64, yy: f64, zz: f64) -> Matrix4<C64> {
    let mut r = Matrix4::<C64>::zeros();
    r[(0, 0)] = c((1.0 + 2.0 * m + zz) / 4.0, 0.0);
    r[(1, 1)] = c((1.0 - zz) / 4.0, 0.0);
    r[(2, 2)] = c((1.0 - zz) / 4.0, 0.0);
    r[(3, 3)] = c((1.0 - 2.0 * m + zz) / 4.0, 0.0);
    r[(0, 3)] = c((xx - yy) / 4.0, 0.0);
    r[(3, 0)] = c((xx - yy) / 4.0, 0.0);
    r[(1, 2)] = c((xx + yy) / 4.0, 0.0);
    r[(2, 1)] = c((xx + yy) / 4.0, 0.0);
    r
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    // Box–Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let rad = (-2.0 * u1.ln()).sqrt();
    let v1: f64 = rng.random::<f64>().max(1e-300);
    let v2: f64 = rng.random();
    let rad2 = (-2.0 * v1.ln()).sqrt();
    c(rad * (2.0 * PI * u2).cos(), rad2 * (2.0 * PI * v2).cos())
}

pub fn random_pure(rng: &mut ChaCha8Rng) -> (TwoQubitState, [C64; 4]) {
    let mut a = [c(0.0, 0.0); 4];
    for x in a.iter_mut() {
        *x = complex_gaussian(rng);
    }
    let norm = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for x in a.iter_mut() {
        *x /= norm;
    }
    (TwoQubitState::pure(a), a)
}

/// exp(i a·σ) with a random axis and angle, times a random global phase.
pub fn random_unitary(rng: &mut ChaCha8Rng) -> Matrix2<C64> {
    let theta = rng.random::<f64>() * PI;
    let dir = MeasurementDirection::new(rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI).unit_vector();
    let ns = pauli_x() * c(dir[0], 0.0) + pauli_y() * c(dir[1], 0.0) + pauli_z() * c(dir[2], 0.0);
    let phase = C64::from_polar(1.0, rng.random::<f64>() * 2.0 * PI);
    (identity2() * c(theta.cos(), 0.0) + ns * c(0.0, theta.sin())) * phase
}

/// Random X-shaped state: diagonal from normalised uniforms, coherences
/// inside the positivity bounds.
pub fn random_x_state(rng: &mut ChaCha8Rng) -> TwoQubitState {
    let mut d: [f64; 4] = [0.0; 4];
    for x in d.iter_mut() {
        *x = rng.random::<f64>() + 1e-3;
    }
    let s: f64 = d.iter().sum();
    for x in d.iter_mut() {
        *x /= s;
    }
    let z = C64::from_polar(rng.random::<f64>() * (d[0] * d[3]).sqrt(), rng.random::<f64>() * 2.0 * PI);
    let w = C64::from_polar(rng.random::<f64>() * (d[1] * d[2]).sqrt(), rng.random::<f64>() * 2.0 * PI);
    let mut m = Matrix4::<C64>::zeros();
    for i in 0..4 {
        m[(i, i)] = c(d[i], 0.0);
    }
    m[(0, 3)] = z;
    m[(3, 0)] = z.conj();
    m[(1, 2)] = w;
    m[(2, 1)] = w.conj();
    TwoQubitState::new(m).expect("valid X state")
}

fn qubit_entropy(m: &Matrix2<C64>) -> f64 {
    let ev = m.symmetric_eigenvalues();
    ev.iter().filter(|&&p| p > 1e-300).map(|&p| -p * p.log2()).sum()
}

/// Minimum conditional entropy over measurements on B found by a dense
/// 60 × 60 grid followed by repeated local grid refinement around the best
/// few cells.
pub fn grid_zoom_min_conditional_entropy(state: &TwoQubitState) -> f64 {
    let f = |t: f64, p: f64| measures::conditional_entropy(state, &MeasurementDirection::new(t, p), Side::B);
    let (nt, np) = (60usize, 60usize);
    let (dt, dp) = (PI / nt as f64, 2.0 * PI / np as f64);
    let mut cells = Vec::with_capacity(nt * np);
    for i in 0..nt {
        for j in 0..np {
            let (t, p) = ((i as f64 + 0.5) * dt, j as f64 * dp);
            cells.push((f(t, p), t, p));
        }
    }
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = cells[0].0;
    for &(_, t0, p0) in cells.iter().take(6) {
        let (mut t, mut p) = (t0, p0);
        let (mut ht, mut hp) = (dt, dp);
        let mut local = f(t, p);
        while ht > 1e-11 {
            for a in -5..=5 {
                for b in -5..=5 {
                    let (tt, pp) = (t + a as f64 * ht / 5.0, p + b as f64 * hp / 5.0);
                    let v = f(tt, pp);
                    if v < local {
                        local = v;
                        t = tt;
                        p = pp;
                    }
                }
            }
            ht /= 3.0;
            hp /= 3.0;
        }
        best = best.min(local);
    }
    best
}

/// Discord with measurement on B from the grid-zoom search and eigenvalue
/// entropies computed here.
pub fn oracle_discord(state: &TwoQubitState) -> f64 {
    let joint: f64 = state.eigenvalues().iter().filter(|&&p| p > 1e-300).map(|&p| -p * p.log2()).sum();
    let sb = qubit_entropy(&state.marginal_b());
    (sb - joint + grid_zoom_min_conditional_entropy(state)).max(0.0)
}

pub fn marginal_entropy_a(state: &TwoQubitState) -> f64 {
    qubit_entropy(&state.marginal_a())
}
