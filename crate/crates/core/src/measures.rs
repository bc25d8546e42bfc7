//! Entropic and entanglement measures on two-qubit states.
//!
//! All entropies are in bits.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Matrix4};
use thiserror::Error;

use crate::nelder_mead::{self, NelderMeadOptions};
use crate::state::{
    c, clamp_spectrum, hermitian_eigenvalues, identity2, kron2, pauli_x, pauli_y, pauli_z, psd_sqrt,
    StateError, TwoQubitState, C64,
};

/// Outcomes with probability below this contribute no conditional entropy.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

const DISCORD_CLAMP: f64 = 1e-8;
const CONCURRENCE_NEG_TOL: f64 = 1e-8;

/// Coarse search grid of the discord optimiser.
pub const DISCORD_GRID_THETA: usize = 60;
pub const DISCORD_GRID_PHI: usize = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("discord optimiser stalled: {0}")]
    OptimizerStalled(String),
}

/// Which qubit of the pair is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// Unit vector n̂ = (sinθ cosφ, sinθ sinφ, cosθ) defining the projective
/// measurement Π± = (𝟙 ± n̂·σ)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirection {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementDirection {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    /// Maps arbitrary angles to θ ∈ [0, π], φ ∈ [0, 2π) describing the same axis.
    pub fn normalized(self) -> Self {
        let n = self.unit_vector();
        let theta = n[2].clamp(-1.0, 1.0).acos();
        let mut phi = n[1].atan2(n[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if theta.sin().abs() < 1e-15 {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// (Π₊, Π₋).
    pub fn projectors(&self) -> (Matrix2<C64>, Matrix2<C64>) {
        let n = self.unit_vector();
        let ns = pauli_x() * c(n[0], 0.0) + pauli_y() * c(n[1], 0.0) + pauli_z() * c(n[2], 0.0);
        let half = c(0.5, 0.0);
        ((identity2() + ns) * half, (identity2() - ns) * half)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    pub discord: f64,
    pub classical: f64,
    pub mutual_info: f64,
    pub argmin: MeasurementDirection,
    pub measured_side: Side,
}

/// −Σ p log₂ p over the given probabilities, with 0·log 0 = 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// h(x) = −x log₂ x − (1−x) log₂(1−x).
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy(&[x, 1.0 - x])
}

/// Von Neumann entropy of a density matrix of any dimension.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> Result<f64, MeasureError> {
    let mut ev = hermitian_eigenvalues(rho);
    clamp_spectrum(&mut ev)?;
    Ok(shannon_entropy(&ev))
}

/// Entropy of a single-qubit state, from its Bloch-vector length.
fn qubit_entropy(m: &Matrix2<C64>) -> f64 {
    let (u0, len) = bloch(m);
    if u0 <= 0.0 {
        return 0.0;
    }
    binary_entropy((0.5 * (1.0 + len / u0)).min(1.0))
}

/// Writes a 2×2 Hermitian matrix as u₀𝟙 + u⃗·σ⃗ and returns (u₀, |u⃗|).
fn bloch(m: &Matrix2<C64>) -> (f64, f64) {
    let u0 = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
    let uz = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
    let ux = m[(0, 1)].re;
    let uy = -m[(0, 1)].im;
    (u0, (ux * ux + uy * uy + uz * uz).sqrt())
}

pub fn state_entropy(state: &TwoQubitState) -> Result<f64, MeasureError> {
    von_neumann_entropy(&state.to_dmatrix())
}

/// 𝓘 = S(ρ_A) + S(ρ_B) − S(ρ_AB).
pub fn mutual_information(state: &TwoQubitState) -> Result<f64, MeasureError> {
    let joint = state_entropy(state)?;
    Ok((qubit_entropy(&state.marginal_a()) + qubit_entropy(&state.marginal_b()) - joint).max(0.0))
}

/// Σᵢ pᵢ S(ρⁱ) after measuring `side` along `dir`, built from explicit
/// projectors.
pub fn conditional_entropy(state: &TwoQubitState, dir: &MeasurementDirection, side: Side) -> f64 {
    let (plus, minus) = dir.projectors();
    let mut h = 0.0;
    for pi in [plus, minus] {
        let op = match side {
            Side::B => kron2(&identity2(), &pi),
            Side::A => kron2(&pi, &identity2()),
        };
        let post = TwoQubitStateView(op * state.matrix() * op);
        let rest = match side {
            Side::B => post.marginal_a(),
            Side::A => post.marginal_b(),
        };
        let p = rest.trace().re;
        if p < PROBABILITY_FLOOR {
            continue;
        }
        h += p * qubit_entropy(&(rest / c(p, 0.0)));
    }
    h
}

// Partial traces of an unnormalised operator.
struct TwoQubitStateView(Matrix4<C64>);

impl TwoQubitStateView {
    fn marginal_a(&self) -> Matrix2<C64> {
        let mut out = Matrix2::zeros();
        for a in 0..2 {
            for c_ in 0..2 {
                for b in 0..2 {
                    out[(a, c_)] += self.0[(2 * a + b, 2 * c_ + b)];
                }
            }
        }
        out
    }

    fn marginal_b(&self) -> Matrix2<C64> {
        let mut out = Matrix2::zeros();
        for b in 0..2 {
            for d in 0..2 {
                for a in 0..2 {
                    out[(b, d)] += self.0[(2 * a + b, 2 * a + d)];
                }
            }
        }
        out
    }
}

/// Precomputed form of the conditional entropy for measurements on qubit B.
///
/// With Mₖ = Tr_B[(𝟙⊗σₖ)ρ], the unnormalised conditional states are
/// ρ_A^± = ½(ρ_A ± Σₖ nₖ Mₖ), so each evaluation reduces to two Bloch
/// vectors.
#[derive(Debug, Clone, Copy)]
pub struct ConditionalEntropyKernel {
    // Bloch coefficients (u₀, ux, uy, uz) of ρ_A and of Mₓ, M_y, M_z.
    base: [f64; 4],
    dirs: [[f64; 4]; 3],
}

impl ConditionalEntropyKernel {
    /// Kernel for measuring `side` of `state`.
    pub fn new(state: &TwoQubitState, side: Side) -> Self {
        let st = match side {
            Side::B => state.clone(),
            Side::A => state.swapped(),
        };
        let m = st.matrix();
        let coeffs = |op: &Matrix2<C64>| -> [f64; 4] {
            // Tr_B[(𝟙⊗op)ρ]_{ac} = Σ_{b,d} op_{bd} ρ_{(a,d),(c,b)}
            let mut out = Matrix2::<C64>::zeros();
            for a in 0..2 {
                for c_ in 0..2 {
                    for b in 0..2 {
                        for d in 0..2 {
                            out[(a, c_)] += op[(b, d)] * m[(2 * a + d, 2 * c_ + b)];
                        }
                    }
                }
            }
            [
                0.5 * (out[(0, 0)].re + out[(1, 1)].re),
                0.5 * (out[(0, 1)].re + out[(1, 0)].re),
                0.5 * (out[(1, 0)].im - out[(0, 1)].im),
                0.5 * (out[(0, 0)].re - out[(1, 1)].re),
            ]
        };
        Self {
            base: coeffs(&identity2()),
            dirs: [coeffs(&pauli_x()), coeffs(&pauli_y()), coeffs(&pauli_z())],
        }
    }

    pub fn eval_vector(&self, n: [f64; 3]) -> f64 {
        let mut h = 0.0;
        for sign in [1.0, -1.0] {
            let mut u = [0.0; 4];
            for (i, ui) in u.iter_mut().enumerate() {
                let along = n[0] * self.dirs[0][i] + n[1] * self.dirs[1][i] + n[2] * self.dirs[2][i];
                *ui = 0.5 * (self.base[i] + sign * along);
            }
            let p = 2.0 * u[0];
            if p < PROBABILITY_FLOOR {
                continue;
            }
            let len = (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]).sqrt();
            h += p * binary_entropy((0.5 * (1.0 + len / u[0])).min(1.0));
        }
        h
    }

    pub fn eval(&self, theta: f64, phi: f64) -> f64 {
        self.eval_vector(MeasurementDirection::new(theta, phi).unit_vector())
    }
}

/// Quantum discord with measurement on `side`, minimised over projective
/// measurements: coarse angular grid, then Nelder–Mead from the three best
/// distinct grid points and from the σz, σx and σy axes.
pub fn discord(state: &TwoQubitState, side: Side) -> Result<DiscordResult, MeasureError> {
    let kernel = ConditionalEntropyKernel::new(state, side);
    let mutual_info = mutual_information(state)?;
    let unmeasured = match side {
        Side::B => qubit_entropy(&state.marginal_a()),
        Side::A => qubit_entropy(&state.marginal_b()),
    };

    let d_theta = PI / DISCORD_GRID_THETA as f64;
    let d_phi = 2.0 * PI / DISCORD_GRID_PHI as f64;
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity((DISCORD_GRID_THETA + 1) * DISCORD_GRID_PHI);
    for i in 0..=DISCORD_GRID_THETA {
        let theta = i as f64 * d_theta;
        // the poles are a single direction
        let phis = if i == 0 || i == DISCORD_GRID_THETA { 1 } else { DISCORD_GRID_PHI };
        for j in 0..phis {
            let phi = j as f64 * d_phi;
            grid.push((kernel.eval(theta, phi), theta, phi));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut seeds: Vec<[f64; 3]> = Vec::new();
    let mut starts: Vec<(f64, f64)> = Vec::new();
    for &(_, theta, phi) in &grid {
        let n = MeasurementDirection::new(theta, phi).unit_vector();
        // n and −n give the same measurement
        let fresh = seeds.iter().all(|s| {
            let dot = s[0] * n[0] + s[1] * n[1] + s[2] * n[2];
            1.0 - dot.abs() > 1e-9
        });
        if fresh {
            seeds.push(n);
            starts.push((theta, phi));
        }
        if starts.len() == 3 {
            break;
        }
    }
    starts.extend([(0.0, 0.0), (PI / 2.0, 0.0), (PI / 2.0, PI / 2.0)]);

    let (grid_best, mut best_theta, mut best_phi) = grid[0];
    let mut best = grid_best;
    let opts = NelderMeadOptions {
        f_tol: 1e-12,
        x_tol: 1e-8,
        max_iter: 2000,
    };
    let mut any_converged = false;
    for (theta, phi) in starts {
        let res = nelder_mead::minimize(
            |x| kernel.eval(x[0], x[1]),
            &[theta, phi],
            &[d_theta, d_phi],
            &opts,
        );
        if !res.fx.is_finite() {
            return Err(MeasureError::OptimizerStalled(format!(
                "non-finite objective from start θ={theta}, φ={phi}"
            )));
        }
        any_converged |= res.converged;
        if res.fx < best {
            best = res.fx;
            best_theta = res.x[0];
            best_phi = res.x[1];
        }
    }
    if !any_converged {
        return Err(MeasureError::OptimizerStalled(
            "no simplex refinement converged within its iteration budget".into(),
        ));
    }

    let classical = (unmeasured - best).max(0.0);
    let raw = mutual_info - classical;
    if raw < -DISCORD_CLAMP {
        return Err(MeasureError::OptimizerStalled(format!(
            "negative discord {raw:e} beyond clamp tolerance"
        )));
    }
    Ok(DiscordResult {
        discord: raw.max(0.0),
        classical,
        mutual_info,
        argmin: MeasurementDirection::new(best_theta, best_phi).normalized(),
        measured_side: side,
    })
}

/// Wootters concurrence max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄), where λᵢ are the
/// eigenvalues of ρ(σy⊗σy)ρ*(σy⊗σy) in decreasing order. They are obtained
/// from the Hermitian matrix √ρ ρ̃ √ρ, which has the same spectrum.
pub fn concurrence(state: &TwoQubitState) -> Result<f64, MeasureError> {
    let yy = kron2(&pauli_y(), &pauli_y());
    let rho = state.matrix();
    let flipped = yy * rho.conjugate() * yy;
    let sqrt_rho = psd_sqrt(&state.to_dmatrix())?;
    let flipped = DMatrix::from_iterator(4, 4, flipped.iter().copied());
    let product = &sqrt_rho * flipped * &sqrt_rho;
    let product = (&product + product.adjoint()) * c(0.5, 0.0);
    let mut ev = hermitian_eigenvalues(&product);
    let min = ev[0];
    if min < -CONCURRENCE_NEG_TOL {
        return Err(StateError::NotPositive { min_eigenvalue: min }.into());
    }
    ev.sort_by(|a, b| b.total_cmp(a));
    let roots: Vec<f64> = ev.iter().map(|v| v.max(0.0).sqrt()).collect();
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0))
}

/// h(½[1 + √(1 − C²)]) for a given concurrence.
pub fn eof_from_concurrence(c_: f64) -> f64 {
    let c_ = c_.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c_ * c_).sqrt()))
}

pub fn entanglement_of_formation(state: &TwoQubitState) -> Result<f64, MeasureError> {
    Ok(eof_from_concurrence(concurrence(state)?))
}

/// Uhlmann fidelity Tr√(√a b √a) between density matrices of equal size.
pub fn fidelity(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<f64, MeasureError> {
    if a.shape() != b.shape() {
        return Err(StateError::DimensionMismatch(a.nrows(), b.nrows()).into());
    }
    // Tr√(√a b √a) is the trace norm of √a √b.
    let product = psd_sqrt(a)? * psd_sqrt(b)?;
    Ok(product.singular_values().sum().clamp(0.0, 1.0))
}

pub fn state_fidelity(a: &TwoQubitState, b: &TwoQubitState) -> Result<f64, MeasureError> {
    fidelity(&a.to_dmatrix(), &b.to_dmatrix())
}
