//! Exact diagonalisation of the periodic N-spin XY ring.
//!
//! H = −Σᵢ [ (λ/2)((1+γ) σxⁱσxⁱ⁺¹ + (1−γ) σyⁱσyⁱ⁺¹) + σzⁱ ],  site N ≡ 0.
//!
//! Basis states are bit strings with site 0 as the most significant bit and
//! bit value 0 meaning spin up (σz = +1). The Hamiltonian only flips pairs
//! of neighbouring spins, so it is block diagonal in the parity
//! P = (−1)^(number of up spins); each block is diagonalised separately.
//! For N = 2 the sum visits the single bond twice, doubling its coupling.

use nalgebra::{DMatrix, DVector, Matrix4};
use thiserror::Error;

use crate::state::{c, StateError, TwoQubitState};
use crate::thermo::{factorization_field, ModelPoint};

pub const MAX_SPINS: usize = 12;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;
/// Relative eigenvalue cutoff for [`numerical_rank`]; see the README for how
/// it relates to the reported factorization window.
pub const DEFAULT_RANK_TOL: f64 = 1e-5;

const CROSSING_SCAN_STEP: f64 = 2e-3;
/// Default scan range in units of the factorization field. The outermost
/// crossing of an 8-spin ring at γ = 0.8 sits near 4.8 λ_f.
const CROSSING_RANGE_FACTOR: f64 = 10.0;
const CROSSING_TOL: f64 = 1e-8;
const CROSSING_GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FiniteError {
    #[error("{n} spins exceed the dense limit of {MAX_SPINS}")]
    DimensionTooLarge { n: usize },
    #[error("a ring needs at least 2 spins, got {n}")]
    TooFewSpins { n: usize },
    #[error("bad site pair ({a}, {b}) for {n} spins")]
    BadSites { a: usize, b: usize, n: usize },
    #[error("eigensolver failed: {0}")]
    EigensolverFailed(String),
    #[error("no level crossing for γ = {gamma}")]
    NoCrossingFound { gamma: f64 },
    #[error("density matrix dimension {dim} is not a power of two")]
    BadDimension { dim: usize },
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    n: usize,
    model: ModelPoint,
}

impl ChainSpec {
    pub fn new(n: usize, model: ModelPoint) -> Result<Self, FiniteError> {
        if n > MAX_SPINS {
            return Err(FiniteError::DimensionTooLarge { n });
        }
        if n < 2 {
            return Err(FiniteError::TooFewSpins { n });
        }
        Ok(Self { n, model })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> &ModelPoint {
        &self.model
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }
}

#[inline]
fn spin_bit(state: usize, site: usize, n: usize) -> usize {
    (state >> (n - 1 - site)) & 1
}

/// +1 for an even number of up spins, −1 for odd.
#[inline]
fn parity_of(state: usize, n: usize) -> f64 {
    let ups = n as u32 - state.count_ones();
    if ups % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Calls `emit(row, col, value)` for every non-zero entry of H.
fn for_each_entry<F: FnMut(usize, usize, f64)>(spec: &ChainSpec, mut emit: F) {
    let n = spec.n;
    let lambda = spec.model.lambda();
    let gamma = spec.model.gamma();
    for s in 0..spec.dim() {
        let mut diag = 0.0;
        for i in 0..n {
            diag -= 1.0 - 2.0 * spin_bit(s, i, n) as f64;
        }
        emit(s, s, diag);
        if lambda == 0.0 {
            continue;
        }
        for i in 0..n {
            let j = (i + 1) % n;
            let same = spin_bit(s, i, n) == spin_bit(s, j, n);
            // σxσx flips both spins with amplitude 1; σyσy with −1 (aligned) or +1 (anti-aligned).
            let amp = if same { -lambda * gamma } else { -lambda };
            let flip = (1 << (n - 1 - i)) | (1 << (n - 1 - j));
            emit(s ^ flip, s, amp);
        }
    }
}

/// Dense 2ⁿ×2ⁿ Hamiltonian (real symmetric).
pub fn build_hamiltonian(spec: &ChainSpec) -> DMatrix<f64> {
    let dim = spec.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for_each_entry(spec, |r, c_, v| h[(r, c_)] += v);
    h
}

/// Diagonal of P = exp(iπ/2 (Σσzⁱ + N)) = (−1)^(number of up spins).
pub fn parity_operator(n: usize) -> DVector<f64> {
    DVector::from_iterator(1 << n, (0..1usize << n).map(|s| parity_of(s, n)))
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub n: usize,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Column k is the eigenvector of `energies[k]`.
    pub states: DMatrix<f64>,
    /// Parity eigenvalue (±1) of each eigenvector.
    pub parities: Vec<i8>,
    pub degeneracy_tol: f64,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// E₁ − E₀.
    pub fn gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.energies[0];
        self.energies
            .iter()
            .take_while(|&&e| e - e0 < self.degeneracy_tol)
            .count()
    }
}

fn sector_indices(n: usize, parity: f64) -> Vec<usize> {
    (0..1usize << n).filter(|&s| parity_of(s, n) == parity).collect()
}

fn sector_matrix(spec: &ChainSpec, indices: &[usize]) -> DMatrix<f64> {
    let mut pos = vec![usize::MAX; spec.dim()];
    for (k, &s) in indices.iter().enumerate() {
        pos[s] = k;
    }
    let m = indices.len();
    let mut h = DMatrix::zeros(m, m);
    for_each_entry(spec, |r, c_, v| {
        let (pr, pc) = (pos[r], pos[c_]);
        if pr != usize::MAX && pc != usize::MAX {
            h[(pr, pc)] += v;
        }
    });
    h
}

/// Full eigendecomposition, one parity sector at a time.
pub fn diagonalize(spec: &ChainSpec) -> Result<SpectrumResult, FiniteError> {
    let dim = spec.dim();
    let mut levels: Vec<(f64, i8, DVector<f64>)> = Vec::with_capacity(dim);
    for parity in [1.0, -1.0] {
        let idx = sector_indices(spec.n, parity);
        let h = sector_matrix(spec, &idx);
        let eig = h.symmetric_eigen();
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(FiniteError::EigensolverFailed("non-finite eigenvalue".into()));
        }
        for k in 0..idx.len() {
            let mut v = DVector::zeros(dim);
            for (row, &s) in idx.iter().enumerate() {
                v[s] = eig.eigenvectors[(row, k)];
            }
            levels.push((eig.eigenvalues[k], parity as i8, v));
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut states = DMatrix::zeros(dim, dim);
    for (k, (_, _, v)) in levels.iter().enumerate() {
        states.set_column(k, v);
    }
    Ok(SpectrumResult {
        n: spec.n,
        energies: levels.iter().map(|l| l.0).collect(),
        parities: levels.iter().map(|l| l.1).collect(),
        states,
        degeneracy_tol: DEFAULT_DEGENERACY_TOL,
    })
}

/// Lowest eigenvalue of each parity sector, (even, odd). Eigenvalues only.
pub fn sector_ground_energies(spec: &ChainSpec) -> (f64, f64) {
    let lowest = |parity: f64| {
        let idx = sector_indices(spec.n, parity);
        sector_matrix(spec, &idx)
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };
    (lowest(1.0), lowest(-1.0))
}

/// The `count` lowest energies, ascending. Eigenvalues only.
pub fn lowest_levels(spec: &ChainSpec, count: usize) -> Vec<f64> {
    let mut all = Vec::with_capacity(spec.dim());
    for parity in [1.0, -1.0] {
        let idx = sector_indices(spec.n, parity);
        all.extend(sector_matrix(spec, &idx).symmetric_eigenvalues().iter().copied());
    }
    all.sort_by(f64::total_cmp);
    all.truncate(count);
    all
}

/// Gibbs state e^{−H/T}/Z. At T = 0 the equal mixture over the ground
/// manifold (levels within `degeneracy_tol` of E₀).
pub fn thermal_state(spectrum: &SpectrumResult, temperature: f64) -> DMatrix<f64> {
    let e0 = spectrum.ground_energy();
    let weights: Vec<f64> = if temperature <= 0.0 {
        spectrum
            .energies
            .iter()
            .map(|&e| if e - e0 < spectrum.degeneracy_tol { 1.0 } else { 0.0 })
            .collect()
    } else {
        spectrum
            .energies
            .iter()
            .map(|&e| (-(e - e0) / temperature).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    let kept: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > 0.0).collect();
    let dim = spectrum.states.nrows();
    let mut scaled = DMatrix::zeros(dim, kept.len());
    for (col, &k) in kept.iter().enumerate() {
        let s = (weights[k] / z).sqrt();
        for row in 0..dim {
            scaled[(row, col)] = spectrum.states[(row, k)] * s;
        }
    }
    &scaled * scaled.transpose()
}

/// Two-spin reduced state of sites `a < b`, tracing out the rest of the ring.
pub fn reduce_to_pair(rho: &DMatrix<f64>, a: usize, b: usize) -> Result<TwoQubitState, FiniteError> {
    let dim = rho.nrows();
    if !dim.is_power_of_two() || dim < 4 || rho.ncols() != dim {
        return Err(FiniteError::BadDimension { dim });
    }
    let n = dim.trailing_zeros() as usize;
    if a >= b || b >= n {
        return Err(FiniteError::BadSites { a, b, n });
    }
    let (ma, mb) = (1usize << (n - 1 - a), 1usize << (n - 1 - b));
    let mut out = Matrix4::zeros();
    for env in 0..dim {
        if env & (ma | mb) != 0 {
            continue;
        }
        for sa in 0..2 {
            for sb in 0..2 {
                let row = env | if sa == 1 { ma } else { 0 } | if sb == 1 { mb } else { 0 };
                for ta in 0..2 {
                    for tb in 0..2 {
                        let col = env | if ta == 1 { ma } else { 0 } | if tb == 1 { mb } else { 0 };
                        out[(2 * sa + sb, 2 * ta + tb)] += c(rho[(row, col)], 0.0);
                    }
                }
            }
        }
    }
    Ok(TwoQubitState::new(out)?)
}

/// Number of eigenvalues above `rel_tol` × the largest one.
pub fn numerical_rank(rho: &DMatrix<f64>, rel_tol: f64) -> usize {
    let ev = rho.clone().symmetric_eigenvalues();
    let max = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max <= 0.0 {
        return 0;
    }
    ev.iter().filter(|&&v| v > rel_tol * max).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    pub gamma: f64,
    pub n: usize,
    /// Ascending λ values where E₁ − E₀ = 0.
    pub crossings: Vec<f64>,
    pub count: usize,
}

/// Locates ground-state level crossings on λ ∈ (0, lambda_max], by default
/// up to 10 λ_f.
///
/// Crossings are between levels of opposite parity, so the signed difference
/// of the two sector ground energies is scanned on a 2·10⁻³ grid. Each sign
/// change is refined by bisection and kept if the gap there is below 10⁻⁶.
pub fn find_crossings(gamma: f64, n: usize, lambda_max: Option<f64>) -> Result<CrossingReport, FiniteError> {
    let lambda_f = factorization_field(gamma).map_err(|_| FiniteError::NoCrossingFound { gamma })?;
    let lambda_max = lambda_max.unwrap_or(CROSSING_RANGE_FACTOR * lambda_f);
    let spec_at = |lambda: f64| -> Result<ChainSpec, FiniteError> {
        let model = ModelPoint::ground(lambda, gamma).map_err(|e| FiniteError::EigensolverFailed(e.to_string()))?;
        ChainSpec::new(n, model)
    };
    let signed = |lambda: f64| -> Result<f64, FiniteError> {
        let (even, odd) = sector_ground_energies(&spec_at(lambda)?);
        Ok(even - odd)
    };

    let steps = (lambda_max / CROSSING_SCAN_STEP).ceil() as usize;
    let grid: Vec<f64> = (1..=steps).map(|i| i as f64 * CROSSING_SCAN_STEP).collect();
    let diffs: Vec<f64> = grid.iter().map(|&l| signed(l)).collect::<Result<_, _>>()?;

    let mut crossings = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (d0, d1) = (diffs[i], diffs[i + 1]);
        let exact_zero = d0 == 0.0;
        if !(exact_zero || d0.signum() != d1.signum()) {
            continue;
        }
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        let mut f_lo = d0;
        if !exact_zero {
            while hi - lo > CROSSING_TOL {
                let mid = 0.5 * (lo + hi);
                let f_mid = signed(mid)?;
                if f_mid == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if f_mid.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = f_mid;
                } else {
                    hi = mid;
                }
            }
        }
        let root = 0.5 * (lo + hi);
        let spec = spec_at(root)?;
        let levels = lowest_levels(&spec, 2);
        if levels[1] - levels[0] < CROSSING_GAP_TOL {
            crossings.push(root);
        }
    }
    crossings.dedup_by(|a, b| (*a - *b).abs() < 10.0 * CROSSING_TOL);
    if crossings.is_empty() {
        return Err(FiniteError::NoCrossingFound { gamma });
    }
    Ok(CrossingReport {
        gamma,
        n,
        count: crossings.len(),
        crossings,
    })
}
