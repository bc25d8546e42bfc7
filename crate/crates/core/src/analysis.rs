//! Sweeps over the coupling, derivative peaks, the thermal critical-point
//! scaling fit and finite-vs-infinite fidelities.

use rayon::prelude::*;
use thiserror::Error;

use crate::finite::{self, ChainSpec, FiniteError};
use crate::measures::{self, MeasureError, Side};
use crate::state::{pauli_x, TwoQubitState};
use crate::thermo::{self, GTable, ModelPoint, ThermoError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error("grid too coarse: need at least 3 points, got {0}")]
    GridTooCoarse(usize),
    #[error("grid is not strictly ascending with a uniform step")]
    NonUniformGrid,
    #[error("series length mismatch: {0} grid points vs {1} values")]
    LengthMismatch(usize, usize),
    #[error("derivative peak sits on the grid boundary at λ = {lambda}")]
    PeakAtBoundary { lambda: f64, upper: bool },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("separation r = {r} is not in 1..={max}")]
    BadSeparation { r: usize, max: usize },
    #[error("failed at λ={lambda}, γ={gamma}, T={temperature}, r={r}: {message}")]
    AtPoint {
        lambda: f64,
        gamma: f64,
        temperature: f64,
        r: usize,
        message: String,
    },
}

/// Figure of merit evaluated on a two-spin state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Discord,
    EntanglementOfFormation,
    Concurrence,
    MutualInformation,
    ClassicalCorrelation,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::Discord => "discord",
            Measure::EntanglementOfFormation => "eof",
            Measure::Concurrence => "concurrence",
            Measure::MutualInformation => "mutual_information",
            Measure::ClassicalCorrelation => "classical_correlation",
        }
    }

    pub fn evaluate(&self, state: &TwoQubitState) -> Result<f64, MeasureError> {
        match self {
            Measure::Discord => Ok(measures::discord(state, Side::B)?.discord),
            Measure::EntanglementOfFormation => measures::entanglement_of_formation(state),
            Measure::Concurrence => measures::concurrence(state),
            Measure::MutualInformation => measures::mutual_information(state),
            Measure::ClassicalCorrelation => Ok(measures::discord(state, Side::B)?.classical),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepMeta {
    pub gamma: f64,
    pub temperature: f64,
    pub r: usize,
    pub measure: String,
}

/// A measure sampled on a uniform, strictly ascending λ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSeries {
    grid: Vec<f64>,
    values: Vec<f64>,
    pub meta: SweepMeta,
}

fn uniform_step(grid: &[f64]) -> Result<f64, AnalysisError> {
    if grid.len() < 2 {
        return Err(AnalysisError::GridTooCoarse(grid.len()));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) {
        return Err(AnalysisError::NonUniformGrid);
    }
    let uniform = grid
        .windows(2)
        .all(|w| w[1] > w[0] && ((w[1] - w[0]) - h).abs() <= 1e-6 * h);
    if uniform {
        Ok(h)
    } else {
        Err(AnalysisError::NonUniformGrid)
    }
}

impl SweepSeries {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, meta: SweepMeta) -> Result<Self, AnalysisError> {
        if grid.len() != values.len() {
            return Err(AnalysisError::LengthMismatch(grid.len(), values.len()));
        }
        if grid.len() >= 2 {
            uniform_step(&grid)?;
        }
        Ok(Self { grid, values, meta })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn step(&self) -> Result<f64, AnalysisError> {
        uniform_step(&self.grid)
    }
}

/// `lo, lo + step, …` up to and including `hi` (within half a step).
pub fn lambda_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || hi < lo {
        return Vec::new();
    }
    let count = ((hi - lo) / step + 0.5).floor() as usize;
    (0..=count).map(|i| lo + i as f64 * step).collect()
}

/// Evaluates `measure` on the infinite-chain states ρ_{0r} for each λ and
/// each r. Returns one series per r, in the order of `rs`.
pub fn thermo_sweep(
    measure: Measure,
    gamma: f64,
    temperature: f64,
    rs: &[usize],
    lambdas: &[f64],
) -> Result<Vec<SweepSeries>, AnalysisError> {
    let r_max = rs.iter().copied().max().unwrap_or(0);
    if r_max == 0 || rs.contains(&0) {
        return Err(AnalysisError::BadSeparation { r: 0, max: usize::MAX });
    }
    let rows: Vec<Vec<f64>> = lambdas
        .par_iter()
        .map(|&lambda| -> Result<Vec<f64>, AnalysisError> {
            let point = |r: usize, e: &dyn std::fmt::Display| AnalysisError::AtPoint {
                lambda,
                gamma,
                temperature,
                r,
                message: e.to_string(),
            };
            let model = ModelPoint::new(lambda, gamma, temperature).map_err(|e| point(rs[0], &e))?;
            let table = GTable::build(&model, r_max).map_err(|e| point(r_max, &e))?;
            rs.iter()
                .map(|&r| {
                    let state = thermo::reduced_state_from(&table, r).map_err(|e| point(r, &e))?;
                    measure.evaluate(&state).map_err(|e| point(r, &e))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    rs.iter()
        .enumerate()
        .map(|(k, &r)| {
            SweepSeries::new(
                lambdas.to_vec(),
                rows.iter().map(|row| row[k]).collect(),
                SweepMeta {
                    gamma,
                    temperature,
                    r,
                    measure: measure.name().to_string(),
                },
            )
        })
        .collect()
}

/// Evaluates `measure` on the pair (0, r) of an n-spin ring in its thermal
/// state at ring temperature `temperature`. One series per r.
pub fn finite_sweep(
    measure: Measure,
    n: usize,
    gamma: f64,
    temperature: f64,
    rs: &[usize],
    lambdas: &[f64],
) -> Result<Vec<SweepSeries>, AnalysisError> {
    let max = n / 2;
    if let Some(&r) = rs.iter().find(|&&r| r == 0 || r > max) {
        return Err(AnalysisError::BadSeparation { r, max });
    }
    let rows: Vec<Vec<f64>> = lambdas
        .par_iter()
        .map(|&lambda| -> Result<Vec<f64>, AnalysisError> {
            let point = |r: usize, e: &dyn std::fmt::Display| AnalysisError::AtPoint {
                lambda,
                gamma,
                temperature,
                r,
                message: e.to_string(),
            };
            let model = ModelPoint::new(lambda, gamma, temperature).map_err(|e| point(rs[0], &e))?;
            let spec = ChainSpec::new(n, model).map_err(|e| point(rs[0], &e))?;
            let spectrum = finite::diagonalize(&spec).map_err(|e| point(rs[0], &e))?;
            let rho = finite::thermal_state(&spectrum, temperature);
            rs.iter()
                .map(|&r| {
                    let pair = finite::reduce_to_pair(&rho, 0, r).map_err(|e| point(r, &e))?;
                    measure.evaluate(&pair).map_err(|e| point(r, &e))
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    rs.iter()
        .enumerate()
        .map(|(k, &r)| {
            SweepSeries::new(
                lambdas.to_vec(),
                rows.iter().map(|row| row[k]).collect(),
                SweepMeta {
                    gamma,
                    temperature,
                    r,
                    measure: measure.name().to_string(),
                },
            )
        })
        .collect()
}

/// ∂/∂λ by central differences (one-sided at the ends).
pub fn derivative_lambda(series: &SweepSeries) -> Result<SweepSeries, AnalysisError> {
    let n = series.len();
    if n < 3 {
        return Err(AnalysisError::GridTooCoarse(n));
    }
    let h = series.step()?;
    let v = series.values();
    let mut d = Vec::with_capacity(n);
    d.push((v[1] - v[0]) / h);
    for i in 1..n - 1 {
        d.push((v[i + 1] - v[i - 1]) / (2.0 * h));
    }
    d.push((v[n - 1] - v[n - 2]) / h);
    let mut meta = series.meta.clone();
    meta.measure = format!("d_{}_d_lambda", series.meta.measure);
    SweepSeries::new(series.grid.clone(), d, meta)
}

/// λ of the maximum of ∂(series)/∂λ, refined by a parabola through the
/// three samples around the discrete maximum.
pub fn locate_etcp(series: &SweepSeries) -> Result<f64, AnalysisError> {
    let deriv = derivative_lambda(series)?;
    peak_of(&deriv)
}

/// Parabolic-refined argmax of a sampled series.
pub fn peak_of(series: &SweepSeries) -> Result<f64, AnalysisError> {
    let v = series.values();
    let g = series.grid();
    let n = v.len();
    let mut best = 0;
    for i in 1..n {
        if v[i] > v[best] {
            best = i;
        }
    }
    if best == 0 || best == n - 1 {
        return Err(AnalysisError::PeakAtBoundary {
            lambda: g[best],
            upper: best == n - 1,
        });
    }
    let h = series.step()?;
    let (a, b, c) = (v[best - 1], v[best], v[best + 1]);
    let curvature = a - 2.0 * b + c;
    let offset = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
    Ok(g[best] + offset * h)
}

/// Grid used to locate the estimated thermal critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtcpGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    /// Amount by which the range grows when the peak touches its edge.
    pub widen_by: f64,
    /// Hard ceiling on the upper end.
    pub hi_limit: f64,
}

impl Default for EtcpGrid {
    fn default() -> Self {
        Self {
            lo: 0.8,
            hi: 2.5,
            step: 1e-3,
            widen_by: 0.5,
            hi_limit: 12.0,
        }
    }
}

/// Discord sweep at (γ, T, r) and its derivative peak, widening the λ range
/// until the peak is interior.
pub fn estimate_etcp(gamma: f64, temperature: f64, r: usize, grid: &EtcpGrid) -> Result<f64, AnalysisError> {
    let (mut lo, mut hi) = (grid.lo, grid.hi);
    let mut lambdas = lambda_grid(lo, hi, grid.step);
    let mut values = thermo_sweep(Measure::Discord, gamma, temperature, &[r], &lambdas)?
        .remove(0)
        .values()
        .to_vec();
    loop {
        let series = SweepSeries::new(
            lambdas.clone(),
            values.clone(),
            SweepMeta {
                gamma,
                temperature,
                r,
                measure: Measure::Discord.name().into(),
            },
        )?;
        match locate_etcp(&series) {
            Err(AnalysisError::PeakAtBoundary { upper, lambda }) => {
                let count = (grid.widen_by / grid.step).round() as usize;
                if upper {
                    if hi + grid.widen_by > grid.hi_limit {
                        return Err(AnalysisError::PeakAtBoundary { lambda, upper });
                    }
                    let extra: Vec<f64> = (1..=count).map(|i| hi + i as f64 * grid.step).collect();
                    let more = thermo_sweep(Measure::Discord, gamma, temperature, &[r], &extra)?.remove(0);
                    hi = *extra.last().expect("non-empty extension");
                    lambdas.extend(extra);
                    values.extend_from_slice(more.values());
                } else {
                    let count = count.min(((lo - grid.step) / grid.step).floor().max(0.0) as usize);
                    if count == 0 {
                        return Err(AnalysisError::PeakAtBoundary { lambda, upper });
                    }
                    let mut extra: Vec<f64> = (1..=count).rev().map(|i| lo - i as f64 * grid.step).collect();
                    let more = thermo_sweep(Measure::Discord, gamma, temperature, &[r], &extra)?.remove(0);
                    lo = extra[0];
                    let mut v = more.values().to_vec();
                    extra.extend_from_slice(&lambdas);
                    v.extend_from_slice(&values);
                    lambdas = extra;
                    values = v;
                }
            }
            other => return other,
        }
    }
}

/// ETCP samples (T, λ_Tc) at fixed (γ, r).
#[derive(Debug, Clone, PartialEq)]
pub struct EtcpSeries {
    samples: Vec<(f64, f64)>,
    pub gamma: f64,
    pub r: usize,
}

impl EtcpSeries {
    pub fn new(samples: Vec<(f64, f64)>, gamma: f64, r: usize) -> Result<Self, AnalysisError> {
        if !samples.windows(2).all(|w| w[1].0 > w[0].0) {
            return Err(AnalysisError::DegenerateFit("temperatures must be strictly ascending".into()));
        }
        Ok(Self { samples, gamma, r })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }
}

/// T = 0.05, 0.10, …, 0.50.
pub fn default_fit_temperatures() -> Vec<f64> {
    (1..=10).map(|i| 0.05 * i as f64).collect()
}

pub fn etcp_series(gamma: f64, r: usize, temperatures: &[f64], grid: &EtcpGrid) -> Result<EtcpSeries, AnalysisError> {
    let samples = temperatures
        .iter()
        .map(|&t| estimate_etcp(gamma, t, r, grid).map(|l| (t, l)))
        .collect::<Result<Vec<_>, _>>()?;
    EtcpSeries::new(samples, gamma, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub alpha: f64,
    pub nu: f64,
    /// Root-mean-square residual in λ units.
    pub residual: f64,
}

/// Least-squares fit of λ_Tc = α Tᵛ + 1: log-linear regression for the
/// starting point, then Gauss–Newton on the untransformed residuals.
pub fn fit_ansatz(series: &EtcpSeries) -> Result<FitResult, AnalysisError> {
    let s = series.samples();
    if s.len() < 4 {
        return Err(AnalysisError::DegenerateFit(format!("need ≥ 4 samples, got {}", s.len())));
    }
    if let Some(&(t, l)) = s.iter().find(|&&(t, l)| !(t > 0.0) || !(l > 1.0)) {
        return Err(AnalysisError::DegenerateFit(format!(
            "sample (T={t}, λ={l}) needs T > 0 and λ > 1"
        )));
    }

    let xs: Vec<f64> = s.iter().map(|&(t, _)| t.ln()).collect();
    let ys: Vec<f64> = s.iter().map(|&(_, l)| (l - 1.0).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(AnalysisError::DegenerateFit("all temperatures equal".into()));
    }
    let mut nu = sxy / sxx;
    let mut alpha = (my - nu * mx).exp();

    let ssr = |alpha: f64, nu: f64| -> f64 {
        s.iter()
            .map(|&(t, l)| (alpha * t.powf(nu) + 1.0 - l).powi(2))
            .sum()
    };
    let mut current = ssr(alpha, nu);
    for _ in 0..100 {
        // Normal equations of the 2-parameter linearisation.
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(t, l) in s {
            let tn = t.powf(nu);
            let res = alpha * tn + 1.0 - l;
            let j1 = tn;
            let j2 = alpha * tn * t.ln();
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            b1 += j1 * res;
            b2 += j2 * res;
        }
        let det = a11 * a22 - a12 * a12;
        if det.abs() < f64::MIN_POSITIVE {
            break;
        }
        let da = -(a22 * b1 - a12 * b2) / det;
        let dn = -(a11 * b2 - a12 * b1) / det;
        let mut step = 1.0;
        let mut improved = false;
        while step > 1e-6 {
            let (na, nn) = (alpha + step * da, nu + step * dn);
            let trial = ssr(na, nn);
            if na > 0.0 && trial <= current {
                alpha = na;
                nu = nn;
                current = trial;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        let small = (step * da).abs() <= 1e-15 * alpha.abs() && (step * dn).abs() <= 1e-15 * nu.abs().max(1.0);
        if !improved || small {
            break;
        }
    }
    if !(alpha.is_finite() && nu.is_finite()) {
        return Err(AnalysisError::DegenerateFit("non-finite parameters".into()));
    }
    Ok(FitResult {
        alpha,
        nu,
        residual: (current / n).sqrt(),
    })
}

/// Maps a finite-ring pair state onto the sign convention of the
/// infinite-chain formulas, where the field aligns spins along −z.
/// Conjugation by σx⊗σx flips ⟨σz⟩ and leaves every two-point function
/// unchanged.
pub fn flip_to_thermo_convention(state: &TwoQubitState) -> TwoQubitState {
    let x = pauli_x();
    state.conjugated(&x, &x)
}

/// Temperature of the finite ring that matches a thermodynamic-limit
/// temperature. The infinite-chain weight tanh(βω) with ω = ε/4 (ε the
/// quasi-particle energy of the ring Hamiltonian) corresponds to a ring
/// temperature twice as large.
pub fn finite_temperature_for(thermo_temperature: f64) -> f64 {
    2.0 * thermo_temperature
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityPoint {
    pub lambda: f64,
    pub r: usize,
    pub fidelity: f64,
}

/// Fidelity between the infinite-chain ρ_{0r} and the pair (0, r) of an
/// n-spin ring, for every λ and every r. One diagonalisation per λ.
pub fn fidelity_scan(
    n: usize,
    gamma: f64,
    temperature: f64,
    rs: &[usize],
    lambdas: &[f64],
) -> Result<Vec<FidelityPoint>, AnalysisError> {
    let max = n / 2;
    if let Some(&r) = rs.iter().find(|&&r| r == 0 || r > max) {
        return Err(AnalysisError::BadSeparation { r, max });
    }
    let r_max = rs.iter().copied().max().unwrap_or(1);
    let rows: Vec<Vec<FidelityPoint>> = lambdas
        .par_iter()
        .map(|&lambda| -> Result<Vec<FidelityPoint>, AnalysisError> {
            let point = |r: usize, e: &dyn std::fmt::Display| AnalysisError::AtPoint {
                lambda,
                gamma,
                temperature,
                r,
                message: e.to_string(),
            };
            let model = ModelPoint::new(lambda, gamma, temperature).map_err(|e| point(r_max, &e))?;
            let table = GTable::build(&model, r_max).map_err(|e| point(r_max, &e))?;
            let spec = ChainSpec::new(n, model).map_err(|e| point(r_max, &e))?;
            let spectrum = finite::diagonalize(&spec).map_err(|e| point(r_max, &e))?;
            let rho = finite::thermal_state(&spectrum, finite_temperature_for(temperature));
            rs.iter()
                .map(|&r| {
                    let inf = thermo::reduced_state_from(&table, r).map_err(|e| point(r, &e))?;
                    let fin = finite::reduce_to_pair(&rho, 0, r).map_err(|e| point(r, &e))?;
                    let fin = flip_to_thermo_convention(&fin);
                    let f = measures::state_fidelity(&inf, &fin).map_err(|e| point(r, &e))?;
                    Ok(FidelityPoint { lambda, r, fidelity: f })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Per-λ fidelity series for a single separation.
pub fn compare_finite_infinite(
    n: usize,
    gamma: f64,
    temperature: f64,
    r: usize,
    lambdas: &[f64],
) -> Result<Vec<f64>, AnalysisError> {
    Ok(fidelity_scan(n, gamma, temperature, &[r], lambdas)?
        .into_iter()
        .map(|p| p.fidelity)
        .collect())
}
