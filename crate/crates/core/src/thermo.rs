//! Two-spin reduced density matrix of the infinite XY chain.
//!
//! Correlations follow from the single-particle dispersion
//! ω(φ) = ½·√((λγ sin φ)² + (1 + λ cos φ)²) through the functions
//!
//! ```text
//! G_k = ∫₀^π dφ  tanh(βω)/(2πω) · [cos(kφ)(1 + λ cos φ) − λγ sin(kφ) sin φ]
//! ⟨σz⟩ = −∫₀^π dφ (1 + λ cos φ) tanh(βω)/(2πω)
//! ```
//!
//! ⟨σxσx⟩ and ⟨σyσy⟩ at separation r are r×r Toeplitz determinants of the
//! G's, and ⟨σzσz⟩ = ⟨σz⟩² − G_r G_{−r}. At zero temperature the factor
//! tanh(βω) is replaced by 1 exactly.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::quad::{integrate, integrate_vec, QuadConfig, QuadError};
use crate::state::{StateError, TwoQubitState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("invalid model point: {0}")]
    InvalidModel(String),
    #[error("quadrature not converged at λ={lambda}, γ={gamma}, T={temperature}: {source}")]
    QuadratureNotConverged {
        lambda: f64,
        gamma: f64,
        temperature: f64,
        source: QuadError,
    },
    #[error("G table covers |k| ≤ {have}, but index {needed} is required")]
    InsufficientGTable { needed: i64, have: usize },
    #[error("separation must be at least 1")]
    BadSeparation,
    #[error("reduced state is not positive: {0}")]
    NotPositive(#[from] StateError),
    #[error("no factorization field on the Ising line (γ = {gamma})")]
    NoFactorization { gamma: f64 },
}

/// One point (λ, γ, T) of the model. `T == 0` selects the exact ground-state limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    lambda: f64,
    gamma: f64,
    temperature: f64,
}

impl ModelPoint {
    pub fn new(lambda: f64, gamma: f64, temperature: f64) -> Result<Self, ThermoError> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(ThermoError::InvalidModel(format!("lambda must be ≥ 0, got {lambda}")));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(ThermoError::InvalidModel(format!("gamma must lie in [0, 1], got {gamma}")));
        }
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(ThermoError::InvalidModel(format!(
                "temperature must be ≥ 0, got {temperature}"
            )));
        }
        Ok(Self {
            lambda,
            gamma,
            temperature,
        })
    }

    pub fn ground(lambda: f64, gamma: f64) -> Result<Self, ThermoError> {
        Self::new(lambda, gamma, 0.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn is_ground(&self) -> bool {
        self.temperature == 0.0
    }

    /// Inverse temperature, `None` in the zero-temperature limit.
    pub fn beta(&self) -> Option<f64> {
        if self.is_ground() {
            None
        } else {
            Some(1.0 / self.temperature)
        }
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self, ThermoError> {
        Self::new(lambda, self.gamma, self.temperature)
    }

    /// tanh(βω)/(2πω), the common weight of all quadratures.
    fn weight(&self, phi: f64) -> f64 {
        let w = dispersion(self, phi);
        if w == 0.0 {
            // Only reachable exactly at a gap-closing node; measure zero.
            return 0.0;
        }
        let th = match self.beta() {
            None => 1.0,
            Some(beta) => (beta * w).tanh(),
        };
        th / (2.0 * PI * w)
    }

    /// Angle in (0, π] where 1 + λ cos φ vanishes, if any. The integrands
    /// have a kink (γ > 0) or jump (γ = 0) there.
    fn gap_angle(&self) -> Option<f64> {
        if self.lambda >= 1.0 {
            Some((-1.0 / self.lambda).acos())
        } else {
            None
        }
    }

    fn quad_error(&self, source: QuadError) -> ThermoError {
        ThermoError::QuadratureNotConverged {
            lambda: self.lambda,
            gamma: self.gamma,
            temperature: self.temperature,
            source,
        }
    }
}

/// ω(φ) = ½·√((λγ sin φ)² + (1 + λ cos φ)²).
pub fn dispersion(model: &ModelPoint, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let a = model.lambda * model.gamma * s;
    let b = 1.0 + model.lambda * c;
    0.5 * a.hypot(b)
}

fn breakpoints(model: &ModelPoint) -> Vec<f64> {
    model.gap_angle().into_iter().collect()
}

/// G_k by adaptive quadrature.
pub fn g_function(model: &ModelPoint, k: i64) -> Result<f64, ThermoError> {
    g_function_with(model, k, &QuadConfig::default())
}

pub fn g_function_with(model: &ModelPoint, k: i64, cfg: &QuadConfig) -> Result<f64, ThermoError> {
    let (lambda, gamma) = (model.lambda, model.gamma);
    let kf = k as f64;
    let f = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let (sk, ck) = (kf * phi).sin_cos();
        model.weight(phi) * (ck * (1.0 + lambda * c) - lambda * gamma * sk * s)
    };
    integrate(f, 0.0, PI, &breakpoints(model), cfg)
        .map(|(v, _)| v)
        .map_err(|e| model.quad_error(e))
}

/// ⟨σz⟩ by adaptive quadrature; lies in [−1, 0].
pub fn magnetization(model: &ModelPoint) -> Result<f64, ThermoError> {
    let lambda = model.lambda;
    let f = |phi: f64| -(1.0 + lambda * phi.cos()) * model.weight(phi);
    integrate(f, 0.0, PI, &breakpoints(model), &QuadConfig::default())
        .map(|(v, _)| v)
        .map_err(|e| model.quad_error(e))
}

/// All G_k with |k| ≤ r_max, plus ⟨σz⟩, from one vector-valued quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct GTable {
    model: ModelPoint,
    r_max: usize,
    values: Vec<f64>,
    magnetization: f64,
}

impl GTable {
    pub fn build(model: &ModelPoint, r_max: usize) -> Result<Self, ThermoError> {
        Self::build_with(model, r_max, &QuadConfig::default())
    }

    pub fn build_with(model: &ModelPoint, r_max: usize, cfg: &QuadConfig) -> Result<Self, ThermoError> {
        if r_max == 0 {
            return Err(ThermoError::BadSeparation);
        }
        let (lambda, gamma) = (model.lambda, model.gamma);
        let len = 2 * r_max + 1;
        // out[0] = ⟨σz⟩ integrand, out[1 + (k + r_max)] = G_k integrand
        let f = |phi: f64, out: &mut [f64]| {
            let (s, c) = phi.sin_cos();
            let w = model.weight(phi);
            let even = w * (1.0 + lambda * c);
            let odd = w * lambda * gamma * s;
            out[0] = -even;
            out[1 + r_max] = even;
            for k in 1..=r_max {
                let (sk, ck) = (k as f64 * phi).sin_cos();
                out[1 + r_max + k] = ck * even - sk * odd;
                out[1 + r_max - k] = ck * even + sk * odd;
            }
        };
        let res = integrate_vec(f, len + 1, 0.0, PI, &breakpoints(model), cfg)
            .map_err(|e| model.quad_error(e))?;
        Ok(Self {
            model: *model,
            r_max,
            magnetization: res.values[0],
            values: res.values[1..].to_vec(),
        })
    }

    /// Builds a table from explicit values `G_{-r_max}, …, G_{r_max}`.
    pub fn from_values(model: ModelPoint, values: Vec<f64>, magnetization: f64) -> Result<Self, ThermoError> {
        if values.len() % 2 == 0 || values.len() < 3 {
            return Err(ThermoError::InvalidModel(format!(
                "G table needs an odd length ≥ 3, got {}",
                values.len()
            )));
        }
        Ok(Self {
            model,
            r_max: values.len() / 2,
            values,
            magnetization,
        })
    }

    pub fn model(&self) -> &ModelPoint {
        &self.model
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn magnetization(&self) -> f64 {
        self.magnetization
    }

    pub fn get(&self, k: i64) -> Result<f64, ThermoError> {
        if k.unsigned_abs() as usize > self.r_max {
            return Err(ThermoError::InsufficientGTable {
                needed: k,
                have: self.r_max,
            });
        }
        Ok(self.values[(k + self.r_max as i64) as usize])
    }
}

/// ⟨σz⟩, ⟨σxσx⟩, ⟨σyσy⟩ and ⟨σzσz⟩ at separation `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    pub r: usize,
    pub sigma_z_mean: f64,
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
}

fn toeplitz_det(gtable: &GTable, r: usize, offset: i64) -> Result<f64, ThermoError> {
    if r == 0 {
        return Err(ThermoError::BadSeparation);
    }
    let mut m = DMatrix::<f64>::zeros(r, r);
    for i in 0..r {
        for j in 0..r {
            m[(i, j)] = gtable.get(i as i64 - j as i64 + offset)?;
        }
    }
    Ok(m.lu().determinant())
}

/// det[G_{i−j−1}]_{i,j=1..r}.
pub fn xx_correlator(gtable: &GTable, r: usize) -> Result<f64, ThermoError> {
    toeplitz_det(gtable, r, -1)
}

/// det[G_{i−j+1}]_{i,j=1..r}.
pub fn yy_correlator(gtable: &GTable, r: usize) -> Result<f64, ThermoError> {
    toeplitz_det(gtable, r, 1)
}

/// ⟨σz⟩² − G_r G_{−r}.
pub fn zz_correlator(gtable: &GTable, sigma_z_mean: f64, r: usize) -> Result<f64, ThermoError> {
    if r == 0 {
        return Err(ThermoError::BadSeparation);
    }
    let r = r as i64;
    Ok(sigma_z_mean * sigma_z_mean - gtable.get(r)? * gtable.get(-r)?)
}

pub fn correlators(gtable: &GTable, r: usize) -> Result<CorrelatorSet, ThermoError> {
    let m = gtable.magnetization();
    Ok(CorrelatorSet {
        r,
        sigma_z_mean: m,
        xx: xx_correlator(gtable, r)?,
        yy: yy_correlator(gtable, r)?,
        zz: zz_correlator(gtable, m, r)?,
    })
}

/// Reduced state of spins 0 and r from a prebuilt table.
pub fn reduced_state_from(gtable: &GTable, r: usize) -> Result<TwoQubitState, ThermoError> {
    let cs = correlators(gtable, r)?;
    Ok(TwoQubitState::from_correlators(cs.sigma_z_mean, cs.xx, cs.yy, cs.zz)?)
}

pub fn reduced_state(model: &ModelPoint, r: usize) -> Result<TwoQubitState, ThermoError> {
    if r == 0 {
        return Err(ThermoError::BadSeparation);
    }
    let table = GTable::build(model, r)?;
    reduced_state_from(&table, r)
}

/// λ_f = 1/√(1−γ²), where the ground state is fully factorised.
pub fn factorization_field(gamma: f64) -> Result<f64, ThermoError> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(ThermoError::NoFactorization { gamma });
    }
    Ok(1.0 / (1.0 - gamma * gamma).sqrt())
}
