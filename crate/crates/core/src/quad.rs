//! Adaptive 15-point Gauss–Kronrod quadrature on a finite interval.
//!
//! The integrator works on vector-valued integrands so that a family of
//! integrals sharing an expensive weight (all `G_k` of one model point, for
//! instance) is evaluated with a single set of function calls. Intervals are
//! bisected globally, worst error first, until the summed error estimate of
//! every component is below the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

// Kronrod abscissae on [-1, 1] (positive half, descending). Entries 1, 3, 5
// and 7 are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Target for the summed absolute error estimate of each component.
    pub abs_tol: f64,
    /// Maximum number of subintervals held at once.
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_intervals: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance {tol:e}: error estimate {error:e} after {intervals} intervals")]
    NotConverged {
        tol: f64,
        error: f64,
        intervals: usize,
    },
    #[error("invalid integration interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub intervals: usize,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    worst: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.worst.total_cmp(&other.worst) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.worst.total_cmp(&other.worst)
    }
}

/// Applies the 15-point Kronrod rule (with its embedded 7-point Gauss rule
/// for the error estimate) to every component on `[a, b]`.
fn gk15<F>(f: &F, dim: usize, a: f64, b: f64, buf: &mut [Vec<f64>; 15]) -> Result<Panel, QuadError>
where
    F: Fn(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    // buf[0] = center, buf[2j+1], buf[2j+2] = center ∓ half * XGK[j]
    f(center, &mut buf[0]);
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = buf.split_at_mut(2 * j + 2);
        f(center - dx, &mut lo[2 * j + 1]);
        f(center + dx, &mut hi[0]);
    }
    for (idx, v) in buf.iter().enumerate() {
        if v.iter().any(|x| !x.is_finite()) {
            let x = if idx == 0 {
                center
            } else {
                let j = (idx - 1) / 2;
                if idx % 2 == 1 {
                    center - half * XGK[j]
                } else {
                    center + half * XGK[j]
                }
            };
            return Err(QuadError::NonFinite { x });
        }
    }

    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    for c in 0..dim {
        let fc = buf[0][c];
        let mut kronrod = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut resabs = WGK[7] * fc.abs();
        for j in 0..7 {
            let f1 = buf[2 * j + 1][c];
            let f2 = buf[2 * j + 2][c];
            kronrod += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kronrod;
        let mut resasc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((buf[2 * j + 1][c] - mean).abs() + (buf[2 * j + 2][c] - mean).abs());
        }
        let result = kronrod * half;
        let resabs = resabs * half.abs();
        let resasc = resasc * half.abs();
        let mut err = ((kronrod - gauss) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        values[c] = result;
        errors[c] = err;
    }
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    Ok(Panel {
        a,
        b,
        values,
        errors,
        worst,
    })
}

/// Integrates a vector-valued function over `[a, b]`.
///
/// `breakpoints` inside `(a, b)` become initial panel boundaries; use them
/// for kinks or jumps of the integrand. `f(x, out)` writes `dim` values.
pub fn integrate_vec<F>(
    f: F,
    dim: usize,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, &mut [f64]),
{
    if !(a.is_finite() && b.is_finite()) || b <= a {
        return Err(QuadError::BadInterval { a, b });
    }
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut buf: [Vec<f64>; 15] = std::array::from_fn(|_| vec![0.0; dim]);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        heap.push(gk15(&f, dim, w[0], w[1], &mut buf)?);
        evaluations += 15;
    }

    let total_error = |heap: &BinaryHeap<Panel>| -> Vec<f64> {
        let mut tot = vec![0.0; dim];
        for p in heap.iter() {
            for (t, e) in tot.iter_mut().zip(&p.errors) {
                *t += e;
            }
        }
        tot
    };

    let mut err = total_error(&heap);
    loop {
        let worst_total = err.iter().cloned().fold(0.0, f64::max);
        if worst_total <= cfg.abs_tol {
            break;
        }
        if heap.len() >= cfg.max_intervals {
            return Err(QuadError::NotConverged {
                tol: cfg.abs_tol,
                error: worst_total,
                intervals: heap.len(),
            });
        }
        let panel = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (panel.a + panel.b);
        // Panel too narrow to split further in floating point.
        if mid <= panel.a || mid >= panel.b {
            return Err(QuadError::NotConverged {
                tol: cfg.abs_tol,
                error: worst_total,
                intervals: heap.len() + 1,
            });
        }
        let left = gk15(&f, dim, panel.a, mid, &mut buf)?;
        let right = gk15(&f, dim, mid, panel.b, &mut buf)?;
        evaluations += 30;
        for c in 0..dim {
            err[c] += left.errors[c] + right.errors[c] - panel.errors[c];
        }
        heap.push(left);
        heap.push(right);
        // Running sums drift; resynchronise now and then.
        if heap.len() % 64 == 0 {
            err = total_error(&heap);
        }
    }

    let mut values = vec![0.0; dim];
    for p in heap.iter() {
        for (v, x) in values.iter_mut().zip(&p.values) {
            *v += x;
        }
    }
    Ok(QuadResult {
        values,
        errors: total_error(&heap),
        intervals: heap.len(),
        evaluations,
    })
}

/// Scalar convenience wrapper around [`integrate_vec`]. Returns `(value, error)`.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], cfg: &QuadConfig) -> Result<(f64, f64), QuadError>
where
    F: Fn(f64) -> f64,
{
    let res = integrate_vec(|x, out: &mut [f64]| out[0] = f(x), 1, a, b, breakpoints, cfg)?;
    Ok((res.values[0], res.errors[0]))
}
