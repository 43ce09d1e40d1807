//! Schwarz integral formula on the upper half-plane and the capacity integral.
//!
//! A function `f` holomorphic in the half-plane, continuous up to the
//! boundary and vanishing at infinity is recovered from the imaginary part of
//! its boundary values:
//!
//! ```text
//! f(z) = (1/pi) * integral over R of Im f(xi) / (xi - z) d xi
//! ```
//!
//! For `f = phi - id` with `phi` a normalized slit map, `Im f` is supported on
//! the preimage segment of the hull and `(1/pi) * integral of Im f` equals the
//! half-plane capacity `-c1` of `phi`, which is `a` times its Loewner time span.
//!
//! Boundary data are samples, so both integrals are computed by product
//! integration of the piecewise-linear interpolant: each panel's integral
//! against `1/(xi - z)` is evaluated in closed form. The error estimate is the
//! Richardson difference against the rule on every other sample.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LoewnerError, Result};
use crate::exec::Execution;
use crate::halfplane::{FlowMap, Speed};

/// Samples of `Im f` on its support `[alpha, beta]`; zero is implied outside.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryImTrace {
    alpha: f64,
    beta: f64,
    xi: Vec<f64>,
    im_val: Vec<f64>,
}

/// A quadrature result with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
}

impl BoundaryImTrace {
    /// Builds a trace from `(xi, im_val)` samples sorted by `xi`. The support is
    /// the span of the samples.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        let (xi, im_val): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        let (alpha, beta) = match (xi.first(), xi.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(LoewnerError::EmptySupport { alpha: 0.0, beta: 0.0 }),
        };
        if !(beta > alpha) {
            return Err(LoewnerError::EmptySupport { alpha, beta });
        }
        if xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LoewnerError::InvalidArgument(
                "boundary samples must be strictly increasing in xi".into(),
            ));
        }
        if let Some(v) = im_val.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(LoewnerError::InvalidArgument(format!(
                "boundary imaginary parts must be finite and nonnegative, got {v}"
            )));
        }
        Ok(BoundaryImTrace {
            alpha,
            beta,
            xi,
            im_val,
        })
    }

    /// Samples `f` on `n + 1` Chebyshev-spaced points of `[alpha, beta]`,
    /// clustering samples near the endpoints where boundary values of slit
    /// maps have square-root behaviour.
    pub fn from_fn<F: Fn(f64) -> f64>(alpha: f64, beta: f64, n: usize, f: F) -> Result<Self> {
        if !(beta > alpha) {
            return Err(LoewnerError::EmptySupport { alpha, beta });
        }
        let n = n.max(2);
        let mid = 0.5 * (alpha + beta);
        let half = 0.5 * (beta - alpha);
        let samples = (0..=n)
            .map(|k| {
                let x = if k == 0 {
                    alpha
                } else if k == n {
                    beta
                } else {
                    mid - half * (PI * k as f64 / n as f64).cos()
                };
                (x, f(x).max(0.0))
            })
            .collect();
        Self::new(samples)
    }

    /// Boundary trace of `phi - id` for a flow map, sampled at `xi + 0i` on its
    /// support.
    pub fn from_flow(flow: &FlowMap, n: usize) -> Result<Self> {
        Self::from_flow_with(flow, n, Execution::default())
    }

    pub fn from_flow_with(flow: &FlowMap, n: usize, exec: Execution) -> Result<Self> {
        let (alpha, beta) = flow
            .support()
            .ok_or(LoewnerError::EmptySupport { alpha: 0.0, beta: 0.0 })?;
        let n = n.max(2);
        let mid = 0.5 * (alpha + beta);
        let half = 0.5 * (beta - alpha);
        let samples = exec.map_range(n + 1, |k| {
            let x = if k == 0 {
                alpha
            } else if k == n {
                beta
            } else {
                mid - half * (PI * k as f64 / n as f64).cos()
            };
            (x, flow.apply(Complex64::new(x, 0.0)).im.max(0.0))
        });
        Self::new(samples)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.alpha, self.beta)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xi.iter().copied().zip(self.im_val.iter().copied())
    }

    /// Pointwise sum of two traces on a common grid.
    pub fn superpose(&self, other: &BoundaryImTrace) -> Result<BoundaryImTrace> {
        if self.xi != other.xi {
            return Err(LoewnerError::InvalidArgument(
                "superposition needs identical sample grids".into(),
            ));
        }
        let samples = self
            .xi
            .iter()
            .zip(self.im_val.iter().zip(&other.im_val))
            .map(|(&x, (&a, &b))| (x, a + b))
            .collect();
        BoundaryImTrace::new(samples)
    }
}

/// Exact integral of the linear interpolant over one panel against
/// `1/(xi - z)`.
fn panel_cauchy(a: f64, b: f64, fa: f64, fb: f64, z: Complex64) -> Complex64 {
    let q = (fb - fa) / (b - a);
    let za = Complex64::new(a, 0.0) - z;
    let zb = Complex64::new(b, 0.0) - z;
    let log_ratio = (zb / za).ln();
    (za * (-q) + fa) * log_ratio + q * (b - a)
}

fn cauchy_sum(xi: &[f64], im: &[f64], stride: usize, z: Complex64) -> Complex64 {
    let idx: Vec<usize> = (0..xi.len()).step_by(stride).chain(
        // always close the grid at the last sample
        std::iter::once(xi.len() - 1).filter(|&l| l % stride != 0),
    )
    .collect();
    idx.windows(2)
        .map(|w| panel_cauchy(xi[w[0]], xi[w[1]], im[w[0]], im[w[1]], z))
        .sum()
}

fn trapezoid_sum(xi: &[f64], im: &[f64], stride: usize) -> f64 {
    let idx: Vec<usize> = (0..xi.len())
        .step_by(stride)
        .chain(std::iter::once(xi.len() - 1).filter(|&l| l % stride != 0))
        .collect();
    idx.windows(2)
        .map(|w| 0.5 * (im[w[0]] + im[w[1]]) * (xi[w[1]] - xi[w[0]]))
        .sum()
}

/// Evaluates `(1/pi) * integral of im_val(xi) / (xi - z)` at an interior point.
pub fn schwarz_reconstruct(trace: &BoundaryImTrace, z: Complex64) -> Result<Quadrature<Complex64>> {
    if !(z.im > 0.0) {
        return Err(LoewnerError::InvalidArgument(format!(
            "schwarz_reconstruct needs an interior point, got {z}"
        )));
    }
    let fine = cauchy_sum(&trace.xi, &trace.im_val, 1, z) / PI;
    let coarse = cauchy_sum(&trace.xi, &trace.im_val, 2, z) / PI;
    Ok(Quadrature {
        value: fine,
        error: (fine - coarse).norm() / 3.0,
    })
}

/// `(1/pi) * integral of im_val`: the half-plane capacity `-c1` of the map
/// that produced the trace. Under speed 1 this is its Loewner time span.
pub fn capacity_from_boundary(trace: &BoundaryImTrace) -> Result<Quadrature<f64>> {
    let fine = trapezoid_sum(&trace.xi, &trace.im_val, 1) / PI;
    let coarse = trapezoid_sum(&trace.xi, &trace.im_val, 2) / PI;
    Ok(Quadrature {
        value: fine,
        error: (fine - coarse).abs() / 3.0,
    })
}

/// Loewner time span `t - s` of the map behind the trace under `speed`.
pub fn time_span_from_boundary(trace: &BoundaryImTrace, speed: Speed) -> Result<Quadrature<f64>> {
    let q = capacity_from_boundary(trace)?;
    let a = speed.factor();
    Ok(Quadrature {
        value: q.value / a,
        error: q.error / a,
    })
}
