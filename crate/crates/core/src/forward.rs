//! Forward Loewner evolution: driving function to flow maps and slit trace.
//!
//! Two independent routes compute the transition map `phi_{s,t}`:
//! [`flow_ode`] integrates `dw/dt = a / (lambda(t) - w)` with adaptive RK4,
//! while [`flow_composed`] chains exact vertical-slit maps with the driving
//! value frozen at each subinterval midpoint.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};
use crate::exec::Execution;
use crate::halfplane::{FlowMap, HalfPlanePoint, SlitStep, Speed};

/// How a sampled driving function is evaluated between knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpolation {
    /// Value of the left knot on `[t_k, t_{k+1})`.
    PiecewiseConstant,
    PiecewiseLinear,
}

/// A sampled real driving function `lambda` on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrivingFunction {
    times: Vec<f64>,
    values: Vec<f64>,
    interp: Interpolation,
    speed: Speed,
}

impl DrivingFunction {
    pub fn new(
        samples: Vec<(f64, f64)>,
        interp: Interpolation,
        speed: Speed,
    ) -> Result<Self> {
        if samples.len() < 2 {
            return Err(LoewnerError::InvalidDrive(
                "need at least two samples spanning [0, T] with T > 0".into(),
            ));
        }
        if samples[0].0 != 0.0 {
            return Err(LoewnerError::InvalidDrive(format!(
                "first sample must be at t = 0, got {}",
                samples[0].0
            )));
        }
        if let Some((t, l)) = samples
            .iter()
            .find(|(t, l)| !t.is_finite() || !l.is_finite())
        {
            return Err(LoewnerError::InvalidDrive(format!(
                "non-finite sample ({t}, {l})"
            )));
        }
        if let Some(k) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(LoewnerError::InvalidDrive(format!(
                "times not strictly increasing at sample {}",
                k + 1
            )));
        }
        let (times, values) = samples.into_iter().unzip();
        Ok(DrivingFunction {
            times,
            values,
            interp,
            speed,
        })
    }

    pub fn constant(value: f64, total: f64, speed: Speed) -> Result<Self> {
        Self::new(
            vec![(0.0, value), (total, value)],
            Interpolation::PiecewiseLinear,
            speed,
        )
    }

    /// Samples `f` on `n + 1` equispaced knots of `[0, total]`.
    pub fn from_fn<F: Fn(f64) -> f64>(
        f: F,
        total: f64,
        n: usize,
        interp: Interpolation,
        speed: Speed,
    ) -> Result<Self> {
        let n = n.max(1);
        let samples = (0..=n)
            .map(|k| {
                let t = if k == n { total } else { total * k as f64 / n as f64 };
                (t, f(t))
            })
            .collect();
        Self::new(samples, interp, speed)
    }

    pub fn total_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn speed(&self) -> Speed {
        self.speed
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interp
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    /// Same samples under a different speed constant.
    pub fn with_speed(mut self, speed: Speed) -> Self {
        self.speed = speed;
        self
    }

    /// Evaluates `lambda(t)`, clamping `t` to `[0, T]`.
    pub fn value(&self, t: f64) -> f64 {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= self.times[n - 1] {
            return self.values[n - 1];
        }
        // index of the last knot <= t
        let k = self.times.partition_point(|&tk| tk <= t) - 1;
        match self.interp {
            Interpolation::PiecewiseConstant => self.values[k],
            Interpolation::PiecewiseLinear => {
                let (t0, t1) = (self.times[k], self.times[k + 1]);
                let (v0, v1) = (self.values[k], self.values[k + 1]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Knots strictly inside `(s, t)`.
    fn knots_between(&self, s: f64, t: f64) -> impl Iterator<Item = f64> + '_ {
        self.times.iter().copied().filter(move |&k| k > s && k < t)
    }

    fn check_interval(&self, s: f64, t: f64) -> Result<()> {
        let total = self.total_time();
        if !(0.0 <= s && s <= t && t <= total) {
            return Err(LoewnerError::InvalidArgument(format!(
                "need 0 <= s <= t <= T = {total}, got s = {s}, t = {t}"
            )));
        }
        Ok(())
    }
}

/// Time-stamped slit points `Gamma(t)` from tip (`t = 0`) to root (`t = T`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub samples: Vec<(f64, HalfPlanePoint)>,
    pub speed: Speed,
}

impl Trace {
    pub fn total_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0)
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|(_, p)| p.to_complex())
    }

    /// Largest distance between consecutive trace points.
    pub fn max_gap(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].1.to_complex() - w[0].1.to_complex()).norm())
            .fold(0.0, f64::max)
    }
}

const SAFETY: f64 = 0.9;
const MIN_STEP_FRACTION: f64 = 1e-14;

fn rhs(drive: &DrivingFunction, a: f64, t: f64, w: Complex64) -> Complex64 {
    a / (drive.value(t) - w)
}

fn rk4_step(drive: &DrivingFunction, a: f64, t: f64, w: Complex64, h: f64) -> Complex64 {
    let k1 = rhs(drive, a, t, w);
    let k2 = rhs(drive, a, t + 0.5 * h, w + k1 * (0.5 * h));
    let k3 = rhs(drive, a, t + 0.5 * h, w + k2 * (0.5 * h));
    let k4 = rhs(drive, a, t + h, w + k3 * h);
    w + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Integrates the chordal Loewner ODE from `w(s) = z` to time `t`.
///
/// Classical RK4 with step-doubling error control and local extrapolation;
/// the local error per step is kept below `tol * max(1, |w|)`. Integration
/// restarts at every knot of the driving function so each segment sees a
/// smooth right-hand side.
pub fn flow_ode(
    drive: &DrivingFunction,
    s: f64,
    t: f64,
    z: Complex64,
    tol: f64,
) -> Result<Complex64> {
    drive.check_interval(s, t)?;
    if !(z.im > 0.0) {
        return Err(LoewnerError::InvalidArgument(format!(
            "flow_ode needs an interior starting point, got {z}"
        )));
    }
    if !(tol > 0.0) {
        return Err(LoewnerError::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if s == t {
        return Ok(z);
    }
    let a = drive.speed().factor();
    let min_step = MIN_STEP_FRACTION * (t - s);
    let mut breaks: Vec<f64> = vec![s];
    breaks.extend(drive.knots_between(s, t));
    breaks.push(t);

    let mut w = z;
    let mut h = (t - s) / 16.0;
    for seg in breaks.windows(2) {
        let (mut tc, t1) = (seg[0], seg[1]);
        while tc < t1 {
            let last = tc + h >= t1;
            let hh = if last { t1 - tc } else { h };
            let full = rk4_step(drive, a, tc, w, hh);
            let half = rk4_step(drive, a, tc, w, 0.5 * hh);
            let two = rk4_step(drive, a, tc + 0.5 * hh, half, 0.5 * hh);
            let err = (two - full).norm() / 15.0;
            let scale = tol * two.norm().max(1.0);
            if err <= scale || hh <= min_step {
                if hh <= min_step && err > scale {
                    return Err(LoewnerError::StepUnderflow { t: tc, min_step });
                }
                w = two + (two - full) / 15.0;
                tc = if last { t1 } else { tc + hh };
            }
            let factor = if err == 0.0 {
                4.0
            } else {
                (SAFETY * (scale / err).powf(0.2)).clamp(0.2, 4.0)
            };
            h = (hh * factor).max(min_step);
        }
    }
    if w.im < z.im {
        return Err(LoewnerError::ImaginaryDecrease {
            before: z.im,
            after: w.im,
        });
    }
    Ok(w)
}

/// Builds `phi_{s,t}` as `n_steps` exact slit steps, each with the driving
/// value taken at the subinterval midpoint.
pub fn flow_composed(
    drive: &DrivingFunction,
    s: f64,
    t: f64,
    n_steps: usize,
) -> Result<FlowMap> {
    drive.check_interval(s, t)?;
    if n_steps == 0 {
        return Err(LoewnerError::InvalidArgument("n_steps must be >= 1".into()));
    }
    let speed = drive.speed();
    if s == t {
        return Ok(FlowMap::identity(s, speed));
    }
    let dt = (t - s) / n_steps as f64;
    let steps = (0..n_steps)
        .map(|k| {
            let mid = s + (k as f64 + 0.5) * dt;
            SlitStep {
                center: drive.value(mid),
                cap: dt,
                speed,
            }
        })
        .collect();
    FlowMap::from_steps(steps, s, speed)
}

/// Computes the slit trace `Gamma(t_k) = g_{t_k}(lambda(t_k))` on a uniform
/// grid of `n_steps` intervals, using the default execution strategy.
pub fn compute_trace(drive: &DrivingFunction, n_steps: usize) -> Result<Trace> {
    compute_trace_with(drive, n_steps, Execution::default())
}

/// [`compute_trace`] with an explicit execution strategy.
///
/// `g_{t_k}` is the composed flow over `[t_k, T]`; its first step is
/// evaluated at its own center, which it sends to the tip of that step's slit,
/// and the later steps carry that tip forward. Grid times are independent, so
/// the loop parallelizes over `k`.
pub fn compute_trace_with(
    drive: &DrivingFunction,
    n_steps: usize,
    exec: Execution,
) -> Result<Trace> {
    let total = drive.total_time();
    let full = flow_composed(drive, 0.0, total, n_steps)?;
    let steps = full.steps();
    let dt = total / n_steps as f64;
    let mut samples: Vec<(f64, HalfPlanePoint)> = exec.map_range(n_steps, |k| {
        let tip = steps[k].tip();
        let w = steps[k + 1..].iter().fold(tip, |w, s| s.apply(w));
        (
            k as f64 * dt,
            HalfPlanePoint {
                re: w.re,
                im: w.im.max(0.0),
            },
        )
    });
    samples.push((
        total,
        HalfPlanePoint {
            re: drive.value(total),
            im: 0.0,
        },
    ));
    Ok(Trace {
        samples,
        speed: drive.speed(),
    })
}

/// Preimage interval `[alpha, beta]` of the remaining slit under `g_s`.
pub fn hull_support(drive: &DrivingFunction, s: f64, n_steps: usize) -> Result<(f64, f64)> {
    let total = drive.total_time();
    if !(s < total) {
        return Err(LoewnerError::InvalidArgument(format!(
            "hull_support needs s < T = {total}, got {s}"
        )));
    }
    let g = flow_composed(drive, s, total, n_steps)?;
    g.support().ok_or_else(|| {
        LoewnerError::InvalidArgument("flow has no support on the real axis".into())
    })
}
