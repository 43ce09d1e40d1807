//! Upper half-plane primitives: points, vertical-slit elementary maps, their
//! compositions, and Laurent-coefficient estimation at infinity.
//!
//! Every map here carries the hydrodynamic normalization `f(z) - z -> 0` as
//! `z -> inf`. A single [`SlitStep`] is the exact flow of the chordal Loewner
//! ODE `dw/dt = a / (l - w)` for a constant driving value `l` over a capacity
//! increment `d`:
//!
//! ```text
//! w = l + sqrt((z - l)^2 - 2 a d)
//! ```
//!
//! which maps the half-plane onto itself minus the vertical segment from `l`
//! to `l + i sqrt(2 a d)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LoewnerError, Result};

/// A point of the closed upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    pub re: f64,
    pub im: f64,
}

impl HalfPlanePoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(LoewnerError::InvalidArgument(format!(
                "non-finite point ({re}, {im})"
            )));
        }
        if im < 0.0 {
            return Err(LoewnerError::InvalidArgument(format!(
                "point ({re}, {im}) lies below the real axis"
            )));
        }
        Ok(HalfPlanePoint { re, im })
    }

    pub fn is_interior(&self) -> bool {
        self.im > 0.0
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl TryFrom<Complex64> for HalfPlanePoint {
    type Error = LoewnerError;

    fn try_from(z: Complex64) -> Result<Self> {
        HalfPlanePoint::new(z.re, z.im)
    }
}

impl From<HalfPlanePoint> for Complex64 {
    fn from(p: HalfPlanePoint) -> Self {
        p.to_complex()
    }
}

/// Speed constant `a` of the Loewner ODE `dw/dt = a / (lambda - w)`.
///
/// `One` is the classical normalization, `Two` the rescaled one common in the
/// SLE literature. Capacity time `t` under speed `a` corresponds to `a t`
/// under speed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Speed {
    #[default]
    One,
    Two,
}

impl Speed {
    pub fn factor(self) -> f64 {
        match self {
            Speed::One => 1.0,
            Speed::Two => 2.0,
        }
    }

    pub fn from_factor(a: f64) -> Result<Self> {
        if a == 1.0 {
            Ok(Speed::One)
        } else if a == 2.0 {
            Ok(Speed::Two)
        } else {
            Err(LoewnerError::InvalidArgument(format!(
                "speed must be 1 or 2, got {a}"
            )))
        }
    }
}

/// Which side of a vertical slit a boundary point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// Square root on the branch with nonnegative imaginary part. When the root
/// is real, `side` picks its sign.
fn upper_sqrt(u: Complex64, side: f64) -> Complex64 {
    let mut r = u.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re * side < 0.0) {
        r = -r;
    }
    if r.im == 0.0 {
        // normalize -0.0 so outputs stay in the closed upper half-plane
        r.im = 0.0;
    }
    r
}

/// One vertical-slit elementary map with hydrodynamic normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitStep {
    pub center: f64,
    pub cap: f64,
    pub speed: Speed,
}

impl SlitStep {
    pub fn new(center: f64, cap: f64, speed: Speed) -> Result<Self> {
        if !center.is_finite() || !cap.is_finite() || cap <= 0.0 {
            return Err(LoewnerError::InvalidArgument(format!(
                "slit step needs finite center and positive capacity, got ({center}, {cap})"
            )));
        }
        Ok(SlitStep { center, cap, speed })
    }

    /// `2 a d`, the squared height of the slit this step creates.
    pub fn height_sq(&self) -> f64 {
        2.0 * self.speed.factor() * self.cap
    }

    pub fn height(&self) -> f64 {
        self.height_sq().sqrt()
    }

    /// The `1/z` Laurent coefficient, `-a d`.
    pub fn c1(&self) -> f64 {
        -self.speed.factor() * self.cap
    }

    /// Tip of the slit created by this step.
    pub fn tip(&self) -> Complex64 {
        Complex64::new(self.center, self.height())
    }

    /// Evaluates `l + sqrt((z - l)^2 - 2 a d)` on the closed half-plane.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let d = z - self.center;
        let side = if d.re < 0.0 { -1.0 } else { 1.0 };
        upper_sqrt(d * d - self.height_sq(), side) + self.center
    }

    /// Inverse of [`apply`](Self::apply). Points on the open slit need a side
    /// hint because the boundary map is two-to-one there.
    pub fn invert(&self, w: Complex64, side_hint: Option<Side>) -> Result<Complex64> {
        let d = w - self.center;
        if d.re == 0.0 && side_hint.is_none() && d.im > 0.0 && d.im * d.im < self.height_sq() {
            return Err(LoewnerError::AmbiguousSide(format!("{w}")));
        }
        Ok(self.invert_toward(w, side_hint.unwrap_or(Side::Right)))
    }

    /// Inverse map where `side` only decides points with `Re w` equal to the
    /// center; everywhere else the side follows from `Re w`.
    pub fn invert_toward(&self, w: Complex64, side: Side) -> Complex64 {
        let d = w - self.center;
        let sigma = if d.re > 0.0 {
            1.0
        } else if d.re < 0.0 {
            -1.0
        } else {
            side.sign()
        };
        let r = (d * d + self.height_sq()).sqrt();
        // principal root has re >= 0; pick the preimage in the upper half-plane
        let mut out = if r.re == 0.0 {
            Complex64::new(0.0, r.im.abs())
        } else {
            r * sigma
        };
        if out.im < 0.0 {
            out.im = 0.0;
        }
        out + self.center
    }
}

/// An ordered composition of slit steps, earliest time first.
///
/// Represents the transition map `phi_{s,t}` of the Loewner flow between
/// `t_start = s` and `t_end = t`. The capacity increments sum to the elapsed
/// time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowMap {
    steps: Vec<SlitStep>,
    t_start: f64,
    t_end: f64,
    speed: Speed,
}

impl FlowMap {
    pub fn identity(t: f64, speed: Speed) -> Self {
        FlowMap {
            steps: Vec::new(),
            t_start: t,
            t_end: t,
            speed,
        }
    }

    /// Builds a flow from steps, checking that their capacities add up to the
    /// elapsed time and share one speed.
    pub fn from_steps(steps: Vec<SlitStep>, t_start: f64, speed: Speed) -> Result<Self> {
        if steps.iter().any(|s| s.speed != speed) {
            return Err(LoewnerError::InvalidArgument(
                "all steps of a flow must share one speed".into(),
            ));
        }
        let total: f64 = steps.iter().map(|s| s.cap).sum();
        Ok(FlowMap {
            steps,
            t_start,
            t_end: t_start + total,
            speed,
        })
    }

    pub fn steps(&self) -> &[SlitStep] {
        &self.steps
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn speed(&self) -> Speed {
        self.speed
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    /// Elapsed Loewner time `t - s`.
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// Expected `1/z` coefficient, `-a (t - s)`.
    pub fn c1(&self) -> f64 {
        -self.speed.factor() * self.duration()
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.steps.iter().fold(z, |w, s| s.apply(w))
    }

    /// Inverse map, defined off the hull. Steps are undone latest first.
    pub fn invert(&self, w: Complex64) -> Result<Complex64> {
        self.steps.iter().rev().try_fold(w, |z, s| s.invert(z, None))
    }

    /// Flow over `[t_start, t_end]` followed by `later`.
    pub fn then(&self, later: &FlowMap) -> Result<FlowMap> {
        if later.speed != self.speed {
            return Err(LoewnerError::InvalidArgument(
                "cannot compose flows with different speeds".into(),
            ));
        }
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&later.steps);
        Ok(FlowMap {
            steps,
            t_start: self.t_start,
            t_end: self.t_end + later.duration(),
            speed: self.speed,
        })
    }

    /// Splits after the first `k` steps into (earlier, later).
    pub fn split_at(&self, k: usize) -> (FlowMap, FlowMap) {
        let k = k.min(self.steps.len());
        let head: Vec<SlitStep> = self.steps[..k].to_vec();
        let mid = self.t_start + head.iter().map(|s| s.cap).sum::<f64>();
        let tail = self.steps[k..].to_vec();
        (
            FlowMap {
                steps: head,
                t_start: self.t_start,
                t_end: mid,
                speed: self.speed,
            },
            FlowMap {
                steps: tail,
                t_start: mid,
                t_end: self.t_end,
                speed: self.speed,
            },
        )
    }

    /// Points of the hull `phi(H)` complement: the image of every step tip
    /// under the later steps, followed by the root on the real axis.
    ///
    /// The first entry is the tip of the whole hull.
    pub fn hull_points(&self) -> Vec<Complex64> {
        let n = self.steps.len();
        let mut pts = vec![Complex64::new(0.0, 0.0); n];
        // walk backwards, pushing each tip through the steps after it
        for k in (0..n).rev() {
            let tip = self.steps[k].tip();
            pts[k] = self.steps[k + 1..].iter().fold(tip, |w, s| s.apply(w));
        }
        if let Some(last) = self.steps.last() {
            pts.push(Complex64::new(last.center, 0.0));
        }
        pts
    }

    /// Locates the preimage interval `[alpha, beta]` of the hull on the real
    /// axis, i.e. where the boundary values have positive imaginary part.
    ///
    /// Bisection from the first step center (which maps to the tip) to an
    /// absolute tolerance of `1e-10`. Returns `None` for the identity.
    pub fn support(&self) -> Option<(f64, f64)> {
        let first = self.steps.first()?;
        let inside = |x: f64| self.apply(Complex64::new(x, 0.0)).im > 0.0;
        let seed = first.center;
        if !inside(seed) {
            return None;
        }
        let edge = |dir: f64| {
            let mut lo = seed;
            let mut step = first.height().max(1e-12);
            let mut hi = seed + dir * step;
            while inside(hi) {
                lo = hi;
                step *= 2.0;
                hi = seed + dir * step;
            }
            while (hi - lo).abs() > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        };
        Some((edge(-1.0), edge(1.0)))
    }
}

/// Estimated Laurent coefficients at infinity of a normalized map
/// `z + c1/z + c2/z^2 + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentEstimate {
    pub c1: f64,
    /// `c1, c2, ..., c_{n_max}`.
    pub tail: Vec<f64>,
    pub sample_radius: f64,
    /// Uncertainty of `c1`: the non-principal residue of the sampled data
    /// plus a rounding floor.
    pub est_error: f64,
}

/// Samples `f` at `m / 2` angles strictly inside `(0, pi)` on the circle of
/// the given radius; the lower half is implied by `f(conj z) = conj f(z)`.
pub(crate) fn semicircle_samples<F>(f: F, radius: f64, m: usize) -> Vec<(f64, Complex64)>
where
    F: Fn(Complex64) -> Complex64,
{
    let half = (m / 2).max(1);
    (0..half)
        .map(|k| {
            let theta = PI * (k as f64 + 0.5) / half as f64;
            (theta, f(Complex64::from_polar(radius, theta)))
        })
        .collect()
}

/// Full-circle mean of `f e^{i freq theta}` for reflection-symmetric samples.
/// The conjugate pairs cancel the imaginary part, leaving twice the real part
/// on the upper half.
pub(crate) fn project_reflected(samples: &[(f64, Complex64)], freq: f64) -> f64 {
    samples
        .iter()
        .map(|&(theta, f)| (f * Complex64::from_polar(1.0, freq * theta)).re)
        .sum::<f64>()
        / samples.len() as f64
}

/// Residue (in units of `f` on the circle) above which the sampling circle is
/// taken to cut through the reflected hull.
pub const RESIDUE_LIMIT: f64 = 1e-3;

/// Estimates Laurent coefficients of a hydrodynamically normalized map from
/// its values on the upper semicircle of radius `radius`.
///
/// The samples are extended to the full circle by the reflection
/// `f(conj z) = conj f(z)` and Fourier-analysed. Coefficients of positive
/// powers of `z` (including the constant) must vanish outside the hull; their
/// size is reported as the residue, and a residue above [`RESIDUE_LIMIT`]
/// fails with [`LoewnerError::RadiusTooSmall`].
pub fn estimate_laurent<F>(map: F, radius: f64, n_max: usize) -> Result<LaurentEstimate>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(radius > 0.0) || n_max == 0 {
        return Err(LoewnerError::InvalidArgument(format!(
            "need radius > 0 and n_max >= 1, got {radius}, {n_max}"
        )));
    }
    let m = (8 * n_max).max(256).next_power_of_two();
    let samples = semicircle_samples(|z| map(z) - z, radius, m);
    let project = |freq: f64| project_reflected(&samples, freq);

    let tail: Vec<f64> = (1..=n_max)
        .map(|n| project(n as f64) * radius.powi(n as i32))
        .collect();
    let residue = (0..=n_max)
        .map(|m| project(-(m as f64)).abs())
        .fold(0.0, f64::max);
    if residue > RESIDUE_LIMIT {
        return Err(LoewnerError::RadiusTooSmall {
            radius,
            residue,
            limit: RESIDUE_LIMIT,
        });
    }
    let est_error = radius * (residue + 16.0 * f64::EPSILON * radius);
    Ok(LaurentEstimate {
        c1: tail[0],
        tail,
        sample_radius: radius,
        est_error,
    })
}

/// A slit as a point chain from the tip (inside the half-plane) to the root
/// (on the real axis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitPolyline {
    points: Vec<HalfPlanePoint>,
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re)
        && p.re <= a.re.max(b.re)
        && p.im >= a.im.min(b.im)
        && p.im <= a.im.max(b.im)
}

pub(crate) fn segments_intersect(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

impl SlitPolyline {
    /// Validates a tip-to-root point chain.
    pub fn new(points: Vec<HalfPlanePoint>) -> Result<Self> {
        let slit = Self::new_unchecked_crossings(points)?;
        slit.check_simple()?;
        Ok(slit)
    }

    /// Like [`new`](Self::new) but skips the quadratic self-intersection test.
    /// Used for chains already known to be simple, e.g. refinements.
    pub(crate) fn new_unchecked_crossings(points: Vec<HalfPlanePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(LoewnerError::InvalidSlit(
                "a slit needs at least a tip and a root".into(),
            ));
        }
        let n = points.len();
        if points[n - 1].im != 0.0 {
            return Err(LoewnerError::InvalidSlit(format!(
                "root ({}, {}) is not on the real axis",
                points[n - 1].re,
                points[n - 1].im
            )));
        }
        if let Some(i) = points[..n - 1].iter().position(|p| !p.is_interior()) {
            return Err(LoewnerError::InvalidSlit(format!(
                "point {i} touches the real axis before the root"
            )));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(LoewnerError::InvalidSlit(format!(
                "points {i} and {} coincide",
                i + 1
            )));
        }
        Ok(SlitPolyline { points })
    }

    fn check_simple(&self) -> Result<()> {
        let pts: Vec<Complex64> = self.points.iter().map(|p| p.to_complex()).collect();
        let nseg = pts.len() - 1;
        for i in 0..nseg {
            let (a, b) = (pts[i], pts[i + 1]);
            let (lo_re, hi_re) = (a.re.min(b.re), a.re.max(b.re));
            let (lo_im, hi_im) = (a.im.min(b.im), a.im.max(b.im));
            for j in i + 2..nseg {
                let (c, d) = (pts[j], pts[j + 1]);
                if c.re.max(d.re) < lo_re
                    || c.re.min(d.re) > hi_re
                    || c.im.max(d.im) < lo_im
                    || c.im.min(d.im) > hi_im
                {
                    continue;
                }
                if segments_intersect(a, b, c, d) {
                    return Err(LoewnerError::InvalidSlit(format!(
                        "segments {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_complex(points: &[Complex64]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|&z| HalfPlanePoint::try_from(z))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }

    pub fn points(&self) -> &[HalfPlanePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tip(&self) -> HalfPlanePoint {
        self.points[0]
    }

    pub fn root(&self) -> HalfPlanePoint {
        self.points[self.points.len() - 1]
    }

    /// Applies an affine map `z -> r z + x0` with `r > 0`.
    pub fn scale_translate(&self, r: f64, x0: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(LoewnerError::InvalidArgument(format!(
                "scale must be positive, got {r}"
            )));
        }
        let pts = self
            .points
            .iter()
            .map(|p| HalfPlanePoint {
                re: r * p.re + x0,
                im: r * p.im,
            })
            .collect();
        Self::new_unchecked_crossings(pts)
    }
}
