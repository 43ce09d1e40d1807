//! Inverse evolution by the vertical-slit zipper.
//!
//! Starting from the root, each step takes the image `w` of the next slit
//! point, removes the vertical slit from `Re w` to `w` with the inverse
//! elementary map, and records `Re w` as a driving sample and
//! `Im(w)^2 / (2a)` as its capacity increment. The partial capacity sums
//! assign every slit point its time in the standard parametrization, where the
//! remaining slit after time `t` has capacity `T - t`.

use num_complex::Complex64;

use crate::error::{LoewnerError, Result};
use crate::exec::Execution;
use crate::forward::{DrivingFunction, Interpolation};
use crate::halfplane::{HalfPlanePoint, Side, SlitPolyline, SlitStep, Speed};

/// Below this many remaining points the per-step update stays sequential.
const PAR_THRESHOLD: usize = 2048;

/// Times of the slit points in the standard parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardParametrization {
    /// `(point index, time)`, ordered from the root (time `T`) to the tip
    /// (time `0`).
    pub map: Vec<(usize, f64)>,
    pub total_capacity: f64,
}

/// Subdivides segments so that none is longer than `max_height`.
///
/// The first zipper step on each segment removes a slit whose height equals
/// the segment length, so this bounds the step heights where the slit meets
/// its current base.
pub fn refine_polyline(slit: &SlitPolyline, max_height: f64) -> Result<SlitPolyline> {
    if !(max_height > 0.0) || !max_height.is_finite() {
        return Err(LoewnerError::InvalidArgument(format!(
            "max_height must be positive, got {max_height}"
        )));
    }
    let pts = slit.points();
    let mut out = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let (a, b) = (w[0].to_complex(), w[1].to_complex());
        let len = (b - a).norm();
        let pieces = if len > max_height * (1.0 + 1e-9) {
            (len / max_height).ceil() as usize
        } else {
            1
        };
        out.push(w[0]);
        for k in 1..pieces {
            let p = a + (b - a) * (k as f64 / pieces as f64);
            out.push(HalfPlanePoint { re: p.re, im: p.im });
        }
    }
    out.push(slit.root());
    SlitPolyline::new_unchecked_crossings(out)
}

/// Side of the directed segment `base -> tip` that `p` lies on; collinear
/// points count as right.
fn side_of(base: Complex64, tip: Complex64, p: Complex64) -> Side {
    let d = tip - base;
    let v = p - base;
    if d.re * v.im - d.im * v.re > 0.0 {
        Side::Left
    } else {
        Side::Right
    }
}

/// Runs the zipper on a (refined) slit, returning the recovered driving
/// function and the standard parametrization of the slit points.
pub fn unzip(slit: &SlitPolyline, speed: Speed) -> Result<(DrivingFunction, StandardParametrization)> {
    unzip_with(slit, speed, Execution::default())
}

pub fn unzip_with(
    slit: &SlitPolyline,
    speed: Speed,
    exec: Execution,
) -> Result<(DrivingFunction, StandardParametrization)> {
    let a = speed.factor();
    let m = slit.len() - 1;
    let mut current: Vec<Complex64> = slit.points()[..m].iter().map(|p| p.to_complex()).collect();
    let mut base = Complex64::new(slit.root().re, 0.0);
    // (center, cap) per step, root first
    let mut steps: Vec<(f64, f64)> = Vec::with_capacity(m);

    for j in 0..m {
        let idx = m - 1 - j;
        let w = current[idx];
        if !(w.im > 0.0) {
            return Err(LoewnerError::DegenerateStep {
                step: j + 1,
                reason: format!("point {idx} was flattened onto the real axis ({w})"),
            });
        }
        let center = w.re;
        let cap = w.im * w.im / (2.0 * a);
        let step = SlitStep { center, cap, speed };
        let rest = &mut current[..idx];
        let update = |p: &mut Complex64| {
            let side = side_of(base, w, *p);
            *p = step.invert_toward(*p, side);
        };
        if rest.len() >= PAR_THRESHOLD {
            exec.for_each_mut(rest, update);
        } else {
            rest.iter_mut().for_each(update);
        }
        base = Complex64::new(center, 0.0);
        steps.push((center, cap));
    }

    // suffix sums from the tip side so the tip gets time exactly zero
    let mut times = vec![0.0; m];
    let mut acc = 0.0;
    for j in (0..m).rev() {
        times[j] = acc;
        acc += steps[j].1;
    }
    let total = acc;
    for j in 1..m {
        if !(times[j - 1] > times[j]) {
            return Err(LoewnerError::DegenerateStep {
                step: j + 1,
                reason: "capacity increment vanished in floating point".into(),
            });
        }
    }

    let mut samples: Vec<(f64, f64)> = (0..m).rev().map(|j| (times[j], steps[j].0)).collect();
    samples.push((total, slit.root().re));
    let drive = DrivingFunction::new(samples, Interpolation::PiecewiseConstant, speed)?;

    let mut map = Vec::with_capacity(m + 1);
    map.push((m, total));
    map.extend((0..m).map(|j| (m - 1 - j, times[j])));
    Ok((
        drive,
        StandardParametrization {
            map,
            total_capacity: total,
        },
    ))
}

/// Half-plane capacity `T` of the slit under speed `a`.
pub fn total_capacity(slit: &SlitPolyline, speed: Speed) -> Result<f64> {
    unzip(slit, speed).map(|(_, p)| p.total_capacity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn vertical(height: f64, x0: f64) -> SlitPolyline {
        SlitPolyline::new(vec![
            HalfPlanePoint { re: x0, im: height },
            HalfPlanePoint { re: x0, im: 0.0 },
        ])
        .unwrap()
    }

    #[test]
    fn refine_examples() {
        let r = refine_polyline(&vertical(1.0, 0.0), 0.1).unwrap();
        assert!(r.len() >= 11);
        assert_eq!(r.tip(), HalfPlanePoint { re: 0.0, im: 1.0 });
        assert_eq!(r.root(), HalfPlanePoint { re: 0.0, im: 0.0 });
        for w in r.points().windows(2) {
            assert!((w[1].to_complex() - w[0].to_complex()).norm() <= 0.1 * (1.0 + 1e-9));
        }
        let again = refine_polyline(&r, 0.1).unwrap();
        assert_eq!(again, r);
        let coarse = refine_polyline(&vertical(1.0, 0.0), 5.0).unwrap();
        assert_eq!(coarse, vertical(1.0, 0.0));
        assert!(refine_polyline(&r, 0.0).is_err());
    }

    #[test]
    fn vertical_slit_capacity() {
        let slit = refine_polyline(&vertical(1.0, 0.0), 0.01).unwrap();
        let (drive, param) = unzip(&slit, Speed::One).unwrap();
        assert_abs_diff_eq!(param.total_capacity, 0.5, epsilon = 1e-12);
        assert!(drive.values().iter().all(|l| l.abs() <= 1e-12));
        assert_eq!(drive.times()[0], 0.0);
    }

    #[test]
    fn translated_slit_shifts_drive() {
        let slit = refine_polyline(&vertical(1.0, 4.0), 0.01).unwrap();
        let (drive, param) = unzip(&slit, Speed::One).unwrap();
        assert_abs_diff_eq!(param.total_capacity, 0.5, epsilon = 1e-12);
        assert!(drive.values().iter().all(|l| (l - 4.0).abs() <= 1e-12));
    }

    #[test]
    fn terminal_sample_is_root() {
        let slit = SlitPolyline::new(vec![
            HalfPlanePoint { re: 0.3, im: 0.9 },
            HalfPlanePoint { re: 0.1, im: 0.5 },
            HalfPlanePoint { re: -0.2, im: 0.0 },
        ])
        .unwrap();
        let (drive, param) = unzip(&slit, Speed::One).unwrap();
        let (t, l) = drive.samples().last().unwrap();
        assert_eq!(t, param.total_capacity);
        assert_eq!(l, -0.2);
        assert_eq!(param.map[0], (2, param.total_capacity));
        assert_eq!(param.map.last().unwrap(), &(0, 0.0));
    }

    #[test]
    fn capacity_scales_quadratically() {
        assert_abs_diff_eq!(
            total_capacity(&vertical(2.0, 0.0), Speed::One).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            total_capacity(&vertical(1.0, 0.0), Speed::Two).unwrap(),
            0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn side_hint_orientation() {
        let base = Complex64::new(0.0, 0.0);
        let tip = Complex64::new(0.0, 1.0);
        assert_eq!(side_of(base, tip, Complex64::new(-1.0, 0.5)), Side::Left);
        assert_eq!(side_of(base, tip, Complex64::new(1.0, 0.5)), Side::Right);
        assert_eq!(side_of(base, tip, Complex64::new(0.0, 2.0)), Side::Right);
    }
}
