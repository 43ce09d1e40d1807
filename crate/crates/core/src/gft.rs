//! Numerical checks of classical bounds for normalized conformal maps: the
//! area theorem for the class of univalent maps of the exterior disk, and the
//! diameter and displacement bounds for maps `C \ K1 -> C \ K2` with
//! expansion `z + c1/z + ...`.
//!
//! For a flow map `phi`, `K1` is the real preimage segment `[alpha, beta]` of
//! its hull and `K2` is the hull together with its mirror image. Hull
//! diameters come from the sampled hull polyline, so every bound is tested
//! with a relative slack.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{LoewnerError, Result};
use crate::halfplane::{project_reflected, semicircle_samples, FlowMap, LaurentEstimate};

/// Default number of Laurent coefficients in the area sum.
pub const AREA_TERMS: usize = 32;

/// Default relative slack on the diameter and displacement bounds.
pub const BOUND_SLACK: f64 = 0.01;

/// Hull points beyond this count are subsampled for diameter computations.
const MAX_HULL_SAMPLES: usize = 1500;

/// `sum n |b_n|^2` over the tail of a class-Sigma estimate.
pub fn area_theorem_check(est: &LaurentEstimate) -> f64 {
    est.tail
        .iter()
        .enumerate()
        .map(|(i, b)| (i + 1) as f64 * b * b)
        .sum()
}

/// How a flow map is turned into a univalent map of `|zeta| > 1` with
/// expansion `zeta + b0 + b1/zeta + ...`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaRescale {
    /// `g(zeta) = phi(R zeta + z0) / R`, valid when the support lies in the
    /// closed disk of radius `R` about the real point `z0`.
    Disk { center: f64, radius: f64 },
    /// `g(zeta) = phi(J(zeta)) / (L/4)` where `J` maps the exterior disk onto
    /// the complement of the support segment of length `L`. The omitted set is
    /// then the rescaled hull, which has zero area.
    Joukowski,
}

/// Laurent coefficients `b_1..b_{n_max}` of the class-Sigma rescaling of a
/// flow map, from `samples` boundary values on the unit circle.
pub fn class_sigma_estimate(
    flow: &FlowMap,
    rescale: SigmaRescale,
    n_max: usize,
    samples: usize,
) -> Result<LaurentEstimate> {
    if n_max == 0 {
        return Err(LoewnerError::InvalidArgument("n_max must be >= 1".into()));
    }
    let m = samples.max(4 * n_max).next_power_of_two();
    if flow.is_identity() {
        return Ok(LaurentEstimate {
            c1: 0.0,
            tail: vec![0.0; n_max],
            sample_radius: 1.0,
            est_error: 0.0,
        });
    }
    let (alpha, beta) = flow.support().ok_or_else(|| {
        LoewnerError::InvalidArgument("flow has no support on the real axis".into())
    })?;
    let data = match rescale {
        SigmaRescale::Disk { center, radius } => {
            let reach = (alpha - center).abs().max((beta - center).abs());
            if radius < reach * (1.0 - 1e-12) {
                return Err(LoewnerError::InvalidArgument(format!(
                    "disk of radius {radius} about {center} misses part of [{alpha}, {beta}]"
                )));
            }
            semicircle_samples(
                |zeta| {
                    let mut z = zeta * radius + center;
                    z.im = z.im.max(0.0);
                    flow.apply(z) / radius - zeta
                },
                1.0,
                m,
            )
        }
        SigmaRescale::Joukowski => {
            let mid = 0.5 * (alpha + beta);
            let quarter = 0.25 * (beta - alpha);
            // boundary values from above the segment on the upper semicircle
            let samples = semicircle_samples(|zeta| zeta, 1.0, m);
            samples
                .into_iter()
                .map(|(theta, zeta)| {
                    let x = mid + 2.0 * quarter * theta.cos();
                    let w = flow.apply(Complex64::new(x, 0.0));
                    (theta, w / quarter - zeta)
                })
                .collect()
        }
    };
    let tail: Vec<f64> = (1..=n_max)
        .map(|n| project_reflected(&data, n as f64))
        .collect();
    // higher positive powers must vanish; b0 is allowed
    let residue = (1..=n_max)
        .map(|k| project_reflected(&data, -(k as f64)).abs())
        .fold(0.0, f64::max);
    Ok(LaurentEstimate {
        c1: tail[0],
        tail,
        sample_radius: 1.0,
        est_error: residue,
    })
}

/// Ratios `lhs / rhs` of each bound; a bound holds when its ratio is at most
/// `1 + slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub diam_k1: f64,
    pub diam_k2: f64,
    pub c1_ratio: f64,
    pub k1_in_disk_ratio: f64,
    pub k2_in_disk_ratio: f64,
    pub displacement1_ratio: f64,
    pub displacement2_ratio: f64,
    pub slack: f64,
    pub violations: Vec<String>,
}

impl BoundsReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst_ratio(&self) -> f64 {
        [
            self.c1_ratio,
            self.k1_in_disk_ratio,
            self.k2_in_disk_ratio,
            self.displacement1_ratio,
            self.displacement2_ratio,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn vacuous(slack: f64) -> Self {
        BoundsReport {
            diam_k1: 0.0,
            diam_k2: 0.0,
            c1_ratio: 0.0,
            k1_in_disk_ratio: 0.0,
            k2_in_disk_ratio: 0.0,
            displacement1_ratio: 0.0,
            displacement2_ratio: 0.0,
            slack,
            violations: Vec::new(),
        }
    }
}

fn subsample(points: &[Complex64]) -> Vec<Complex64> {
    if points.len() <= MAX_HULL_SAMPLES {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(MAX_HULL_SAMPLES);
    let mut out: Vec<Complex64> = points.iter().step_by(stride).copied().collect();
    out.push(*points.last().unwrap());
    out
}

/// Diameter of `K` union its mirror image for `K` in the closed upper
/// half-plane: the farthest pair is always a point and a mirrored point.
fn reflected_diameter(points: &[Complex64]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i..] {
            best = best.max((p - q.conj()).norm());
        }
    }
    best
}

/// Checks the four diameter and displacement bounds for a flow map.
pub fn omitted_set_bounds_check(flow: &FlowMap, slack: f64) -> Result<BoundsReport> {
    if flow.is_identity() {
        return Ok(BoundsReport::vacuous(slack));
    }
    let (alpha, beta) = flow.support().ok_or_else(|| {
        LoewnerError::InvalidArgument("flow has no support on the real axis".into())
    })?;
    let hull = subsample(&flow.hull_points());
    let diam1 = beta - alpha;
    let diam2 = reflected_diameter(&hull);
    let relax = 1.0 + slack;
    let mut violations = Vec::new();

    let c1 = flow.c1().abs();
    let c1_ratio = c1 / diam1.min(diam2).powi(2);
    if c1_ratio > relax {
        violations.push(format!(
            "|c1| = {c1:.6e} exceeds min diam^2 = {:.6e}",
            diam1.min(diam2).powi(2)
        ));
    }

    // K1 is a segment, so its farthest point from any w0 is an endpoint
    let k1_reach = hull
        .iter()
        .map(|w0| {
            (Complex64::new(alpha, 0.0) - w0)
                .norm()
                .max((Complex64::new(beta, 0.0) - w0).norm())
        })
        .fold(0.0, f64::max);
    let k1_in_disk_ratio = k1_reach / (2.0 * diam2);
    if k1_in_disk_ratio > relax {
        violations.push(format!(
            "K1 reaches {k1_reach:.6e} from a point of K2, beyond 2 diam K2 = {:.6e}",
            2.0 * diam2
        ));
    }

    let k2_reach = (0..=16)
        .map(|k| alpha + (beta - alpha) * k as f64 / 16.0)
        .map(|z0| {
            hull.iter()
                .map(|p| (p - z0).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let k2_in_disk_ratio = k2_reach / (2.0 * diam1);
    if k2_in_disk_ratio > relax {
        violations.push(format!(
            "K2 reaches {k2_reach:.6e} from a point of K1, beyond 2 diam K1 = {:.6e}",
            2.0 * diam1
        ));
    }

    let ring = |center: f64, radius: f64| -> Vec<Complex64> {
        (0..16)
            .map(|k| Complex64::new(center, 0.0) + Complex64::from_polar(radius, PI * (k as f64 + 0.5) / 16.0))
            .collect()
    };

    // j = 1: points farther than diam K1 from the support segment
    let mid1 = 0.5 * (alpha + beta);
    let disp1 = ring(mid1, 1.05 * 1.5 * diam1)
        .into_iter()
        .map(|z1| (flow.apply(z1) - z1).norm())
        .fold(0.0, f64::max);
    let displacement1_ratio = disp1 / (3.0 * diam1);
    if displacement1_ratio > relax {
        violations.push(format!(
            "displacement {disp1:.6e} exceeds 3 diam K1 = {:.6e}",
            3.0 * diam1
        ));
    }

    // j = 2: points farther than diam K2 from the hull and its mirror image
    let (lo, hi) = hull
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.re), hi.max(p.re))
        });
    let mid2 = 0.5 * (lo + hi);
    let reach2 = hull
        .iter()
        .map(|p| (p - mid2).norm())
        .fold(0.0, f64::max);
    let mut disp2 = 0.0f64;
    for z2 in ring(mid2, 1.05 * (reach2 + diam2)) {
        let z1 = flow.invert(z2)?;
        disp2 = disp2.max((z2 - z1).norm());
    }
    let displacement2_ratio = disp2 / (3.0 * diam2);
    if displacement2_ratio > relax {
        violations.push(format!(
            "displacement {disp2:.6e} exceeds 3 diam K2 = {:.6e}",
            3.0 * diam2
        ));
    }

    Ok(BoundsReport {
        diam_k1: diam1,
        diam_k2: diam2,
        c1_ratio,
        k1_in_disk_ratio,
        k2_in_disk_ratio,
        displacement1_ratio,
        displacement2_ratio,
        slack,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfplane::{SlitStep, Speed};
    use approx::assert_abs_diff_eq;

    fn single(delta: f64) -> FlowMap {
        FlowMap::from_steps(
            vec![SlitStep::new(0.0, delta, Speed::One).unwrap()],
            0.0,
            Speed::One,
        )
        .unwrap()
    }

    fn est(tail: Vec<f64>) -> LaurentEstimate {
        LaurentEstimate {
            c1: tail[0],
            tail,
            sample_radius: 1.0,
            est_error: 0.0,
        }
    }

    #[test]
    fn joukowski_tail_is_equality_case() {
        assert_eq!(area_theorem_check(&est(vec![1.0, 0.0, 0.0])), 1.0);
        assert_eq!(area_theorem_check(&est(vec![0.0; 5])), 0.0);
        assert_eq!(area_theorem_check(&est(vec![0.5, 0.5])), 0.25 + 0.5);
    }

    #[test]
    fn disk_rescaled_single_step() {
        // g(zeta) = sqrt(zeta^2 - 1) omits the lemniscate |w^2 + 1| <= 1 of
        // area 2, so the full sum is 1 - 2/pi; the truncated sum sits below
        let e = class_sigma_estimate(
            &single(0.5),
            SigmaRescale::Disk { center: 0.0, radius: 1.0 },
            AREA_TERMS,
            4096,
        )
        .unwrap();
        assert_abs_diff_eq!(e.tail[0], -0.5, epsilon = 1e-4);
        assert_abs_diff_eq!(e.tail[2], -0.125, epsilon = 1e-4);
        let s = area_theorem_check(&e);
        assert!(s <= 1.0 - 2.0 / PI + 1e-4, "{s}");
        assert!(s > 1.0 - 2.0 / PI - 0.02, "{s}");
    }

    #[test]
    fn disk_rescale_must_cover_support() {
        let r = class_sigma_estimate(
            &single(0.5),
            SigmaRescale::Disk { center: 0.0, radius: 0.5 },
            4,
            256,
        );
        assert!(r.is_err());
    }

    #[test]
    fn joukowski_rescaled_single_step_is_extremal() {
        // phi(J(zeta)) / (L/4) = zeta - 1/zeta exactly
        let e = class_sigma_estimate(&single(0.5), SigmaRescale::Joukowski, AREA_TERMS, 1024)
            .unwrap();
        assert_abs_diff_eq!(e.tail[0], -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(area_theorem_check(&e), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn bounds_for_single_step() {
        let r = omitted_set_bounds_check(&single(0.5), BOUND_SLACK).unwrap();
        assert!(r.passes(), "{:?}", r.violations);
        assert_abs_diff_eq!(r.diam_k1, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.diam_k2, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.c1_ratio, 0.5 / 4.0, epsilon = 1e-9);
    }

    #[test]
    fn far_point_displacement() {
        let f = single(0.5);
        let z = Complex64::new(0.0, 100.0);
        let d = (f.apply(z) - z).norm();
        assert_abs_diff_eq!(d, 0.005, epsilon = 1e-6);
        assert!(d < 3.0 * 2.0);
    }

    #[test]
    fn identity_is_vacuous() {
        let r = omitted_set_bounds_check(&FlowMap::identity(0.0, Speed::One), BOUND_SLACK)
            .unwrap();
        assert!(r.passes());
    }
}
