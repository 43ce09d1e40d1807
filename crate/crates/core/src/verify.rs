//! Randomized invariant suite behind `loewner verify`.
//!
//! Every case draws a piecewise-linear driving function and checks the
//! identities the flow maps must satisfy: agreement of the ODE and composed
//! routes, the semigroup law, the capacity identities, Schwarz reconstruction,
//! the area theorem and the diameter/displacement bounds, and monotone
//! imaginary parts. Cases are independent and seeded per index, so the report
//! is identical for a given seed whatever the execution strategy.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LoewnerError, Result};
use crate::exec::Execution;
use crate::forward::{flow_composed, flow_ode, DrivingFunction, Interpolation};
use crate::gft::{
    area_theorem_check, class_sigma_estimate, omitted_set_bounds_check, SigmaRescale, AREA_TERMS,
    BOUND_SLACK,
};
use crate::halfplane::{estimate_laurent, FlowMap, SlitStep, Speed};
use crate::schwarz::{capacity_from_boundary, schwarz_reconstruct, BoundaryImTrace};

/// Draws a piecewise-linear drive on `[0, total]` with `knots` equispaced
/// knots and values uniform in `[-amplitude, amplitude]`.
pub fn random_drive<R: Rng>(
    rng: &mut R,
    knots: usize,
    total: f64,
    amplitude: f64,
    speed: Speed,
) -> Result<DrivingFunction> {
    let knots = knots.max(2);
    let samples = (0..knots)
        .map(|k| {
            let t = if k + 1 == knots {
                total
            } else {
                total * k as f64 / (knots - 1) as f64
            };
            (t, rng.gen_range(-amplitude..=amplitude))
        })
        .collect();
    DrivingFunction::new(samples, Interpolation::PiecewiseLinear, speed)
}

/// The 5 x 5 grid of interior test points used by the dual-method checks.
pub fn interior_grid() -> Vec<Complex64> {
    let xs = [-3.0, -1.5, 0.0, 1.5, 3.0];
    let ys = [0.5, 1.0, 1.5, 2.0, 2.5];
    ys.iter()
        .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
        .collect()
}

/// Per-case RNG: one ChaCha stream per case index.
pub fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

/// Draws `s < t` in `[0, total]` with `t - s >= min_gap`.
pub fn random_interval<R: Rng>(rng: &mut R, total: f64, min_gap: f64) -> (f64, f64) {
    let s = rng.gen_range(0.0..=(total - min_gap));
    let t = rng.gen_range((s + min_gap)..=total);
    (s, t)
}

/// Interior points spread over and around a support interval.
pub fn probe_points(alpha: f64, beta: f64, count: usize) -> Vec<Complex64> {
    let count = count.max(1);
    (0..count)
        .map(|k| {
            let f = (k as f64 + 0.5) / count as f64;
            let x = (alpha - 1.0) + f * (beta - alpha + 2.0);
            let y = 0.5 + 1.5 * ((3 * k) % count) as f64 / count as f64;
            Complex64::new(x, y)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub cases: usize,
    pub tol: f64,
    /// Steps per unit time for the composed route in the dual-method check.
    pub dual_steps: usize,
    /// Steps for the maps fed to the capacity, Schwarz and bound checks.
    pub map_steps: usize,
    pub boundary_samples: usize,
    pub semigroup_triples: usize,
    /// Test hook: flips the sign in the Laurent capacity check.
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            cases: 10,
            tol: 1e-9,
            dual_steps: 10_000,
            map_steps: 1000,
            boundary_samples: 2000,
            semigroup_triples: 10,
            inject_fault: false,
        }
    }
}

/// One row of the residual table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub max_residual: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passes(&self) -> bool {
        self.max_residual <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub cases: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(Check::passes)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<22} {:>13} {:>13}  status",
            "check", "max residual", "threshold"
        );
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<22} {:>13.3e} {:>13.3e}  {}",
                c.name,
                c.max_residual,
                c.threshold,
                if c.passes() { "ok" } else { "FAIL" }
            );
        }
        let _ = writeln!(
            s,
            "verdict: {} (seed {}, {} cases)",
            if self.passes() { "PASS" } else { "FAIL" },
            self.seed,
            self.cases
        );
        s
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct CaseResiduals {
    dual: f64,
    semigroup: f64,
    laurent: f64,
    boundary: f64,
    schwarz: f64,
    bounds: f64,
    area: f64,
    area_slit: f64,
    monotone: f64,
}

impl CaseResiduals {
    fn merge(self, o: CaseResiduals) -> CaseResiduals {
        CaseResiduals {
            dual: self.dual.max(o.dual),
            semigroup: self.semigroup.max(o.semigroup),
            laurent: self.laurent.max(o.laurent),
            boundary: self.boundary.max(o.boundary),
            schwarz: self.schwarz.max(o.schwarz),
            bounds: self.bounds.max(o.bounds),
            area: self.area.max(o.area),
            area_slit: self.area_slit.max(o.area_slit),
            monotone: self.monotone.max(o.monotone),
        }
    }
}

/// Laurent estimation radius comfortably outside the hull of `flow`.
pub fn laurent_radius(flow: &FlowMap) -> f64 {
    let reach = flow
        .hull_points()
        .iter()
        .map(|p| p.norm())
        .fold(0.0, f64::max);
    let support = flow.support().map_or(0.0, |(a, b)| a.abs().max(b.abs()));
    (8.0 * reach.max(support)).max(100.0)
}

fn run_case(cfg: &VerifyConfig, case: usize) -> Result<CaseResiduals> {
    let mut rng = case_rng(cfg.seed, case);
    let drive = random_drive(&mut rng, 8, 1.0, 2.0, Speed::One)?;
    let a = drive.speed().factor();
    let mut r = CaseResiduals::default();

    let composed = flow_composed(&drive, 0.0, 1.0, cfg.dual_steps)?;
    for z in interior_grid() {
        let ode = flow_ode(&drive, 0.0, 1.0, z, cfg.tol)?;
        let cmp = composed.apply(z);
        r.dual = r.dual.max((ode - cmp).norm());
        r.monotone = r.monotone.max(z.im - ode.im).max(z.im - cmp.im);
    }

    for _ in 0..cfg.semigroup_triples {
        let mut st = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        st.sort_by(f64::total_cmp);
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.2..2.5));
        let direct = flow_ode(&drive, st[0], st[2], z, cfg.tol)?;
        let mid = flow_ode(&drive, st[0], st[1], z, cfg.tol)?;
        let chained = flow_ode(&drive, st[1], st[2], mid, cfg.tol)?;
        r.semigroup = r.semigroup.max((direct - chained).norm());
    }

    let (s, t) = random_interval(&mut rng, 1.0, 0.1);
    let flow = flow_composed(&drive, s, t, cfg.map_steps)?;
    let span = a * (t - s);

    let est = estimate_laurent(|z| flow.apply(z), laurent_radius(&flow), 4)?;
    let expected = if cfg.inject_fault { span } else { -span };
    r.laurent = (est.c1 - expected).abs();

    let trace = BoundaryImTrace::from_flow_with(&flow, cfg.boundary_samples, Execution::Sequential)?;
    r.boundary = (capacity_from_boundary(&trace)?.value - span).abs();
    let (alpha, beta) = trace.support();
    for z in probe_points(alpha, beta, 10) {
        let q = schwarz_reconstruct(&trace, z)?;
        r.schwarz = r.schwarz.max((q.value - (flow.apply(z) - z)).norm());
        r.monotone = r.monotone.max(z.im - flow.apply(z).im);
    }

    let report = omitted_set_bounds_check(&flow, BOUND_SLACK)?;
    r.bounds = report.worst_ratio();
    let mid = 0.5 * (alpha + beta);
    let half = 0.5 * (beta - alpha);
    for rescale in [
        SigmaRescale::Disk { center: mid, radius: half },
        SigmaRescale::Joukowski,
    ] {
        let e = class_sigma_estimate(&flow, rescale, AREA_TERMS, 1024)?;
        r.area = r.area.max(area_theorem_check(&e));
    }

    let step = SlitStep::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.01..1.0), Speed::One)?;
    let single = FlowMap::from_steps(vec![step], 0.0, Speed::One)?;
    let e = class_sigma_estimate(&single, SigmaRescale::Joukowski, AREA_TERMS, 1024)?;
    r.area_slit = (area_theorem_check(&e) - 1.0).abs();
    Ok(r)
}

/// Runs the suite with the default execution strategy.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    run_with(cfg, Execution::default())
}

pub fn run_with(cfg: &VerifyConfig, exec: Execution) -> Result<VerifyReport> {
    if cfg.cases == 0 {
        return Err(LoewnerError::InvalidArgument("cases must be >= 1".into()));
    }
    let results = exec.map_range(cfg.cases, |i| run_case(cfg, i));
    let mut total = CaseResiduals::default();
    for r in results {
        total = total.merge(r?);
    }
    let checks = vec![
        Check { name: "dual_method", max_residual: total.dual, threshold: 1e-6 },
        Check { name: "semigroup", max_residual: total.semigroup, threshold: 1e-5 },
        Check { name: "capacity_laurent", max_residual: total.laurent, threshold: 1e-3 },
        Check { name: "capacity_boundary", max_residual: total.boundary, threshold: 1e-3 },
        Check { name: "schwarz_reconstruct", max_residual: total.schwarz, threshold: 1e-4 },
        Check { name: "gft_bounds_ratio", max_residual: total.bounds, threshold: 1.0 + BOUND_SLACK },
        Check { name: "area_sum", max_residual: total.area, threshold: 1.0 + 1e-3 },
        Check { name: "area_slit_equality", max_residual: total.area_slit, threshold: 1e-3 },
        Check { name: "monotone_im", max_residual: total.monotone, threshold: 0.0 },
    ];
    Ok(VerifyReport {
        seed: cfg.seed,
        cases: cfg.cases,
        checks,
    })
}
