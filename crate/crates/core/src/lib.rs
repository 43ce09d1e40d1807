//! Numerical chordal Loewner evolution in the upper half-plane.
//!
//! The forward direction turns a driving function into flow maps and a slit
//! trace, either by adaptive integration of the Loewner ODE or by composing
//! exact vertical-slit maps. The inverse direction recovers a driving function
//! from a slit with the zipper. Around both sit the Schwarz reconstruction
//! from boundary data, capacity identities, and the area and diameter
//! bounds for normalized slit maps.

// `!(x > 0.0)` style guards are used so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod exec;
pub mod forward;
pub mod gft;
pub mod halfplane;
pub mod io;
pub mod plot;
pub mod schwarz;
pub mod verify;
pub mod zipper;

pub use error::{LoewnerError, Result};
pub use exec::Execution;
pub use forward::{
    compute_trace, compute_trace_with, flow_composed, flow_ode, hull_support, DrivingFunction,
    Interpolation, Trace,
};
pub use gft::{
    area_theorem_check, class_sigma_estimate, omitted_set_bounds_check, BoundsReport, SigmaRescale,
};
pub use halfplane::{
    estimate_laurent, FlowMap, HalfPlanePoint, LaurentEstimate, Side, SlitPolyline, SlitStep, Speed,
};
pub use schwarz::{
    capacity_from_boundary, schwarz_reconstruct, time_span_from_boundary, BoundaryImTrace,
    Quadrature,
};
pub use zipper::{refine_polyline, total_capacity, unzip, unzip_with, StandardParametrization};
