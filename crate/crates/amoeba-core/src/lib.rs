//! Numerical geometry of plane curves in toric surfaces through the
//! logarithmic Gauss map.
//!
//! Given a curve `V(f) ⊂ (ℂ*)²` presented by a bivariate Laurent
//! polynomial, this crate computes:
//!
//! - lattice invariants of the Newton polygon (normalized volume, interior
//!   and boundary point counts, the branching degree of the logarithmic
//!   Gauss map) — [`lattice`];
//! - the critical locus of the logarithmic Gauss map and the branching
//!   divisor it cuts on the projective line — [`loggauss`], [`lyashko`];
//! - membership of the curve in the discriminantal family (curves whose
//!   branching divisor touches the real line) — [`critlocus`];
//! - the number of connected components of the real-valued critical
//!   locus by numerical monodromy of fibers — [`critlocus`];
//! - branching divisors of nodal curves (unions of lines, binomial
//!   components) through closed forms and degeneration counts —
//!   [`nodal`];
//! - amoeba and contour raster images as deterministic SVG —
//!   [`amoeba`].
//!
//! # Design rules
//!
//! Every numerical answer is *certified or refused*: root finding checks
//! coefficient-scaled residual bounds, curve membership checks relative
//! residuals, monodromy tracking gates every step on a
//! movement-versus-separation ratio and reports a structured error rather
//! than returning a count it cannot vouch for. All iteration orders are
//! deterministic, and randomized constructions take explicit seeds.

pub mod amoeba;
pub mod config;
pub mod critlocus;
pub mod error;
pub mod lattice;
pub mod loggauss;
pub mod lyashko;
mod newton;
pub mod nodal;
pub mod polyarith;

pub use amoeba::{
    emit_svg, render_amoeba, render_contour, svg_string, AmoebaImage, AmoebaSample, SampleKind,
    SkippedDirection, Window,
};
pub use config::Tolerances;
pub use critlocus::{
    fiber, is_discriminantal, monodromy_b0, scan_family, FiberTrack, MonodromyResult, ScanCell,
    ScanResult,
};
pub use error::{CoreError, Result};
pub use lattice::{LatticePolygon, PolygonInvariants};
pub use loggauss::{
    critical_points, gauss, pencil_member, ramification_poly, CriticalPoint, CriticalPointSet,
    ProjPoint,
};
pub use lyashko::{
    divisor_distance, ll_binary_form, ll_divisor, BinaryForm, DivisorCP1, DivisorEntry,
};
pub use nodal::{
    arrangement_nodes, construct_arrangement, extended_ll, line_intersection_data, predicted_b0,
    sigma_sign, sign_matrix_census, smooth_arrangement, verify_smoothing, CellCount, Component,
    FamilyParams, LineFamily, LineSpec, NodalCurve, NodeRecord, SmoothingReport,
};
pub use polyarith::{BivariateLaurent, RootSet, UnivariatePoly};
