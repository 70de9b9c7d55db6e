//! All numerical tolerances and tracking constants in one place.
//!
//! Every threshold the pipeline uses is named here, serializable, and
//! overridable; nothing numeric is buried in call sites. The defaults are
//! the values validated end-to-end on the reference examples (double
//! precision throughout).

use serde::{Deserialize, Serialize};

/// Named tolerances threaded through the whole pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative residual below which a point counts as lying on a curve.
    pub on_curve: f64,
    /// Distance to RP¹ below which a projective point counts as real.
    pub projective_real: f64,
    /// Relative clustering radius for merging univariate roots into
    /// multiplicities.
    pub root_cluster: f64,
    /// Convergence threshold for the simultaneous root finder (relative
    /// step size).
    pub root_step: f64,
    /// Maximum iterations of the simultaneous root finder.
    pub root_max_iter: usize,
    /// Root acceptance bound: |p(r)| must not exceed this times
    /// ‖p‖₁·max(1,|r|)^deg.
    pub root_residual: f64,
    /// Relative trim threshold for trailing interpolated eliminant
    /// coefficients.
    pub eliminant_trim: f64,
    /// Threshold under which an interpolated eliminant counts as
    /// identically zero.
    pub eliminant_zero: f64,
    /// Newton acceptance for critical points: last step must fall below
    /// this (absolute, log coordinates).
    pub critical_step: f64,
    /// Newton acceptance for critical points: relative residuals of both
    /// equations must fall below this.
    pub critical_residual: f64,
    /// Relative residual acceptance for fiber-point refinement.
    pub fiber_residual: f64,
    /// Escape radius: fiber points with |z| or |w| outside [1/R, R] are
    /// treated as boundary solutions and discarded.
    pub escape_radius: f64,
    /// Fubini–Study distance under which two refined fiber points are the
    /// same point.
    pub fiber_dedup: f64,
    /// Minimum pairwise separation required of a starting fiber.
    pub start_separation: f64,
    /// Movement-to-separation ratio accepted by the continuation gate.
    pub tracking_gate: f64,
    /// Maximum bisection depth of the continuation flow.
    pub tracking_max_depth: usize,
    /// Angular floor below which bisection gives up (radians).
    pub tracking_floor: f64,
    /// Default number of direction steps over the half-turn.
    pub tracking_steps: usize,
    /// Starting direction angle (radians); nudged if the fiber there is
    /// poorly separated.
    pub tracking_theta0: f64,
    /// Offsets (radians) tried on each side of an edge-direction crossing,
    /// largest first. The first entry is capped at a third of the step.
    pub crossing_deltas: Vec<f64>,
    /// Minimum pairwise fiber separation: FiberNearBranch below this.
    pub collision_threshold: f64,
    /// Multiplicity clustering radius for branch values (chordal metric on
    /// CP¹).
    pub divisor_cluster: f64,
    /// Relative scale of the arrangement smoothing term at the nodes.
    /// Too small and the smoothed curve sits so close to the nodal limit
    /// that the eliminant cannot certify its resultant as nonzero in
    /// double precision; too large and the component count leaves the
    /// near-nodal regime. The verification ladder also tries 3× and 10×
    /// this value, taking the smallest rung that yields a count.
    pub smoothing_relative: f64,
    /// Retry budget for arrangement construction.
    pub arrangement_retries: usize,
    /// Default amoeba/contour sample verification residual.
    pub render_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            on_curve: 1e-8,
            projective_real: 1e-9,
            root_cluster: 1e-6,
            root_step: 1e-13,
            root_max_iter: 120,
            root_residual: 1e-9,
            eliminant_trim: 1e-12,
            eliminant_zero: 1e-10,
            critical_step: 1e-7,
            critical_residual: 1e-9,
            fiber_residual: 1e-8,
            escape_radius: 1e9,
            fiber_dedup: 5e-8,
            start_separation: 1e-3,
            tracking_gate: 0.45,
            tracking_max_depth: 48,
            tracking_floor: 1e-11,
            tracking_steps: 720,
            tracking_theta0: 0.1307,
            crossing_deltas: vec![1e-3, 2.5e-4, 6e-5, 1.5e-5, 4e-6, 1e-6],
            collision_threshold: 1e-7,
            divisor_cluster: 1e-6,
            smoothing_relative: 3e-4,
            arrangement_retries: 64,
            render_residual: 1e-8,
        }
    }
}

impl Tolerances {
    /// Override a named tolerance. Returns false if the name is unknown or
    /// the value is not strictly positive (steps/iterations require >= 1).
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        if !(value > 0.0) {
            return false;
        }
        match name {
            "on_curve" => self.on_curve = value,
            "projective_real" => self.projective_real = value,
            "root_cluster" => self.root_cluster = value,
            "root_step" => self.root_step = value,
            "root_max_iter" => self.root_max_iter = value as usize,
            "root_residual" => self.root_residual = value,
            "eliminant_trim" => self.eliminant_trim = value,
            "eliminant_zero" => self.eliminant_zero = value,
            "critical_step" => self.critical_step = value,
            "critical_residual" => self.critical_residual = value,
            "fiber_residual" => self.fiber_residual = value,
            "escape_radius" => self.escape_radius = value,
            "fiber_dedup" => self.fiber_dedup = value,
            "start_separation" => self.start_separation = value,
            "tracking_gate" => self.tracking_gate = value,
            "tracking_max_depth" => self.tracking_max_depth = value as usize,
            "tracking_floor" => self.tracking_floor = value,
            "tracking_steps" => self.tracking_steps = value as usize,
            "tracking_theta0" => self.tracking_theta0 = value,
            "collision_threshold" => self.collision_threshold = value,
            "divisor_cluster" => self.divisor_cluster = value,
            "smoothing_relative" => self.smoothing_relative = value,
            "arrangement_retries" => self.arrangement_retries = value as usize,
            "render_residual" => self.render_residual = value,
            _ => return false,
        }
        true
    }
}
