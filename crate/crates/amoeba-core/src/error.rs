//! Typed errors shared across the library.
//!
//! Errors split into two families: *input/usage* errors (malformed data,
//! degenerate geometry) and *mathematical refusals* (the computation is
//! well-posed but the object genuinely obstructs it — a singular critical
//! locus, a constant Gauss map, an untrackable fiber). Callers that drive
//! exit codes can branch on [`CoreError::is_refusal`].

use thiserror::Error;

/// Every failure mode of the core pipeline.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// The zero polynomial has no Newton polygon.
    #[error("polynomial has no nonzero terms")]
    EmptyPolynomial,

    /// Newton polygon has dimension < 2 where 2 is required.
    #[error("Newton polygon is degenerate (dimension {dimension}): {context}")]
    DegeneratePolygon { dimension: u8, context: &'static str },

    /// Evaluation of a Laurent polynomial with negative exponents at a
    /// coordinate-axis point.
    #[error("cannot evaluate Laurent polynomial at z=0 or w=0 (negative exponents present)")]
    EvalAtTorusBoundary,

    /// Root finder exhausted its iteration budget; carries the worst
    /// per-root residual reached so callers can decide whether the best
    /// iterate is usable.
    #[error("root finder did not converge after {iterations} iterations (worst residual {worst_residual:.3e})")]
    NonConvergence { iterations: usize, worst_residual: f64 },

    /// Resultant vanished identically: the two polynomials share a factor,
    /// so the system is not zero-dimensional. For the ramification system
    /// this is the signature of a component with constant Gauss value.
    #[error("resultant is identically zero (common factor / constant Gauss value on a component)")]
    IdenticallyZeroResultant,

    /// Both logarithmic partials vanished at a claimed curve point — the
    /// point is singular on V(f), where the Gauss map has no value.
    #[error("Gauss map undefined at ({z:?}, {w:?}): both logarithmic partials vanish (singular point)")]
    GaussUndefined { z: (f64, f64), w: (f64, f64) },

    /// Divisors of different degrees cannot be compared.
    #[error("divisor degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    /// A branch value sits on RP¹ within the margin: S(f) is singular, so
    /// component counting is refused.
    #[error("critical locus is singular: a branch value lies on RP1 within margin {margin:.3e}")]
    SingularCriticalLocus { margin: f64 },

    /// Two tracked fiber paths could not be kept apart even after step
    /// refinement down to the angular floor.
    #[error("fiber tracking collision near direction angle {theta:.6} (stage: {stage})")]
    TrackingCollision { theta: f64, stage: &'static str },

    /// The direction swept across a primitive edge direction of the Newton
    /// polygon and the re-solve on both sides could not be matched.
    #[error("edge-direction crossing at angle {theta:.6} could not be resolved")]
    EdgeDirectionCrossing { theta: f64 },

    /// Two fiber points are closer than the collision threshold: the
    /// requested direction is too close to a branch value.
    #[error("fiber has two points within {separation:.3e} (direction too close to a branch value)")]
    FiberNearBranch { separation: f64 },

    /// A fiber point escaped toward the toric boundary.
    #[error("fiber point escaped toward the toric boundary (|z| or |w| outside [1/{radius:.1e}, {radius:.1e}])")]
    FiberEscape { radius: f64 },

    /// Two lines with ad − bc = 0 have no torus intersection point.
    #[error("lines are parallel (ad - bc = 0)")]
    ParallelLines,

    /// The intersection point of two lines has a vanishing coordinate.
    #[error("node lies on the torus boundary (a coordinate vanishes)")]
    NodeOnTorusBoundary,

    /// A node has sigma = 0 (a Gauss value on RP¹), so the component
    /// transition law does not apply.
    #[error("node sign is zero (Gauss value on RP1); b0 prediction invalid")]
    ZeroSignNode,

    /// Incidence data of a nodal curve is inconsistent.
    #[error("curve is not nodal / incidence data inconsistent: {context}")]
    NotNodal { context: String },

    /// Arrangement construction exhausted its retry budget without a draw
    /// whose verified signs match the request.
    #[error("sign verification failed for line pair ({i}, {j}) after {attempts} attempts")]
    SignVerificationFailed { i: usize, j: usize, attempts: usize },

    /// A requested arrangement (d, n) is outside 0 <= n <= d(d-1)/2.
    #[error("no arrangement of {d} lines can have {n} negative nodes (max {max})")]
    ArrangementOutOfRange { d: usize, n: usize, max: usize },

    /// Input validation failure (schema-level, not mathematical).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Filesystem failure while writing an artifact.
    #[error("i/o failure: {0}")]
    Io(String),
}

impl CoreError {
    /// True for errors meaning "the mathematics refuses" on well-formed
    /// input, as opposed to malformed input or an internal failure. CLI
    /// maps refusals to exit code 2.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            CoreError::SingularCriticalLocus { .. }
                | CoreError::IdenticallyZeroResultant
                | CoreError::TrackingCollision { .. }
                | CoreError::EdgeDirectionCrossing { .. }
                | CoreError::FiberNearBranch { .. }
                | CoreError::FiberEscape { .. }
                | CoreError::GaussUndefined { .. }
                | CoreError::ZeroSignNode
                | CoreError::SignVerificationFailed { .. }
                | CoreError::NonConvergence { .. }
        )
    }
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
