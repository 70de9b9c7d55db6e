//! Damped Newton refinement for 2×2 bivariate systems in logarithmic
//! coordinates.
//!
//! Working multiplicatively — updating `z ← z·e^{−δ}` rather than
//! `z ← z − δ` — keeps iterates on the torus by construction and makes
//! the step size scale-free, which matters because curve coordinates in
//! this library legitimately span many orders of magnitude.

use crate::polyarith::BivariateLaurent;
use num_complex::Complex64;

/// Outcome of a refinement attempt.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Refined {
    pub z: Complex64,
    pub w: Complex64,
    /// Relative size of the final Newton step.
    pub last_step: f64,
    /// Worst relative residual of the two equations at the final iterate.
    pub residual: f64,
    /// Whether the acceptance thresholds were met.
    pub accepted: bool,
}

/// Refines a root of the system {f = 0, g = 0} from (z0, w0), damping
/// steps to at most `max_step` in log coordinates. Acceptance requires the
/// last step below `step_tol` and both relative residuals below `res_tol`.
pub(crate) fn refine_system(
    f: &BivariateLaurent,
    g: &BivariateLaurent,
    z0: Complex64,
    w0: Complex64,
    step_tol: f64,
    res_tol: f64,
    max_iter: usize,
) -> Refined {
    let fz = f.d_dz();
    let fw = f.d_dw();
    let gz = g.d_dz();
    let gw = g.d_dw();
    let max_step = 2.0;

    let mut z = z0;
    let mut w = w0;
    let mut last_step = f64::INFINITY;
    for _ in 0..max_iter {
        let fv = f.eval_unchecked(z, w);
        let gv = g.eval_unchecked(z, w);
        // Logarithmic Jacobian [[z f_z, w f_w], [z g_z, w g_w]].
        let a = z * fz.eval_unchecked(z, w);
        let b = w * fw.eval_unchecked(z, w);
        let c = z * gz.eval_unchecked(z, w);
        let d = w * gw.eval_unchecked(z, w);
        let det = a * d - b * c;
        if det.norm() < 1e-300 {
            return Refined {
                z,
                w,
                last_step,
                residual: f64::INFINITY,
                accepted: false,
            };
        }
        let mut dz = (d * fv - b * gv) / det;
        let mut dw = (-c * fv + a * gv) / det;
        let m = dz.norm().max(dw.norm());
        if m > max_step {
            let s = max_step / m;
            dz *= s;
            dw *= s;
        }
        z *= (-dz).exp();
        w *= (-dw).exp();
        last_step = dz.norm().max(dw.norm());
        // Hard stop once the iterate stops moving at double precision;
        // acceptance thresholds are judged separately below.
        if last_step < 1e-13 {
            break;
        }
    }
    if !(z.norm().is_finite() && w.norm().is_finite()) {
        return Refined {
            z,
            w,
            last_step,
            residual: f64::INFINITY,
            accepted: false,
        };
    }
    let rf = f.relative_residual(z, w);
    let rg = g.relative_residual(z, w);
    let residual = rf.max(rg);
    Refined {
        z,
        w,
        last_step,
        residual,
        accepted: last_step < step_tol && residual < res_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn refines_intersection_of_line_and_hyperbola() {
        // {1 + z + w = 0, zw - 2 = 0}: z + w = -1, zw = 2 → z,w roots of
        // t² + t + 2 = 0 → t = (-1 ± i√7)/2.
        let f = BivariateLaurent::from_terms([
            ((0, 0), c(1.0, 0.0)),
            ((1, 0), c(1.0, 0.0)),
            ((0, 1), c(1.0, 0.0)),
        ]);
        let g = BivariateLaurent::from_terms([((1, 1), c(1.0, 0.0)), ((0, 0), c(-2.0, 0.0))]);
        let s7 = 7.0f64.sqrt();
        let exact_z = c(-0.5, s7 / 2.0);
        let exact_w = c(-0.5, -s7 / 2.0);
        let r = refine_system(
            &f,
            &g,
            exact_z + c(0.03, -0.02),
            exact_w + c(-0.01, 0.04),
            1e-9,
            1e-11,
            60,
        );
        assert!(r.accepted);
        assert!((r.z - exact_z).norm() < 1e-9);
        assert!((r.w - exact_w).norm() < 1e-9);
    }

    #[test]
    fn reports_failure_far_from_any_root() {
        let f = BivariateLaurent::from_terms([((0, 0), c(1.0, 0.0)), ((1, 0), c(1.0, 0.0))]);
        // g has no common zero with f on the torus: f = 1+z → z = -1;
        // g = z - 1 → z = 1.
        let g = BivariateLaurent::from_terms([((1, 0), c(1.0, 0.0)), ((0, 0), c(-1.0, 0.0))]);
        let r = refine_system(&f, &g, c(0.4, 0.2), c(1.0, 0.0), 1e-9, 1e-11, 40);
        assert!(!r.accepted);
    }
}
