//! Fibers of the logarithmic Gauss map over single directions.
//!
//! The fiber over [u : v] ∈ ℂP¹ is the solution set of
//! {f = 0, pencil_member(f, [u:v]) = 0} on the torus: generically
//! vol(Δ) simple points. Solutions are produced by elimination plus a
//! certified Newton polish; points are compared in the Fubini–Study
//! metric of the support-monomial embedding, which is scale-aware and
//! stays meaningful as points drift toward the toric boundary.

use crate::config::Tolerances;
use crate::error::{CoreError, Result};
use crate::loggauss::{pencil_member, ProjPoint};
use crate::newton::refine_system;
use crate::polyarith::resultant::{eliminant, Var};
use crate::polyarith::{cpow, BivariateLaurent, UnivariatePoly};
use num_complex::Complex64;

/// The support-monomial embedding (ℂ*)² → ℂP^{k−1},
/// (z, w) ↦ [z^{a₁}w^{b₁} : … : z^{a_k}w^{b_k}] over the support of a
/// fixed polynomial, with the Fubini–Study chordal metric.
#[derive(Debug, Clone)]
pub struct Embedding {
    support: Vec<(i64, i64)>,
}

impl Embedding {
    pub fn new(f: &BivariateLaurent) -> Self {
        Embedding {
            support: f.support(),
        }
    }

    /// Unit-normalized monomial vector at (z, w).
    pub fn embed(&self, z: Complex64, w: Complex64) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self
            .support
            .iter()
            .map(|&(a, b)| cpow(z, a) * cpow(w, b))
            .collect();
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 && n.is_finite() {
            for c in v.iter_mut() {
                *c /= n;
            }
        }
        v
    }

    /// sin of the Fubini–Study angle between two embedded points:
    /// √(1 − |⟨x, y⟩|²) for unit vectors.
    pub fn dist(x: &[Complex64], y: &[Complex64]) -> f64 {
        let ip: Complex64 = x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum();
        let n = ip.norm();
        (1.0 - n * n).max(0.0).sqrt()
    }

    pub fn point_dist(&self, p: (Complex64, Complex64), q: (Complex64, Complex64)) -> f64 {
        Self::dist(&self.embed(p.0, p.1), &self.embed(q.0, q.1))
    }
}

/// Diagnostics accumulated during a raw fiber solve.
#[derive(Debug, Clone, Copy, Default)]
pub struct FiberDiagnostics {
    /// A candidate fell outside the torus annulus [1/R, R].
    pub escaped: bool,
    /// Two refined points merged under the dedup radius; the smallest
    /// distance that was merged.
    pub merged_distance: Option<f64>,
    /// A Newton refinement failed to certify.
    pub refine_failures: usize,
}

/// Solves the fiber system without cardinality enforcement. `None` when
/// elimination itself degenerates (zero pencil or shared component);
/// otherwise all certified, deduplicated torus solutions plus
/// diagnostics. This is the workhorse for monodromy tracking and contour
/// rendering, which have their own cardinality policies.
pub fn fiber_points_raw(
    f: &BivariateLaurent,
    dir: &ProjPoint,
    emb: &Embedding,
    tol: &Tolerances,
) -> Option<(Vec<(Complex64, Complex64)>, FiberDiagnostics)> {
    let pencil = pencil_member(f, dir);
    if pencil.is_zero() {
        return None;
    }
    let elim = match eliminant(f, &pencil, Var::W, tol) {
        Ok(e) => e,
        Err(_) => return None,
    };
    let mut diag = FiberDiagnostics::default();
    let r_escape = tol.escape_radius;
    let Ok(z_roots) = elim.roots(tol) else {
        return Some((vec![], diag));
    };
    let (fs, _) = f.shifted_nonnegative();
    let mut pts: Vec<(Complex64, Complex64)> = Vec::new();
    let mut embeds: Vec<Vec<Complex64>> = Vec::new();
    for zr in &z_roots.roots {
        let z0 = zr.value;
        if z0.norm() < 1.0 / r_escape || z0.norm() > r_escape {
            diag.escaped = true;
            continue;
        }
        let wpoly = UnivariatePoly::trimmed_relative(fs.coeffs_in_w(z0), 1e-14);
        if wpoly.is_zero() || wpoly.degree() == 0 {
            continue;
        }
        let Ok(w_roots) = wpoly.roots(tol) else {
            diag.refine_failures += 1;
            continue;
        };
        for wr in &w_roots.roots {
            let w0 = wr.value;
            if w0.norm() < 1.0 / r_escape || w0.norm() > r_escape {
                diag.escaped = true;
                continue;
            }
            let refined = refine_system(
                f,
                &pencil,
                z0,
                w0,
                f64::INFINITY,
                tol.fiber_residual,
                60,
            );
            if !refined.accepted {
                diag.refine_failures += 1;
                continue;
            }
            let (z1, w1) = (refined.z, refined.w);
            if z1.norm() < 1.0 / r_escape
                || z1.norm() > r_escape
                || w1.norm() < 1.0 / r_escape
                || w1.norm() > r_escape
            {
                diag.escaped = true;
                continue;
            }
            let e = emb.embed(z1, w1);
            let mut merged = false;
            for prev in &embeds {
                let d = Embedding::dist(&e, prev);
                if d < tol.fiber_dedup {
                    diag.merged_distance = Some(match diag.merged_distance {
                        Some(m) => m.min(d),
                        None => d,
                    });
                    merged = true;
                    break;
                }
            }
            if !merged {
                pts.push((z1, w1));
                embeds.push(e);
            }
        }
    }
    Some((pts, diag))
}

/// Smallest pairwise embedded distance within a fiber (∞ for fibers of
/// fewer than two points).
pub fn min_separation(emb: &Embedding, fiber: &[(Complex64, Complex64)]) -> f64 {
    let es: Vec<Vec<Complex64>> = fiber.iter().map(|&(z, w)| emb.embed(z, w)).collect();
    min_separation_embedded(&es)
}

pub(crate) fn min_separation_embedded(es: &[Vec<Complex64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..es.len() {
        for j in (i + 1)..es.len() {
            best = best.min(Embedding::dist(&es[i], &es[j]));
        }
    }
    best
}

/// The fiber of the logarithmic Gauss map over direction `d`: exactly
/// vol(Δ) certified simple torus solutions of {f = 0, P_d = 0}.
///
/// Errors:
/// - `FiberEscape` when solutions run to the toric boundary (boundary
///   directions, e.g. primitive edge directions of Δ for real `d`);
/// - `FiberNearBranch` when two solutions approach within the collision
///   threshold (direction too close to a branch value);
/// - `IdenticallyZeroResultant` when the pencil member degenerates (γ
///   constant along `d`);
/// - `NonConvergence` when refinement fails without a structural reason.
pub fn fiber(
    f: &BivariateLaurent,
    d: &ProjPoint,
    tol: &Tolerances,
) -> Result<Vec<(Complex64, Complex64)>> {
    let polygon = f.newton_polygon()?;
    if polygon.dimension() < 2 {
        return Err(CoreError::IdenticallyZeroResultant);
    }
    let vol = polygon.invariants()?.vol as usize;
    let emb = Embedding::new(f);
    let Some((pts, diag)) = fiber_points_raw(f, d, &emb, tol) else {
        return Err(CoreError::IdenticallyZeroResultant);
    };

    if pts.len() == vol {
        let sep = min_separation(&emb, &pts);
        if sep < tol.collision_threshold {
            return Err(CoreError::FiberNearBranch { separation: sep });
        }
        return Ok(pts);
    }
    if pts.len() < vol {
        if diag.escaped {
            return Err(CoreError::FiberEscape {
                radius: tol.escape_radius,
            });
        }
        if let Some(d0) = diag.merged_distance {
            return Err(CoreError::FiberNearBranch { separation: d0 });
        }
        return Err(CoreError::NonConvergence {
            iterations: 60,
            worst_residual: f64::NAN,
        });
    }
    Err(CoreError::InvalidInput(format!(
        "fiber over the given direction has {} certified points but the polygon volume is {}",
        pts.len(),
        vol
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn line() -> BivariateLaurent {
        BivariateLaurent::from_terms([
            ((0, 0), c(1.0, 0.0)),
            ((1, 0), c(1.0, 0.0)),
            ((0, 1), c(1.0, 0.0)),
        ])
    }

    fn quad(alpha: Complex64) -> BivariateLaurent {
        BivariateLaurent::from_terms([
            ((0, 0), c(1.0, 0.0)),
            ((1, 0), c(1.0, 0.0)),
            ((0, 1), c(1.0, 0.0)),
            ((1, 1), alpha),
        ])
    }

    #[test]
    fn embedding_distance_separates_and_vanishes() {
        let f = quad(c(1.0, 0.0));
        let emb = Embedding::new(&f);
        let p = (c(0.5, 0.2), c(-1.0, 0.3));
        let q = (c(0.5, 0.2), c(-1.0, 0.3));
        assert!(emb.point_dist(p, q) < 1e-15);
        let r = (c(2.0, 0.0), c(0.1, 0.0));
        assert!(emb.point_dist(p, r) > 1e-2);
    }

    #[test]
    fn fiber_of_line_at_interior_direction() {
        // {1+z+w = 0, 2z − w = 0} → z = −1/3, w = −2/3.
        let tol = Tolerances::default();
        let d = ProjPoint::new(c(1.0, 0.0), c(2.0, 0.0));
        let pts = fiber(&line(), &d, &tol).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].0 - c(-1.0 / 3.0, 0.0)).norm() < 1e-10);
        assert!((pts[0].1 - c(-2.0 / 3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn fiber_of_line_escapes_at_edge_direction() {
        // [0:1] is a primitive edge direction of the triangle: the fiber
        // point sits on the toric boundary.
        let tol = Tolerances::default();
        let d = ProjPoint::new(c(0.0, 0.0), c(1.0, 0.0));
        match fiber(&line(), &d, &tol) {
            Err(CoreError::FiberEscape { .. }) => {}
            other => panic!("expected FiberEscape, got {other:?}"),
        }
    }

    #[test]
    fn fiber_of_quad_on_diagonal_direction() {
        // {f = 0, z − w = 0} on 1+z+w+4zw → 4z² + 2z + 1 = 0,
        // z = (−1 ± i√3)/4.
        let tol = Tolerances::default();
        let f = quad(c(4.0, 0.0));
        let d = ProjPoint::new(c(1.0, 0.0), c(1.0, 0.0));
        let pts = fiber(&f, &d, &tol).unwrap();
        assert_eq!(pts.len(), 2);
        let s3 = 3.0f64.sqrt();
        let targets = [c(-0.25, s3 / 4.0), c(-0.25, -s3 / 4.0)];
        for t in targets {
            assert!(
                pts.iter().any(|&(z, w)| (z - t).norm() < 1e-9 && (w - t).norm() < 1e-9),
                "missing root {t}"
            );
        }
        // Certification: both defining equations have small relative
        // residuals at every returned point.
        let pencil = pencil_member(&f, &d);
        for &(z, w) in &pts {
            assert!(f.relative_residual(z, w) <= tol.fiber_residual);
            assert!(pencil.relative_residual(z, w) <= tol.fiber_residual);
        }
    }

    #[test]
    fn fiber_offers_conjugation_symmetry_for_real_curves() {
        // Real coefficients: conjugation maps the fiber over [u : v]
        // onto the fiber over [ū : v̄]. A real direction is fixed by
        // conjugation, so its fiber must be self-conjugate.
        let tol = Tolerances::default();
        let f = quad(c(-1.0, 0.0));
        let emb = Embedding::new(&f);
        let da = ProjPoint::new(c(1.0, 0.0), c(0.3, 0.4));
        let db = ProjPoint::new(c(1.0, 0.0), c(0.3, -0.4));
        let fa = fiber(&f, &da, &tol).unwrap();
        let fb = fiber(&f, &db, &tol).unwrap();
        assert_eq!(fa.len(), fb.len());
        for &(z, w) in &fa {
            let conj = (z.conj(), w.conj());
            assert!(
                fb.iter().any(|&q| emb.point_dist(conj, q) < 1e-7),
                "conjugate of ({z}, {w}) missing"
            );
        }
        let dr = ProjPoint::from_angle(0.37);
        let fr = fiber(&f, &dr, &tol).unwrap();
        for &(z, w) in &fr {
            let conj = (z.conj(), w.conj());
            assert!(
                fr.iter().any(|&q| emb.point_dist(conj, q) < 1e-7),
                "self-conjugate partner of ({z}, {w}) missing"
            );
        }
    }

    #[test]
    fn binomial_fiber_refused() {
        let tol = Tolerances::default();
        let b = BivariateLaurent::from_terms([((1, 1), c(1.0, 0.0)), ((0, 0), c(-1.0, 0.0))]);
        assert!(matches!(
            fiber(&b, &ProjPoint::from_affine(c(2.0, 0.0)), &tol),
            Err(CoreError::IdenticallyZeroResultant)
        ));
    }
}
