//! The logarithmic Gauss map and its critical points.
//!
//! For a curve V(f) ⊂ (ℂ*)², the logarithmic Gauss map sends a smooth
//! point to the projective direction
//!
//! ```text
//!    γ(z, w) = [ z·∂f/∂z : w·∂f/∂w ] ∈ ℂP¹.
//! ```
//!
//! Its critical points on the curve — where γ restricted to V(f) ramifies
//! — form a finite set whose image is the branching divisor studied by
//! the rest of this library. The critical set is cut out on V(f) by one
//! polynomial equation, assembled here without choosing a chart on ℂP¹.

use crate::config::Tolerances;
use crate::error::{CoreError, Result};
use crate::newton::refine_system;
use crate::polyarith::resultant::{eliminant_auto, Var};
use crate::polyarith::{BivariateLaurent, UnivariatePoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of ℂP¹ stored as a normalized pair (u, v) with
/// max(|u|, |v|) = 1.
#[derive(Debug, Clone, Copy)]
pub struct ProjPoint {
    pub u: Complex64,
    pub v: Complex64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProjPointJson {
    u_re: f64,
    u_im: f64,
    v_re: f64,
    v_im: f64,
}

impl ProjPoint {
    /// Builds [u : v], rescaling so the larger coordinate has modulus 1.
    /// The zero pair is kept as-is and reports `is_valid() == false`.
    pub fn new(u: Complex64, v: Complex64) -> Self {
        let s = u.norm().max(v.norm());
        if s == 0.0 {
            return ProjPoint { u, v };
        }
        ProjPoint { u: u / s, v: v / s }
    }

    pub fn is_valid(&self) -> bool {
        self.u.norm().max(self.v.norm()) > 0.0
    }

    /// The point [1 : 0] (vertical direction).
    pub fn infinity() -> Self {
        ProjPoint {
            u: Complex64::new(1.0, 0.0),
            v: Complex64::new(0.0, 0.0),
        }
    }

    /// From an affine value t ↦ [t : 1].
    pub fn from_affine(t: Complex64) -> Self {
        ProjPoint::new(t, Complex64::new(1.0, 0.0))
    }

    /// From a real direction angle θ ↦ [cos θ : sin θ].
    pub fn from_angle(theta: f64) -> Self {
        ProjPoint::new(
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(theta.sin(), 0.0),
        )
    }

    /// Affine coordinate u/v, or None for points at (numerical) infinity.
    pub fn affine(&self) -> Option<Complex64> {
        if self.v.norm() <= 1e-14 {
            None
        } else {
            Some(self.u / self.v)
        }
    }

    /// Distance to the real locus RP¹ ⊂ ℂP¹:
    /// |Im(u·conj(v))| / (|u|² + |v|²). Zero exactly on real points
    /// (including [1:0]); bounded by 1/2.
    pub fn rp1_distance(&self) -> f64 {
        (self.u * self.v.conj()).im.abs() / (self.u.norm_sqr() + self.v.norm_sqr())
    }

    /// A point is (numerically) real when its RP¹ distance is within tol.
    pub fn is_real(&self, tol: f64) -> bool {
        self.rp1_distance() <= tol
    }

    /// Fubini–Study chordal distance between two projective points:
    /// |u₁v₂ − u₂v₁| / √((|u₁|²+|v₁|²)(|u₂|²+|v₂|²)). Ranges over [0, 1].
    pub fn chordal(&self, other: &ProjPoint) -> f64 {
        let num = (self.u * other.v - other.u * self.v).norm();
        let den = ((self.u.norm_sqr() + self.v.norm_sqr())
            * (other.u.norm_sqr() + other.v.norm_sqr()))
        .sqrt();
        if den == 0.0 {
            return 0.0;
        }
        num / den
    }

    pub fn projectively_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        self.chordal(other) <= tol
    }

    /// For a (numerically) real point, the angle θ ∈ [0, π) with
    /// [cos θ : sin θ] projectively equal to it. The inverse of
    /// [`ProjPoint::from_angle`]; [1 : 0] maps to 0.
    pub fn real_angle(&self) -> f64 {
        let t = if self.u.norm() >= self.v.norm() {
            (self.v / self.u).re.atan()
        } else {
            std::f64::consts::FRAC_PI_2 - (self.u / self.v).re.atan()
        };
        t.rem_euclid(std::f64::consts::PI)
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProjPointJson {
            u_re: self.u.re,
            u_im: self.u.im,
            v_re: self.v.re,
            v_im: self.v.im,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pj = ProjPointJson::deserialize(d)?;
        Ok(ProjPoint::new(
            Complex64::new(pj.u_re, pj.u_im),
            Complex64::new(pj.v_re, pj.v_im),
        ))
    }
}

/// Value of the logarithmic Gauss map at a torus point. Errors with
/// `GaussUndefined` when both logarithmic partials vanish relative to
/// their coefficient scales — i.e. at singular points of the curve.
pub fn gauss(f: &BivariateLaurent, z: Complex64, w: Complex64) -> Result<ProjPoint> {
    let fu = f.log_dz();
    let fv = f.log_dw();
    let u = fu.eval_unchecked(z, w);
    let v = fv.eval_unchecked(z, w);
    let su = fu.eval_scale(z, w);
    let sv = fv.eval_scale(z, w);
    let scale = su.max(sv);
    if scale == 0.0 || u.norm().max(v.norm()) <= 1e-12 * scale {
        return Err(CoreError::GaussUndefined {
            z: (z.re, z.im),
            w: (w.re, w.im),
        });
    }
    Ok(ProjPoint::new(u, v))
}

/// The pencil polynomial of direction [u : v]:
/// `v·(z·∂f/∂z) − u·(w·∂f/∂w)`. Its torus zeros on V(f) are exactly the
/// fiber γ̃⁻¹([u : v]). Degenerates to the zero polynomial when γ is
/// constant equal to [u : v] (binomials along their own direction).
pub fn pencil_member(f: &BivariateLaurent, dir: &ProjPoint) -> BivariateLaurent {
    f.log_dz().scale(dir.v).sub(&f.log_dw().scale(dir.u))
}

/// The ramification polynomial h of the logarithmic Gauss map: a single
/// bivariate polynomial whose intersection with V(f) is the critical
/// locus of γ̃ (for curves where γ is nonconstant).
///
/// With F = z·f_z and G = w·f_w, the map in the affine chart is F/G and
/// the critical-point condition det(∇f, ∇(F/G)) = 0 clears denominators
/// to h = f_z·(G·F_w − F·G_w) − f_w·(G·F_z − F·G_z). Identically zero
/// exactly when γ is constant on V(f) (support on a line segment).
pub fn ramification_poly(f: &BivariateLaurent) -> BivariateLaurent {
    let big_f = f.log_dz();
    let big_g = f.log_dw();
    let az = big_g.mul(&big_f.d_dz()).sub(&big_f.mul(&big_g.d_dz()));
    let aw = big_g.mul(&big_f.d_dw()).sub(&big_f.mul(&big_g.d_dw()));
    f.d_dz().mul(&aw).sub(&f.d_dw().mul(&az))
}

/// One critical point of the logarithmic Gauss map on V(f).
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub z: Complex64,
    pub w: Complex64,
    pub multiplicity: usize,
    /// γ(z, w), the branch value this point maps to.
    pub branch_value: ProjPoint,
}

/// The critical locus of γ̃ as a finite point set.
#[derive(Debug, Clone)]
pub struct CriticalPointSet {
    pub points: Vec<CriticalPoint>,
    /// Branching degree expected from the Newton polygon.
    pub expected_total: usize,
    /// Non-fatal diagnostics: multiplicity accounting that could not be
    /// reconciled, candidates dropped at singular curve points, etc.
    pub warnings: Vec<String>,
}

impl CriticalPointSet {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.multiplicity).sum()
    }
}

/// Computes the critical points of the logarithmic Gauss map on V(f).
///
/// The system {f = 0, h = 0} is solved by elimination: a univariate
/// eliminant for one coordinate, back-substitution for the other, then a
/// joint Newton polish in logarithmic coordinates. Every accepted point
/// is certified by relative residuals of both equations; candidates that
/// fail to converge are discarded (they arise from extraneous eliminant
/// factors). Input is internally rebalanced by a toric rescale for
/// conditioning and results are mapped back to the original coordinates.
///
/// Errors:
/// - `IdenticallyZeroResultant` when γ is constant on the curve
///   (binomials and other segment-support polynomials) so the critical
///   locus is not a finite set;
/// - propagated root-finder failures.
pub fn critical_points(f: &BivariateLaurent, tol: &Tolerances) -> Result<CriticalPointSet> {
    if f.is_zero() {
        return Err(CoreError::EmptyPolynomial);
    }
    let polygon = f.newton_polygon()?;
    let expected_total = if polygon.dimension() == 2 {
        polygon.branching_degree()?.max(0) as usize
    } else {
        0
    };

    let (fb, lam, mu) = f.balanced();
    let h = ramification_poly(&fb);
    if h.is_zero() {
        return Err(CoreError::IdenticallyZeroResultant);
    }

    let (elim, kept) = eliminant_auto(&fb, &h, tol)?;
    let kept_roots = elim.roots(tol)?;

    let mut found: Vec<(Complex64, Complex64)> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let r_escape = tol.escape_radius;

    for root in &kept_roots.roots {
        let t = root.value;
        if t.norm() > r_escape || t.norm() < 1.0 / r_escape {
            continue; // axis/boundary artifact of exponent shifting
        }
        // Back-substitute into f to get candidates for the other
        // coordinate.
        let (fs, _) = fb.shifted_nonnegative();
        let coeffs: Vec<Complex64> = match kept {
            Var::Z => fs.coeffs_in_w(t),
            Var::W => fs.coeffs_in_z(t),
        };
        let uni = UnivariatePoly::trimmed_relative(coeffs, 1e-14);
        if uni.is_zero() || uni.degree() == 0 {
            continue;
        }
        let Ok(other_roots) = uni.roots(tol) else {
            warnings.push(format!(
                "back-substitution solve did not converge at |t| = {:.3e}",
                t.norm()
            ));
            continue;
        };
        for or in &other_roots.roots {
            let s = or.value;
            if s.norm() > r_escape || s.norm() < 1.0 / r_escape {
                continue;
            }
            let (z0, w0) = match kept {
                Var::Z => (t, s),
                Var::W => (s, t),
            };
            let refined = refine_system(
                &fb,
                &h,
                z0,
                w0,
                tol.critical_step,
                tol.critical_residual,
                80,
            );
            if !refined.accepted {
                continue;
            }
            if refined.z.norm() > r_escape
                || refined.z.norm() < 1.0 / r_escape
                || refined.w.norm() > r_escape
                || refined.w.norm() < 1.0 / r_escape
            {
                continue;
            }
            found.push((refined.z, refined.w));
        }
    }

    // Deduplicate in coordinate space.
    let mut distinct: Vec<(Complex64, Complex64)> = Vec::new();
    for (z, w) in found {
        let dup = distinct.iter().any(|&(z1, w1)| {
            (z - z1).norm() + (w - w1).norm()
                <= tol.root_cluster * (1.0 + z.norm() + w.norm())
        });
        if !dup {
            distinct.push((z, w));
        }
    }

    // Map back to original coordinates and attach branch values.
    let lamc = Complex64::new(lam, 0.0);
    let muc = Complex64::new(mu, 0.0);
    let mut points: Vec<CriticalPoint> = Vec::new();
    for (zb, wb) in distinct {
        let (z, w) = (lamc * zb, muc * wb);
        match gauss(f, z, w) {
            Ok(value) => points.push(CriticalPoint {
                z,
                w,
                multiplicity: 1,
                branch_value: value,
            }),
            Err(_) => warnings.push(format!(
                "dropped candidate at singular curve point (|z| = {:.3e}, |w| = {:.3e})",
                z.norm(),
                w.norm()
            )),
        }
    }
    points.sort_by(|a, b| {
        (a.z.re, a.z.im, b.w.re)
            .partial_cmp(&(b.z.re, b.z.im, a.w.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let set = CriticalPointSet {
        points,
        expected_total,
        warnings,
    };
    let mut set = set;
    let total = set.total_multiplicity();
    if total != expected_total {
        set.warnings.push(format!(
            "total multiplicity mismatch: found {total}, polygon predicts {expected_total}"
        ));
    }
    Ok(set)
}
