//! The branching divisor on ℂP¹ and its binary-form encoding.
//!
//! The multiset of branch values of the logarithmic Gauss map, counted
//! with multiplicity, is a degree-m divisor on ℂP¹; equivalently a point
//! of ℂP^m through the coefficients of the homogeneous binary form with
//! those roots. Both encodings are provided, with numeric comparison
//! utilities: optimal-matching distance between divisors and
//! phase-aligned relative distance between forms.

use crate::config::Tolerances;
use crate::error::{CoreError, Result};
use crate::loggauss::{critical_points, CriticalPointSet, ProjPoint};
use crate::polyarith::{BivariateLaurent, UnivariatePoly};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One entry of a divisor: a projective point with multiplicity ≥ 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorEntry {
    #[serde(flatten)]
    pub point: ProjPoint,
    pub mult: usize,
}

/// An effective divisor on ℂP¹: pairwise-distinct points with
/// multiplicities.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DivisorJson", into = "DivisorJson")]
pub struct DivisorCP1 {
    pub entries: Vec<DivisorEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DivisorJson {
    degree: usize,
    entries: Vec<DivisorEntryJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DivisorEntryJson {
    u_re: f64,
    u_im: f64,
    v_re: f64,
    v_im: f64,
    mult: usize,
}

impl From<DivisorCP1> for DivisorJson {
    fn from(d: DivisorCP1) -> Self {
        DivisorJson {
            degree: d.degree(),
            entries: d
                .entries
                .iter()
                .map(|e| DivisorEntryJson {
                    u_re: e.point.u.re,
                    u_im: e.point.u.im,
                    v_re: e.point.v.re,
                    v_im: e.point.v.im,
                    mult: e.mult,
                })
                .collect(),
        }
    }
}

impl TryFrom<DivisorJson> for DivisorCP1 {
    type Error = String;
    fn try_from(j: DivisorJson) -> std::result::Result<Self, String> {
        let entries: Vec<DivisorEntry> = j
            .entries
            .into_iter()
            .map(|e| DivisorEntry {
                point: ProjPoint::new(
                    Complex64::new(e.u_re, e.u_im),
                    Complex64::new(e.v_re, e.v_im),
                ),
                mult: e.mult,
            })
            .collect();
        if entries.iter().any(|e| e.mult == 0) {
            return Err("divisor entry with zero multiplicity".into());
        }
        if entries.iter().any(|e| !e.point.is_valid()) {
            return Err("divisor entry with the zero projective pair".into());
        }
        let d = DivisorCP1 { entries };
        if d.degree() != j.degree {
            return Err(format!(
                "declared degree {} does not match entry multiplicities {}",
                j.degree,
                d.degree()
            ));
        }
        Ok(d)
    }
}

impl DivisorCP1 {
    pub fn empty() -> Self {
        DivisorCP1 { entries: vec![] }
    }

    pub fn degree(&self) -> usize {
        self.entries.iter().map(|e| e.mult).sum()
    }

    /// Builds a divisor from a list of (not necessarily distinct) points,
    /// merging projectively-equal values within `cluster_tol` and summing
    /// multiplicities. Entries are sorted deterministically.
    pub fn from_points<I: IntoIterator<Item = ProjPoint>>(points: I, cluster_tol: f64) -> Self {
        let mut entries: Vec<DivisorEntry> = Vec::new();
        for p in points {
            match entries
                .iter_mut()
                .find(|e| e.point.projectively_eq(&p, cluster_tol))
            {
                Some(e) => e.mult += 1,
                None => entries.push(DivisorEntry { point: p, mult: 1 }),
            }
        }
        entries.sort_by(|a, b| {
            let ka = (a.point.u.re, a.point.u.im, a.point.v.re, a.point.v.im);
            let kb = (b.point.u.re, b.point.u.im, b.point.v.re, b.point.v.im);
            ka.partial_cmp(&kb).unwrap_or(std::cmp::Ordering::Equal)
        });
        DivisorCP1 { entries }
    }

    /// Points repeated by multiplicity.
    pub fn expanded(&self) -> Vec<ProjPoint> {
        let mut out = Vec::with_capacity(self.degree());
        for e in &self.entries {
            for _ in 0..e.mult {
                out.push(e.point);
            }
        }
        out
    }
}

/// A homogeneous binary form Σ c_k u^k v^{m−k}, stored by ascending k and
/// normalized so its first largest-modulus coefficient is exactly 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "BinaryFormJson", into = "BinaryFormJson")]
pub struct BinaryForm {
    coefficients: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BinaryFormJson {
    degree: usize,
    coefficients: Vec<(f64, f64)>,
}

impl From<BinaryForm> for BinaryFormJson {
    fn from(f: BinaryForm) -> Self {
        BinaryFormJson {
            degree: f.degree(),
            coefficients: f.coefficients.iter().map(|c| (c.re, c.im)).collect(),
        }
    }
}

impl TryFrom<BinaryFormJson> for BinaryForm {
    type Error = String;
    fn try_from(j: BinaryFormJson) -> std::result::Result<Self, String> {
        if j.coefficients.len() != j.degree + 1 {
            return Err("coefficient count does not match degree".into());
        }
        let coeffs: Vec<Complex64> = j
            .coefficients
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        BinaryForm::new(coeffs).map_err(|e| e.to_string())
    }
}

impl BinaryForm {
    /// Builds and normalizes a form; errors on the identically-zero
    /// coefficient list.
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        let max = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 || coefficients.is_empty() {
            return Err(CoreError::EmptyPolynomial);
        }
        let pivot = coefficients
            .iter()
            .find(|c| c.norm() == max)
            .copied()
            .unwrap();
        Ok(BinaryForm {
            coefficients: coefficients.into_iter().map(|c| c / pivot).collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Coefficient of u^k v^{m−k}.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn eval(&self, u: Complex64, v: Complex64) -> Complex64 {
        let m = self.degree();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut uk = Complex64::new(1.0, 0.0);
        let mut pows_v = vec![Complex64::new(1.0, 0.0); m + 1];
        for k in 1..=m {
            pows_v[k] = pows_v[k - 1] * v;
        }
        for (k, &c) in self.coefficients.iter().enumerate() {
            acc += c * uk * pows_v[m - k];
            uk *= u;
        }
        acc
    }

    /// The product form ∏ (v_i·u − u_i·v)^{mult_i} of a divisor.
    pub fn from_divisor(d: &DivisorCP1) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for e in &d.entries {
            for _ in 0..e.mult {
                // Multiply by (v_i·u − u_i·v): ascending-k convolution
                // with the pair (−u_i, v_i).
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (k, &c) in coeffs.iter().enumerate() {
                    next[k] += c * (-e.point.u);
                    next[k + 1] += c * e.point.v;
                }
                coeffs = next;
            }
        }
        BinaryForm::new(coeffs)
    }

    /// Scale-free distance between forms of equal degree: both
    /// coefficient vectors are L²-normalized and the residual is
    /// minimized over a global phase, giving √(2 − 2|⟨A, B⟩|) ∈ [0, √2].
    pub fn relative_distance(&self, other: &BinaryForm) -> Result<f64> {
        if self.degree() != other.degree() {
            return Err(CoreError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        let norm = |c: &[Complex64]| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let (na, nb) = (norm(&self.coefficients), norm(&other.coefficients));
        let inner: Complex64 = self
            .coefficients
            .iter()
            .zip(other.coefficients.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let cosang = (inner.norm() / (na * nb)).min(1.0);
        Ok((2.0 - 2.0 * cosang).max(0.0).sqrt())
    }

    /// Recovers the root divisor of the form: affine roots of the
    /// dehomogenization Σ c_k t^k plus [1:0] with multiplicity equal to
    /// the vanishing order of the top coefficients.
    pub fn roots(&self, tol: &Tolerances) -> Result<DivisorCP1> {
        let m = self.degree();
        let poly = UnivariatePoly::trimmed_relative(self.coefficients.clone(), 1e-13);
        let deg = if poly.is_zero() { 0 } else { poly.degree() };
        let mut points: Vec<ProjPoint> = Vec::new();
        for _ in deg..m {
            points.push(ProjPoint::infinity());
        }
        if deg > 0 {
            let rs = poly.roots(tol)?;
            for r in rs.expanded() {
                points.push(ProjPoint::from_affine(r));
            }
        }
        Ok(DivisorCP1::from_points(points, tol.divisor_cluster))
    }
}

/// The branching divisor of the logarithmic Gauss map on V(f): the
/// multiset of branch values of the critical points, merged projectively.
///
/// Degree equals the number of critical points found; when that disagrees
/// with the Newton-polygon prediction the underlying point set carries a
/// warning (see [`critical_points`]).
pub fn ll_divisor(f: &BivariateLaurent, tol: &Tolerances) -> Result<DivisorCP1> {
    let set = critical_points(f, tol)?;
    Ok(divisor_of_critical_set(&set, tol))
}

/// Divisor assembly from an already-computed critical point set.
pub fn divisor_of_critical_set(set: &CriticalPointSet, tol: &Tolerances) -> DivisorCP1 {
    let mut points = Vec::new();
    for p in &set.points {
        for _ in 0..p.multiplicity {
            points.push(p.branch_value);
        }
    }
    DivisorCP1::from_points(points, tol.divisor_cluster)
}

/// The branching divisor encoded as a binary form on ℂP¹.
pub fn ll_binary_form(f: &BivariateLaurent, tol: &Tolerances) -> Result<BinaryForm> {
    BinaryForm::from_divisor(&ll_divisor(f, tol)?)
}

/// Minimal total chordal distance over bijections between the two
/// multiplicity-expanded divisors (optimal assignment). Zero exactly when
/// the divisors agree as multisets up to tolerance.
pub fn divisor_distance(d1: &DivisorCP1, d2: &DivisorCP1) -> Result<f64> {
    if d1.degree() != d2.degree() {
        return Err(CoreError::DegreeMismatch {
            left: d1.degree(),
            right: d2.degree(),
        });
    }
    let a = d1.expanded();
    let b = d2.expanded();
    let n = a.len();
    if n == 0 {
        return Ok(0.0);
    }
    let cost: Vec<Vec<f64>> = a
        .iter()
        .map(|p| b.iter().map(|q| p.chordal(q)).collect())
        .collect();
    let assignment = hungarian(&cost);
    Ok(assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum())
}

/// Solves the square assignment problem by shortest augmenting paths with
/// potentials. Returns, for each row, its assigned column.
fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1]; // row matched to column j (0 = none)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(u: Complex64, v: Complex64) -> ProjPoint {
        ProjPoint::new(u, v)
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
    fn divisor_merges_equal_points() {
        let p = pt(c(2.0, 0.0), c(1.0, 0.0));
        let q = pt(c(4.0, 0.0), c(2.0, 0.0)); // same point
        let r = pt(c(0.0, 1.0), c(1.0, 0.0));
        let d = DivisorCP1::from_points([p, q, r], 1e-9);
        assert_eq!(d.degree(), 3);
        assert_eq!(d.entries.len(), 2);
        let merged = d.entries.iter().find(|e| e.mult == 2).unwrap();
        assert!(merged.point.projectively_eq(&p, 1e-12));
    }

    #[test]
    fn binary_form_of_simple_divisor() {
        // [1:1] + 2·[0:1] → (u − v)·u² = u³ − u²v.
        let d = DivisorCP1::from_points(
            [
                pt(c(1.0, 0.0), c(1.0, 0.0)),
                pt(c(0.0, 0.0), c(1.0, 0.0)),
                pt(c(0.0, 0.0), c(1.0, 0.0)),
            ],
            1e-9,
        );
        let f = BinaryForm::from_divisor(&d).unwrap();
        assert_eq!(f.degree(), 3);
        // Proportional to (0, 0, −1, 1) in ascending k.
        let expect = BinaryForm::new(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-1.0, 0.0),
            c(1.0, 0.0),
        ])
        .unwrap();
        // √(2−2cos) turns one ulp of rounding in cos ≈ 1 into ~1e-8, so
        // "equal" in this metric means below ~1e-7.
        assert!(f.relative_distance(&expect).unwrap() < 1e-7);
        // The form vanishes on its divisor points.
        assert!(f.eval(c(1.0, 0.0), c(1.0, 0.0)).norm() < 1e-12);
        assert!(f.eval(c(0.0, 0.0), c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn form_roots_reproduce_divisor_including_infinity() {
        let tol = Tolerances::default();
        let d = DivisorCP1::from_points(
            [
                ProjPoint::infinity(),
                pt(c(2.0, 1.0), c(1.0, 0.0)),
                pt(c(-0.5, 0.0), c(1.0, 0.0)),
            ],
            1e-9,
        );
        let f = BinaryForm::from_divisor(&d).unwrap();
        let back = f.roots(&tol).unwrap();
        assert_eq!(back.degree(), 3);
        assert!(divisor_distance(&d, &back).unwrap() < 1e-8);
    }

    #[test]
    fn distance_is_order_free_and_faithful() {
        let i1 = pt(c(0.0, 1.0), c(1.0, 0.0));
        let i2 = pt(c(0.0, -1.0), c(1.0, 0.0));
        let d1 = DivisorCP1::from_points([i1, i2], 1e-9);
        let d2 = DivisorCP1::from_points([i2, i1], 1e-9);
        assert!(divisor_distance(&d1, &d1).unwrap() < 1e-15);
        assert!(divisor_distance(&d1, &d2).unwrap() < 1e-15);

        // [0:1]+[1:1] vs [0:1]+[1:0]: optimal matching pairs the common
        // point, leaving chordal([1:1], [1:0]).
        let zero = pt(c(0.0, 0.0), c(1.0, 0.0));
        let one = pt(c(1.0, 0.0), c(1.0, 0.0));
        let inf = ProjPoint::infinity();
        let da = DivisorCP1::from_points([zero, one], 1e-9);
        let db = DivisorCP1::from_points([zero, inf], 1e-9);
        let expect = one.chordal(&inf);
        assert!((divisor_distance(&da, &db).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let d1 = DivisorCP1::from_points([ProjPoint::infinity()], 1e-9);
        let d2 = DivisorCP1::empty();
        assert!(matches!(
            divisor_distance(&d1, &d2),
            Err(CoreError::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn hungarian_picks_global_optimum() {
        // Greedy row-wise matching would pay 0.1 + 10; optimal is 1 + 0.2.
        let cost = vec![vec![0.1, 1.0], vec![0.2, 10.0]];
        let asg = hungarian(&cost);
        let total: f64 = asg.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        assert!((total - 1.2).abs() < 1e-12);
    }

    #[test]
    fn branch_divisor_of_real_quad_family() {
        // α = 4: branch values {3, 1/3} (both real, simple).
        let tol = Tolerances::default();
        let d = ll_divisor(&quad(c(4.0, 0.0)), &tol).unwrap();
        assert_eq!(d.degree(), 2);
        let target = DivisorCP1::from_points(
            [
                pt(c(3.0, 0.0), c(1.0, 0.0)),
                pt(c(1.0 / 3.0, 0.0), c(1.0, 0.0)),
            ],
            1e-9,
        );
        assert!(divisor_distance(&d, &target).unwrap() < 1e-8);

        // α = −1: branch values {i, −i}; this set is symmetric under
        // negation so it is convention-independent.
        let d = ll_divisor(&quad(c(-1.0, 0.0)), &tol).unwrap();
        let target = DivisorCP1::from_points(
            [pt(c(0.0, 1.0), c(1.0, 0.0)), pt(c(0.0, -1.0), c(1.0, 0.0))],
            1e-9,
        );
        assert!(divisor_distance(&d, &target).unwrap() < 1e-8);

        // The line has an empty divisor.
        let line = BivariateLaurent::from_terms([
            ((0, 0), c(1.0, 0.0)),
            ((1, 0), c(1.0, 0.0)),
            ((0, 1), c(1.0, 0.0)),
        ]);
        let d = ll_divisor(&line, &tol).unwrap();
        assert_eq!(d.degree(), 0);
    }

    #[test]
    fn binary_form_of_quad_factors_through_roots() {
        // α = 4 → form proportional to (u − 3v)(3u − v) after the root
        // set {3, 1/3}: check against the product form built by hand.
        let tol = Tolerances::default();
        let f = ll_binary_form(&quad(c(4.0, 0.0)), &tol).unwrap();
        assert_eq!(f.degree(), 2);
        let target = BinaryForm::from_divisor(&DivisorCP1::from_points(
            [
                pt(c(3.0, 0.0), c(1.0, 0.0)),
                pt(c(1.0 / 3.0, 0.0), c(1.0, 0.0)),
            ],
            1e-9,
        ))
        .unwrap();
        assert!(f.relative_distance(&target).unwrap() < 1e-6);
    }

    #[test]
    fn binomial_form_refused() {
        let tol = Tolerances::default();
        let b = BivariateLaurent::from_terms([((1, 1), c(1.0, 0.0)), ((0, 0), c(-5.0, 0.0))]);
        assert!(matches!(
            ll_binary_form(&b, &tol),
            Err(CoreError::IdenticallyZeroResultant)
        ));
    }

    #[test]
    fn divisor_json_round_trip() {
        let d = DivisorCP1::from_points(
            [
                pt(c(0.0, 1.0), c(1.0, 0.0)),
                pt(c(0.0, 1.0), c(1.0, 0.0)),
                ProjPoint::infinity(),
            ],
            1e-9,
        );
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"degree\":3"));
        let back: DivisorCP1 = serde_json::from_str(&s).unwrap();
        assert!(divisor_distance(&d, &back).unwrap() < 1e-12);
        // Tampered degree is rejected.
        let bad = s.replace("\"degree\":3", "\"degree\":2");
        assert!(serde_json::from_str::<DivisorCP1>(&bad).is_err());
    }
}
