//! Sparse bivariate Laurent polynomials over ℂ.
//!
//! The curve datum `f(z,w) = Σ c_{ab} z^a w^b` with integer (possibly
//! negative) exponents. Coefficients live in a `BTreeMap` so iteration
//! order — and with it every numerical pipeline built on top — is
//! deterministic.

use crate::error::{CoreError, Result};
use crate::lattice::LatticePolygon;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One term of the JSON wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermJson {
    a: i64,
    b: i64,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolyJson {
    terms: Vec<TermJson>,
}

/// Sparse exponent → coefficient map.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariateLaurent {
    terms: BTreeMap<(i64, i64), Complex64>,
}

/// Integer power of a complex number (exact exponent arithmetic; negative
/// exponents invert).
pub fn cpow(base: Complex64, e: i64) -> Complex64 {
    if e == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let b = if e < 0 { base.inv() } else { base };
    let mut k = e.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    let mut sq = b;
    while k > 0 {
        if k & 1 == 1 {
            acc *= sq;
        }
        sq *= sq;
        k >>= 1;
    }
    acc
}

impl BivariateLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64), Complex64)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    /// Constant polynomial.
    pub fn constant(c: Complex64) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    /// The monomial c·z^a·w^b.
    pub fn monomial(a: i64, b: i64, c: Complex64) -> Self {
        Self::from_terms([((a, b), c)])
    }

    pub fn add_term(&mut self, key: (i64, i64), c: Complex64) {
        let e = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if e.norm() == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: i64, b: i64) -> Complex64 {
        self.terms
            .get(&(a, b))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Exponent vectors of the nonzero terms, lexicographically sorted.
    pub fn support(&self) -> Vec<(i64, i64)> {
        self.terms.keys().copied().collect()
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops terms with |coefficient| below `threshold` (explicit pruning;
    /// arithmetic never prunes silently except exact zeros).
    pub fn prune(&self, threshold: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= threshold)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &c) in other.terms.iter() {
            out.add_term(k, c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s.norm() == 0.0 {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, c * s)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a1, b1), &c1) in self.terms.iter() {
            for (&(a2, b2), &c2) in other.terms.iter() {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }

    /// Ordinary partial derivative ∂f/∂z.
    pub fn d_dz(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|((a, _), _)| *a != 0).map(
            |(&(a, b), &c)| ((a - 1, b), c * a as f64),
        ))
    }

    /// Ordinary partial derivative ∂f/∂w.
    pub fn d_dw(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|((_, b), _)| *b != 0).map(
            |(&(a, b), &c)| ((a, b - 1), c * b as f64),
        ))
    }

    /// Logarithmic derivative z·∂f/∂z; support stays inside the Newton
    /// polygon.
    pub fn log_dz(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a != 0)
                .map(|(&(a, b), &c)| ((a, b), c * a as f64)),
        )
    }

    /// Logarithmic derivative w·∂f/∂w.
    pub fn log_dw(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b != 0)
                .map(|(&(a, b), &c)| ((a, b), c * b as f64)),
        )
    }

    /// Evaluate at (z, w). Errors if a coordinate is zero while a negative
    /// exponent needs its inverse.
    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let needs_inv_z = self.terms.keys().any(|&(a, _)| a < 0);
        let needs_inv_w = self.terms.keys().any(|&(_, b)| b < 0);
        if (needs_inv_z && z.norm() == 0.0) || (needs_inv_w && w.norm() == 0.0) {
            return Err(CoreError::EvalAtTorusBoundary);
        }
        Ok(self.eval_unchecked(z, w))
    }

    /// Evaluate without the boundary guard (hot path; callers guarantee
    /// torus points).
    pub fn eval_unchecked(&self, z: Complex64, w: Complex64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (&(a, b), &c) in self.terms.iter() {
            s += c * cpow(z, a) * cpow(w, b);
        }
        s
    }

    /// Σ |c_ab|·|z|^a·|w|^b — the natural residual scale of `eval` at
    /// (z, w); relative residuals are |f(z,w)| divided by this.
    pub fn eval_scale(&self, z: Complex64, w: Complex64) -> f64 {
        let (rz, rw) = (z.norm(), w.norm());
        let mut s = 0.0;
        for (&(a, b), &c) in self.terms.iter() {
            s += c.norm() * rz.powi(a as i32) * rw.powi(b as i32);
        }
        s
    }

    /// Relative residual |f(z,w)| / Σ|c||z|^a|w|^b (∞ when the scale
    /// vanishes).
    pub fn relative_residual(&self, z: Complex64, w: Complex64) -> f64 {
        let s = self.eval_scale(z, w);
        if s == 0.0 {
            return f64::INFINITY;
        }
        self.eval_unchecked(z, w).norm() / s
    }

    /// The toric substitution f(λz, μw): multiplies each coefficient by
    /// λ^a μ^b.
    pub fn toric_substitute(&self, lambda: Complex64, mu: Complex64) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(&(a, b), &c)| ((a, b), c * cpow(lambda, a) * cpow(mu, b))),
        )
    }

    /// Multiplies by the monomial z^da w^db (translates the Newton
    /// polygon).
    pub fn shift_exponents(&self, da: i64, db: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), &c)| ((a + da, b + db), c))
                .collect(),
        }
    }

    /// Clears negative exponents by a monomial shift; returns the shifted
    /// polynomial and the shift used. Torus zeros are unchanged, but the
    /// shift can introduce extraneous roots on the coordinate axes, which
    /// callers discard.
    pub fn shifted_nonnegative(&self) -> (Self, (i64, i64)) {
        if self.is_zero() {
            return (self.clone(), (0, 0));
        }
        let amin = self.terms.keys().map(|&(a, _)| a).min().unwrap().min(0);
        let bmin = self.terms.keys().map(|&(_, b)| b).min().unwrap().min(0);
        (self.shift_exponents(-amin, -bmin), (-amin, -bmin))
    }

    /// Degree in w after clearing negative exponents.
    pub fn deg_w(&self) -> i64 {
        let (p, _) = self.shifted_nonnegative();
        p.terms.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    /// Degree in z after clearing negative exponents.
    pub fn deg_z(&self) -> i64 {
        let (p, _) = self.shifted_nonnegative();
        p.terms.keys().map(|&(a, _)| a).max().unwrap_or(0)
    }

    /// Dense w-coefficient list of the (cleared) polynomial at z = z0:
    /// entry b is Σ_a c_ab z0^a. Requires nonnegative exponents.
    pub fn coeffs_in_w(&self, z0: Complex64) -> Vec<Complex64> {
        let degw = self.terms.keys().map(|&(_, b)| b).max().unwrap_or(0);
        let mut out = vec![Complex64::new(0.0, 0.0); (degw.max(0) + 1) as usize];
        for (&(a, b), &c) in self.terms.iter() {
            out[b as usize] += c * cpow(z0, a);
        }
        out
    }

    /// Dense z-coefficient list at w = w0. Requires nonnegative exponents.
    pub fn coeffs_in_z(&self, w0: Complex64) -> Vec<Complex64> {
        let degz = self.terms.keys().map(|&(a, _)| a).max().unwrap_or(0);
        let mut out = vec![Complex64::new(0.0, 0.0); (degz.max(0) + 1) as usize];
        for (&(a, b), &c) in self.terms.iter() {
            out[a as usize] += c * cpow(w0, b);
        }
        out
    }

    /// True when every coefficient is real (exactly).
    pub fn has_real_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj_coefficients(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&k, &c)| (k, c.conj())).collect(),
        }
    }

    /// Newton polygon of the support.
    pub fn newton_polygon(&self) -> Result<LatticePolygon> {
        LatticePolygon::from_support(&self.support())
    }

    /// A positive toric rescale (z,w) → (λz, μw) with λ, μ > 0 chosen by
    /// least squares to flatten log|coefficient| across the support.
    ///
    /// Mixed-scale inputs (products of lines with coefficient magnitudes
    /// spanning several orders) lose solver accuracy; this conditioning
    /// change of coordinates is topology-preserving (it is a toric
    /// automorphism) and is undone by callers that report coordinates.
    /// Returns (balanced polynomial, λ, μ).
    pub fn balanced(&self) -> (Self, f64, f64) {
        let pts: Vec<((i64, i64), f64)> = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(&k, &c)| (k, c.norm().ln()))
            .collect();
        if pts.len() < 2 {
            return (self.clone(), 1.0, 1.0);
        }
        // Normal equations for minimizing Σ (y + a·L + b·Mu + t)² over
        // (L, Mu, t): a 3×3 symmetric solve.
        let n = pts.len() as f64;
        let (mut saa, mut sab, mut sa, mut sbb, mut sb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let (mut say, mut sby, mut sy) = (0.0, 0.0, 0.0);
        for (&(a, b), y) in pts.iter().map(|(k, y)| (k, *y)) {
            let (af, bf) = (a as f64, b as f64);
            saa += af * af;
            sab += af * bf;
            sbb += bf * bf;
            sa += af;
            sb += bf;
            say += af * y;
            sby += bf * y;
            sy += y;
        }
        let m = [[saa, sab, sa], [sab, sbb, sb], [sa, sb, n]];
        let rhs = [-say, -sby, -sy];
        // Gaussian elimination with partial pivoting on the 3×3 system.
        let mut aug = [
            [m[0][0], m[0][1], m[0][2], rhs[0]],
            [m[1][0], m[1][1], m[1][2], rhs[1]],
            [m[2][0], m[2][1], m[2][2], rhs[2]],
        ];
        for col in 0..3 {
            let piv = (col..3)
                .max_by(|&i, &j| {
                    aug[i][col]
                        .abs()
                        .partial_cmp(&aug[j][col].abs())
                        .unwrap()
                })
                .unwrap();
            aug.swap(col, piv);
            if aug[col][col].abs() < 1e-12 {
                // Degenerate support direction: no balancing possible.
                return (self.clone(), 1.0, 1.0);
            }
            for row in (col + 1)..3 {
                let f = aug[row][col] / aug[col][col];
                for k in col..4 {
                    aug[row][k] -= f * aug[col][k];
                }
            }
        }
        let mut x = [0.0f64; 3];
        for row in (0..3).rev() {
            let mut s = aug[row][3];
            for k in (row + 1)..3 {
                s -= aug[row][k] * x[k];
            }
            x[row] = s / aug[row][row];
        }
        let (lam, mu) = (x[0].exp(), x[1].exp());
        if !lam.is_finite() || !mu.is_finite() || lam <= 0.0 || mu <= 0.0 {
            return (self.clone(), 1.0, 1.0);
        }
        (
            self.toric_substitute(Complex64::new(lam, 0.0), Complex64::new(mu, 0.0)),
            lam,
            mu,
        )
    }
}

impl Serialize for BivariateLaurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), &c)| TermJson { a, b, re: c.re, im: c.im })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BivariateLaurent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pj = PolyJson::deserialize(d)?;
        Ok(Self::from_terms(pj.terms.into_iter().map(|t| {
            ((t.a, t.b), Complex64::new(t.re, t.im))
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 1 + z + w + α·zw
    fn quad(alpha: Complex64) -> BivariateLaurent {
        BivariateLaurent::from_terms([
            ((0, 0), c(1.0, 0.0)),
            ((1, 0), c(1.0, 0.0)),
            ((0, 1), c(1.0, 0.0)),
            ((1, 1), alpha),
        ])
    }

    #[test]
    fn log_derivative_of_monomial_scales_by_exponent() {
        let m = BivariateLaurent::monomial(3, 5, c(2.0, 0.0));
        let dz = m.log_dz();
        assert_eq!(dz.coeff(3, 5), c(6.0, 0.0));
        let dw = m.log_dw();
        assert_eq!(dw.coeff(3, 5), c(10.0, 0.0));
    }

    #[test]
    fn log_derivatives_of_quad_match_hand_computation() {
        let f = quad(c(4.0, 0.0));
        // z·∂_z(1+z+w+4zw) = z + 4zw
        let dz = f.log_dz();
        assert_eq!(dz.coeff(1, 0), c(1.0, 0.0));
        assert_eq!(dz.coeff(1, 1), c(4.0, 0.0));
        assert_eq!(dz.num_terms(), 2);
        let dw = f.log_dw();
        assert_eq!(dw.coeff(0, 1), c(1.0, 0.0));
        assert_eq!(dw.coeff(1, 1), c(4.0, 0.0));
    }

    #[test]
    fn eval_on_line_vanishes_at_point_on_it() {
        let line = BivariateLaurent::from_terms([
            ((0, 0), c(1.0, 0.0)),
            ((1, 0), c(1.0, 0.0)),
            ((0, 1), c(1.0, 0.0)),
        ]);
        let v = line.eval(c(-2.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn eval_with_negative_exponent_at_axis_errors() {
        let p = BivariateLaurent::monomial(-1, 0, c(1.0, 0.0));
        assert!(matches!(
            p.eval(c(0.0, 0.0), c(1.0, 0.0)),
            Err(CoreError::EvalAtTorusBoundary)
        ));
        // but w = 0 is fine when only z has negative exponents
        assert!(p.eval(c(2.0, 0.0), c(0.0, 0.0)).is_ok());
    }

    #[test]
    fn shifted_nonnegative_translates_polygon_only() {
        let p = BivariateLaurent::from_terms([
            ((-2, 1), c(1.0, 0.0)),
            ((0, -3), c(2.0, 0.0)),
            ((1, 1), c(3.0, 0.0)),
        ]);
        let (q, shift) = p.shifted_nonnegative();
        assert_eq!(shift, (2, 3));
        assert!(q.support().iter().all(|&(a, b)| a >= 0 && b >= 0));
        assert_eq!(q.num_terms(), 3);
        // Same torus zeros: check one random point.
        let (z, w) = (c(0.7, 0.3), c(-1.2, 0.4));
        let pv = p.eval(z, w).unwrap();
        let qv = q.eval(z, w).unwrap();
        let monomial = cpow(z, 2) * cpow(w, 3);
        assert!((qv - pv * monomial).norm() < 1e-12 * qv.norm().max(1.0));
    }

    #[test]
    fn product_rule_for_log_derivatives() {
        let f = quad(c(2.0, 1.0));
        let g = BivariateLaurent::from_terms([((1, -1), c(0.5, -0.3)), ((0, 2), c(1.5, 0.2))]);
        let fg = f.mul(&g);
        let lhs = fg.log_dz();
        let rhs = f.log_dz().mul(&g).add(&f.mul(&g.log_dz()));
        let (z, w) = (c(0.8, 0.1), c(-0.6, 0.9));
        let a = lhs.eval(z, w).unwrap();
        let b = rhs.eval(z, w).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn balancing_flattens_mixed_scales_and_preserves_zero_sets() {
        // Coefficients spanning 1 .. 1e4.
        let f = BivariateLaurent::from_terms([
            ((0, 0), c(1.0, 0.0)),
            ((1, 0), c(100.0, 0.0)),
            ((0, 1), c(100.0, 0.0)),
            ((1, 1), c(10000.0, 0.0)),
        ]);
        let (g, lam, mu) = f.balanced();
        let spread = |p: &BivariateLaurent| {
            let norms: Vec<f64> = p.terms().map(|(_, c)| c.norm().ln()).collect();
            let mx = norms.iter().cloned().fold(f64::MIN, f64::max);
            let mn = norms.iter().cloned().fold(f64::MAX, f64::min);
            mx - mn
        };
        assert!(spread(&g) < spread(&f) + 1e-9);
        assert!(spread(&g) < 1e-6); // this example flattens exactly
        // (z,w) on V(g) ⇔ (λz, μw) on V(f).
        let z = c(0.3, 0.4);
        // solve g(z, ·) = 0 roughly: g = s(1 + z' + w' + z'w') with z'=100λz
        let lamc = c(lam, 0.0);
        let muc = c(mu, 0.0);
        let w = -(c(1.0, 0.0) + lamc * z * 100.0)
            / (muc * 100.0 * (c(1.0, 0.0) + lamc * z * 100.0));
        // Verify both evaluations agree after substitution.
        let gv = g.eval(z, w).unwrap();
        let fv = f.eval(lamc * z, muc * w).unwrap();
        assert!((gv - fv).norm() < 1e-9 * fv.norm().max(1.0));
    }

    #[test]
    fn json_round_trip() {
        let f = quad(c(0.0, 1.0));
        let s = serde_json::to_string(&f).unwrap();
        let back: BivariateLaurent = serde_json::from_str(&s).unwrap();
        assert_eq!(f, back);
    }
}
