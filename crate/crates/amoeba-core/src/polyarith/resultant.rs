//! Resultants and elimination for bivariate systems.
//!
//! `sylvester_resultant` evaluates the Sylvester determinant of two
//! univariate coefficient lists with an LU factorization. `eliminant`
//! lifts this to bivariate input: it eliminates one variable from a pair
//! of Laurent polynomials by sampling the resultant at roots of unity in
//! the kept variable and recovering coefficients with an inverse discrete
//! Fourier transform. Sampling at roots of unity keeps the Vandermonde
//! system perfectly conditioned and the inverse transform is a single
//! explicit sum — no linear solve is involved.

use crate::config::Tolerances;
use crate::error::{CoreError, Result};
use crate::polyarith::bivariate::BivariateLaurent;
use crate::polyarith::univariate::UnivariatePoly;
use num_complex::Complex64;

/// Which variable to eliminate from a bivariate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z,
    W,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::Z => Var::W,
            Var::W => Var::Z,
        }
    }
}

/// Determinant of a dense complex matrix by LU with partial pivoting.
/// Returns 1 for the empty matrix by convention.
pub fn lu_determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (piv, piv_norm) = (col..n)
            .map(|r| (r, m[r][col].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if piv_norm == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        let inv = m[col][col].inv();
        for row in (col + 1)..n {
            let f = m[row][col] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            for k in col..n {
                let sub = f * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

/// Sylvester determinant of two coefficient lists at their *formal*
/// degrees `len - 1`, with no trimming of zero leading coefficients.
/// Empty input means the zero polynomial and gives 0.
///
/// Keeping the formal degree fixed is what makes evaluation/interpolation
/// schemes consistent: when the coefficients are themselves polynomial in
/// a parameter, the determinant at each parameter value must be computed
/// at the *same* degree even if a leading coefficient happens to vanish
/// exactly at some sample, otherwise the sampled values do not lie on a
/// single polynomial.
pub fn sylvester_resultant_formal(p: &[Complex64], q: &[Complex64]) -> Complex64 {
    if p.is_empty() || q.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let (dp, dq) = (p.len() - 1, q.len() - 1);
    if dp == 0 && dq == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let n = dp + dq;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    // dq rows of p's reversed coefficients, then dp rows of q's.
    for r in 0..dq {
        for (k, &c) in p.iter().rev().enumerate() {
            m[r][r + k] = c;
        }
    }
    for r in 0..dp {
        for (k, &c) in q.iter().rev().enumerate() {
            m[dq + r][r + k] = c;
        }
    }
    lu_determinant(m)
}

/// Sylvester resultant of two dense univariate coefficient lists
/// (ascending exponents). Exactly-zero leading coefficients are trimmed
/// first, so the result matches the classical resultant at the true
/// degrees; if either polynomial is identically zero the resultant is 0.
pub fn sylvester_resultant(p: &[Complex64], q: &[Complex64]) -> Complex64 {
    let trim = |c: &[Complex64]| {
        let mut v = c.to_vec();
        while v.last().is_some_and(|x| x.norm() == 0.0) {
            v.pop();
        }
        v
    };
    sylvester_resultant_formal(&trim(p), &trim(q))
}

/// Degree of `p` in the given variable after clearing negative exponents.
fn degree_in(p: &BivariateLaurent, v: Var) -> i64 {
    match v {
        Var::Z => p.deg_z(),
        Var::W => p.deg_w(),
    }
}

/// Samples the resultant (eliminating `elim`) of the cleared pair at a
/// single value `t` of the kept variable. The coefficient lists keep the
/// structural degree of the bivariate input (`coeffs_in_*` pad with
/// zeros), and the Sylvester determinant is taken at that formal degree,
/// so the sampled values of a fixed pair always lie on one polynomial in
/// `t` — even at parameter values where a leading coefficient vanishes.
pub fn resultant_sample(
    p: &BivariateLaurent,
    q: &BivariateLaurent,
    elim: Var,
    t: Complex64,
) -> Complex64 {
    let (pc, qc) = match elim {
        Var::W => (p.coeffs_in_w(t), q.coeffs_in_w(t)),
        Var::Z => (p.coeffs_in_z(t), q.coeffs_in_z(t)),
    };
    sylvester_resultant_formal(&pc, &qc)
}

/// Eliminates `elim` from the pair (p, q): returns a univariate
/// polynomial in the other variable whose roots contain the projections
/// of all common torus zeros.
///
/// Both inputs are first shifted to nonnegative exponents (a monomial
/// factor that cannot kill torus zeros) and rescaled to unit max
/// coefficient (the resultant picks up a harmless constant factor).
/// The degree bound is
/// `deg_keep(p)·deg_elim(q) + deg_keep(q)·deg_elim(p)`; the resultant is
/// sampled at that many + 1 roots of unity and interpolated exactly.
///
/// Errors with `IdenticallyZeroResultant` when the interpolated
/// polynomial vanishes (the pair shares a component), and propagates
/// `EmptyPolynomial` for zero input.
pub fn eliminant(
    p: &BivariateLaurent,
    q: &BivariateLaurent,
    elim: Var,
    tol: &Tolerances,
) -> Result<UnivariatePoly> {
    if p.is_zero() || q.is_zero() {
        return Err(CoreError::EmptyPolynomial);
    }
    let (ps, _) = p.shifted_nonnegative();
    let (qs, _) = q.shifted_nonnegative();
    let ps = ps.scale(Complex64::new(1.0 / ps.max_coeff_norm(), 0.0));
    let qs = qs.scale(Complex64::new(1.0 / qs.max_coeff_norm(), 0.0));
    let keep = elim.other();
    let bound = degree_in(&ps, keep) * degree_in(&qs, elim)
        + degree_in(&qs, keep) * degree_in(&ps, elim);
    let n = (bound + 1) as usize;
    let samples: Vec<Complex64> = (0..n)
        .map(|j| {
            let ang = 2.0 * std::f64::consts::PI * (j as f64) / (n as f64);
            let t = Complex64::from_polar(1.0, ang);
            resultant_sample(&ps, &qs, elim, t)
        })
        .collect();
    // Inverse DFT: c_k = (1/N) Σ_j v_j ω^{-jk}, ω = e^{2πi/N}.
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &v) in samples.iter().enumerate() {
            let ang = -2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / (n as f64);
            acc += v * Complex64::from_polar(1.0, ang);
        }
        *ck = acc / (n as f64);
    }
    let max_sample = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let max_coeff = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_coeff <= tol.eliminant_zero * max_sample.max(1.0) {
        return Err(CoreError::IdenticallyZeroResultant);
    }
    Ok(UnivariatePoly::trimmed_relative(coeffs, tol.eliminant_trim))
}

/// Eliminates with an automatic variable choice: prefers the variable
/// giving the smaller Sylvester matrix, and falls back to the other
/// variable if the first choice degenerates to the zero resultant.
/// Returns the eliminant and the variable that was KEPT.
pub fn eliminant_auto(
    p: &BivariateLaurent,
    q: &BivariateLaurent,
    tol: &Tolerances,
) -> Result<(UnivariatePoly, Var)> {
    let (ps, _) = p.shifted_nonnegative();
    let (qs, _) = q.shifted_nonnegative();
    let size_elim_w = degree_in(&ps, Var::W) + degree_in(&qs, Var::W);
    let size_elim_z = degree_in(&ps, Var::Z) + degree_in(&qs, Var::Z);
    let first = if size_elim_w <= size_elim_z { Var::W } else { Var::Z };
    match eliminant(p, q, first, tol) {
        Ok(e) => Ok((e, first.other())),
        Err(CoreError::IdenticallyZeroResultant) => {
            let second = first.other();
            let e = eliminant(p, q, second, tol)?;
            Ok((e, second.other()))
        }
        Err(e) => Err(e),
    }
}
