//! Dense univariate polynomials over ℂ and a simultaneous root solver.
//!
//! Roots are found with the Aberth–Ehrlich iteration (all roots at once,
//! cubic local convergence), then verified against a coefficient-scaled
//! residual bound and clustered into multiplicity groups. The verification
//! step is what the rest of the library relies on: a returned root is
//! always a certified small relative residual, never just a fixed point of
//! the iteration.

use crate::config::Tolerances;
use crate::error::{CoreError, Result};
use num_complex::Complex64;

/// A root cluster: representative value, multiplicity, and the radius of
/// the cluster it was merged from (0 for well-separated simple roots).
#[derive(Debug, Clone)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    pub cluster_radius: f64,
}

/// All roots of a polynomial, with Σ multiplicity == degree.
#[derive(Debug, Clone, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Roots repeated per multiplicity, in deterministic order.
    pub fn expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for r in &self.roots {
            for _ in 0..r.multiplicity {
                out.push(r.value);
            }
        }
        out
    }
}

/// Dense polynomial Σ coeffs[k]·t^k (ascending exponents).
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<Complex64>,
}

impl UnivariatePoly {
    /// Builds from ascending coefficients, trimming exactly-zero leading
    /// terms.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Trims leading coefficients that are negligible relative to the
    /// largest coefficient (used on interpolated coefficient lists where
    /// exact zeros appear as rounding noise).
    pub fn trimmed_relative(coeffs: Vec<Complex64>, rel: f64) -> Self {
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut coeffs = coeffs;
        while coeffs
            .last()
            .is_some_and(|c| c.norm() <= rel * scale)
        {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, t: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self { coeffs: vec![] };
        }
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        }
    }

    /// Residual scale ‖p‖·max(1,|t|)^deg used by the acceptance bound:
    /// a candidate r is a root when |p(r)| ≤ tol·scale(r).
    pub fn residual_scale(&self, t: Complex64) -> f64 {
        let norm1: f64 = self.coeffs.iter().map(|c| c.norm()).sum();
        norm1 * t.norm().max(1.0).powi(self.degree() as i32)
    }

    /// All complex roots with multiplicity clustering.
    ///
    /// Errors with `NonConvergence` when the iteration exhausts its budget
    /// with some candidate still failing the residual bound; the error
    /// carries the worst relative residual seen at the final iterate.
    pub fn roots(&self, tol: &Tolerances) -> Result<RootSet> {
        if self.is_zero() {
            return Err(CoreError::EmptyPolynomial);
        }
        // Factor out t^k for vanishing low-order coefficients: exact zero
        // roots, reported with the right multiplicity.
        let scale = self.max_coeff_norm();
        let zero_mult = self
            .coeffs
            .iter()
            .take_while(|c| c.norm() <= 1e-300 * scale.max(1.0))
            .count();
        let reduced: Vec<Complex64> = self.coeffs[zero_mult..].to_vec();
        let poly = UnivariatePoly::new(reduced);
        let n = poly.degree();

        let mut raw: Vec<Complex64> = Vec::new();
        if n > 0 {
            raw = aberth(&poly, tol)?;
        }
        if zero_mult > 0 {
            for _ in 0..zero_mult {
                raw.push(Complex64::new(0.0, 0.0));
            }
        }
        Ok(cluster_roots(raw, tol.root_cluster))
    }
}

/// Aberth–Ehrlich simultaneous iteration on a degree ≥ 1 polynomial with
/// nonzero constant and leading coefficients.
fn aberth(p: &UnivariatePoly, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let n = p.degree();
    let dp = p.derivative();
    let lead = p.coeffs()[n];

    // Initial guesses on a circle of the Fujiwara-style radius estimate,
    // with an irrational angular offset so symmetric polynomials do not
    // start on their own symmetry axes.
    let mut radius: f64 = 0.0;
    for (k, c) in p.coeffs().iter().enumerate().take(n) {
        let r = (c.norm() / lead.norm()).powf(1.0 / (n - k) as f64);
        radius = radius.max(r);
    }
    radius = (2.0 * radius).max(1e-3);
    let mut zs: Vec<Complex64> = (0..n)
        .map(|j| {
            let ang = 2.0 * std::f64::consts::PI * (j as f64) / (n as f64) + 0.376;
            Complex64::from_polar(radius, ang)
        })
        .collect();

    let mut converged = false;
    for _ in 0..tol.root_max_iter {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let pi = p.eval(zs[i]);
            let dpi = dp.eval(zs[i]);
            if pi.norm() == 0.0 {
                continue;
            }
            let newton = if dpi.norm() > 0.0 {
                pi / dpi
            } else {
                // Derivative vanished exactly at the iterate: nudge.
                Complex64::new(1e-8, 1e-8)
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = zs[i] - zs[j];
                    if d.norm() > 0.0 {
                        sum += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * sum;
            let step = if denom.norm() > 1e-300 {
                newton / denom
            } else {
                newton
            };
            zs[i] -= step;
            let rel = step.norm() / zs[i].norm().max(1.0);
            max_step = max_step.max(rel);
        }
        if max_step <= tol.root_step {
            converged = true;
            break;
        }
    }

    // Certify every candidate against the residual bound; the bound is
    // what downstream consumers may rely on, not the step criterion.
    let mut worst = 0.0f64;
    for &r in &zs {
        let rel = p.eval(r).norm() / p.residual_scale(r).max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
    }
    if worst > tol.root_residual && !converged {
        return Err(CoreError::NonConvergence {
            iterations: tol.root_max_iter,
            worst_residual: worst,
        });
    }
    if worst > tol.root_residual {
        // Step criterion met but residual bound violated: a genuinely
        // ill-conditioned polynomial. Refuse rather than return bad roots.
        return Err(CoreError::NonConvergence {
            iterations: tol.root_max_iter,
            worst_residual: worst,
        });
    }
    Ok(zs)
}

/// Greedy clustering of raw roots into multiplicity groups: two roots
/// join a cluster when within `rel`·max(1, |value|) of its
/// representative. Returns clusters sorted by (re, im) of representative.
fn cluster_roots(mut raw: Vec<Complex64>, rel: f64) -> RootSet {
    raw.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for r in raw {
        let mut placed = false;
        for cl in clusters.iter_mut() {
            let rep = cl.iter().sum::<Complex64>() / cl.len() as f64;
            if (r - rep).norm() <= rel * rep.norm().max(1.0) {
                cl.push(r);
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push(vec![r]);
        }
    }
    let mut roots: Vec<Root> = clusters
        .into_iter()
        .map(|cl| {
            let rep = cl.iter().sum::<Complex64>() / cl.len() as f64;
            let radius = cl
                .iter()
                .map(|z| (z - rep).norm())
                .fold(0.0, f64::max);
            Root {
                value: rep,
                multiplicity: cl.len(),
                cluster_radius: radius,
            }
        })
        .collect();
    roots.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    RootSet { roots }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn quadratic_with_known_roots() {
        // (t-2)(t+3) = t² + t - 6
        let p = UnivariatePoly::new(vec![c(-6.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let rs = p.roots(&Tolerances::default()).unwrap();
        assert_eq!(rs.total_multiplicity(), 2);
        let mut vals = rs.expanded();
        vals.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((vals[0] - c(-3.0, 0.0)).norm() < 1e-10);
        assert!((vals[1] - c(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn double_root_clusters_to_multiplicity_two() {
        // (t-1)²(t+2) = t³ - 3t + 2
        let p = UnivariatePoly::new(vec![
            c(2.0, 0.0),
            c(-3.0, 0.0),
            c(0.0, 0.0),
            c(1.0, 0.0),
        ]);
        let rs = p.roots(&Tolerances::default()).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        let double = rs
            .roots
            .iter()
            .find(|r| r.multiplicity == 2)
            .expect("double root at 1");
        assert!((double.value - c(1.0, 0.0)).norm() < 1e-5);
        assert!(double.cluster_radius < 1e-4);
    }

    #[test]
    fn zero_roots_factored_exactly() {
        // t²·(t - 5)
        let p = UnivariatePoly::new(vec![
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(-5.0, 0.0),
            c(1.0, 0.0),
        ]);
        let rs = p.roots(&Tolerances::default()).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        let zero = rs
            .roots
            .iter()
            .find(|r| r.value.norm() < 1e-12)
            .expect("root at 0");
        assert_eq!(zero.multiplicity, 2);
    }

    #[test]
    fn residual_bound_certifies_each_root() {
        let tol = Tolerances::default();
        // A mildly stiff degree-8 polynomial with spread roots.
        let mut coeffs = vec![c(1.0, 0.0)];
        for k in 1..=8 {
            coeffs.push(c((k as f64) * 0.37 - 1.5, 0.11 * k as f64));
        }
        let p = UnivariatePoly::new(coeffs);
        let rs = p.roots(&tol).unwrap();
        assert_eq!(rs.total_multiplicity(), 8);
        for r in &rs.roots {
            let rel = p.eval(r.value).norm() / p.residual_scale(r.value);
            assert!(rel <= tol.root_residual * 10.0, "relative residual {rel}");
        }
    }

    #[test]
    fn degree_zero_has_no_roots() {
        let p = UnivariatePoly::new(vec![c(3.0, 0.0)]);
        let rs = p.roots(&Tolerances::default()).unwrap();
        assert!(rs.roots.is_empty());
    }

    #[test]
    fn roots_of_unity() {
        // t^6 - 1
        let mut coeffs = vec![c(0.0, 0.0); 7];
        coeffs[0] = c(-1.0, 0.0);
        coeffs[6] = c(1.0, 0.0);
        let p = UnivariatePoly::new(coeffs);
        let rs = p.roots(&Tolerances::default()).unwrap();
        assert_eq!(rs.roots.len(), 6);
        for r in &rs.roots {
            assert!((r.value.norm() - 1.0).abs() < 1e-10);
            assert_eq!(r.multiplicity, 1);
        }
    }
}
