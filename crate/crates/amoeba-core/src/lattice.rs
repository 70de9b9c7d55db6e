//! Newton polygons and their lattice invariants.
//!
//! Everything in this module is exact integer arithmetic: hulls, lattice
//! point counts, and the degree bookkeeping that controls every solver in
//! the pipeline (fiber cardinality, branching degree, genus).

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// A bounded convex lattice polygon: the Newton polygon of a Laurent
/// polynomial, with its full set of lattice points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePolygon {
    /// Hull vertices in counterclockwise order, no three consecutive
    /// collinear. A segment has 2 entries; a point has 1.
    pub vertices: Vec<(i64, i64)>,
    /// Every lattice point inside or on the hull, sorted lexicographically.
    pub all_points: Vec<(i64, i64)>,
}

/// The three lattice invariants: `vol` (twice the Euclidean area), `g`
/// (interior lattice points), `b` (boundary lattice points).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolygonInvariants {
    pub vol: i64,
    pub g: i64,
    pub b: i64,
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Convex hull by monotone chain; returns counterclockwise vertices with
/// collinear interior points dropped. Handles 0-, 1-, and 2-dimensional
/// supports.
fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        // All points collinear: the chain collapses; report the two
        // extreme points (or one).
        let mut ends = vec![pts[0], *pts.last().unwrap()];
        ends.dedup();
        return ends;
    }
    lower
}

impl LatticePolygon {
    /// Builds the polygon from a support set (exponent vectors of the
    /// nonzero terms).
    pub fn from_support(support: &[(i64, i64)]) -> Result<LatticePolygon> {
        if support.is_empty() {
            return Err(CoreError::EmptyPolynomial);
        }
        let vertices = convex_hull(support);
        let all_points = enumerate_lattice_points(&vertices);
        Ok(LatticePolygon { vertices, all_points })
    }

    /// 0 for a point, 1 for a segment, 2 for a genuine polygon.
    pub fn dimension(&self) -> u8 {
        match self.vertices.len() {
            1 => 0,
            2 => 1,
            _ => 2,
        }
    }

    /// Twice the Euclidean area (shoelace; exact integer).
    pub fn vol(&self) -> i64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0;
        }
        let mut s = 0i64;
        for i in 0..n {
            let (x1, y1) = v[i];
            let (x2, y2) = v[(i + 1) % n];
            s += x1 * y2 - x2 * y1;
        }
        s.abs()
    }

    /// Number of lattice points strictly on the boundary.
    pub fn boundary_count(&self) -> i64 {
        let v = &self.vertices;
        let n = v.len();
        if n == 1 {
            return 1;
        }
        if n == 2 {
            let (dx, dy) = (v[1].0 - v[0].0, v[1].1 - v[0].1);
            return gcd(dx, dy) + 1;
        }
        let mut b = 0i64;
        for i in 0..n {
            let (x1, y1) = v[i];
            let (x2, y2) = v[(i + 1) % n];
            b += gcd(x2 - x1, y2 - y1);
        }
        b
    }

    /// The `(vol, g, b)` triple; requires dimension 2.
    pub fn invariants(&self) -> Result<PolygonInvariants> {
        if self.dimension() < 2 {
            return Err(CoreError::DegeneratePolygon {
                dimension: self.dimension(),
                context: "invariants require a two-dimensional polygon",
            });
        }
        let vol = self.vol();
        let b = self.boundary_count();
        // Pick: vol = 2g + b - 2, solved for g.
        let g = (vol - b + 2) / 2;
        Ok(PolygonInvariants { vol, g, b })
    }

    /// Degree of the generic branching divisor: m = 2·vol + 2·g − 2.
    pub fn branching_degree(&self) -> Result<i64> {
        let inv = self.invariants()?;
        Ok(2 * inv.vol + 2 * inv.g - 2)
    }

    /// Number of interior lattice points counted directly (used by tests
    /// to cross-check the Pick-derived value).
    pub fn interior_count_direct(&self) -> i64 {
        self.all_points.len() as i64 - self.boundary_count()
    }

    /// Primitive edge directions of the hull as angles in [0, π).
    ///
    /// A direction [cos θ : sin θ] aligned with a hull edge is exactly
    /// where fibers of the Gauss map degenerate toward the toric boundary,
    /// so trackers must treat these finitely many angles as events.
    pub fn edge_direction_angles(&self) -> Vec<f64> {
        let v = &self.vertices;
        let n = v.len();
        if n < 2 {
            return Vec::new();
        }
        let mut dirs: Vec<f64> = Vec::new();
        let count = if n == 2 { 1 } else { n };
        for i in 0..count {
            let (x1, y1) = v[i];
            let (x2, y2) = v[(i + 1) % n];
            let (dx, dy) = ((x2 - x1) as f64, (y2 - y1) as f64);
            let mut th = dy.atan2(dx) % std::f64::consts::PI;
            if th < 0.0 {
                th += std::f64::consts::PI;
            }
            // The value π collapses to 0 (directions are mod π).
            if (th - std::f64::consts::PI).abs() < 1e-12 {
                th = 0.0;
            }
            if !dirs.iter().any(|&d| (d - th).abs() < 1e-9) {
                dirs.push(th);
            }
        }
        dirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        dirs
    }
}

/// Bounding-box scan with half-plane tests: every lattice point on or
/// inside the hull. Exact integers; polygons at this scale are tiny.
fn enumerate_lattice_points(vertices: &[(i64, i64)]) -> Vec<(i64, i64)> {
    if vertices.is_empty() {
        return Vec::new();
    }
    if vertices.len() == 1 {
        return vec![vertices[0]];
    }
    if vertices.len() == 2 {
        // Lattice points on the segment.
        let (a, b) = (vertices[0], vertices[1]);
        let g = gcd(b.0 - a.0, b.1 - a.1);
        let (sx, sy) = ((b.0 - a.0) / g, (b.1 - a.1) / g);
        return (0..=g).map(|k| (a.0 + k * sx, a.1 + k * sy)).collect();
    }
    let xmin = vertices.iter().map(|p| p.0).min().unwrap();
    let xmax = vertices.iter().map(|p| p.0).max().unwrap();
    let ymin = vertices.iter().map(|p| p.1).min().unwrap();
    let ymax = vertices.iter().map(|p| p.1).max().unwrap();
    let n = vertices.len();
    let mut out = Vec::new();
    for x in xmin..=xmax {
        for y in ymin..=ymax {
            let p = (x, y);
            // Counterclockwise hull: p is inside or on iff every edge
            // cross product is >= 0.
            let inside = (0..n).all(|i| cross(vertices[i], vertices[(i + 1) % n], p) >= 0);
            if inside {
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pts: &[(i64, i64)]) -> LatticePolygon {
        LatticePolygon::from_support(pts).unwrap()
    }

    #[test]
    fn unit_square_hull_and_invariants() {
        let p = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        assert_eq!(p.vertices.len(), 4);
        let inv = p.invariants().unwrap();
        assert_eq!((inv.vol, inv.g, inv.b), (2, 0, 4));
        assert_eq!(p.branching_degree().unwrap(), 2);
    }

    #[test]
    fn quadrilateral_with_all_points_on_boundary() {
        // Support of 1 + z + w + zw + z^2: hull (0,0),(2,0),(1,1),(0,1),
        // five lattice points, none interior.
        let p = poly(&[(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]);
        assert_eq!(p.all_points.len(), 5);
        let inv = p.invariants().unwrap();
        assert_eq!((inv.vol, inv.g, inv.b), (3, 0, 5));
        assert_eq!(p.branching_degree().unwrap(), 4);
    }

    #[test]
    fn dilated_simplex_interior_point() {
        // 3Δ: vertices (0,0),(3,0),(0,3); ten lattice points, one interior.
        let support: Vec<(i64, i64)> = (0..=3)
            .flat_map(|i| (0..=(3 - i)).map(move |j| (i, j)))
            .collect();
        let p = poly(&support);
        assert_eq!(p.all_points.len(), 10);
        let inv = p.invariants().unwrap();
        assert_eq!((inv.vol, inv.g, inv.b), (9, 1, 9));
        assert_eq!(p.branching_degree().unwrap(), 18 + 2 - 2);
        assert_eq!(p.interior_count_direct(), 1);
    }

    #[test]
    fn unit_triangle_has_no_branching() {
        let p = poly(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(p.branching_degree().unwrap(), 0);
    }

    #[test]
    fn segment_is_degenerate() {
        let p = poly(&[(0, 0), (2, 2)]);
        assert_eq!(p.dimension(), 1);
        assert!(p.invariants().is_err());
        assert_eq!(p.all_points, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn pick_identity_on_assorted_polygons() {
        let cases: Vec<Vec<(i64, i64)>> = vec![
            vec![(0, 0), (1, 0), (0, 1)],
            vec![(0, 0), (1, 0), (1, 1), (0, 1)],
            vec![(0, 0), (2, 0), (1, 1), (0, 1)],
            vec![(0, 0), (3, 0), (0, 3)],
            vec![(0, 0), (4, 1), (3, 4), (-1, 2)],
            vec![(-2, -1), (2, -1), (3, 2), (0, 3), (-3, 1)],
        ];
        for support in cases {
            let p = poly(&support);
            let inv = p.invariants().unwrap();
            // Interior count two ways: Pick and direct enumeration.
            assert_eq!(inv.vol, 2 * inv.g + inv.b - 2, "Pick failed on {support:?}");
            assert_eq!(
                inv.g,
                p.interior_count_direct(),
                "interior count mismatch on {support:?}"
            );
        }
    }

    #[test]
    fn hull_invariant_under_translation() {
        let a = poly(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        let b = poly(&[(5, -3), (6, -3), (5, -2), (6, -2)]);
        assert_eq!(a.vol(), b.vol());
        assert_eq!(a.boundary_count(), b.boundary_count());
        let va: Vec<_> = a.vertices.iter().map(|&(x, y)| (x + 5, y - 3)).collect();
        let mut vb = b.vertices.clone();
        // Same cyclic order; rotate to align starting vertex.
        let start = vb.iter().position(|&v| v == va[0]).unwrap();
        vb.rotate_left(start);
        assert_eq!(va, vb);
    }

    #[test]
    fn edge_directions_of_square_and_simplex() {
        let sq = poly(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let dirs = sq.edge_direction_angles();
        assert_eq!(dirs.len(), 2); // horizontal and vertical, mod π
        assert!((dirs[0] - 0.0).abs() < 1e-12);
        assert!((dirs[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let tri = poly(&[(0, 0), (1, 0), (0, 1)]);
        let dirs = tri.edge_direction_angles();
        assert_eq!(dirs.len(), 3); // 0, π/2, 3π/4
        assert!((dirs[2] - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn empty_support_is_an_error() {
        assert!(matches!(
            LatticePolygon::from_support(&[]),
            Err(CoreError::EmptyPolynomial)
        ));
    }
}
