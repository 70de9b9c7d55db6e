//! Amoeba and contour sampling in the (log|z|, log|w|) plane, with
//! deterministic SVG output.
//!
//! Rendering is sampling-based rather than raster-membership-based: every
//! emitted point is a verified solution of the curve equation (amoeba
//! samples come from column-wise univariate solves, contour samples from
//! critical-fiber solves), so the picture carries its own certificate.

use num_complex::Complex64;
use serde::Serialize;

use crate::config::Tolerances;
use crate::critlocus::fiber;
use crate::error::{CoreError, Result};
use crate::loggauss::ProjPoint;
use crate::polyarith::{BivariateLaurent, UnivariatePoly};

/// Which verified set a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleKind {
    /// Point of the amoeba: image of a verified curve point.
    Amoeba,
    /// Point of the contour: image of a verified critical-fiber point.
    Contour,
}

/// One verified sample in the (log|z|, log|w|) plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AmoebaSample {
    pub x: f64,
    pub y: f64,
    pub kind: SampleKind,
    /// Relative residual of the witness torus point on the curve.
    pub residual: f64,
}

/// Axis-aligned rectangle in the (log|z|, log|w|) plane.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite()) {
            return Err(CoreError::InvalidInput("window bounds must be finite".into()));
        }
        if !(x_max > x_min && y_max > y_min) {
            return Err(CoreError::InvalidInput(
                "window must have positive extent in both axes".into(),
            ));
        }
        Ok(Window { x_min, x_max, y_min, y_max })
    }

    /// The square [-r, r] × [-r, r].
    pub fn square(r: f64) -> Self {
        Window { x_min: -r, x_max: r, y_min: -r, y_max: r }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    /// Smallest window containing all samples, padded by 10% per side;
    /// a unit square around the origin when there are no samples.
    pub fn around(samples: &[AmoebaSample]) -> Self {
        if samples.is_empty() {
            return Window::square(1.0);
        }
        let mut xmin = f64::INFINITY;
        let mut xmax = f64::NEG_INFINITY;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for s in samples {
            xmin = xmin.min(s.x);
            xmax = xmax.max(s.x);
            ymin = ymin.min(s.y);
            ymax = ymax.max(s.y);
        }
        let padx = 0.1 * (xmax - xmin).max(1e-3);
        let pady = 0.1 * (ymax - ymin).max(1e-3);
        Window {
            x_min: xmin - padx,
            x_max: xmax + padx,
            y_min: ymin - pady,
            y_max: ymax + pady,
        }
    }
}

/// A contour direction the sweep had to skip, with the structured reason.
#[derive(Debug, Clone, Serialize)]
pub struct SkippedDirection {
    pub theta: f64,
    pub reason: String,
}

/// A verified point cloud over a window, ready for SVG emission or JSON
/// dumping.
#[derive(Debug, Clone, Serialize)]
pub struct AmoebaImage {
    pub window: Window,
    pub samples: Vec<AmoebaSample>,
    /// Columns per axis pass of the amoeba solver.
    pub nx: usize,
    /// Angular samples per column, or contour directions.
    pub ntheta: usize,
    /// Contour directions skipped with their reasons.
    pub skipped: Vec<SkippedDirection>,
    /// Solver outputs discarded for exceeding the verification residual.
    pub rejected_samples: usize,
}

impl AmoebaImage {
    fn empty(window: Window, nx: usize, ntheta: usize) -> Self {
        AmoebaImage {
            window,
            samples: Vec::new(),
            nx,
            ntheta,
            skipped: Vec::new(),
            rejected_samples: 0,
        }
    }

    /// Folds another image's samples and diagnostics into this one,
    /// keeping this image's window and resolution metadata.
    pub fn absorb(&mut self, other: AmoebaImage) {
        self.samples.extend(other.samples);
        self.skipped.extend(other.skipped);
        self.rejected_samples += other.rejected_samples;
    }
}

/// Inclusive uniform grid over [lo, hi]: endpoints included for n ≥ 2,
/// midpoint for n = 1.
fn grid(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

/// Samples the amoeba of V(f) over `window`: for each of `nx` columns
/// x = log|z| and each of `ntheta` phases θ, solves f(e^{x+iθ}, w) = 0
/// and records (x, log|w|) for every verified torus root inside the
/// window; then the symmetric pass with the roles of z and w swapped.
/// Every emitted sample carries the relative residual of its witness
/// point, which is required to be at most `tol.render_residual`.
pub fn render_amoeba(
    f: &BivariateLaurent,
    window: &Window,
    nx: usize,
    ntheta: usize,
    tol: &Tolerances,
) -> Result<AmoebaImage> {
    if f.is_zero() {
        return Err(CoreError::EmptyPolynomial);
    }
    if nx < 1 || ntheta < 1 {
        return Err(CoreError::InvalidInput("nx and ntheta must be at least 1".into()));
    }
    let (fs, _) = f.shifted_nonnegative();
    let mut img = AmoebaImage::empty(*window, nx, ntheta);
    let tau = std::f64::consts::TAU;
    // Horizontal pass: fixed |z| columns, solve for w.
    for ix in 0..nx {
        let x = grid(window.x_min, window.x_max, ix, nx);
        for it in 0..ntheta {
            let z0 = Complex64::from_polar(x.exp(), tau * it as f64 / ntheta as f64);
            let wpoly = UnivariatePoly::trimmed_relative(fs.coeffs_in_w(z0), 1e-14);
            push_column_roots(f, &wpoly, z0, x, true, window, tol, &mut img);
        }
    }
    // Vertical pass: fixed |w| rows, solve for z.
    for iy in 0..nx {
        let y = grid(window.y_min, window.y_max, iy, nx);
        for it in 0..ntheta {
            let w0 = Complex64::from_polar(y.exp(), tau * it as f64 / ntheta as f64);
            let zpoly = UnivariatePoly::trimmed_relative(fs.coeffs_in_z(w0), 1e-14);
            push_column_roots(f, &zpoly, w0, y, false, window, tol, &mut img);
        }
    }
    Ok(img)
}

/// Solves one column polynomial and records its verified in-window roots.
#[allow(clippy::too_many_arguments)]
fn push_column_roots(
    f: &BivariateLaurent,
    poly: &UnivariatePoly,
    fixed: Complex64,
    fixed_log: f64,
    fixed_is_z: bool,
    window: &Window,
    tol: &Tolerances,
    img: &mut AmoebaImage,
) {
    if poly.is_zero() || poly.degree() == 0 {
        return;
    }
    let Ok(roots) = poly.roots(tol) else {
        img.rejected_samples += poly.degree();
        return;
    };
    for r in &roots.roots {
        let other = r.value;
        let n = other.norm();
        if n < 1.0 / tol.escape_radius || n > tol.escape_radius {
            continue;
        }
        let (z0, w0) = if fixed_is_z { (fixed, other) } else { (other, fixed) };
        let residual = f.relative_residual(z0, w0);
        if residual > tol.render_residual {
            img.rejected_samples += 1;
            continue;
        }
        let (x, y) = if fixed_is_z { (fixed_log, n.ln()) } else { (n.ln(), fixed_log) };
        if window.contains(x, y) {
            img.samples.push(AmoebaSample { x, y, kind: SampleKind::Amoeba, residual });
        }
    }
}

/// Samples the contour — the amoeba image of the critical set S(f) — by
/// sweeping `ntheta` real directions over the half-turn [0, π) and
/// recording the fiber of the logarithmic Gauss map over each. Directions
/// whose fiber solve fails structurally (boundary escape near edge
/// directions, near-branch collisions) are recorded in `skipped` and
/// passed over. For a polynomial whose Newton polygon is a segment the
/// whole curve is critical and the contour coincides with the amoeba, so
/// the column sampler provides the points.
pub fn render_contour(
    f: &BivariateLaurent,
    ntheta: usize,
    tol: &Tolerances,
) -> Result<AmoebaImage> {
    if f.is_zero() {
        return Err(CoreError::EmptyPolynomial);
    }
    if ntheta < 1 {
        return Err(CoreError::InvalidInput("ntheta must be at least 1".into()));
    }
    let polygon = f.newton_polygon()?;
    if polygon.dimension() < 2 {
        // Segment support: the Gauss map is constant on every component,
        // the curve is entirely critical, and contour = amoeba. Reuse the
        // column sampler over a window wide enough to show the lines.
        let mut reach = 3.0f64;
        let coeffs: Vec<f64> = f.terms().map(|(_, c)| c.norm()).collect();
        let cmax = coeffs.iter().cloned().fold(f64::MIN, f64::max);
        let cmin = coeffs.iter().cloned().fold(f64::MAX, f64::min);
        if cmax > 0.0 && cmin > 0.0 {
            reach += (cmax / cmin).ln().abs();
        }
        let window = Window::square(reach);
        let mut img = render_amoeba(f, &window, ntheta.max(2), ntheta, tol)?;
        for s in &mut img.samples {
            s.kind = SampleKind::Contour;
        }
        return Ok(img);
    }
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    let mut rejected = 0usize;
    for k in 0..ntheta {
        let theta = std::f64::consts::PI * k as f64 / ntheta as f64;
        let dir = ProjPoint::from_angle(theta);
        match fiber(f, &dir, tol) {
            Ok(points) => {
                for (z0, w0) in points {
                    let residual = f.relative_residual(z0, w0);
                    if residual > tol.render_residual {
                        rejected += 1;
                        continue;
                    }
                    samples.push(AmoebaSample {
                        x: z0.norm().ln(),
                        y: w0.norm().ln(),
                        kind: SampleKind::Contour,
                        residual,
                    });
                }
            }
            Err(e) => skipped.push(SkippedDirection { theta, reason: e.to_string() }),
        }
    }
    let window = Window::around(&samples);
    Ok(AmoebaImage {
        window,
        samples,
        nx: 0,
        ntheta,
        skipped,
        rejected_samples: rejected,
    })
}

const SVG_SIDE: f64 = 800.0;
const SVG_MARGIN: f64 = 50.0;

/// Renders the image as a deterministic SVG document: fixed canvas, fixed
/// three-decimal coordinate formatting, samples sorted by (class, x, y),
/// style classes "amoeba" and "contour". Byte-identical across runs for
/// identical inputs.
pub fn svg_string(img: &AmoebaImage) -> String {
    let w = &img.window;
    let span_x = w.x_max - w.x_min;
    let span_y = w.y_max - w.y_min;
    let inner = SVG_SIDE - 2.0 * SVG_MARGIN;
    let scale = (inner / span_x).min(inner / span_y);
    let width = 2.0 * SVG_MARGIN + scale * span_x;
    let height = 2.0 * SVG_MARGIN + scale * span_y;
    let px = |x: f64| SVG_MARGIN + (x - w.x_min) * scale;
    let py = |y: f64| height - SVG_MARGIN - (y - w.y_min) * scale;

    let mut out = String::with_capacity(4096 + 64 * img.samples.len());
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.3} {height:.3}\" \
         width=\"{width:.3}\" height=\"{height:.3}\">\n"
    ));
    out.push_str(
        "<style>.frame{fill:none;stroke:#333;stroke-width:1}\
         .axes{stroke:#999;stroke-width:0.75;stroke-dasharray:4 3}\
         .amoeba{fill:#2b6cb0;fill-opacity:0.55}\
         .contour{fill:#c53030;fill-opacity:0.9}</style>\n",
    );
    out.push_str(&format!(
        "<rect class=\"frame\" x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\"/>\n",
        SVG_MARGIN,
        SVG_MARGIN,
        scale * span_x,
        scale * span_y
    ));
    // Dashed coordinate axes where they cross the window.
    if w.x_min < 0.0 && w.x_max > 0.0 {
        out.push_str(&format!(
            "<line class=\"axes\" x1=\"{0:.3}\" y1=\"{1:.3}\" x2=\"{0:.3}\" y2=\"{2:.3}\"/>\n",
            px(0.0),
            py(w.y_min),
            py(w.y_max)
        ));
    }
    if w.y_min < 0.0 && w.y_max > 0.0 {
        out.push_str(&format!(
            "<line class=\"axes\" x1=\"{0:.3}\" y1=\"{1:.3}\" x2=\"{2:.3}\" y2=\"{1:.3}\"/>\n",
            px(w.x_min),
            py(0.0),
            px(w.x_max)
        ));
    }
    let mut ordered: Vec<&AmoebaSample> = img.samples.iter().collect();
    ordered.sort_by(|a, b| {
        let ka = matches!(a.kind, SampleKind::Contour) as u8;
        let kb = matches!(b.kind, SampleKind::Contour) as u8;
        ka.cmp(&kb).then(a.x.total_cmp(&b.x)).then(a.y.total_cmp(&b.y))
    });
    for kind in [SampleKind::Amoeba, SampleKind::Contour] {
        let (class, radius) = match kind {
            SampleKind::Amoeba => ("amoeba", 1.4),
            SampleKind::Contour => ("contour", 1.9),
        };
        let pts: Vec<&&AmoebaSample> = ordered
            .iter()
            .filter(|s| s.kind == kind && w.contains(s.x, s.y))
            .collect();
        if pts.is_empty() {
            continue;
        }
        out.push_str(&format!("<g class=\"{class}\">\n"));
        for s in pts {
            out.push_str(&format!(
                "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{radius}\"/>\n",
                px(s.x),
                py(s.y)
            ));
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// Writes the deterministic SVG for `img` to `path`.
pub fn emit_svg(img: &AmoebaImage, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, svg_string(img))
        .map_err(|e| CoreError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn line() -> BivariateLaurent {
        BivariateLaurent::from_terms([
            ((0i64, 0i64), c(1.0, 0.0)),
            ((1, 0), c(1.0, 0.0)),
            ((0, 1), c(1.0, 0.0)),
        ])
    }

    fn binomial() -> BivariateLaurent {
        BivariateLaurent::from_terms([((1i64, 1i64), c(1.0, 0.0)), ((0, 0), c(-5.0, 0.0))])
    }

    #[test]
    fn line_amoeba_contains_origin_and_avoids_far_point() {
        // 1 + z + w vanishes at z = e^{2πi/3}, w = conj(z), both on the
        // unit torus, so (0, 0) is in the amoeba; at x = 3 the triangle
        // inequality forces |w| = |1 + z| ∈ [e³−1, e³+1], so no sample
        // can sit near (3, 0).
        let tol = Tolerances::default();
        let window = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let img = render_amoeba(&line(), &window, 9, 48, &tol).unwrap();
        assert!(img
            .samples
            .iter()
            .any(|s| s.x.abs() < 1e-12 && s.y.abs() < 1e-12));
        assert!(!img
            .samples
            .iter()
            .any(|s| (s.x - 3.0).abs() < 0.5 && s.y.abs() < 0.5));
        assert_eq!(img.rejected_samples, 0);
        assert!(img.samples.iter().all(|s| s.residual <= tol.render_residual));
    }

    #[test]
    fn binomial_amoeba_is_the_line_x_plus_y_equals_log_c() {
        // |z||w| = 5 exactly on V(zw − 5).
        let tol = Tolerances::default();
        let window = Window::square(4.0);
        let img = render_amoeba(&binomial(), &window, 17, 12, &tol).unwrap();
        assert!(!img.samples.is_empty());
        let target = 5.0f64.ln();
        for s in &img.samples {
            assert!((s.x + s.y - target).abs() < 1e-9, "({}, {})", s.x, s.y);
        }
    }

    #[test]
    fn binomial_contour_coincides_with_its_amoeba() {
        // Constant Gauss map: the whole cylinder is critical, so the
        // contour is the same line the amoeba is.
        let tol = Tolerances::default();
        let img = render_contour(&binomial(), 16, &tol).unwrap();
        assert!(!img.samples.is_empty());
        assert!(img.skipped.is_empty());
        let target = 5.0f64.ln();
        for s in &img.samples {
            assert_eq!(s.kind, SampleKind::Contour);
            assert!((s.x + s.y - target).abs() < 1e-9);
        }
    }

    #[test]
    fn line_contour_lies_on_the_amoeba_boundary() {
        // The amoeba of 1 + z + w is cut out by the three closed
        // conditions eˣ ≤ 1 + eʸ, eʸ ≤ 1 + eˣ, 1 ≤ eˣ + eʸ; its boundary
        // is where one of them is tight. The critical set of a line maps
        // onto that boundary, so every contour sample must satisfy all
        // three and make at least one of them an equality.
        let tol = Tolerances::default();
        let img = render_contour(&line(), 40, &tol).unwrap();
        assert!(img.samples.len() >= 30);
        for s in &img.samples {
            let (ex, ey) = (s.x.exp(), s.y.exp());
            let slack = [1.0 + ey - ex, 1.0 + ex - ey, ex + ey - 1.0];
            for g in slack {
                assert!(g > -1e-9, "sample ({}, {}) outside the amoeba", s.x, s.y);
            }
            let tightest = slack.iter().cloned().fold(f64::MAX, f64::min);
            assert!(
                tightest.abs() < 1e-7,
                "sample ({}, {}) is interior (tightest slack {tightest:.3e})",
                s.x,
                s.y
            );
        }
    }

    #[test]
    fn svg_of_empty_image_is_axes_only_and_valid() {
        let img = AmoebaImage::empty(Window::square(2.0), 0, 0);
        let svg = svg_string(&img);
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("class=\"frame\""));
        assert!(svg.contains("class=\"axes\""));
        assert!(!svg.contains("<circle"));
    }

    #[test]
    fn svg_bytes_are_stable_across_runs() {
        let tol = Tolerances::default();
        let window = Window::square(3.0);
        let a = render_amoeba(&line(), &window, 7, 16, &tol).unwrap();
        let b = render_amoeba(&line(), &window, 7, 16, &tol).unwrap();
        let sa = svg_string(&a);
        let sb = svg_string(&b);
        assert_eq!(sa, sb);
        assert!(sa.contains("class=\"amoeba\""));
        // The file on disk is exactly the string.
        let path = std::env::temp_dir().join(format!("amoeba-svg-{}.svg", std::process::id()));
        emit_svg(&a, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let _ = std::fs::remove_file(&path);
        assert_eq!(bytes, sa.as_bytes());
    }

    #[test]
    fn window_validation_rejects_degenerate_rectangles() {
        assert!(Window::new(0.0, 0.0, -1.0, 1.0).is_err());
        assert!(Window::new(0.0, f64::NAN, -1.0, 1.0).is_err());
        assert!(Window::new(-2.0, 2.0, -1.0, 1.0).is_ok());
    }
}
