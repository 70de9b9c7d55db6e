//! Parameter scans over curve families: discriminant membership, margin,
//! and (optionally) component counts per grid cell.

use crate::config::Tolerances;
use crate::critlocus::monodromy::{is_discriminantal, monodromy_b0};
use crate::polyarith::BivariateLaurent;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Result for one grid cell. Errors are recorded as strings; a scan
/// never aborts on a cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanCell {
    pub param_re: f64,
    pub param_im: f64,
    pub is_discriminantal: Option<bool>,
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// A full scan: per-cell records plus exploratory summary statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub cells: Vec<ScanCell>,
    /// Smallest component count observed across non-discriminantal
    /// cells where counting succeeded (exploratory lower-bound probe).
    pub min_b0: Option<usize>,
    /// Interior lattice point count of the family's Newton polygon, when
    /// defined and constant across the scan.
    pub polygon_genus: Option<i64>,
}

/// Scans a one-complex-parameter family over a list of parameter values.
///
/// For each cell: discriminant membership and margin; when the cell is
/// non-discriminantal and `count_components` is set, a monodromy count.
/// Cell-level failures are recorded in the cell and the scan continues.
pub fn scan_family<F>(
    template: F,
    grid: &[Complex64],
    count_components: bool,
    steps: usize,
    margin_tol: f64,
    tols: &Tolerances,
) -> ScanResult
where
    F: Fn(Complex64) -> BivariateLaurent,
{
    let mut cells = Vec::with_capacity(grid.len());
    let mut min_b0: Option<usize> = None;
    let mut genus: Option<i64> = None;
    for &alpha in grid {
        let f = template(alpha);
        if genus.is_none() {
            if let Ok(polygon) = f.newton_polygon() {
                if let Ok(inv) = polygon.invariants() {
                    genus = Some(inv.g);
                }
            }
        }
        let mut cell = ScanCell {
            param_re: alpha.re,
            param_im: alpha.im,
            is_discriminantal: None,
            margin: None,
            b0: None,
            error: None,
        };
        match is_discriminantal(&f, margin_tol, tols) {
            Ok((disc, margin)) => {
                cell.is_discriminantal = Some(disc);
                cell.margin = Some(margin);
                if !disc && count_components {
                    match monodromy_b0(&f, steps, margin_tol, tols) {
                        Ok(r) => {
                            min_b0 = Some(min_b0.map_or(r.b0, |m| m.min(r.b0)));
                            cell.b0 = Some(r.b0);
                        }
                        Err(e) => cell.error = Some(e.to_string()),
                    }
                }
            }
            Err(e) => cell.error = Some(e.to_string()),
        }
        cells.push(cell);
    }
    ScanResult {
        cells,
        min_b0,
        polygon_genus: genus,
    }
}
