//! Counting connected components of the real-valued critical locus by
//! numerical monodromy.
//!
//! The locus S(f) = γ̃⁻¹(RP¹) is a disjoint union of circles covering
//! RP¹ through γ̃, vol(Δ)-to-one. Sweeping the direction
//! [cos θ : sin θ] once around RP¹ (θ from θ₀ to θ₀ + π) and tracking
//! how the fiber permutes identifies each circle with a cycle of the
//! closure permutation: b₀ is the cycle count.
//!
//! The tracker is re-solve-and-match with a movement gate: every
//! accepted step must move each fiber point by strictly less than a
//! fixed fraction of the smallest pairwise separation before and after
//! the step, which makes mislabeling impossible while the gate holds;
//! when the gate fails the step is bisected down to an angular floor and
//! the track is *rejected* — never silently continued — if the floor is
//! reached. Directions where fiber points leave the torus (the finitely
//! many primitive edge directions of the Newton polygon) are crossed by
//! re-solving the full system just past the crossing and matching
//! through it under the same gate.

use crate::config::Tolerances;
use crate::critlocus::fiber::{fiber_points_raw, min_separation_embedded, Embedding};
use crate::error::{CoreError, Result};
use crate::loggauss::{critical_points, pencil_member, ProjPoint};
use crate::newton::refine_system;
use crate::polyarith::BivariateLaurent;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The record of one full monodromy sweep: accepted base-grid steps with
/// their fibers, the closure permutation, and the worst separation seen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberTrack {
    /// Direction angles θ of the recorded steps, increasing from θ₀ to
    /// θ₀ + π.
    pub direction_steps: Vec<f64>,
    /// Per-step fiber, as [z_re, z_im, w_re, w_im] rows in tracking
    /// order (row i continues the point that started at index i).
    pub fibers: Vec<Vec<[f64; 4]>>,
    /// Closure permutation: the point ending the sweep at index i
    /// matches the starting point at index `permutation[i]`.
    pub permutation: Vec<usize>,
    /// Smallest pairwise fiber separation observed at recorded steps
    /// (Fubini–Study metric of the support embedding).
    pub min_separation: f64,
}

/// Result of a monodromy count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonodromyResult {
    pub b0: usize,
    pub permutation: Vec<usize>,
    pub track: FiberTrack,
}

/// Decides membership in the discriminantal family: does some branch
/// value of the logarithmic Gauss map lie on RP¹ within `tol`? Returns
/// the decision together with the minimum distance-to-RP¹ over branch
/// values (∞ when the critical locus is empty).
pub fn is_discriminantal(
    f: &BivariateLaurent,
    tol: f64,
    tols: &Tolerances,
) -> Result<(bool, f64)> {
    let set = critical_points(f, tols)?;
    let margin = set
        .points
        .iter()
        .map(|p| p.branch_value.rp1_distance())
        .fold(f64::INFINITY, f64::min);
    Ok((margin <= tol, margin))
}

/// Connected components of S(f) by numerical monodromy.
///
/// Refuses with `SingularCriticalLocus` unless every branch value keeps
/// a distance > `margin_tol` from RP¹ (otherwise S(f) is singular and a
/// component count is not well-defined). Tracking failures surface as
/// `TrackingCollision` (gate bisection hit its floor, or the closure
/// match was ambiguous) or `EdgeDirectionCrossing` (a toric boundary
/// crossing could not be matched) — never as a wrong count.
///
/// `steps` is the base grid over [θ₀, θ₀ + π]; 0 means the configured
/// default. The result always satisfies 1 ≤ b₀ ≤ vol(Δ).
pub fn monodromy_b0(
    f: &BivariateLaurent,
    steps: usize,
    margin_tol: f64,
    tols: &Tolerances,
) -> Result<MonodromyResult> {
    let (disc, margin) = is_discriminantal(f, margin_tol, tols)?;
    if disc {
        return Err(CoreError::SingularCriticalLocus { margin });
    }
    let polygon = f.newton_polygon()?;
    if polygon.dimension() < 2 {
        return Err(CoreError::IdenticallyZeroResultant);
    }
    let vol = polygon.invariants()?.vol as usize;

    // Balance for conditioning; permutations and b0 are invariant under
    // toric rescales, and recorded fibers are mapped back afterwards.
    let (fb, lam, mu) = f.balanced();
    let steps = if steps == 0 { tols.tracking_steps } else { steps };
    let mut result = track(&fb, vol, steps, tols)?;
    // A point (ẑ, ŵ) on the balanced curve corresponds to (λẑ, μŵ) on
    // the original one.
    for fiber in result.track.fibers.iter_mut() {
        for row in fiber.iter_mut() {
            let z = Complex64::new(row[0], row[1]) * lam;
            let w = Complex64::new(row[2], row[3]) * mu;
            *row = [z.re, z.im, w.re, w.im];
        }
    }
    debug_assert!(result.b0 >= 1 && result.b0 <= vol);
    Ok(result)
}

/// One flow step: Newton-continue each fiber point to the pencil of
/// `th_to`, accepting only when every point moved by less than
/// gate × (smallest separation before and after). Bisects recursively on
/// failure.
#[allow(clippy::too_many_arguments)]
fn flow(
    f: &BivariateLaurent,
    emb: &Embedding,
    fib: &[(Complex64, Complex64)],
    th_from: f64,
    th_to: f64,
    depth: usize,
    tols: &Tolerances,
) -> Result<Vec<(Complex64, Complex64)>> {
    let pencil = pencil_member(f, &ProjPoint::from_angle(th_to));
    let mut cand: Vec<(Complex64, Complex64)> = Vec::with_capacity(fib.len());
    let mut all_ok = !pencil.is_zero();
    if all_ok {
        for &(z, w) in fib {
            let r = refine_system(f, &pencil, z, w, f64::INFINITY, tols.fiber_residual, 60);
            if !r.accepted {
                all_ok = false;
                break;
            }
            cand.push((r.z, r.w));
        }
    }
    if all_ok {
        let e_old: Vec<Vec<Complex64>> = fib.iter().map(|&(z, w)| emb.embed(z, w)).collect();
        let e_new: Vec<Vec<Complex64>> = cand.iter().map(|&(z, w)| emb.embed(z, w)).collect();
        let sep = min_separation_embedded(&e_old).min(min_separation_embedded(&e_new));
        let moved = e_old
            .iter()
            .zip(e_new.iter())
            .map(|(a, b)| Embedding::dist(a, b))
            .fold(0.0, f64::max);
        if moved < tols.tracking_gate * sep {
            return Ok(cand);
        }
    }
    if depth > tols.tracking_max_depth || (th_to - th_from).abs() < tols.tracking_floor {
        return Err(CoreError::TrackingCollision {
            theta: th_to,
            stage: "flow bisection floor",
        });
    }
    let mid = 0.5 * (th_from + th_to);
    let half = flow(f, emb, fib, th_from, mid, depth + 1, tols)?;
    flow(f, emb, &half, mid, th_to, depth + 1, tols)
}

/// Injective greedy matching between two equal-size embedded fibers:
/// process candidate pairs by increasing distance. Returns, for each
/// index of `ea`, its match in `eb`.
fn greedy_match(ea: &[Vec<Complex64>], eb: &[Vec<Complex64>]) -> Vec<usize> {
    let n = ea.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, a) in ea.iter().enumerate() {
        for (j, b) in eb.iter().enumerate() {
            pairs.push((Embedding::dist(a, b), i, j));
        }
    }
    pairs.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    let mut mi = vec![false; n];
    let mut mj = vec![false; n];
    let mut out = vec![usize::MAX; n];
    for (_, i, j) in pairs {
        if !mi[i] && !mj[j] {
            mi[i] = true;
            mj[j] = true;
            out[i] = j;
        }
    }
    out
}

/// Matches two fibers under the movement gate; `None` when the match is
/// ambiguous (some matched pair moved at least gate × separation).
fn gated_match(
    emb: &Embedding,
    fa: &[(Complex64, Complex64)],
    fb: &[(Complex64, Complex64)],
    tols: &Tolerances,
) -> Option<Vec<usize>> {
    let ea: Vec<Vec<Complex64>> = fa.iter().map(|&(z, w)| emb.embed(z, w)).collect();
    let eb: Vec<Vec<Complex64>> = fb.iter().map(|&(z, w)| emb.embed(z, w)).collect();
    let m = greedy_match(&ea, &eb);
    let moved = m
        .iter()
        .enumerate()
        .map(|(i, &j)| Embedding::dist(&ea[i], &eb[j]))
        .fold(0.0, f64::max);
    let sep = min_separation_embedded(&ea).min(min_separation_embedded(&eb));
    if moved < tols.tracking_gate * sep {
        Some(m)
    } else {
        None
    }
}

fn cycle_count(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut count = 0;
    for start in 0..perm.len() {
        if !seen[start] {
            count += 1;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
            }
        }
    }
    count
}

/// The gated sweep on a (balanced) polynomial.
fn track(
    f: &BivariateLaurent,
    vol: usize,
    steps: usize,
    tols: &Tolerances,
) -> Result<MonodromyResult> {
    let emb = Embedding::new(f);
    let h = std::f64::consts::PI / steps as f64;

    // Start fiber: nudge θ₀ forward until the fiber is complete and
    // well-separated (θ₀ may sit near a branch direction for particular
    // curves; the nudge is deterministic).
    let mut theta0 = tols.tracking_theta0;
    let mut fib: Option<Vec<(Complex64, Complex64)>> = None;
    for nudge in 0..8 {
        let t0 = tols.tracking_theta0 + nudge as f64 * 0.37 * h;
        if let Some((cand, _)) = fiber_points_raw(f, &ProjPoint::from_angle(t0), &emb, tols) {
            if cand.len() == vol {
                let sep = crate::critlocus::fiber::min_separation(&emb, &cand);
                if sep > tols.start_separation {
                    theta0 = t0;
                    fib = Some(cand);
                    break;
                }
            }
        }
    }
    let Some(mut fib) = fib else {
        return Err(CoreError::TrackingCollision {
            theta: tols.tracking_theta0,
            stage: "no well-separated start fiber",
        });
    };
    let start_fib = fib.clone();

    // Boundary-crossing events: primitive edge directions of the Newton
    // polygon, lifted into (θ₀, θ₀ + π).
    let polygon = f.newton_polygon()?;
    let mut events: Vec<f64> = Vec::new();
    for c in polygon.edge_direction_angles() {
        for m in -1..=2 {
            let e = c + m as f64 * std::f64::consts::PI;
            if e > theta0 && e < theta0 + std::f64::consts::PI - 1e-12 {
                events.push(e);
            }
        }
    }
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut record_thetas: Vec<f64> = vec![theta0];
    let mut record_fibers: Vec<Vec<[f64; 4]>> = vec![to_rows(&fib)];
    let mut min_sep_seen = crate::critlocus::fiber::min_separation(&emb, &fib);

    let end = theta0 + std::f64::consts::PI;
    let mut th = theta0;
    let mut k = 1usize;
    while th < end - 1e-12 {
        let th_next = (theta0 + k as f64 * h).min(end);
        let pending: Vec<f64> = events
            .iter()
            .copied()
            .filter(|&c| c > th && c <= th_next + 1e-15)
            .collect();
        if let Some(&c) = pending.first() {
            // Edge-direction crossing: flow close, re-solve just past,
            // match through under the gate.
            let mut crossed = false;
            let mut deltas = tols.crossing_deltas.clone();
            if let Some(first) = deltas.first_mut() {
                *first = first.min(h / 3.0);
            }
            for delta in deltas {
                let Ok(fib_pre) = flow(f, &emb, &fib, th, c - delta, 0, tols) else {
                    continue;
                };
                let Some((fib_post, _)) =
                    fiber_points_raw(f, &ProjPoint::from_angle(c + delta), &emb, tols)
                else {
                    continue;
                };
                if fib_post.len() != vol {
                    continue;
                }
                let Some(m) = gated_match(&emb, &fib_pre, &fib_post, tols) else {
                    continue;
                };
                fib = (0..vol).map(|i| fib_post[m[i]]).collect();
                th = c + delta;
                crossed = true;
                break;
            }
            if !crossed {
                return Err(CoreError::EdgeDirectionCrossing { theta: c });
            }
        } else {
            fib = flow(f, &emb, &fib, th, th_next, 0, tols)?;
            th = th_next;
            k += 1;
            let sep = crate::critlocus::fiber::min_separation(&emb, &fib);
            if sep < tols.collision_threshold {
                return Err(CoreError::TrackingCollision {
                    theta: th,
                    stage: "fiber separation under collision threshold",
                });
            }
            min_sep_seen = min_sep_seen.min(sep);
            record_thetas.push(th);
            record_fibers.push(to_rows(&fib));
        }
    }

    // Closure: [cos(θ₀+π) : sin(θ₀+π)] = [cos θ₀ : sin θ₀] in ℂP¹, so
    // match the transported fiber back to the start fiber.
    let Some(perm) = gated_match(&emb, &fib, &start_fib, tols) else {
        return Err(CoreError::TrackingCollision {
            theta: end,
            stage: "closure match ambiguous",
        });
    };
    let b0 = cycle_count(&perm);
    Ok(MonodromyResult {
        b0,
        permutation: perm.clone(),
        track: FiberTrack {
            direction_steps: record_thetas,
            fibers: record_fibers,
            permutation: perm,
            min_separation: min_sep_seen,
        },
    })
}

fn to_rows(fib: &[(Complex64, Complex64)]) -> Vec<[f64; 4]> {
    fib.iter()
        .map(|&(z, w)| [z.re, z.im, w.re, w.im])
        .collect()
}
