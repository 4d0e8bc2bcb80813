//! Semantic deadline points and curves.
//!
//! For a quality threshold `epsilon`, the deadline point is the cell of the
//! superlevel set `{q >= epsilon}` farthest from the origin in delay space:
//! the latest pair of arrival times that still meets the threshold. Tracing it
//! over `K` evenly spaced thresholds gives the deadline curve.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surface::{check_epsilon, QualitySurface};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeadlinePoint {
    pub epsilon: f64,
    pub mask_step: usize,
    pub text_step: usize,
    /// Mask deadline in seconds.
    pub t_s: f64,
    /// Text deadline in seconds.
    pub t_l: f64,
}

/// One threshold of a curve; `point` is `None` when no cell reaches it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub epsilon: f64,
    pub point: Option<DeadlinePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeadlineCurve {
    /// Ordered by increasing epsilon.
    pub thresholds: Vec<Threshold>,
    pub eps_th: f64,
    /// Grid cells inspected while building the curve.
    pub cells_visited: usize,
}

/// Total order on candidate cells: larger norm first, then larger smaller
/// coordinate, then smaller mask step. Returns `Greater` when `a` wins.
pub fn tie_break(a: (usize, usize), b: (usize, usize)) -> Ordering {
    let norm = |(s, l): (usize, usize)| s * s + l * l;
    norm(a)
        .cmp(&norm(b))
        .then_with(|| a.0.min(a.1).cmp(&b.0.min(b.1)))
        .then_with(|| b.0.cmp(&a.0))
}

fn scan(surface: &QualitySurface, epsilon: f64, visited: &mut usize) -> Option<(usize, usize)> {
    let n = surface.steps() + 1;
    let mut best: Option<(usize, usize)> = None;
    for a in 0..n {
        for b in 0..n {
            *visited += 1;
            if surface.quality_at(a, b) < epsilon {
                continue;
            }
            if best.is_none_or(|cur| tie_break((a, b), cur) == Ordering::Greater) {
                best = Some((a, b));
            }
        }
    }
    best
}

fn make_point(surface: &QualitySurface, epsilon: f64, (a, b): (usize, usize)) -> DeadlinePoint {
    DeadlinePoint {
        epsilon,
        mask_step: a,
        text_step: b,
        t_s: surface.step_time(a),
        t_l: surface.step_time(b),
    }
}

/// Farthest-from-origin cell meeting `epsilon`.
pub fn deadline_point(surface: &QualitySurface, epsilon: f64) -> Result<DeadlinePoint> {
    check_epsilon(epsilon)?;
    let mut visited = 0;
    scan(surface, epsilon, &mut visited)
        .map(|cell| make_point(surface, epsilon, cell))
        .ok_or(Error::UnachievableThreshold { epsilon })
}

/// Evenly spaced thresholds `eps_th + k (1 - eps_th) / (K - 1)`, ending at 1.
pub fn threshold_levels(eps_th: f64, k: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&eps_th) {
        return Err(Error::domain(format!(
            "eps_th must lie in [0, 1), got {eps_th}"
        )));
    }
    if k < 2 {
        return Err(Error::domain(format!("K must be at least 2, got {k}")));
    }
    let step = (1.0 - eps_th) / (k - 1) as f64;
    Ok((0..k)
        .map(|i| {
            if i + 1 == k {
                1.0
            } else {
                eps_th + i as f64 * step
            }
        })
        .collect())
}

/// Deadline points for `K` thresholds spanning `[eps_th, 1]`, one full grid
/// scan per threshold.
pub fn deadline_curve(surface: &QualitySurface, eps_th: f64, k: usize) -> Result<DeadlineCurve> {
    let levels = threshold_levels(eps_th, k)?;
    let mut visited = 0;
    let thresholds = levels
        .into_iter()
        .map(|epsilon| Threshold {
            epsilon,
            point: scan(surface, epsilon, &mut visited).map(|c| make_point(surface, epsilon, c)),
        })
        .collect();
    Ok(DeadlineCurve {
        thresholds,
        eps_th,
        cells_visited: visited,
    })
}

impl DeadlineCurve {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// CSV with columns `eps,t_s,t_l,achievable`. Unachievable rows leave the
    /// delays empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,t_s,t_l,achievable\n");
        for th in &self.thresholds {
            match th.point {
                Some(p) => writeln!(out, "{},{},{},1", th.epsilon, p.t_s, p.t_l),
                None => writeln!(out, "{},,,0", th.epsilon),
            }
            .expect("writing to a String");
        }
        out
    }
}
