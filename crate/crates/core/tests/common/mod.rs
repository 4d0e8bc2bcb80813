//! Independent oracles shared by the integration tests. Nothing here calls
//! the code paths it is used to check.

#![allow(dead_code)]

use semdeadline::toy_diffusion::{ConditioningSet, ToyDiffusionConfig};
use semdeadline::QualitySurface;

/// `z_T = (1-eta)^T z_0 + eta * sum_j (1-eta)^(T-1-j) g_j`.
pub fn closed_form_latent(
    mask_step: usize,
    text_step: usize,
    cfg: &ToyDiffusionConfig,
    cond: &ConditioningSet,
) -> Vec<f64> {
    let eta = cfg.pull_rate;
    let t = cfg.steps;
    let z0 = cfg.initial_latent();
    (0..cfg.latent_dim)
        .map(|i| {
            let mut acc = (1.0 - eta).powi(t as i32) * z0[i];
            for j in 0..t {
                let c_s = if j >= mask_step {
                    cond.mask_true[i]
                } else {
                    cond.mask_placeholder[i]
                };
                let c_l = if j >= text_step {
                    cond.text_true[i]
                } else {
                    cond.text_placeholder[i]
                };
                let g = cfg.weight_mask * c_s + cfg.weight_text * c_l;
                acc += eta * (1.0 - eta).powi((t - 1 - j) as i32) * g;
            }
            acc
        })
        .collect()
}

/// Brute-force farthest cell with `q >= eps`, ties broken by larger smaller
/// coordinate then smaller mask step. Sorts all candidates instead of a
/// running argmax.
pub fn brute_force_deadline(surface: &QualitySurface, eps: f64) -> Option<(usize, usize)> {
    let n = surface.steps() + 1;
    let mut cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| surface.quality_at(a, b) >= eps)
        .collect();
    cells.sort_by_key(|&(a, b)| {
        (
            std::cmp::Reverse(a * a + b * b),
            std::cmp::Reverse(a.min(b)),
            a,
        )
    });
    cells.first().copied()
}

/// Golden-section minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > rel_tol * hi.abs().max(1e-300) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}
