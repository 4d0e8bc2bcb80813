//! Quality surfaces `PSNR(t_s, t_l)` over the arrival-step grid.
//!
//! A surface can come from the toy receiver, from a JSON grid file (for
//! example one produced by a real diffusion model) or from a parametric
//! concave stand-in. All of them normalize PSNR to a quality ratio
//! `q = min(1, psnr / psnr_ref)` in `[0, 1]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::toy_diffusion::{arrival_step, ConditioningSet, GridDocument, ToyDiffusionConfig};

/// PSNR reference used by parametric surfaces.
pub const PARAMETRIC_PSNR_REF: f64 = 60.0;

#[derive(Debug, Clone, PartialEq)]
pub struct QualitySurface {
    omega: f64,
    steps: usize,
    psnr: Vec<f64>,
    psnr_ref: f64,
    psnr_cap: f64,
    explicit_ref: bool,
}

/// Shape of the parametric surface `q = clamp(1 - w_s u_s^p - w_l u_l^p, 0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParametricParams {
    pub weight_mask: f64,
    pub weight_text: f64,
    pub exponent: f64,
    pub steps: usize,
    pub omega: f64,
}

impl Default for ParametricParams {
    fn default() -> Self {
        Self {
            weight_mask: 0.6,
            weight_text: 0.5,
            exponent: 2.0,
            steps: 20,
            omega: 0.05,
        }
    }
}

/// The continuous generating function of the parametric surface, on
/// normalized delays `u in [0, 1]^2`.
pub fn parametric_quality(
    weight_mask: f64,
    weight_text: f64,
    exponent: f64,
    u_s: f64,
    u_l: f64,
) -> f64 {
    (1.0 - weight_mask * u_s.powf(exponent) - weight_text * u_l.powf(exponent)).clamp(0.0, 1.0)
}

impl QualitySurface {
    /// Builds a surface from a `(T+1) x (T+1)` PSNR matrix. The normalization
    /// reference is the largest entry other than `(0, 0)`.
    pub fn from_psnr_rows(omega: f64, rows: Vec<Vec<f64>>, psnr_cap: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("PSNR grid must be square".into()));
        }
        Self::build(omega, rows.into_iter().flatten().collect(), psnr_cap, None)
    }

    /// Builds a surface directly from normalized qualities; stored PSNR is
    /// `q * psnr_ref`.
    pub fn from_quality_rows(omega: f64, rows: Vec<Vec<f64>>, psnr_ref: f64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("quality grid must be square".into()));
        }
        if rows.iter().flatten().any(|q| !(0.0..=1.0).contains(q)) {
            return Err(Error::Validation(
                "quality values must lie in [0, 1]".into(),
            ));
        }
        let psnr = rows.into_iter().flatten().map(|q| q * psnr_ref).collect();
        Self::build(omega, psnr, psnr_ref, Some(psnr_ref))
    }

    /// Validates and ingests a grid document.
    pub fn from_grid(doc: &GridDocument) -> Result<Self> {
        let len = doc.grid.len();
        let side = (len as f64).sqrt().round() as usize;
        if len == 0 || side * side != len {
            return Err(Error::Validation(format!(
                "grid has {len} entries, which is not a non-empty square"
            )));
        }
        if let Some(t) = doc.steps {
            if t + 1 != side {
                return Err(Error::Validation(format!(
                    "T = {t} implies {} cells but the grid has {len}",
                    (t + 1) * (t + 1)
                )));
            }
        }
        Self::build(doc.omega, doc.grid.clone(), doc.psnr_cap, doc.psnr_ref)
    }

    /// Parses and validates a JSON grid document.
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_grid(&GridDocument::from_json(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Runs the toy receiver over every arrival-step pair.
    pub fn from_toy(cfg: &ToyDiffusionConfig) -> Result<Self> {
        let cond = ConditioningSet::for_config(cfg)?;
        Self::from_grid(&GridDocument::from_toy(cfg, &cond)?)
    }

    /// Samples the parametric concave surface on the step grid.
    pub fn from_parametric(params: &ParametricParams) -> Result<Self> {
        let ParametricParams {
            weight_mask,
            weight_text,
            exponent,
            steps,
            omega,
        } = *params;
        if !(weight_mask >= 0.0 && weight_text >= 0.0) {
            return Err(Error::domain("parametric weights must be non-negative"));
        }
        if exponent.is_nan() || exponent < 1.0 || exponent.is_infinite() {
            return Err(Error::domain("parametric exponent must be at least 1"));
        }
        if steps == 0 || omega.is_nan() || omega <= 0.0 {
            return Err(Error::domain(
                "parametric surface needs T >= 1 and omega > 0",
            ));
        }
        let horizon = steps as f64 * omega;
        let u = |k: usize| ((k as f64 * omega) / horizon).min(1.0);
        let rows = (0..=steps)
            .map(|a| {
                (0..=steps)
                    .map(|b| parametric_quality(weight_mask, weight_text, exponent, u(a), u(b)))
                    .collect()
            })
            .collect();
        Self::from_quality_rows(omega, rows, PARAMETRIC_PSNR_REF)
    }

    fn build(omega: f64, psnr: Vec<f64>, psnr_cap: f64, psnr_ref: Option<f64>) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Validation(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !psnr_cap.is_finite() {
            return Err(Error::Validation("psnr_cap must be finite".into()));
        }
        let side = (psnr.len() as f64).sqrt().round() as usize;
        if side < 2 || side * side != psnr.len() {
            return Err(Error::Validation("grid must be square with T >= 1".into()));
        }
        if let Some((i, v)) = psnr.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite PSNR {v} at cell ({}, {})",
                i / side,
                i % side
            )));
        }
        if let Some((i, v)) = psnr.iter().enumerate().find(|(_, &v)| v > psnr_cap) {
            return Err(Error::Validation(format!(
                "PSNR {v} at cell ({}, {}) exceeds cap {psnr_cap}",
                i / side,
                i % side
            )));
        }
        let explicit_ref = psnr_ref.is_some();
        let psnr_ref = match psnr_ref {
            Some(r) => r,
            None => psnr[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max),
        };
        if !(psnr_ref.is_finite() && psnr_ref > 0.0) {
            return Err(Error::Validation(format!(
                "normalization reference must be positive, got {psnr_ref}"
            )));
        }
        Ok(Self {
            omega,
            steps: side - 1,
            psnr,
            psnr_ref,
            psnr_cap,
            explicit_ref,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Number of denoising steps `T`; the grid is `(T+1) x (T+1)`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn psnr_ref(&self) -> f64 {
        self.psnr_ref
    }

    pub fn psnr_cap(&self) -> f64 {
        self.psnr_cap
    }

    /// PSNR at arrival steps `(mask, text)`.
    pub fn psnr_at(&self, mask_step: usize, text_step: usize) -> f64 {
        self.psnr[mask_step * (self.steps + 1) + text_step]
    }

    /// Normalized quality at arrival steps `(mask, text)`.
    pub fn quality_at(&self, mask_step: usize, text_step: usize) -> f64 {
        (self.psnr_at(mask_step, text_step) / self.psnr_ref).clamp(0.0, 1.0)
    }

    /// Delay in seconds corresponding to a step index.
    pub fn step_time(&self, step: usize) -> f64 {
        step as f64 * self.omega
    }

    /// Looks up `(psnr, q)` for arrival delays in seconds. Delays quantize up
    /// to the next step boundary; anything past the horizon reads the
    /// never-arrived row or column.
    pub fn evaluate(&self, t_s: f64, t_l: f64) -> Result<(f64, f64)> {
        let a = arrival_step(t_s, self.omega, self.steps)?;
        let b = arrival_step(t_l, self.omega, self.steps)?;
        Ok((self.psnr_at(a, b), self.quality_at(a, b)))
    }

    /// All grid cells with `q >= epsilon`.
    pub fn superlevel_set(&self, epsilon: f64) -> Result<Vec<(usize, usize)>> {
        check_epsilon(epsilon)?;
        let n = self.steps + 1;
        Ok((0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.quality_at(a, b) >= epsilon)
            .collect())
    }

    /// Largest quality over the whole grid.
    pub fn max_quality(&self) -> f64 {
        let n = self.steps + 1;
        (0..n * n)
            .map(|i| self.quality_at(i / n, i % n))
            .fold(0.0, f64::max)
    }

    pub fn to_document(&self) -> GridDocument {
        GridDocument {
            omega: self.omega,
            steps: Some(self.steps),
            psnr_cap: self.psnr_cap,
            psnr_ref: self.explicit_ref.then_some(self.psnr_ref),
            grid: self.psnr.clone(),
        }
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::domain(format!(
            "threshold must lie in [0, 1], got {epsilon}"
        )));
    }
    Ok(())
}
