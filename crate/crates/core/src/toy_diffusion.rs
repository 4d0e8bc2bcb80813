//! A deterministic stand-in for a step-based conditional denoiser.
//!
//! The receiver starts denoising as soon as the session opens and keeps
//! going for a fixed number of steps. Each modality (mask, text) contributes a
//! conditioning vector per step: a placeholder until the payload has arrived,
//! the true vector afterwards. The update is a linear pull toward the sum of
//! the active conditioning vectors,
//!
//! ```text
//! z[j+1] = (1 - eta) * z[j] + eta * (w_s * c_s(j) + w_l * c_l(j))
//! ```
//!
//! so every combination of "mask arrived / text arrived" is one of four
//! conditioning cases, and the final latent has a closed form that tests can
//! check against.
//!
//! Mask vectors live on the first half of the coordinates and text vectors on
//! the second half, which makes the two modalities' error contributions
//! orthogonal.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when quantizing an arrival time onto the step grid, so
/// that a delay computed as `k * omega` through floating-point arithmetic
/// still lands on step `k`.
const STEP_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToyDiffusionConfig {
    pub latent_dim: usize,
    pub steps: usize,
    /// Seconds per denoising step.
    pub step_duration: f64,
    pub pull_rate: f64,
    pub weight_mask: f64,
    pub weight_text: f64,
    pub seed: u64,
    pub psnr_cap: f64,
    pub max_signal: f64,
}

impl Default for ToyDiffusionConfig {
    fn default() -> Self {
        Self {
            latent_dim: 16,
            steps: 20,
            step_duration: 0.05,
            pull_rate: 0.3,
            weight_mask: 1.0,
            weight_text: 1.0,
            seed: 0,
            psnr_cap: 100.0,
            max_signal: 6.0,
        }
    }
}

impl ToyDiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.latent_dim < 2 || self.latent_dim % 2 == 1 {
            return Err(Error::domain("latent_dim must be even and at least 2"));
        }
        if self.steps == 0 {
            return Err(Error::domain("steps must be at least 1"));
        }
        if !(self.step_duration.is_finite() && self.step_duration > 0.0) {
            return Err(Error::domain("step_duration must be positive"));
        }
        if !(self.pull_rate > 0.0 && self.pull_rate <= 1.0) {
            return Err(Error::domain("pull_rate must lie in (0, 1]"));
        }
        if !(self.weight_mask >= 0.0 && self.weight_text >= 0.0) {
            return Err(Error::domain("conditioning weights must be non-negative"));
        }
        if !(self.psnr_cap.is_finite() && self.max_signal.is_finite() && self.max_signal > 0.0) {
            return Err(Error::domain(
                "psnr_cap and max_signal must be finite, max_signal positive",
            ));
        }
        Ok(())
    }

    /// Seed-derived starting latent.
    pub fn initial_latent(&self) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(1);
        (0..self.latent_dim)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect()
    }
}

/// True and placeholder conditioning vectors for both modalities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditioningSet {
    pub mask_true: Vec<f64>,
    pub mask_placeholder: Vec<f64>,
    pub text_true: Vec<f64>,
    pub text_placeholder: Vec<f64>,
}

impl ConditioningSet {
    /// Draws the four unit vectors from `seed`.
    pub fn from_seed(latent_dim: usize, seed: u64) -> Result<Self> {
        if latent_dim < 2 || latent_dim % 2 == 1 {
            return Err(Error::domain("latent_dim must be even and at least 2"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2);
        let half = latent_dim / 2;
        let mut draw = |offset: usize| -> Vec<f64> {
            loop {
                let mut v = vec![0.0; latent_dim];
                for x in &mut v[offset..offset + half] {
                    *x = StandardNormal.sample(&mut rng);
                }
                let norm = l2_norm(&v);
                if norm > 1e-12 {
                    v.iter_mut().for_each(|x| *x /= norm);
                    return v;
                }
            }
        };
        let mask_true = draw(0);
        let mut mask_placeholder = draw(0);
        while mask_placeholder == mask_true {
            mask_placeholder = draw(0);
        }
        let text_true = draw(half);
        let mut text_placeholder = draw(half);
        while text_placeholder == text_true {
            text_placeholder = draw(half);
        }
        let set = Self {
            mask_true,
            mask_placeholder,
            text_true,
            text_placeholder,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn for_config(cfg: &ToyDiffusionConfig) -> Result<Self> {
        Self::from_seed(cfg.latent_dim, cfg.seed)
    }

    pub fn latent_dim(&self) -> usize {
        self.mask_true.len()
    }

    /// Checks unit norms, distinct true/placeholder pairs and the
    /// half-support layout.
    pub fn validate(&self) -> Result<()> {
        let d = self.mask_true.len();
        let vectors = [
            &self.mask_true,
            &self.mask_placeholder,
            &self.text_true,
            &self.text_placeholder,
        ];
        if d < 2 || d % 2 == 1 || vectors.iter().any(|v| v.len() != d) {
            return Err(Error::domain(
                "conditioning vectors must share an even length",
            ));
        }
        if vectors.iter().any(|v| (l2_norm(v) - 1.0).abs() > 1e-9) {
            return Err(Error::domain("conditioning vectors must be unit norm"));
        }
        if self.mask_true == self.mask_placeholder || self.text_true == self.text_placeholder {
            return Err(Error::domain(
                "placeholder must differ from the true vector",
            ));
        }
        let half = d / 2;
        let mask_ok = [&self.mask_true, &self.mask_placeholder]
            .iter()
            .all(|v| v[half..].iter().all(|&x| x == 0.0));
        let text_ok = [&self.text_true, &self.text_placeholder]
            .iter()
            .all(|v| v[..half].iter().all(|&x| x == 0.0));
        if !(mask_ok && text_ok) {
            return Err(Error::domain(
                "mask vectors must use the first half and text vectors the second half",
            ));
        }
        Ok(())
    }
}

/// Which conditioning inputs are real at a given step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditioningCase {
    /// Neither payload has arrived.
    NeitherArrived,
    MaskOnly,
    TextOnly,
    BothArrived,
}

impl ConditioningCase {
    pub fn at(step: usize, mask_step: usize, text_step: usize) -> Self {
        match (step >= mask_step, step >= text_step) {
            (false, false) => Self::NeitherArrived,
            (true, false) => Self::MaskOnly,
            (false, true) => Self::TextOnly,
            (true, true) => Self::BothArrived,
        }
    }
}

/// First step index at which a payload arriving at `t` seconds conditions the
/// denoiser: `ceil(t / omega)` clamped to `steps`. A result equal to `steps`
/// means the payload never influences the output.
pub fn arrival_step(t: f64, omega: f64, steps: usize) -> Result<usize> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!(
            "arrival time must be non-negative, got {t}"
        )));
    }
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::domain("step duration must be positive"));
    }
    let x = t / omega;
    if x >= steps as f64 {
        return Ok(steps);
    }
    let nearest = x.round();
    let k = if (x - nearest).abs() <= STEP_SNAP * nearest.max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    Ok((k as usize).min(steps))
}

/// Runs the denoiser with the mask arriving at step `mask_step` and the text
/// at step `text_step`, returning the final latent.
pub fn run(
    mask_step: usize,
    text_step: usize,
    cfg: &ToyDiffusionConfig,
    cond: &ConditioningSet,
) -> Result<Vec<f64>> {
    run_traced(mask_step, text_step, cfg, cond).map(|(z, _)| z)
}

/// Like [`run`] but also returns the conditioning case used at each step.
pub fn run_traced(
    mask_step: usize,
    text_step: usize,
    cfg: &ToyDiffusionConfig,
    cond: &ConditioningSet,
) -> Result<(Vec<f64>, Vec<ConditioningCase>)> {
    cfg.validate()?;
    if cond.latent_dim() != cfg.latent_dim {
        return Err(Error::domain("conditioning set does not match latent_dim"));
    }
    if mask_step > cfg.steps || text_step > cfg.steps {
        return Err(Error::domain(format!(
            "arrival steps ({mask_step}, {text_step}) exceed horizon {}",
            cfg.steps
        )));
    }
    let eta = cfg.pull_rate;
    let mut z = cfg.initial_latent();
    let mut trace = Vec::with_capacity(cfg.steps);
    for j in 0..cfg.steps {
        let case = ConditioningCase::at(j, mask_step, text_step);
        let c_s = if j >= mask_step {
            &cond.mask_true
        } else {
            &cond.mask_placeholder
        };
        let c_l = if j >= text_step {
            &cond.text_true
        } else {
            &cond.text_placeholder
        };
        for (i, zi) in z.iter_mut().enumerate() {
            let pull = cfg.weight_mask * c_s[i] + cfg.weight_text * c_l[i];
            *zi = (1.0 - eta) * *zi + eta * pull;
        }
        trace.push(case);
    }
    Ok((z, trace))
}

/// Final latent with both payloads present from the first step.
pub fn reference(cfg: &ToyDiffusionConfig, cond: &ConditioningSet) -> Result<Vec<f64>> {
    run(0, 0, cfg, cond)
}

/// `10 log10(max_signal^2 / ||z_ref - z||_2)`, saturating at `cap`.
///
/// The distance is the plain L2 norm, not a mean squared error.
pub fn psnr(z_ref: &[f64], z: &[f64], max_signal: f64, cap: f64) -> Result<f64> {
    if z_ref.len() != z.len() {
        return Err(Error::domain(format!(
            "latent length mismatch: {} vs {}",
            z_ref.len(),
            z.len()
        )));
    }
    let dist = z_ref
        .iter()
        .zip(z)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if dist == 0.0 {
        return Ok(cap);
    }
    Ok((10.0 * (max_signal * max_signal / dist).log10()).min(cap))
}

/// PSNR for every pair of arrival steps; entry `[a][b]` has the mask arriving
/// at step `a` and the text at step `b`.
pub fn generate_grid(cfg: &ToyDiffusionConfig, cond: &ConditioningSet) -> Result<Vec<Vec<f64>>> {
    let z_ref = reference(cfg, cond)?;
    (0..=cfg.steps)
        .map(|a| {
            (0..=cfg.steps)
                .map(|b| {
                    let z = run(a, b, cfg, cond)?;
                    psnr(&z_ref, &z, cfg.max_signal, cfg.psnr_cap)
                })
                .collect()
        })
        .collect()
}

/// JSON grid exchange format shared with externally produced surfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    /// Seconds per step.
    pub omega: f64,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default = "default_cap")]
    pub psnr_cap: f64,
    /// Explicit normalization reference; derived from the grid when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psnr_ref: Option<f64>,
    /// Row-major `(T+1)^2` PSNR values, rows indexed by the mask step.
    pub grid: Vec<f64>,
}

fn default_cap() -> f64 {
    100.0
}

impl GridDocument {
    /// Runs the toy receiver over the full grid and packages the result.
    pub fn from_toy(cfg: &ToyDiffusionConfig, cond: &ConditioningSet) -> Result<Self> {
        let rows = generate_grid(cfg, cond)?;
        Ok(Self {
            omega: cfg.step_duration,
            steps: Some(cfg.steps),
            psnr_cap: cfg.psnr_cap,
            psnr_ref: None,
            grid: rows.into_iter().flatten().collect(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
