//! Link rate, transmission delay and fading-gain sampling for the two
//! orthogonal uplinks that carry the mask and the text.
//!
//! SNR is always stored as a linear ratio. The dB helpers exist for the
//! command-line boundary only.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bits per binary kilobyte.
pub const BITS_PER_KB: u64 = 8 * 1024;

/// One modality's payload and channel state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    data_size: u64,
    snr_linear: f64,
}

impl LinkSpec {
    pub fn new(data_size: u64, snr_linear: f64) -> Result<Self> {
        if data_size == 0 {
            return Err(Error::domain("data_size must be at least one bit"));
        }
        if !(snr_linear.is_finite() && snr_linear > 0.0) {
            return Err(Error::domain(format!(
                "snr_linear must be positive and finite, got {snr_linear}"
            )));
        }
        Ok(Self {
            data_size,
            snr_linear,
        })
    }

    /// Payload in bits.
    pub fn data_size(&self) -> u64 {
        self.data_size
    }

    pub fn snr_linear(&self) -> f64 {
        self.snr_linear
    }

    /// Shannon spectral efficiency `log2(1 + snr)` in bit/s/Hz.
    pub fn spectral_efficiency(&self) -> f64 {
        self.snr_linear.ln_1p() / std::f64::consts::LN_2
    }

    /// Bits that must cross the link per Hz of bandwidth per second of
    /// deadline, i.e. `D / log2(1 + snr)`.
    pub fn bit_hertz_seconds(&self) -> f64 {
        self.data_size as f64 / self.spectral_efficiency()
    }
}

/// The mask and text links of one transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkPair {
    pub mask: LinkSpec,
    pub text: LinkSpec,
}

impl LinkPair {
    pub fn new(mask: LinkSpec, text: LinkSpec) -> Self {
        Self { mask, text }
    }
}

/// Gamma model for the channel power gain `|h|^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingModel {
    pub shape: f64,
    pub scale: f64,
}

impl Default for FadingModel {
    /// Unit-mean gain with shape 0.5 and scale 2.
    fn default() -> Self {
        Self {
            shape: 0.5,
            scale: 2.0,
        }
    }
}

impl FadingModel {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        let model = Self { shape, scale };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shape.is_finite() && self.shape > 0.0) {
            return Err(Error::domain("fading shape must be positive"));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::domain("fading scale must be positive"));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.shape * self.scale
    }

    pub fn variance(&self) -> f64 {
        self.shape * self.scale * self.scale
    }
}

/// Seconds needed to push `link` through `bandwidth` Hz:
/// `D / (B log2(1 + snr))`.
pub fn transmission_time(link: &LinkSpec, bandwidth: f64) -> Result<f64> {
    if bandwidth.is_nan() || bandwidth <= 0.0 {
        return Err(Error::domain(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    Ok(link.data_size as f64 / (bandwidth * link.spectral_efficiency()))
}

/// Smallest bandwidth that delivers `link` within `deadline` seconds.
///
/// A zero deadline returns [`Error::InfiniteBandwidth`], which callers use to
/// flag thresholds that no finite budget can reach.
pub fn required_bandwidth(link: &LinkSpec, deadline: f64) -> Result<f64> {
    if deadline.is_nan() || deadline < 0.0 {
        return Err(Error::domain(format!(
            "deadline must be non-negative, got {deadline}"
        )));
    }
    if deadline == 0.0 {
        return Err(Error::InfiniteBandwidth);
    }
    Ok(link.data_size as f64 / (deadline * link.spectral_efficiency()))
}

/// Draws one `|h|^2` sample.
pub fn sample_gain<R: Rng + ?Sized>(rng: &mut R, model: &FadingModel) -> f64 {
    // Parameters are validated at construction; an invalid model here is a bug.
    let gamma = Gamma::new(model.shape, model.scale).expect("validated fading model");
    gamma.sample(rng)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
