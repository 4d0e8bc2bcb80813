//! Semantic-deadline-aware bandwidth allocation for a two-modality generative
//! receiver.
//!
//! A transmitter sends a segmentation mask and a text prompt over two
//! orthogonal links. The receiver runs a fixed number of denoising steps and
//! swaps each placeholder conditioning input for the real one as soon as it
//! arrives, so output quality depends on both arrival delays. The crate
//!
//! * models link delays and Gamma fading ([`channel`]),
//! * provides a closed-form toy receiver that produces a quality grid
//!   ([`toy_diffusion`]),
//! * wraps toy, file-based and parametric grids as [`surface::QualitySurface`],
//! * extracts semantic deadline points and curves ([`deadline`]),
//! * allocates a bandwidth budget with the deadline-aware policy and two
//!   baselines ([`allocator`]),
//! * and runs seeded Monte Carlo sweeps with CSV output ([`sim`]).

pub mod allocator;
pub mod channel;
pub mod deadline;
pub mod error;
pub mod sim;
pub mod surface;
pub mod toy_diffusion;

pub use allocator::{Allocation, Policy};
pub use channel::{FadingModel, LinkPair, LinkSpec};
pub use deadline::{DeadlineCurve, DeadlinePoint};
pub use error::{Error, Result};
pub use sim::{SimConfig, TrialRecord};
pub use surface::QualitySurface;
pub use toy_diffusion::{ConditioningSet, GridDocument, ToyDiffusionConfig};
