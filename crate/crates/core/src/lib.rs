//! Motion-salience frame selection for video.
//!
//! Adjacent frames are compared with patch mutual information (PMI): both
//! frames are cut into `r × r` patches, corresponding patches are stacked
//! into joint samples, and the mutual information of the two patch
//! populations is estimated under a Gaussian model from covariance
//! log-determinants. Low PMI means the frame carries new motion. The scores
//! are inverted, polarized around their mean with a shifted leaky ReLU and
//! accumulated into a cumulative motion distribution whose equal-mass
//! segments each contribute one selected frame.
//!
//! ```no_run
//! use pmi_sampler::{frame_io, sample, MetricKind, SamplerConfig};
//!
//! let video = frame_io::load_container("clip.pmis".as_ref())?;
//! let report = sample(&video, MetricKind::Pmi, &SamplerConfig::new(8))?;
//! println!("{:?}", report.indices);
//! # Ok::<(), pmi_sampler::Error>(())
//! ```

pub mod cli;
pub mod entropy;
pub mod error;
pub mod frame;
pub mod frame_io;
pub mod metrics;
pub mod patch;
pub mod scores;
pub mod selector;
pub mod synth;

pub use entropy::{gaussian_entropy, pmi, pmi_with, PmiValue, Regularization};
pub use error::{Error, ErrorClass, Result};
pub use frame::{Frame, FrameSequence};
pub use frame_io::IngestOptions;
pub use metrics::{Direction, MetricKind};
pub use patch::{embed_pair, make_grid, PatchGrid, PatchMatrix};
pub use scores::{score_video, ScoreConfig, ScoreSeries};
pub use selector::{sample, SamplerConfig, SelectMode, SelectionReport};
pub use synth::{render, SceneSpec};
