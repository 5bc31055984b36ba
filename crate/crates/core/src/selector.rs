//! Segmenting the cumulative motion distribution and picking frames.
//!
//! The CDF axis is cut at `k/N` for `k = 1..N`. Each cut is mapped back to a
//! real frame position by linear interpolation between the two frames whose
//! CDF values bracket it (with `F(−1) = 0`), rounded half-up, then forced to
//! leave every segment at least one frame. Segment `k` is the half-open index
//! range `(x_{k−1}, x_k]` with `x_0 = −1` and `x_N = T − 1`.
//!
//! Random selection uses ChaCha8 seeded with the 64-bit seed and draws one
//! uniform index per segment, in segment order, via `random_range`. That
//! stream is part of the output contract.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::FrameSequence;
use crate::metrics::MetricKind;
use crate::scores::{score_video, ScoreConfig, ScoreSeries};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectMode {
    Random,
    #[default]
    Center,
}

impl fmt::Display for SelectMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectMode::Random => "random",
            SelectMode::Center => "center",
        })
    }
}

impl FromStr for SelectMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SelectMode::Random),
            "center" => Ok(SelectMode::Center),
            other => Err(Error::InvalidConfig(format!(
                "unknown mode '{other}', expected random or center"
            ))),
        }
    }
}

/// Segment boundaries over frame indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    /// `N + 1` boundaries, `boundaries[0] = −1`, last `= T − 1`.
    pub boundaries: Vec<i64>,
    /// Inclusive `[first, last]` frame range of each segment.
    pub segments: Vec<[usize; 2]>,
}

impl Segmentation {
    fn from_boundaries(boundaries: Vec<i64>) -> Self {
        let segments = boundaries
            .windows(2)
            .map(|w| [(w[0] + 1) as usize, w[1] as usize])
            .collect();
        Segmentation { boundaries, segments }
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

/// Cuts `cdf` into `n` segments of (approximately) equal mass.
pub fn segment(cdf: &[f64], n: usize) -> Result<Segmentation> {
    let t = cdf.len();
    if n == 0 {
        return Err(Error::InvalidConfig("frame count must be at least 1".into()));
    }
    if n > t {
        return Err(Error::TooFewFrames {
            requested: n,
            available: t,
        });
    }
    let last = t as i64 - 1;
    let mut boundaries = Vec::with_capacity(n + 1);
    boundaries.push(-1i64);
    for k in 1..n {
        let q = k as f64 / n as f64;
        let x = inverse_cdf(cdf, q);
        let rounded = (x + 0.5).floor() as i64;
        let lo = boundaries[k - 1] + 1;
        let hi = last - (n - k) as i64;
        boundaries.push(rounded.clamp(lo, hi));
    }
    boundaries.push(last);
    Ok(Segmentation::from_boundaries(boundaries))
}

/// Real-valued frame position where the piecewise-linear CDF (through
/// `(−1, 0)` and `(i, cdf[i])`) first reaches `q`.
pub fn inverse_cdf(cdf: &[f64], q: f64) -> f64 {
    let i = cdf.iter().position(|&f| f >= q).unwrap_or(cdf.len() - 1);
    let prev = if i == 0 { 0.0 } else { cdf[i - 1] };
    let rise = cdf[i] - prev;
    let frac = if rise > 0.0 { ((q - prev) / rise).clamp(0.0, 1.0) } else { 1.0 };
    i as f64 - 1.0 + frac
}

/// One index per segment.
pub fn select(segmentation: &Segmentation, mode: SelectMode, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    select_with(segmentation, mode, &mut rng)
}

fn select_with(segmentation: &Segmentation, mode: SelectMode, rng: &mut ChaCha8Rng) -> Vec<usize> {
    segmentation
        .segments
        .iter()
        .map(|&[lo, hi]| match mode {
            SelectMode::Random => rng.random_range(lo..=hi),
            SelectMode::Center => lo + (hi - lo) / 2,
        })
        .collect()
}

/// `n` indices spread evenly over `0..t`, repeating frames when `t < n`;
/// index `i` is `⌊i·t/n⌋`.
pub fn pad_repeat(t: usize, n: usize) -> Vec<usize> {
    (0..n).map(|i| i * t / n).collect()
}

/// FNV-1a hash of a video identifier, XORed into a base seed so that
/// concurrently processed videos draw independent streams.
pub fn derive_seed(seed: u64, video_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in video_id.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    seed ^ h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub score: ScoreConfig,
    pub num_frames: usize,
    pub mode: SelectMode,
    pub seed: u64,
    /// Number of uniform clips; above 1 the sampler runs once per clip.
    pub clips: usize,
    pub allow_repeat: bool,
}

impl SamplerConfig {
    pub fn new(num_frames: usize) -> Self {
        SamplerConfig {
            score: ScoreConfig::default(),
            num_frames,
            mode: SelectMode::default(),
            seed: 0,
            clips: 1,
            allow_repeat: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.score.validate()?;
        if self.num_frames == 0 {
            return Err(Error::InvalidConfig("frame count must be at least 1".into()));
        }
        if self.clips == 0 {
            return Err(Error::InvalidConfig("clip count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Selection inside one clip (the whole video unless dense-clip mode).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipSelection {
    /// First frame of the clip in the video.
    pub start: usize,
    pub len: usize,
    /// Video-level frame indices chosen in this clip.
    pub indices: Vec<usize>,
    /// Absent for single-frame clips.
    pub scores: Option<ScoreSeries>,
    /// Clip-local segmentation; absent when the clip was repeat-padded.
    pub segmentation: Option<Segmentation>,
    pub padded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub indices: Vec<usize>,
    pub mode: SelectMode,
    pub seed: u64,
    pub metric: MetricKind,
    pub frames: usize,
    pub clips: Vec<ClipSelection>,
    pub config: SamplerConfig,
}

/// Scores `seq` and selects `config.num_frames` frames per clip.
pub fn sample(seq: &FrameSequence, metric: MetricKind, config: &SamplerConfig) -> Result<SelectionReport> {
    config.validate()?;
    let t = seq.len();
    let k = config.clips;
    if t < k {
        return Err(Error::TooFewFrames {
            requested: k,
            available: t,
        });
    }
    if t == 0 {
        return Err(Error::NotEnoughFrames { found: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut clips = Vec::with_capacity(k);
    for c in 0..k {
        let start = c * t / k;
        let end = (c + 1) * t / k;
        clips.push(select_clip(seq, start, end, metric, config, &mut rng)?);
    }
    Ok(SelectionReport {
        indices: clips.iter().flat_map(|c| c.indices.iter().copied()).collect(),
        mode: config.mode,
        seed: config.seed,
        metric,
        frames: t,
        clips,
        config: *config,
    })
}

fn select_clip(
    seq: &FrameSequence,
    start: usize,
    end: usize,
    metric: MetricKind,
    config: &SamplerConfig,
    rng: &mut ChaCha8Rng,
) -> Result<ClipSelection> {
    let len = end - start;
    let n = config.num_frames;
    if len < n && !config.allow_repeat {
        return Err(Error::TooFewFrames {
            requested: n,
            available: len,
        });
    }
    let scores = if len >= 2 {
        Some(score_video(&seq.slice(start, end), metric, &config.score)?)
    } else {
        None
    };
    if len < n {
        return Ok(ClipSelection {
            start,
            len,
            indices: pad_repeat(len, n).into_iter().map(|i| i + start).collect(),
            scores,
            segmentation: None,
            padded: true,
        });
    }
    let cdf = scores.as_ref().map_or_else(|| vec![1.0], |s| s.cdf.clone());
    let segmentation = segment(&cdf, n)?;
    let indices = select_with(&segmentation, config.mode, rng)
        .into_iter()
        .map(|i| i + start)
        .collect();
    Ok(ClipSelection {
        start,
        len,
        indices,
        scores,
        segmentation: Some(segmentation),
        padded: false,
    })
}

/// Dense-clip sampling: `clips` uniform clips, `per_clip` frames from each.
pub fn dense_clip_select(
    seq: &FrameSequence,
    clips: usize,
    per_clip: usize,
    metric: MetricKind,
    config: &SamplerConfig,
    seed: u64,
) -> Result<SelectionReport> {
    let config = SamplerConfig {
        num_frames: per_clip,
        clips,
        seed,
        ..*config
    };
    sample(seq, metric, &config)
}
