//! From per-pair similarity values to a cumulative motion distribution.
//!
//! ```text
//! raw        M_0 = 0,  M_t = sim(I_{t-1}, I_t)
//! inverted   M'_t = max_i M_i − M_t
//! normalized M̂_t = M'_t / Σ M'
//! remapped   M*_t = shifted leaky ReLU of M̂_t around μ = mean(M̂), L1-normalized
//! cdf        F(t) = Σ_{i ≤ t} M*_i
//! ```
//!
//! Distance metrics skip the inversion: their raw values are already large
//! when frames differ.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{pmi_with, Regularization};
use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};
use crate::metrics::{self, Direction, MetricKind, DEFAULT_HISTOGRAM_BINS};
use crate::patch::{make_grid, PatchGrid};

pub const DEFAULT_PATCH_SIZE: usize = 7;
pub const DEFAULT_ALPHA: f64 = 0.3;

/// Maximum tolerated deviation of the final CDF value from 1.
pub const CDF_DRIFT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub patch_size: usize,
    pub alpha: f64,
    pub histogram_bins: usize,
    pub regularization: Regularization,
    /// Gives frame 0 no mass instead of the maximal score implied by `M_0 = 0`.
    pub exclude_t0_mass: bool,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            patch_size: DEFAULT_PATCH_SIZE,
            alpha: DEFAULT_ALPHA,
            histogram_bins: DEFAULT_HISTOGRAM_BINS,
            regularization: Regularization::default(),
            exclude_t0_mass: false,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.patch_size == 0 {
            return Err(Error::InvalidConfig("patch size must be at least 1".into()));
        }
        if self.histogram_bins < 2 {
            return Err(Error::InvalidConfig(format!(
                "need at least 2 histogram bins, got {}",
                self.histogram_bins
            )));
        }
        self.regularization.validate()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidConfig(format!(
            "alpha must be in the range [0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Per-frame scores of one video; every vector has one entry per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSeries {
    pub metric: MetricKind,
    /// Metric value of pair `(t-1, t)`, with `raw[0] = 0`. Saturated pairs
    /// hold the largest unsaturated value of the video.
    pub raw: Vec<f64>,
    /// Pairs whose metric was undefined or infinite because the frames carry
    /// no distinguishable content (constant frames, exact duplicates for PSNR).
    pub saturated: Vec<bool>,
    pub normalized: Vec<f64>,
    pub remapped: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Mean of `normalized`, the knee of the remap.
    pub mean: f64,
    pub alpha: f64,
}

impl ScoreSeries {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}

fn uniform(len: usize) -> Vec<f64> {
    vec![1.0 / len as f64; len]
}

fn l1_normalize(values: &[f64]) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        values.iter().map(|v| v / total).collect()
    } else {
        uniform(values.len())
    }
}

/// `M'_t = max(M) − M_t`, L1-normalized; all-equal input gives the uniform
/// vector.
pub fn invert_normalize(raw: &[f64]) -> Result<Vec<f64>> {
    check_scores(raw)?;
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inverted: Vec<f64> = raw.iter().map(|v| max - v).collect();
    Ok(l1_normalize(&inverted))
}

/// L1 normalization for distance-like raw scores.
pub fn normalize(raw: &[f64]) -> Result<Vec<f64>> {
    check_scores(raw)?;
    if raw.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidConfig("distance scores must be nonnegative".into()));
    }
    Ok(l1_normalize(raw))
}

fn check_scores(raw: &[f64]) -> Result<()> {
    if raw.len() < 2 {
        return Err(Error::NotEnoughFrames { found: raw.len() });
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("raw scores"));
    }
    Ok(())
}

/// The piecewise-linear map through `(0, 0)`, `(μ, αμ)` and `(1, 1)`.
#[inline]
pub fn leaky_map(value: f64, alpha: f64, mean: f64) -> f64 {
    if value <= mean {
        alpha * value
    } else {
        (1.0 - alpha * mean) / (1.0 - mean) * (value - 1.0) + 1.0
    }
}

/// Applies [`leaky_map`] around the mean of `normalized`, then renormalizes.
/// Returns the remapped vector and the mean used.
pub fn shifted_leaky_relu(normalized: &[f64], alpha: f64) -> Result<(Vec<f64>, f64)> {
    check_alpha(alpha)?;
    if normalized.is_empty() {
        return Err(Error::NotEnoughFrames { found: 0 });
    }
    let mean = normalized.iter().sum::<f64>() / normalized.len() as f64;
    let mapped: Vec<f64> = normalized
        .iter()
        .map(|&v| leaky_map(v, alpha, mean).max(0.0))
        .collect();
    Ok((l1_normalize(&mapped), mean))
}

/// Prefix sums with the last entry pinned to exactly 1.
pub fn cumulate(remapped: &[f64]) -> Result<Vec<f64>> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = remapped
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    let drift = (acc - 1.0).abs();
    if drift.is_nan() || drift > CDF_DRIFT_TOLERANCE {
        return Err(Error::CdfDrift(drift));
    }
    for v in &mut cdf {
        *v = v.min(1.0);
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    Ok(cdf)
}

/// Runs inversion (for similarity metrics), remap and accumulation over
/// precomputed raw scores.
pub fn series_from_raw(
    metric: MetricKind,
    raw: Vec<f64>,
    saturated: Vec<bool>,
    config: &ScoreConfig,
) -> Result<ScoreSeries> {
    config.validate()?;
    let mut normalized = match metric.direction() {
        Direction::Similarity => {
            let mut r = raw.clone();
            if config.exclude_t0_mass {
                // frame 0 treated as maximally similar to its (absent) predecessor
                let max = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                r[0] = max;
            }
            invert_normalize(&r)?
        }
        Direction::Distance => {
            let mut r = raw.clone();
            if config.exclude_t0_mass {
                r[0] = 0.0;
            }
            normalize(&r)?
        }
    };
    // keep exact zeros exact
    for v in &mut normalized {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let (remapped, mean) = shifted_leaky_relu(&normalized, config.alpha)?;
    let cdf = cumulate(&remapped)?;
    Ok(ScoreSeries {
        metric,
        raw,
        saturated,
        normalized,
        remapped,
        cdf,
        mean,
        alpha: config.alpha,
    })
}

/// Scores every adjacent pair and runs the full pipeline.
///
/// Pairs are scored in parallel on the current rayon pool; the result does
/// not depend on the pool size.
pub fn score_video(seq: &FrameSequence, metric: MetricKind, config: &ScoreConfig) -> Result<ScoreSeries> {
    score_video_timed(seq, metric, config).map(|(s, _)| s)
}

/// Like [`score_video`], also returning the wall time spent on each pair.
pub fn score_video_timed(
    seq: &FrameSequence,
    metric: MetricKind,
    config: &ScoreConfig,
) -> Result<(ScoreSeries, Vec<Duration>)> {
    let (raw, saturated, timings) = raw_scores(seq, metric, config)?;
    Ok((series_from_raw(metric, raw, saturated, config)?, timings))
}

/// One scored pair: `None` when the metric saturates.
type PairOutcome = (Option<f64>, Duration);

/// Raw scores with `M_0 = 0` and saturated pairs filled with the largest
/// unsaturated value (0 when every pair saturates).
pub fn raw_scores(
    seq: &FrameSequence,
    metric: MetricKind,
    config: &ScoreConfig,
) -> Result<(Vec<f64>, Vec<bool>, Vec<Duration>)> {
    config.validate()?;
    if seq.len() < 2 {
        return Err(Error::NotEnoughFrames { found: seq.len() });
    }
    let scorer = PairScorer::new(metric, seq.shape(), config)?;
    let outcomes: Vec<PairOutcome> = (1..seq.len())
        .into_par_iter()
        .map(|t| {
            let start = Instant::now();
            let v = scorer.score(seq.frame(t - 1), seq.frame(t))?;
            Ok((v, start.elapsed()))
        })
        .collect::<Result<_>>()?;

    let fill = outcomes
        .iter()
        .filter_map(|(v, _)| *v)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
        .unwrap_or(0.0);
    let mut raw = Vec::with_capacity(seq.len());
    let mut saturated = Vec::with_capacity(seq.len());
    let mut timings = Vec::with_capacity(seq.len() - 1);
    raw.push(0.0);
    saturated.push(false);
    for (v, dt) in outcomes {
        raw.push(v.unwrap_or(fill));
        saturated.push(v.is_none());
        timings.push(dt);
    }
    Ok((raw, saturated, timings))
}

/// Scores individual frame pairs for one metric and frame shape.
#[derive(Debug, Clone)]
pub struct PairScorer {
    metric: MetricKind,
    grid: Option<PatchGrid>,
    bins: usize,
    regularization: Regularization,
}

impl PairScorer {
    pub fn new(metric: MetricKind, shape: (usize, usize, usize), config: &ScoreConfig) -> Result<Self> {
        let grid = match metric {
            MetricKind::Pmi => Some(make_grid(shape.0, shape.1, shape.2, config.patch_size)?),
            _ => None,
        };
        Ok(PairScorer {
            metric,
            grid,
            bins: config.histogram_bins,
            regularization: config.regularization,
        })
    }

    /// Metric value for `(prev, curr)`, or `None` when it saturates. PMI
    /// saturates on identical frames, where only the jitter bounds it.
    pub fn score(&self, prev: &Frame, curr: &Frame) -> Result<Option<f64>> {
        match self.metric {
            MetricKind::Pmi => {
                let grid = self.grid.as_ref().expect("grid built for pmi");
                if prev == curr {
                    return Ok(None);
                }
                match pmi_with(prev, curr, grid, &self.regularization) {
                    Ok(v) => Ok(Some(v.value)),
                    Err(Error::ZeroVariance) => Ok(None),
                    Err(e) => Err(e),
                }
            }
            MetricKind::Euclidean => metrics::euclidean(prev, curr).map(Some),
            MetricKind::Cosine => match metrics::cosine(prev, curr) {
                Ok(v) => Ok(Some(v)),
                Err(Error::ZeroNorm) => {
                    let both_black = prev.data().iter().chain(curr.data()).all(|&v| v == 0.0);
                    Ok(if both_black { None } else { Some(0.0) })
                }
                Err(e) => Err(e),
            },
            MetricKind::Psnr => {
                let v = metrics::psnr(prev, curr)?;
                Ok(v.is_finite().then_some(v))
            }
            MetricKind::HistogramMi => metrics::histogram_mi(prev, curr, self.bins).map(Some),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_vec_eq(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn inversion_examples() {
        assert_vec_eq(&invert_normalize(&[0.0, 2.0, 5.0, 3.0]).unwrap(), &[0.5, 0.3, 0.0, 0.2], 1e-15);
        assert_vec_eq(&invert_normalize(&[4.0; 5]).unwrap(), &[0.2; 5], 0.0);
        assert_vec_eq(&invert_normalize(&[5.0, 5.0, 1.0]).unwrap(), &[0.0, 0.0, 1.0], 0.0);
        assert!(invert_normalize(&[0.0, f64::NAN]).is_err());
    }

    #[test]
    fn leaky_map_examples() {
        assert_abs_diff_eq!(leaky_map(0.1, 0.3, 0.1), 0.03, epsilon = 1e-15);
        assert_abs_diff_eq!(leaky_map(1.0, 0.3, 0.1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(leaky_map(0.55, 0.3, 0.1), 0.515, epsilon = 1e-12);
        assert_eq!(leaky_map(0.0, 0.3, 0.1), 0.0);
    }

    #[test]
    fn alpha_range_checked() {
        let err = shifted_leaky_relu(&[0.5, 0.5], 1.5).unwrap_err();
        assert!(err.to_string().contains("[0, 1]"));
        assert!(shifted_leaky_relu(&[0.5, 0.5], -0.1).is_err());
    }

    #[test]
    fn alpha_zero_kills_below_mean() {
        let (m, mean) = shifted_leaky_relu(&[0.5, 0.3, 0.0, 0.2], 0.0).unwrap();
        assert_eq!(mean, 0.25);
        assert_eq!(m[2], 0.0);
        assert_eq!(m[3], 0.0);
        assert_abs_diff_eq!(m.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn uniform_survives_alpha_zero() {
        let (m, _) = shifted_leaky_relu(&[0.25; 4], 0.0).unwrap();
        assert_vec_eq(&m, &[0.25; 4], 0.0);
    }

    #[test]
    fn cdf_examples() {
        assert_vec_eq(&cumulate(&[0.5, 0.3, 0.0, 0.2]).unwrap(), &[0.5, 0.8, 0.8, 1.0], 1e-15);
        assert_eq!(cumulate(&[0.25; 4]).unwrap(), vec![0.25, 0.5, 0.75, 1.0]);
        assert_eq!(cumulate(&[0.0, 0.0, 1.0, 0.0]).unwrap(), vec![0.0, 0.0, 1.0, 1.0]);
        assert!(matches!(cumulate(&[0.5, 0.4]), Err(Error::CdfDrift(_))));
    }

    #[test]
    fn distance_metrics_skip_inversion() {
        let cfg = ScoreConfig::default();
        let s = series_from_raw(MetricKind::Euclidean, vec![0.0, 1.0, 3.0], vec![false; 3], &cfg).unwrap();
        assert_vec_eq(&s.normalized, &[0.0, 0.25, 0.75], 1e-15);
        let s = series_from_raw(MetricKind::Pmi, vec![0.0, 1.0, 3.0], vec![false; 3], &cfg).unwrap();
        assert_vec_eq(&s.normalized, &[0.6, 0.4, 0.0], 1e-15);
    }

    #[test]
    fn exclude_t0_mass() {
        let cfg = ScoreConfig {
            exclude_t0_mass: true,
            ..ScoreConfig::default()
        };
        let s = series_from_raw(MetricKind::Pmi, vec![0.0, 2.0, 5.0, 3.0], vec![false; 4], &cfg).unwrap();
        assert_eq!(s.normalized[0], 0.0);
        assert_vec_eq(&s.normalized, &[0.0, 0.6, 0.0, 0.4], 1e-15);
    }
}
