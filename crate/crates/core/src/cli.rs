//! Report types and the command implementations behind the `pmi-sampler`
//! binary. JSON is the canonical report; CSV is a flat projection of it.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::FrameSequence;
use crate::frame_io::{self, IngestOptions};
use crate::metrics::{Direction, MetricKind};
use crate::scores::{score_video_timed, PairScorer, ScoreConfig, ScoreSeries};
use crate::selector::{sample, SamplerConfig, SelectionReport};

/// Environment variable overriding the default worker count.
pub const THREADS_ENV: &str = "PMI_THREADS";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown format '{other}', expected json or csv"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub metric: MetricKind,
    /// Metrics for `compare`.
    pub metrics: Vec<MetricKind>,
    pub sampler: SamplerConfig,
    pub ingest: IngestOptions,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub export_frames: Option<PathBuf>,
    /// Worker count; falls back to `PMI_THREADS`, then machine parallelism.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            metric: MetricKind::Pmi,
            metrics: MetricKind::ALL.to_vec(),
            sampler: SamplerConfig::new(8),
            ingest: IngestOptions::default(),
            output: None,
            format: Format::Json,
            export_frames: None,
            threads: None,
        }
    }

    fn load(&self) -> Result<FrameSequence> {
        frame_io::load_any(&self.input, &self.ingest)
    }

    fn input_label(&self) -> String {
        self.input.display().to_string()
    }
}

/// Resolves the worker count from the flag, then `PMI_THREADS`.
pub fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(n) = flag {
        if n == 0 {
            return Err(Error::InvalidConfig("thread count must be at least 1".into()));
        }
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidConfig(format!(
                "{THREADS_ENV} must be a positive integer, got '{v}'"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (machine parallelism
/// when `None`).
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub pairs: usize,
    pub mean_pair_ms: f64,
    pub max_pair_ms: f64,
    pub total_ms: f64,
}

impl Timing {
    fn from_durations(d: &[Duration]) -> Self {
        let ms: Vec<f64> = d.iter().map(|d| d.as_secs_f64() * 1e3).collect();
        let total: f64 = ms.iter().sum();
        Timing {
            pairs: ms.len(),
            mean_pair_ms: if ms.is_empty() { 0.0 } else { total / ms.len() as f64 },
            max_pair_ms: ms.iter().copied().fold(0.0, f64::max),
            total_ms: total,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoShape {
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl VideoShape {
    fn of(seq: &FrameSequence) -> Self {
        let (height, width, channels) = seq.shape();
        VideoShape {
            frames: seq.len(),
            height,
            width,
            channels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub input: String,
    pub video: VideoShape,
    pub metric: MetricKind,
    pub direction: Direction,
    pub config: ScoreConfig,
    pub ingest: IngestOptions,
    pub scores: ScoreSeries,
    pub timing: Timing,
}

/// Scores one metric, timing each pair after one warm-up pair.
fn timed_scores(seq: &FrameSequence, metric: MetricKind, config: &ScoreConfig) -> Result<(ScoreSeries, Timing)> {
    if seq.len() >= 2 {
        let warm = PairScorer::new(metric, seq.shape(), config)?;
        warm.score(seq.frame(0), seq.frame(1))?;
    }
    let (series, durations) = score_video_timed(seq, metric, config)?;
    Ok((series, Timing::from_durations(&durations)))
}

pub fn cmd_score(config: &RunConfig) -> Result<ScoreReport> {
    config.sampler.score.validate()?;
    let seq = config.load()?;
    let (scores, timing) = timed_scores(&seq, config.metric, &config.sampler.score)?;
    Ok(ScoreReport {
        input: config.input_label(),
        video: VideoShape::of(&seq),
        metric: config.metric,
        direction: config.metric.direction(),
        config: config.sampler.score,
        ingest: config.ingest,
        scores,
        timing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectReport {
    pub input: String,
    pub video: VideoShape,
    pub ingest: IngestOptions,
    pub selection: SelectionReport,
}

/// Scores, segments and selects; exports the chosen frames when requested.
/// The report carries no timing so identical runs serialize identically.
pub fn cmd_select(config: &RunConfig) -> Result<SelectReport> {
    config.sampler.validate()?;
    let seq = config.load()?;
    let selection = sample(&seq, config.metric, &config.sampler)?;
    if let Some(dir) = &config.export_frames {
        export_frames(config, &seq, &selection.indices, dir)?;
    }
    Ok(SelectReport {
        input: config.input_label(),
        video: VideoShape::of(&seq),
        ingest: config.ingest,
        selection,
    })
}

/// Copies the selected source images (directory input) or writes them as
/// PNG (container input) into `dir`, prefixed by selection rank.
pub fn export_frames(config: &RunConfig, seq: &FrameSequence, indices: &[usize], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let sources = if config.input.is_dir() {
        Some(frame_io::list_directory(&config.input)?)
    } else {
        None
    };
    for (rank, &idx) in indices.iter().enumerate() {
        match &sources {
            Some(paths) => {
                let src = &paths[idx];
                let name = src.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let dst = dir.join(format!("{rank:03}_{name}"));
                fs::copy(src, &dst).map_err(|e| Error::io(&dst, e))?;
            }
            None => {
                let dst = dir.join(format!("{rank:03}_frame_{idx:06}.png"));
                frame_io::save_frame(seq.frame(idx), &dst)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: MetricKind,
    pub direction: Direction,
    pub scores: ScoreSeries,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub input: String,
    pub video: VideoShape,
    pub config: ScoreConfig,
    pub ingest: IngestOptions,
    pub rows: Vec<MetricRow>,
}

pub fn cmd_compare(config: &RunConfig) -> Result<CompareReport> {
    if config.metrics.is_empty() {
        return Err(Error::InvalidConfig("compare needs at least one metric".into()));
    }
    config.sampler.score.validate()?;
    let seq = config.load()?;
    let rows = config
        .metrics
        .iter()
        .map(|&metric| {
            let (scores, timing) = timed_scores(&seq, metric, &config.sampler.score)?;
            Ok(MetricRow {
                metric,
                direction: metric.direction(),
                scores,
                timing,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CompareReport {
        input: config.input_label(),
        video: VideoShape::of(&seq),
        config: config.sampler.score,
        ingest: config.ingest,
        rows,
    })
}

/// `t,raw,normalized,remapped,cdf`, one row per frame.
pub fn score_csv(scores: &ScoreSeries) -> String {
    let mut out = String::from("t,raw,normalized,remapped,cdf\n");
    for t in 0..scores.len() {
        out.push_str(&format!(
            "{t},{},{},{},{}\n",
            scores.raw[t], scores.normalized[t], scores.remapped[t], scores.cdf[t]
        ));
    }
    out
}

/// `t,<metric>...` raw values, one row per frame.
pub fn compare_csv(report: &CompareReport) -> String {
    let mut out = String::from("t");
    for row in &report.rows {
        out.push(',');
        out.push_str(row.metric.name());
    }
    out.push('\n');
    for t in 0..report.video.frames {
        out.push_str(&t.to_string());
        for row in &report.rows {
            out.push_str(&format!(",{}", row.scores.raw[t]));
        }
        out.push('\n');
    }
    out
}

/// `k,clip,index`, one row per selected frame.
pub fn select_csv(report: &SelectReport) -> String {
    let mut out = String::from("k,clip,index\n");
    let mut k = 0;
    for (c, clip) in report.selection.clips.iter().enumerate() {
        for &idx in &clip.indices {
            out.push_str(&format!("{k},{c},{idx}\n"));
            k += 1;
        }
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes `text` to `path`, or stdout when `path` is `None`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))
        }
    }
}
