//! Frame-pair similarity measures used as baselines next to PMI.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;

pub const DEFAULT_HISTOGRAM_BINS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Pmi,
    Euclidean,
    Cosine,
    Psnr,
    HistogramMi,
}

/// Whether a larger metric value means the frames are more or less alike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Similarity,
    Distance,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Pmi,
        MetricKind::Euclidean,
        MetricKind::Cosine,
        MetricKind::Psnr,
        MetricKind::HistogramMi,
    ];

    pub fn direction(self) -> Direction {
        match self {
            MetricKind::Euclidean => Direction::Distance,
            _ => Direction::Similarity,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Pmi => "pmi",
            MetricKind::Euclidean => "euclidean",
            MetricKind::Cosine => "cosine",
            MetricKind::Psnr => "psnr",
            MetricKind::HistogramMi => "histogram_mi",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown metric '{s}', expected one of pmi, euclidean, cosine, psnr, histogram_mi"
                ))
            })
    }
}

/// L2 norm of the elementwise difference.
pub fn euclidean(a: &Frame, b: &Frame) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

pub fn cosine(a: &Frame, b: &Frame) -> Result<f64> {
    a.check_same_shape(b)?;
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.data().iter().zip(b.data()) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

pub fn mse(a: &Frame, b: &Frame) -> Result<f64> {
    a.check_same_shape(b)?;
    let n = a.data().len() as f64;
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n)
}

/// PSNR in dB with peak 1.0; identical frames give `f64::INFINITY`.
pub fn psnr(a: &Frame, b: &Frame) -> Result<f64> {
    let mse = mse(a, b)?;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

#[inline]
fn bin_of(v: f64, bins: usize) -> usize {
    // values outside [0, 1] land in the edge bins
    ((v * bins as f64).floor().max(0.0) as usize).min(bins - 1)
}

/// Joint pixel co-occurrence counts, `bins × bins`, row index from `a`.
pub fn joint_histogram(a: &Frame, b: &Frame, bins: usize) -> Result<Vec<u64>> {
    a.check_same_shape(b)?;
    if bins < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 histogram bins, got {bins}")));
    }
    let mut hist = vec![0u64; bins * bins];
    for (&x, &y) in a.data().iter().zip(b.data()) {
        hist[bin_of(x, bins) * bins + bin_of(y, bins)] += 1;
    }
    Ok(hist)
}

fn entropy_of_counts(counts: impl Iterator<Item = u64>, total: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information of the pixel intensity distributions, in nats, from
/// `bins` uniform bins over `[0, 1]`: `H(A) + H(B) − H(A, B)`.
pub fn histogram_mi(a: &Frame, b: &Frame, bins: usize) -> Result<f64> {
    let hist = joint_histogram(a, b, bins)?;
    let total = a.data().len() as f64;
    let row: Vec<u64> = hist.chunks_exact(bins).map(|r| r.iter().sum()).collect();
    let col: Vec<u64> = (0..bins).map(|j| (0..bins).map(|i| hist[i * bins + j]).sum()).collect();
    let h_a = entropy_of_counts(row.into_iter(), total);
    let h_b = entropy_of_counts(col.into_iter(), total);
    let h_ab = entropy_of_counts(hist.into_iter(), total);
    Ok((h_a + h_b - h_ab).max(0.0))
}

/// Shannon entropy of the binned intensities of `a`, in nats.
pub fn histogram_entropy(a: &Frame, bins: usize) -> Result<f64> {
    if bins < 2 {
        return Err(Error::InvalidConfig(format!("need at least 2 histogram bins, got {bins}")));
    }
    let mut hist = vec![0u64; bins];
    for &v in a.data() {
        hist[bin_of(v, bins)] += 1;
    }
    Ok(entropy_of_counts(hist.into_iter(), a.data().len() as f64))
}
