//! Scores the same video with every metric and reports per-pair cost.
//!
//! ```text
//! cargo run --release --example compare_metrics
//! ```

use std::time::Instant;

use pmi_sampler::synth::{render, SceneSpec};
use pmi_sampler::{score_video, MetricKind, ScoreConfig};

fn main() -> pmi_sampler::Result<()> {
    let seq = render(&SceneSpec::burst(2, 2))?;
    let config = ScoreConfig::default();
    println!("{:<14} {:>10} {:>14} {:>12}", "metric", "direction", "burst mass", "ms/pair");
    for metric in MetricKind::ALL {
        let start = Instant::now();
        let scores = score_video(&seq, metric, &config)?;
        let ms = start.elapsed().as_secs_f64() * 1e3 / (seq.len() - 1) as f64;
        let mass: f64 = scores.remapped[20..=40].iter().sum();
        println!(
            "{:<14} {:>10?} {:>14.3} {:>12.3}",
            metric.name(),
            metric.direction(),
            mass,
            ms
        );
    }
    Ok(())
}
