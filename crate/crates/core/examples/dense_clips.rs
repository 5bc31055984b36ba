//! Dense-clip sampling: split a long video into uniform clips and select
//! inside each.
//!
//! ```text
//! cargo run --release --example dense_clips
//! ```

use pmi_sampler::selector::dense_clip_select;
use pmi_sampler::synth::{render, SceneSpec};
use pmi_sampler::{MetricKind, SamplerConfig, SelectMode};

fn main() -> pmi_sampler::Result<()> {
    let spec = SceneSpec {
        height: 96,
        width: 96,
        frames: 200,
        motion_window: Some((60, 70)),
        camera_jitter: 1,
        ..SceneSpec::burst(4, 1)
    };
    let seq = render(&spec)?;
    let config = SamplerConfig {
        mode: SelectMode::Random,
        ..SamplerConfig::new(4)
    };
    let report = dense_clip_select(&seq, 5, 4, MetricKind::Pmi, &config, 42)?;
    for clip in &report.clips {
        println!(
            "clip [{:>3}, {:>3}): {:?}",
            clip.start,
            clip.start + clip.len,
            clip.indices
        );
    }
    println!("{} frames total", report.indices.len());
    Ok(())
}
