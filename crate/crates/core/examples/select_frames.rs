//! Selects frames from a directory of images or a PMIS container.
//!
//! ```text
//! cargo run --release --example select_frames -- <input> [num_frames] [seed]
//! ```
//!
//! Without arguments a synthetic burst video is used.

use std::path::PathBuf;

use pmi_sampler::frame_io::load_any;
use pmi_sampler::synth::{render, SceneSpec};
use pmi_sampler::{sample, IngestOptions, MetricKind, SamplerConfig, SelectMode};

fn main() -> pmi_sampler::Result<()> {
    let mut args = std::env::args().skip(1);
    let seq = match args.next() {
        Some(path) => load_any(&PathBuf::from(path), &IngestOptions::default())?,
        None => render(&SceneSpec::burst(0, 0))?,
    };
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    for mode in [SelectMode::Center, SelectMode::Random] {
        let config = SamplerConfig {
            mode,
            seed,
            ..SamplerConfig::new(n)
        };
        let report = sample(&seq, MetricKind::Pmi, &config)?;
        println!("{mode:>6}: {:?}", report.indices);
        if let Some(seg) = &report.clips[0].segmentation {
            println!("        segments {:?}", seg.segments);
        }
    }
    Ok(())
}
