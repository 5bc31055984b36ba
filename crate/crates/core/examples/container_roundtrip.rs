//! Converts between an image directory and a PMIS container.
//!
//! ```text
//! cargo run --release --example container_roundtrip -- <image_dir> <out.pmis>
//! cargo run --release --example container_roundtrip
//! ```
//!
//! Without arguments, a synthetic video goes through PNG files and a
//! container and is checked to survive unchanged.

use std::path::PathBuf;

use pmi_sampler::frame_io::{load_any, load_container, save_frame, write_container};
use pmi_sampler::synth::{render, SceneSpec};
use pmi_sampler::IngestOptions;

fn main() -> pmi_sampler::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [input, output] = args.as_slice() {
        let seq = load_any(&PathBuf::from(input), &IngestOptions::default())?;
        write_container(&seq, &PathBuf::from(output))?;
        let (h, w, c) = seq.shape();
        println!("{} frames of {h}x{w}x{c} -> {output}", seq.len());
        return Ok(());
    }

    let seq = render(&SceneSpec {
        frames: 6,
        motion_window: Some((1, 4)),
        ..SceneSpec::burst(0, 1)
    })?;
    let dir = std::env::temp_dir().join(format!("pmi-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| pmi_sampler::Error::Io { path: dir.clone(), source: e })?;
    for (t, frame) in seq.frames().iter().enumerate() {
        save_frame(frame, &dir.join(format!("frame_{t}.png")))?;
    }
    let from_pngs = load_any(&dir, &IngestOptions::default())?;
    let container = dir.join("video.pmis");
    write_container(&from_pngs, &container)?;
    let back = load_container(&container)?;
    println!("png -> container -> frames unchanged: {}", back == seq);
    std::fs::remove_dir_all(&dir).ok();
    Ok(())
}
