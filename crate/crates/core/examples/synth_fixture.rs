//! Renders a custom synthetic scene and writes it as a PMIS container.
//!
//! ```text
//! cargo run --release --example synth_fixture -- out.pmis
//! ```

use std::path::PathBuf;

use pmi_sampler::frame_io::write_container;
use pmi_sampler::synth::{render, Background, SceneSpec, Sprite};

fn main() -> pmi_sampler::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("scene.pmis"), PathBuf::from);
    let spec = SceneSpec {
        height: 120,
        width: 160,
        channels: 3,
        frames: 48,
        background: Background::Noise,
        sprite: Sprite {
            size: 16,
            intensity: 1.0,
            origin: (50, 10),
            velocity: (0, 6),
        },
        motion_window: Some((10, 30)),
        camera_jitter: 1,
        seed: 17,
    };
    let seq = render(&spec)?;
    write_container(&seq, &out)?;
    let moving = (1..seq.len()).filter(|&t| spec.sprite_position(t) != spec.sprite_position(t - 1)).count();
    println!("wrote {} ({} frames, {moving} with sprite motion)", out.display(), seq.len());
    println!("{}", serde_json::to_string_pretty(&spec).expect("spec serializes"));
    Ok(())
}
