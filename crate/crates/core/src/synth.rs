//! Deterministic synthetic videos: a square sprite over a static background,
//! optionally moving during a frame window, with optional camera jitter.
//!
//! Scenes live in world coordinates. Frame `t` shows the world shifted by a
//! per-frame jitter offset drawn from ChaCha8 (seeded with the scene seed,
//! stream `t`), so every frame is a pure function of `(spec, t)`. Sprite
//! motion and jitter are whole pixels. Intensities are quantized to
//! multiples of 1/255 so fixtures survive a container round trip unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Background {
    Constant { level: f64 },
    /// Diagonal ramp from about 0.2 to 0.7, offset by 0.1 per channel.
    Gradient,
    /// Per-pixel hash noise in `[0.1, 0.9]`, fixed by the scene seed.
    Noise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sprite {
    pub size: usize,
    pub intensity: f64,
    /// Top-left corner at rest, `(y, x)`.
    pub origin: (i64, i64),
    /// Pixels per frame while inside the motion window, `(dy, dx)`.
    pub velocity: (i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub frames: usize,
    pub background: Background,
    pub sprite: Sprite,
    /// Inclusive `[start, end]` frames during which the sprite moves; the
    /// sprite takes its `k`-th step in frame `start + k − 1`.
    pub motion_window: Option<(usize, usize)>,
    pub camera_jitter: usize,
    pub seed: u64,
}

impl SceneSpec {
    /// 160×160 grayscale, 64 frames, sprite moving diagonally through
    /// frames 20–40.
    pub fn burst(seed: u64, camera_jitter: usize) -> Self {
        SceneSpec {
            height: 160,
            width: 160,
            channels: 1,
            frames: 64,
            background: Background::Gradient,
            sprite: Sprite {
                size: 24,
                intensity: 0.95,
                origin: (8, 8),
                velocity: (4, 4),
            },
            motion_window: Some((20, 40)),
            camera_jitter,
            seed,
        }
    }

    /// Nothing moves; with `camera_jitter == 0` every frame is identical.
    pub fn still(seed: u64, camera_jitter: usize) -> Self {
        SceneSpec {
            motion_window: None,
            ..SceneSpec::burst(seed, camera_jitter)
        }
    }

    /// Number of sprite steps taken by frame `t`.
    pub fn steps_at(&self, t: usize) -> i64 {
        match self.motion_window {
            None => 0,
            Some((start, end)) => {
                let taken = t as i64 - start as i64 + 1;
                taken.clamp(0, (end - start + 1) as i64)
            }
        }
    }

    /// Sprite top-left corner in world coordinates at frame `t`.
    pub fn sprite_position(&self, t: usize) -> (i64, i64) {
        let k = self.steps_at(t);
        (
            self.sprite.origin.0 + k * self.sprite.velocity.0,
            self.sprite.origin.1 + k * self.sprite.velocity.1,
        )
    }

    /// Camera offset `(dy, dx)` of frame `t`, each in `[−jitter, jitter]`.
    pub fn jitter_at(&self, t: usize) -> (i64, i64) {
        if self.camera_jitter == 0 {
            return (0, 0);
        }
        let j = self.camera_jitter as i64;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(t as u64);
        (rng.random_range(-j..=j), rng.random_range(-j..=j))
    }

    pub fn validate(&self) -> Result<()> {
        if self.height == 0 || self.width == 0 || self.frames == 0 {
            return Err(Error::InvalidConfig("scene size and frame count must be positive".into()));
        }
        if self.channels != 1 && self.channels != 3 {
            return Err(Error::InvalidConfig(format!(
                "channels must be 1 or 3, got {}",
                self.channels
            )));
        }
        if !(0.0..=1.0).contains(&self.sprite.intensity) {
            return Err(Error::InvalidConfig("sprite intensity must be in [0, 1]".into()));
        }
        if let Background::Constant { level } = self.background {
            if !(0.0..=1.0).contains(&level) {
                return Err(Error::InvalidConfig("background level must be in [0, 1]".into()));
            }
        }
        if let Some((start, end)) = self.motion_window {
            if start > end || end >= self.frames {
                return Err(Error::InvalidConfig(format!(
                    "motion window [{start}, {end}] must lie inside [0, {})",
                    self.frames
                )));
            }
        }
        // the sprite must stay fully visible under every jitter offset
        let j = self.camera_jitter as i64;
        let size = self.sprite.size as i64;
        let fits = |pos: i64, extent: usize| pos - j >= 0 && pos + size + j <= extent as i64;
        let last = self.motion_window.map_or(0, |(_, end)| end);
        for t in [0, last] {
            let (y, x) = self.sprite_position(t);
            if !fits(y, self.height) || !fits(x, self.width) {
                return Err(Error::InvalidConfig(format!(
                    "sprite leaves the frame at t={t} (top-left {y},{x}, size {size}, jitter {j})"
                )));
            }
        }
        Ok(())
    }

    fn background_at(&self, y: i64, x: i64, c: usize) -> f64 {
        match self.background {
            Background::Constant { level } => level,
            Background::Gradient => {
                let span = (self.height + self.width) as f64;
                0.2 + 0.5 * (y + x) as f64 / span + 0.1 * c as f64
            }
            Background::Noise => {
                let key = (y as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
                    ^ (x as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f)
                    ^ (c as u64).wrapping_mul(0x1656_67b1_9e37_79f9)
                    ^ self.seed;
                0.1 + 0.8 * (splitmix64(key) >> 11) as f64 / (1u64 << 53) as f64
            }
        }
    }

    /// Frame `t` of the scene.
    pub fn render_frame(&self, t: usize) -> Frame {
        let (jy, jx) = self.jitter_at(t);
        let (sy, sx) = self.sprite_position(t);
        let size = self.sprite.size as i64;
        Frame::from_fn(self.height, self.width, self.channels, |y, x, c| {
            let wy = y as i64 + jy;
            let wx = x as i64 + jx;
            let inside = wy >= sy && wy < sy + size && wx >= sx && wx < sx + size;
            let v = if inside {
                self.sprite.intensity
            } else {
                self.background_at(wy, wx, c)
            };
            quantize(v)
        })
    }
}

fn quantize(v: f64) -> f64 {
    (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Renders every frame of `spec`.
pub fn render(spec: &SceneSpec) -> Result<FrameSequence> {
    spec.validate()?;
    let frames = (0..spec.frames)
        .into_par_iter()
        .map(|t| spec.render_frame(t))
        .collect();
    FrameSequence::new(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn still_scene_is_static() {
        let seq = render(&SceneSpec::still(3, 0)).unwrap();
        assert!(seq.frames().windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn burst_moves_only_in_window() {
        let seq = render(&SceneSpec::burst(1, 0)).unwrap();
        for t in 1..seq.len() {
            let same = seq.frame(t - 1) == seq.frame(t);
            assert_eq!(same, !(20..=40).contains(&t), "pair ending at {t}");
        }
    }

    #[test]
    fn render_is_deterministic() {
        let spec = SceneSpec::burst(9, 2);
        assert_eq!(render(&spec).unwrap(), render(&spec).unwrap());
    }

    #[test]
    fn jitter_is_bounded_and_seeded() {
        let spec = SceneSpec::burst(5, 2);
        let offsets: Vec<_> = (0..64).map(|t| spec.jitter_at(t)).collect();
        assert!(offsets.iter().all(|&(y, x)| y.abs() <= 2 && x.abs() <= 2));
        assert!(offsets.iter().any(|&o| o != (0, 0)));
        let other = SceneSpec::burst(6, 2);
        assert_ne!(offsets, (0..64).map(|t| other.jitter_at(t)).collect::<Vec<_>>());
    }

    #[test]
    fn sprite_leaving_frame_is_rejected() {
        let mut spec = SceneSpec::burst(0, 0);
        spec.sprite.velocity = (0, 8);
        assert!(matches!(render(&spec), Err(Error::InvalidConfig(_))));
        spec.sprite.velocity = (4, 4);
        spec.motion_window = Some((50, 70));
        assert!(render(&spec).is_err());
    }

    #[test]
    fn noise_background_in_range() {
        let mut spec = SceneSpec::still(11, 0);
        spec.background = Background::Noise;
        let seq = render(&spec).unwrap();
        assert!(seq.frame(0).data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}
