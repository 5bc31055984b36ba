//! In-memory frame and video types.

use crate::error::{Error, Result};

/// One image: `height × width × channels` reals, row-major with channels
/// interleaved (`data[(y * width + x) * channels + c]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Frame {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(Error::ShapeMismatch(format!(
                "frame dimensions must be positive, got {height}x{width}x{channels}"
            )));
        }
        if data.len() != height * width * channels {
            return Err(Error::ShapeMismatch(format!(
                "{height}x{width}x{channels} frame needs {} values, got {}",
                height * width * channels,
                data.len()
            )));
        }
        Ok(Frame {
            height,
            width,
            channels,
            data,
        })
    }

    /// Frame with every value set to `value`.
    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Self {
        Frame {
            height,
            width,
            channels,
            data: vec![value; height * width * channels],
        }
    }

    /// Builds a frame by evaluating `f(y, x, c)` for every sample.
    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(height * width * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(y, x, c));
                }
            }
        }
        Frame {
            height,
            width,
            channels,
            data,
        }
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.height, self.width, self.channels)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    /// Returns a copy with `f` applied to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Frame {
        Frame {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub(crate) fn check_same_shape(&self, other: &Frame) -> Result<()> {
        if self.shape() != other.shape() {
            let (h0, w0, c0) = self.shape();
            let (h1, w1, c1) = other.shape();
            return Err(Error::ShapeMismatch(format!(
                "{h0}x{w0}x{c0} vs {h1}x{w1}x{c1}"
            )));
        }
        Ok(())
    }
}

/// A decoded video: frames sharing one shape, intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    frames: Vec<Frame>,
}

impl FrameSequence {
    /// Wraps `frames`, checking that they share a shape, that channels is 1
    /// or 3 and that all values lie in `[0, 1]`.
    pub fn new(frames: Vec<Frame>) -> Result<Self> {
        if let Some(first) = frames.first() {
            if first.channels != 1 && first.channels != 3 {
                return Err(Error::ShapeMismatch(format!(
                    "channels must be 1 or 3, got {}",
                    first.channels
                )));
            }
            for f in &frames[1..] {
                first.check_same_shape(f)?;
            }
        }
        for f in &frames {
            if let Some(v) = f.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidConfig(format!(
                    "intensity {v} outside [0, 1]"
                )));
            }
        }
        Ok(FrameSequence { frames })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &Frame {
        &self.frames[t]
    }

    /// `(height, width, channels)`; `(0, 0, 0)` for an empty sequence.
    pub fn shape(&self) -> (usize, usize, usize) {
        self.frames.first().map_or((0, 0, 0), Frame::shape)
    }

    pub fn height(&self) -> usize {
        self.shape().0
    }

    pub fn width(&self) -> usize {
        self.shape().1
    }

    pub fn channels(&self) -> usize {
        self.shape().2
    }

    /// Contiguous sub-sequence `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> FrameSequence {
        FrameSequence {
            frames: self.frames[start..end].to_vec(),
        }
    }

    /// Frames in reverse order.
    pub fn reversed(&self) -> FrameSequence {
        FrameSequence {
            frames: self.frames.iter().rev().cloned().collect(),
        }
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }
}
