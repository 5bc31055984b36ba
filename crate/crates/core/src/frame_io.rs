//! Frame ingestion: image directories, the PMIS raw container, and optional
//! resize / grayscale preprocessing.
//!
//! PMIS layout (little-endian, 22-byte header):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "PMIS"
//!      4     2  version (1)
//!      6     4  height
//!     10     4  width
//!     14     1  channels (1 or 3)
//!     15     1  dtype (0 = u8)
//!     16     2  reserved (0)
//!     18     4  frame count T
//!     22     -  T frames, row-major, channel-interleaved, H*W*C bytes each
//! ```

use std::cmp::Ordering;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameSequence};

pub const CONTAINER_MAGIC: [u8; 4] = *b"PMIS";
pub const CONTAINER_VERSION: u16 = 1;
pub const CONTAINER_HEADER_LEN: usize = 22;

/// Rec.601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg", "ppm", "pgm", "pnm"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Target `(height, width)` for bilinear resampling.
    pub resize_to: Option<(usize, usize)>,
    pub grayscale: bool,
}

impl IngestOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some((h, w)) = self.resize_to {
            if h == 0 || w == 0 {
                return Err(Error::InvalidConfig(format!(
                    "resize target must be positive, got {h}x{w}"
                )));
            }
        }
        Ok(())
    }
}

/// Compares two strings treating runs of ASCII digits as numbers, so that
/// `f_2` sorts before `f_10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(ca), Some(cb)) if ca.is_ascii_digit() && cb.is_ascii_digit() => {
                let na = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let nb = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let (da, db) = (&a[..na], &b[..nb]);
                let ta = trim_zeros(da);
                let tb = trim_zeros(db);
                let ord = ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb));
                // "007" vs "7": fall back to the longer zero-padded run last
                let ord = ord.then_with(|| na.cmp(&nb));
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[na..];
                b = &b[nb..];
            }
            (Some(ca), Some(cb)) => {
                if ca != cb {
                    return ca.cmp(cb);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

fn trim_zeros(digits: &[u8]) -> &[u8] {
    let start = digits.iter().position(|&c| c != b'0').unwrap_or(digits.len());
    &digits[start..]
}

/// Lists the decodable image files of `dir` in numeric-aware filename order.
pub fn list_directory(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if path.is_file() && is_image {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| {
        let na = a.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        let nb = b.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        natural_cmp(&na, &nb)
    });
    Ok(paths)
}

/// Decodes one image file. Grayscale images yield one channel, everything
/// else three (alpha is dropped). 16-bit images are scaled by 65535.
pub fn load_image(path: &Path) -> Result<Frame> {
    let img = image::open(path).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let color = img.color();
    let gray = !color.has_color();
    let wide = color.bytes_per_pixel() / color.channel_count() as u8 > 1;
    let data: Vec<f64> = match (gray, wide) {
        (true, false) => img.to_luma8().into_raw().into_iter().map(u8_to_unit).collect(),
        (true, true) => img
            .to_luma16()
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) / 65535.0)
            .collect(),
        (false, false) => img.to_rgb8().into_raw().into_iter().map(u8_to_unit).collect(),
        (false, true) => img
            .to_rgb16()
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) / 65535.0)
            .collect(),
    };
    Frame::new(h, w, if gray { 1 } else { 3 }, data)
}

/// Loads every image in `dir` as one video, then applies `options`.
pub fn load_directory(dir: &Path, options: &IngestOptions) -> Result<FrameSequence> {
    options.validate()?;
    let paths = list_directory(dir)?;
    if paths.len() < 2 {
        return Err(Error::NotEnoughFrames { found: paths.len() });
    }
    let frames = paths
        .par_iter()
        .map(|p| load_image(p))
        .collect::<Result<Vec<_>>>()?;
    let first = frames[0].shape();
    for (frame, path) in frames.iter().zip(&paths) {
        if frame.shape() != first {
            return Err(Error::MixedDimensions {
                path: path.clone(),
                expected: fmt_shape(first),
                found: fmt_shape(frame.shape()),
            });
        }
    }
    preprocess(&FrameSequence::new(frames)?, options)
}

fn fmt_shape((h, w, c): (usize, usize, usize)) -> String {
    format!("{h}x{w}x{c}")
}

#[inline]
fn u8_to_unit(v: u8) -> f64 {
    f64::from(v) / 255.0
}

/// Round-half-up quantization of a `[0, 1]` intensity to a byte.
#[inline]
pub fn unit_to_u8(v: f64) -> u8 {
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Parses an in-memory PMIS container.
pub fn decode_container(bytes: &[u8]) -> Result<FrameSequence> {
    if bytes.len() < 4 || bytes[..4] != CONTAINER_MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < CONTAINER_HEADER_LEN {
        return Err(Error::Truncated {
            expected: CONTAINER_HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let u32_at = |o: usize| u32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]);

    let version = u16_at(4);
    if version != CONTAINER_VERSION {
        return Err(Error::UnsupportedContainer(format!("version {version}")));
    }
    let height = u32_at(6) as usize;
    let width = u32_at(10) as usize;
    let channels = bytes[14] as usize;
    let dtype = bytes[15];
    let count = u32_at(18) as usize;
    if dtype != 0 {
        return Err(Error::UnsupportedContainer(format!("dtype {dtype}")));
    }
    if channels != 1 && channels != 3 {
        return Err(Error::UnsupportedContainer(format!("{channels} channels")));
    }
    if height == 0 || width == 0 {
        return Err(Error::UnsupportedContainer(format!(
            "empty frame size {height}x{width}"
        )));
    }

    let frame_len = height * width * channels;
    let payload = &bytes[CONTAINER_HEADER_LEN..];
    let expected = frame_len as u64 * count as u64;
    if (payload.len() as u64) < expected {
        return Err(Error::Truncated {
            expected,
            found: payload.len() as u64,
        });
    }
    let frames = payload
        .chunks_exact(frame_len)
        .take(count)
        .map(|chunk| Frame::new(height, width, channels, chunk.iter().copied().map(u8_to_unit).collect()))
        .collect::<Result<Vec<_>>>()?;
    FrameSequence::new(frames)
}

/// Serializes `seq` as a PMIS container.
pub fn encode_container(seq: &FrameSequence) -> Result<Vec<u8>> {
    let (h, w, c) = seq.shape();
    if seq.is_empty() {
        return Err(Error::InvalidConfig("cannot write an empty sequence".into()));
    }
    let mut out = Vec::with_capacity(CONTAINER_HEADER_LEN + seq.len() * h * w * c);
    out.extend_from_slice(&CONTAINER_MAGIC);
    out.extend_from_slice(&CONTAINER_VERSION.to_le_bytes());
    out.extend_from_slice(&(h as u32).to_le_bytes());
    out.extend_from_slice(&(w as u32).to_le_bytes());
    out.push(c as u8);
    out.push(0);
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(seq.len() as u32).to_le_bytes());
    for frame in seq.frames() {
        out.extend(frame.data().iter().map(|&v| unit_to_u8(v)));
    }
    Ok(out)
}

pub fn load_container(path: &Path) -> Result<FrameSequence> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_container(&bytes)
}

pub fn write_container(seq: &FrameSequence, path: &Path) -> Result<()> {
    let bytes = encode_container(seq)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Loads a directory or a container depending on what `path` is.
pub fn load_any(path: &Path, options: &IngestOptions) -> Result<FrameSequence> {
    if path.is_dir() {
        load_directory(path, options)
    } else {
        options.validate()?;
        preprocess(&load_container(path)?, options)
    }
}

/// Writes one frame as an 8-bit PNG (or any format `image` infers from the
/// extension).
pub fn save_frame(frame: &Frame, path: &Path) -> Result<()> {
    let bytes: Vec<u8> = frame.data().iter().map(|&v| unit_to_u8(v)).collect();
    let (h, w, c) = frame.shape();
    let color = if c == 1 {
        image::ExtendedColorType::L8
    } else {
        image::ExtendedColorType::Rgb8
    };
    image::save_buffer(path, &bytes, w as u32, h as u32, color).map_err(|e| Error::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Applies grayscale conversion, then bilinear resize, as requested.
pub fn preprocess(seq: &FrameSequence, options: &IngestOptions) -> Result<FrameSequence> {
    options.validate()?;
    if options.resize_to.is_none() && !options.grayscale {
        return Ok(seq.clone());
    }
    let frames = seq
        .frames()
        .par_iter()
        .map(|f| {
            let f = if options.grayscale { to_grayscale(f) } else { f.clone() };
            match options.resize_to {
                Some((h, w)) => resize_bilinear(&f, h, w),
                None => f,
            }
        })
        .collect();
    FrameSequence::new(frames)
}

/// Rec.601 luma; single-channel frames are returned unchanged.
pub fn to_grayscale(frame: &Frame) -> Frame {
    if frame.channels() == 1 {
        return frame.clone();
    }
    let c = frame.channels();
    let data = frame
        .data()
        .chunks_exact(c)
        .map(|px| {
            let v = LUMA_WEIGHTS[0] * px[0] + LUMA_WEIGHTS[1] * px[1] + LUMA_WEIGHTS[2] * px[2];
            v.clamp(0.0, 1.0)
        })
        .collect();
    Frame::new(frame.height(), frame.width(), 1, data).expect("shape preserved")
}

/// Bilinear resampling on a center-aligned grid: output pixel `x` samples
/// the source at `(x + 0.5) * W / W' - 0.5`, clamped to the image.
pub fn resize_bilinear(frame: &Frame, out_h: usize, out_w: usize) -> Frame {
    let (h, w, c) = frame.shape();
    let ys = sample_positions(h, out_h);
    let xs = sample_positions(w, out_w);
    let mut data = Vec::with_capacity(out_h * out_w * c);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            for ch in 0..c {
                let top = frame.get(y0, x0, ch) * (1.0 - fx) + frame.get(y0, x1, ch) * fx;
                let bottom = frame.get(y1, x0, ch) * (1.0 - fx) + frame.get(y1, x1, ch) * fx;
                data.push(top * (1.0 - fy) + bottom * fy);
            }
        }
    }
    Frame::new(out_h, out_w, c, data).expect("shape computed above")
}

fn sample_positions(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let s = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(h: u32, w: u32, c: u8, dtype: u8, t: u32) -> Vec<u8> {
        let mut v = b"PMIS".to_vec();
        v.extend_from_slice(&1u16.to_le_bytes());
        v.extend_from_slice(&h.to_le_bytes());
        v.extend_from_slice(&w.to_le_bytes());
        v.push(c);
        v.push(dtype);
        v.extend_from_slice(&0u16.to_le_bytes());
        v.extend_from_slice(&t.to_le_bytes());
        v
    }

    #[test]
    fn natural_order() {
        let mut names = vec!["f_10.png", "f_2.png", "f_1.png", "f_02.png"];
        names.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(names, ["f_1.png", "f_2.png", "f_02.png", "f_10.png"]);
        assert_eq!(natural_cmp("a", "b"), Ordering::Less);
        assert_eq!(natural_cmp("x9", "x9a"), Ordering::Less);
    }

    #[test]
    fn container_decodes_two_frames() {
        let mut bytes = header(4, 4, 1, 0, 2);
        bytes.extend((0..32u8).map(|i| i * 8));
        let seq = decode_container(&bytes).unwrap();
        assert_eq!(seq.len(), 2);
        assert_eq!(seq.shape(), (4, 4, 1));
        assert_eq!(seq.frame(1).data()[0], 128.0 / 255.0);
    }

    #[test]
    fn container_errors() {
        let mut bytes = header(4, 4, 1, 0, 2);
        bytes.extend([0u8; 32]);
        bytes[0] = b'X';
        let err = decode_container(&bytes).unwrap_err();
        assert_eq!(err.to_string(), "not a PMIS container");

        let mut bytes = header(4, 4, 1, 0, 3);
        bytes.extend([0u8; 32]);
        assert!(matches!(
            decode_container(&bytes),
            Err(Error::Truncated { expected: 48, found: 32 })
        ));

        let mut bytes = header(4, 4, 1, 1, 1);
        bytes.extend([0u8; 16]);
        assert!(matches!(
            decode_container(&bytes),
            Err(Error::UnsupportedContainer(_))
        ));
    }

    #[test]
    fn quantization_rounds_half_up() {
        assert_eq!(unit_to_u8(1.0), 255);
        assert_eq!(unit_to_u8(0.5), 128);
        assert_eq!(unit_to_u8(0.0), 0);
    }

    #[test]
    fn encode_writes_documented_header() {
        let seq = FrameSequence::new(vec![Frame::filled(2, 3, 3, 1.0); 2]).unwrap();
        let bytes = encode_container(&seq).unwrap();
        assert_eq!(&bytes[..CONTAINER_HEADER_LEN], header(2, 3, 3, 0, 2).as_slice());
        assert_eq!(bytes.len(), CONTAINER_HEADER_LEN + 2 * 18);
        assert!(bytes[CONTAINER_HEADER_LEN..].iter().all(|&b| b == 255));
    }

    #[test]
    fn resize_constant_is_constant() {
        let f = Frame::filled(4, 4, 3, 0.5);
        let r = resize_bilinear(&f, 2, 2);
        assert!(r.data().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn resize_preserves_column_means() {
        let f = Frame::new(2, 2, 1, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let r = resize_bilinear(&f, 1, 2);
        assert_eq!(r.data(), &[0.0, 1.0]);
    }

    #[test]
    fn grayscale_uses_luma_weights() {
        let f = Frame::new(1, 1, 3, vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(to_grayscale(&f).data(), &[0.299]);
    }

    #[test]
    fn invalid_resize_rejected() {
        let opts = IngestOptions {
            resize_to: Some((0, 4)),
            grayscale: false,
        };
        assert!(matches!(opts.validate(), Err(Error::InvalidConfig(_))));
    }
}
