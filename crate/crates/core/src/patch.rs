//! Patch grids and the joint patch-sample matrix of an adjacent frame pair.
//!
//! A frame is cut into non-overlapping `r × r` patches; partial patches on
//! the right and bottom edges are dropped. Each patch is flattened row-major
//! with channels innermost into a `d = r²·C` vector. For a pair of frames the
//! two vectors of patch `j` are stacked into column `j` of a `2d × N` matrix,
//! with columns following the patch grid in row-major order.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::Frame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchGrid {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub patch_size: usize,
    pub rows: usize,
    pub cols: usize,
}

impl PatchGrid {
    /// Number of patches `N`.
    #[inline]
    pub fn patches(&self) -> usize {
        self.rows * self.cols
    }

    /// Embedding dimension `d = r²·C`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.patch_size * self.patch_size * self.channels
    }

    fn check_frame(&self, frame: &Frame) -> Result<()> {
        if frame.shape() != (self.height, self.width, self.channels) {
            let (h, w, c) = frame.shape();
            return Err(Error::ShapeMismatch(format!(
                "frame is {h}x{w}x{c}, grid expects {}x{}x{}",
                self.height, self.width, self.channels
            )));
        }
        Ok(())
    }
}

/// Lays out the patch grid for `height × width × channels` frames.
///
/// Fails when `patch_size` does not fit, or when the grid has no more
/// patches than the joint dimension `2d`, in which case the joint sample
/// covariance is rank deficient by construction.
pub fn make_grid(height: usize, width: usize, channels: usize, patch_size: usize) -> Result<PatchGrid> {
    if patch_size == 0 {
        return Err(Error::InvalidConfig("patch size must be at least 1".into()));
    }
    if channels == 0 {
        return Err(Error::InvalidConfig("channel count must be at least 1".into()));
    }
    if patch_size > height.min(width) {
        return Err(Error::InvalidConfig(format!(
            "patch size {patch_size} exceeds frame size {height}x{width}"
        )));
    }
    let grid = PatchGrid {
        height,
        width,
        channels,
        patch_size,
        rows: height / patch_size,
        cols: width / patch_size,
    };
    if grid.patches() <= 2 * grid.dim() {
        return Err(Error::FrameTooSmall {
            height,
            width,
            channels,
            patch_size,
            patches: grid.patches(),
            joint_dim: 2 * grid.dim(),
        });
    }
    Ok(grid)
}

/// Joint patch samples of one frame pair; `2d × N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchMatrix {
    pub data: DMatrix<f64>,
    pub grid: PatchGrid,
}

/// Writes the flattened patch `(pr, pc)` of `frame` into `out` (length `d`).
fn gather_patch(frame: &Frame, grid: &PatchGrid, pr: usize, pc: usize, out: &mut [f64]) {
    let r = grid.patch_size;
    let c = grid.channels;
    let row_len = r * c;
    let src = frame.data();
    for dy in 0..r {
        let y = pr * r + dy;
        let start = (y * grid.width + pc * r) * c;
        out[dy * row_len..(dy + 1) * row_len].copy_from_slice(&src[start..start + row_len]);
    }
}

/// Single-frame patch samples, `d × N`.
pub fn embed_frame(frame: &Frame, grid: &PatchGrid) -> Result<DMatrix<f64>> {
    grid.check_frame(frame)?;
    let d = grid.dim();
    let mut m = DMatrix::zeros(d, grid.patches());
    for (j, mut col) in m.column_iter_mut().enumerate() {
        let slice = col.as_mut_slice();
        gather_patch(frame, grid, j / grid.cols, j % grid.cols, slice);
    }
    Ok(m)
}

/// Stacks the patch vectors of `prev` (rows `0..d`) over those of `curr`
/// (rows `d..2d`).
pub fn embed_pair(prev: &Frame, curr: &Frame, grid: &PatchGrid) -> Result<PatchMatrix> {
    grid.check_frame(prev)?;
    grid.check_frame(curr)?;
    let d = grid.dim();
    let mut m = DMatrix::zeros(2 * d, grid.patches());
    for (j, mut col) in m.column_iter_mut().enumerate() {
        let (pr, pc) = (j / grid.cols, j % grid.cols);
        let (top, bottom) = col.as_mut_slice().split_at_mut(d);
        gather_patch(prev, grid, pr, pc, top);
        gather_patch(curr, grid, pr, pc, bottom);
    }
    Ok(PatchMatrix { data: m, grid: *grid })
}
