//! Block compression pipeline: 2-D transform, zigzag coefficient
//! retention, inverse transform, and pixel quantization.
//!
//! The inverse step always applies the transpose of the forward matrix.
//! For an orthogonal matrix that is the true inverse; the approximate
//! transforms reuse the same pairing, and any reconstruction bias they
//! introduce is part of what the benchmark measures.

use thiserror::Error;

use crate::imageio::GrayImage;
use crate::matrix::Matrix8;
use crate::transforms::round_half_away;

/// 8x8 coefficient or sample tile.
pub type Block8 = [[f64; 8]; 8];

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("image is {width}x{height}; both dimensions must be multiples of 8")]
    MisalignedImage { width: usize, height: usize },
}

/// Diagonal scan order over an 8x8 tile, as used by JPEG.
#[derive(Clone, Debug)]
pub struct ZigzagOrder {
    scan: [usize; 64],
    rank: [usize; 64],
}

impl ZigzagOrder {
    /// Builds the scan by walking diagonals, alternating direction.
    pub fn jpeg() -> ZigzagOrder {
        let mut scan = [0usize; 64];
        let (mut r, mut c) = (0i32, 0i32);
        for slot in scan.iter_mut() {
            *slot = (r * 8 + c) as usize;
            if (r + c) % 2 == 0 {
                if c == 7 {
                    r += 1;
                } else if r == 0 {
                    c += 1;
                } else {
                    r -= 1;
                    c += 1;
                }
            } else if r == 7 {
                c += 1;
            } else if c == 0 {
                r += 1;
            } else {
                r += 1;
                c -= 1;
            }
        }
        let mut rank = [0usize; 64];
        for (position, &flat) in scan.iter().enumerate() {
            rank[flat] = position;
        }
        ZigzagOrder { scan, rank }
    }

    /// Flat row-major indices in scan order.
    pub fn scan(&self) -> &[usize; 64] {
        &self.scan
    }

    /// Position of coefficient `(row, col)` within the scan.
    pub fn rank_of(&self, row: usize, col: usize) -> usize {
        assert!(row < 8 && col < 8, "coefficient out of range");
        self.rank[row * 8 + col]
    }
}

/// Keeps the first `r` coefficients in zigzag order and zeroes the rest.
#[derive(Clone, Debug)]
pub struct RetentionPolicy {
    r: usize,
    keep: [bool; 64],
}

impl RetentionPolicy {
    /// Panics unless `1 <= r <= 64`.
    pub fn new(r: usize) -> RetentionPolicy {
        assert!((1..=64).contains(&r), "retained count {r} outside 1..=64");
        let order = ZigzagOrder::jpeg();
        let mut keep = [false; 64];
        for &flat in &order.scan()[..r] {
            keep[flat] = true;
        }
        RetentionPolicy { r, keep }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn keeps(&self, row: usize, col: usize) -> bool {
        assert!(row < 8 && col < 8, "coefficient out of range");
        self.keep[row * 8 + col]
    }
}

/// Separable 2-D forward transform: rows then columns of the tile.
pub fn forward_2d(m: &Matrix8, block: &Block8) -> Block8 {
    m.matmul(&Matrix8(*block)).matmul(&m.transpose()).0
}

/// Transpose-based 2-D inverse of [`forward_2d`].
pub fn inverse_2d(m: &Matrix8, coeffs: &Block8) -> Block8 {
    m.transpose().matmul(&Matrix8(*coeffs)).matmul(m).0
}

/// Zeroes every coefficient the policy drops.
pub fn retain(coeffs: &Block8, policy: &RetentionPolicy) -> Block8 {
    let mut out = *coeffs;
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            if !policy.keeps(r, c) {
                *v = 0.0;
            }
        }
    }
    out
}

/// Full float-domain round trip for one tile: forward, retain, inverse.
/// No rounding or clamping; see [`quantize_to_pixels`] for that step.
pub fn reconstructed_block(m: &Matrix8, block: &Block8, policy: &RetentionPolicy) -> Block8 {
    let coeffs = forward_2d(m, block);
    inverse_2d(m, &retain(&coeffs, policy))
}

fn clamp_to_u8(value: f64) -> u8 {
    let rounded = round_half_away(value);
    if rounded < 0.0 {
        0
    } else if rounded > 255.0 {
        255
    } else {
        rounded as u8
    }
}

/// Rounds half away from zero, then clamps to the 8-bit pixel range.
pub fn quantize_to_pixels(block: &Block8) -> [[u8; 8]; 8] {
    let mut out = [[0u8; 8]; 8];
    for r in 0..8 {
        for c in 0..8 {
            out[r][c] = clamp_to_u8(block[r][c]);
        }
    }
    out
}

/// Compresses and reconstructs a whole image tile by tile.
pub fn compress_image(
    m: &Matrix8,
    img: &GrayImage,
    policy: &RetentionPolicy,
) -> Result<GrayImage, CodecError> {
    if !img.is_block_aligned() {
        return Err(CodecError::MisalignedImage {
            width: img.width(),
            height: img.height(),
        });
    }
    let mut out = GrayImage::new(img.width(), img.height());
    for (coord, block) in img.blocks() {
        let recon = reconstructed_block(m, &block, policy);
        out.set_block(coord.bx, coord.by, &quantize_to_pixels(&recon));
    }
    Ok(out)
}
