//! 8-bit grayscale images and PGM reading/writing.
//!
//! Both binary (`P5`) and plain (`P2`) PGM files are read; output is
//! always binary with maxval 255. Sample values are taken as stored,
//! whatever the declared maxval.

use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::codec::Block8;

/// Pixel cap guarding the header dimensions against overflow.
const MAX_PIXELS: usize = 1 << 31;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("not a PGM file (expected P5 or P2 magic)")]
    BadMagic,
    #[error("missing {0} in header")]
    MissingValue(&'static str),
    #[error("bad {what}: {value:?}")]
    BadValue { what: &'static str, value: String },
    #[error("maxval {0} not supported (limit 255)")]
    UnsupportedMaxval(u32),
    #[error("image has a zero dimension")]
    ZeroDimension,
    #[error("sample {index} is {value}, above maxval {maxval}")]
    SampleOutOfRange {
        index: usize,
        value: u32,
        maxval: u32,
    },
    #[error("raster ends early: expected {expected} samples, got {got}")]
    Truncated { expected: usize, got: usize },
}

/// Row-major 8-bit grayscale image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

/// Block position in units of 8x8 tiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockCoord {
    pub bx: usize,
    pub by: usize,
}

impl GrayImage {
    /// Zero-filled image. Panics on a zero dimension.
    pub fn new(width: usize, height: usize) -> GrayImage {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        GrayImage {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    /// Wraps an existing pixel buffer. Panics unless `pixels.len()`
    /// equals `width * height`.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> GrayImage {
        assert!(width > 0 && height > 0, "image dimensions must be nonzero");
        assert_eq!(pixels.len(), width * height, "pixel buffer length mismatch");
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> GrayImage {
        let mut img = GrayImage::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.pixels[y * width + x] = f(x, y);
            }
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> u8 {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        self.pixels[y * self.width + x]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, value: u8) {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        self.pixels[y * self.width + x] = value;
    }

    /// True when both dimensions are multiples of 8.
    pub fn is_block_aligned(&self) -> bool {
        self.width.is_multiple_of(8) && self.height.is_multiple_of(8)
    }

    pub fn blocks_wide(&self) -> usize {
        self.width / 8
    }

    pub fn blocks_high(&self) -> usize {
        self.height / 8
    }

    /// The 8x8 tile at block position `(bx, by)`, widened to floats.
    /// Panics when the image is not block aligned or the position is out
    /// of range.
    pub fn block(&self, bx: usize, by: usize) -> Block8 {
        assert!(self.is_block_aligned(), "image dimensions not multiples of 8");
        assert!(
            bx < self.blocks_wide() && by < self.blocks_high(),
            "block out of bounds"
        );
        let mut out = [[0.0; 8]; 8];
        for r in 0..8 {
            let base = (by * 8 + r) * self.width + bx * 8;
            for c in 0..8 {
                out[r][c] = f64::from(self.pixels[base + c]);
            }
        }
        out
    }

    /// Overwrites the 8x8 tile at block position `(bx, by)`.
    pub fn set_block(&mut self, bx: usize, by: usize, block: &[[u8; 8]; 8]) {
        assert!(self.is_block_aligned(), "image dimensions not multiples of 8");
        assert!(
            bx < self.blocks_wide() && by < self.blocks_high(),
            "block out of bounds"
        );
        for r in 0..8 {
            let base = (by * 8 + r) * self.width + bx * 8;
            self.pixels[base..base + 8].copy_from_slice(&block[r]);
        }
    }

    /// Iterates tiles in raster order, left to right then top to bottom.
    pub fn blocks(&self) -> impl Iterator<Item = (BlockCoord, Block8)> + '_ {
        assert!(self.is_block_aligned(), "image dimensions not multiples of 8");
        let wide = self.blocks_wide();
        (0..self.blocks_high() * wide).map(move |i| {
            let coord = BlockCoord {
                bx: i % wide,
                by: i / wide,
            };
            (coord, self.block(coord.bx, coord.by))
        })
    }
}

struct HeaderScanner<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> HeaderScanner<'a> {
    fn skip_filler(&mut self) {
        while self.pos < self.data.len() {
            let b = self.data[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a str> {
        self.skip_filler();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            if self.data[self.pos] == b'#' {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.data[start..self.pos]).ok()
        }
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        let tok = self.token().ok_or(PgmError::MissingValue(what))?;
        tok.parse().map_err(|_| PgmError::BadValue {
            what,
            value: tok.to_string(),
        })
    }
}

/// Parses a PGM file held in memory.
pub fn decode_pgm(data: &[u8]) -> Result<GrayImage, PgmError> {
    let binary = match data.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(PgmError::BadMagic),
    };
    let mut scan = HeaderScanner { data, pos: 2 };
    let width = scan.number("width")? as usize;
    let height = scan.number("height")? as usize;
    let maxval = scan.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension);
    }
    let expected = width
        .checked_mul(height)
        .filter(|&n| n <= MAX_PIXELS)
        .ok_or(PgmError::BadValue {
            what: "dimensions",
            value: format!("{width}x{height}"),
        })?;

    let pixels = if binary {
        // Exactly one whitespace byte separates the maxval from the raster.
        match data.get(scan.pos) {
            Some(b) if b.is_ascii_whitespace() => scan.pos += 1,
            _ => return Err(PgmError::MissingValue("raster")),
        }
        let raster = &data[scan.pos..];
        if raster.len() < expected {
            return Err(PgmError::Truncated {
                expected,
                got: raster.len(),
            });
        }
        let raster = &raster[..expected];
        for (index, &value) in raster.iter().enumerate() {
            if u32::from(value) > maxval {
                return Err(PgmError::SampleOutOfRange {
                    index,
                    value: u32::from(value),
                    maxval,
                });
            }
        }
        raster.to_vec()
    } else {
        let mut pixels = Vec::with_capacity(expected);
        while pixels.len() < expected {
            let Some(tok) = scan.token() else {
                return Err(PgmError::Truncated {
                    expected,
                    got: pixels.len(),
                });
            };
            let value: u32 = tok.parse().map_err(|_| PgmError::BadValue {
                what: "sample",
                value: tok.to_string(),
            })?;
            if value > maxval {
                return Err(PgmError::SampleOutOfRange {
                    index: pixels.len(),
                    value,
                    maxval,
                });
            }
            pixels.push(value as u8);
        }
        pixels
    };
    Ok(GrayImage::from_pixels(width, height, pixels))
}

/// Serializes to binary PGM with maxval 255.
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn read_pgm(path: &Path) -> Result<GrayImage, PgmError> {
    let mut data = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut data)?;
    decode_pgm(&data)
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<(), PgmError> {
    std::fs::write(path, encode_pgm(img))?;
    Ok(())
}
