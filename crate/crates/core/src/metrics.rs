//! Reconstruction quality metrics and the corpus benchmark sweep.
//!
//! MSE and the universal quality index are accumulated in integer
//! arithmetic (summed-area tables for the sliding window), so results
//! are exact up to the final float divisions and independent of
//! traversal strategy.

use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use thiserror::Error;

use crate::codec::{forward_2d, inverse_2d, quantize_to_pixels, retain, CodecError, RetentionPolicy};
use crate::imageio::GrayImage;
use crate::matrix::Matrix8;
use crate::transforms::{dct_transform, exact_dct_matrix, TransformSpec};

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("images are {aw}x{ah} and {bw}x{bh}; sizes must match")]
    DimensionMismatch {
        aw: usize,
        ah: usize,
        bw: usize,
        bh: usize,
    },
    #[error("image is {width}x{height}; the quality index needs at least 8x8")]
    ImageTooSmall { width: usize, height: usize },
    #[error("no input to aggregate")]
    EmptyInput,
    #[error("relative error against a zero reference is undefined")]
    ZeroReference,
    #[error("retained count {0} outside 1..=64")]
    RetentionOutOfRange(usize),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Mean squared error between two same-sized images.
pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64, MetricError> {
    check_dims(a, b)?;
    let sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&p, &q)| {
            let d = i64::from(p) - i64::from(q);
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / a.pixels().len() as f64)
}

/// Peak signal-to-noise ratio in dB for an 8-bit signal, from a
/// precomputed MSE. Zero error maps to positive infinity.
pub fn psnr(mse: f64) -> f64 {
    assert!(mse >= 0.0, "negative mean squared error");
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

/// Universal quality index over all 8x8 windows at stride 1, averaged.
///
/// Per window, with integer sums `sx, sy, sxx, syy, sxy` over N = 64
/// samples, the index is `4(N sxy - sx sy) sx sy` over
/// `(N(sxx + syy) - sx^2 - sy^2)(sx^2 + sy^2)`. Degenerate windows where
/// the denominator vanishes: identical all-zero windows score 1, flat
/// windows with nonzero means keep the luminance factor
/// `2 sx sy / (sx^2 + sy^2)`, and the zero-mean nonzero-variance case
/// cannot arise for unsigned samples.
pub fn uqi(a: &GrayImage, b: &GrayImage) -> Result<f64, MetricError> {
    check_dims(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < 8 || h < 8 {
        return Err(MetricError::ImageTooSmall {
            width: w,
            height: h,
        });
    }

    let stride = w + 1;
    let mut sx = vec![0i64; stride * (h + 1)];
    let mut sy = sx.clone();
    let mut sxx = sx.clone();
    let mut syy = sx.clone();
    let mut sxy = sx.clone();
    let (pa, pb) = (a.pixels(), b.pixels());
    for y in 0..h {
        for x in 0..w {
            let i = (y + 1) * stride + (x + 1);
            let px = i64::from(pa[y * w + x]);
            let py = i64::from(pb[y * w + x]);
            let carry = |t: &[i64]| t[i - 1] + t[i - stride] - t[i - stride - 1];
            sx[i] = px + carry(&sx);
            sy[i] = py + carry(&sy);
            sxx[i] = px * px + carry(&sxx);
            syy[i] = py * py + carry(&syy);
            sxy[i] = px * py + carry(&sxy);
        }
    }

    let n = 64i64;
    let mut total = 0.0;
    let mut count = 0usize;
    for y in 0..=h - 8 {
        for x in 0..=w - 8 {
            let rect = |t: &[i64]| {
                t[(y + 8) * stride + x + 8] - t[y * stride + x + 8] - t[(y + 8) * stride + x]
                    + t[y * stride + x]
            };
            let (wx, wy) = (rect(&sx), rect(&sy));
            let (wxx, wyy, wxy) = (rect(&sxx), rect(&syy), rect(&sxy));
            let var_term = n * (wxx + wyy) - wx * wx - wy * wy;
            let mean_term = wx * wx + wy * wy;
            let q = if var_term != 0 && mean_term != 0 {
                let num = 4 * (n * wxy - wx * wy) * wx * wy;
                num as f64 / (var_term * mean_term) as f64
            } else if var_term == 0 && mean_term == 0 {
                1.0
            } else if var_term == 0 {
                (2 * wx * wy) as f64 / mean_term as f64
            } else {
                // zero means with nonzero variance, unreachable for u8
                continue;
            };
            total += q;
            count += 1;
        }
    }
    if count == 0 {
        return Err(MetricError::EmptyInput);
    }
    Ok(total / count as f64)
}

/// Absolute percentage error of `value` against `reference`.
pub fn ape(value: f64, reference: f64) -> Result<f64, MetricError> {
    if reference == 0.0 {
        return Err(MetricError::ZeroReference);
    }
    Ok(100.0 * (value - reference).abs() / reference.abs())
}

/// Sweep-internal APE: a zero reference yields 0 when the value is also
/// zero and infinity otherwise, so lossless rows stay comparable.
fn safe_ape(value: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if value == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        100.0 * (value - reference).abs() / reference.abs()
    }
}

/// The three per-pair quality figures.
#[derive(Clone, Copy, Debug)]
pub struct QualityScores {
    pub mse: f64,
    pub psnr: f64,
    pub uqi: f64,
}

/// Scores a reconstruction against its original.
pub fn score_pair(original: &GrayImage, reconstructed: &GrayImage) -> Result<QualityScores, MetricError> {
    let mse = mse(original, reconstructed)?;
    Ok(QualityScores {
        mse,
        psnr: psnr(mse),
        uqi: uqi(original, reconstructed)?,
    })
}

/// One benchmark row: corpus-averaged scores for a transform at one
/// retention level, plus percentage error against the exact DCT at the
/// same level.
#[derive(Clone, Debug)]
pub struct CompressionReport {
    pub transform: String,
    pub r: usize,
    pub avg_mse: f64,
    pub avg_psnr: f64,
    pub avg_uqi: f64,
    pub ape_mse: f64,
    pub ape_uqi: f64,
}

fn check_dims(a: &GrayImage, b: &GrayImage) -> Result<(), MetricError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricError::DimensionMismatch {
            aw: a.width(),
            ah: a.height(),
            bw: b.width(),
            bh: b.height(),
        });
    }
    Ok(())
}

/// Per-image coefficient planes for one transform, computed once and
/// reused across retention levels.
struct ForwardPlanes {
    blocks_wide: usize,
    coeffs: Vec<crate::codec::Block8>,
}

fn forward_planes(m: &Matrix8, img: &GrayImage) -> ForwardPlanes {
    ForwardPlanes {
        blocks_wide: img.blocks_wide(),
        coeffs: img.blocks().map(|(_, b)| forward_2d(m, &b)).collect(),
    }
}

fn reconstruct(
    m: &Matrix8,
    planes: &ForwardPlanes,
    policy: &RetentionPolicy,
    width: usize,
    height: usize,
) -> GrayImage {
    let mut out = GrayImage::new(width, height);
    for (i, coeff) in planes.coeffs.iter().enumerate() {
        let recon = inverse_2d(m, &retain(coeff, policy));
        out.set_block(
            i % planes.blocks_wide,
            i / planes.blocks_wide,
            &quantize_to_pixels(&recon),
        );
    }
    out
}

/// Runs every transform at every retention level over the corpus and
/// averages the scores per (transform, r) pair.
///
/// Images are processed in parallel but aggregated in input order, so
/// the output is deterministic. The APE reference is the exact DCT; if
/// `specs` already contains it the scores are shared, otherwise it is
/// evaluated internally without adding rows. Rows come out grouped by
/// transform in the order given, with `r` ascending.
pub fn corpus_sweep(
    images: &[GrayImage],
    specs: &[TransformSpec],
    rs: RangeInclusive<usize>,
) -> Result<Vec<CompressionReport>, MetricError> {
    if images.is_empty() || specs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let r_values: Vec<usize> = rs.collect();
    if r_values.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    for &r in &r_values {
        if !(1..=64).contains(&r) {
            return Err(MetricError::RetentionOutOfRange(r));
        }
    }
    for img in images {
        if !img.is_block_aligned() {
            return Err(CodecError::MisalignedImage {
                width: img.width(),
                height: img.height(),
            }
            .into());
        }
    }
    let policies: Vec<RetentionPolicy> = r_values.iter().map(|&r| RetentionPolicy::new(r)).collect();

    let exact = exact_dct_matrix();
    let reference_index = specs
        .iter()
        .position(|s| s.name() == "dct" && s.exact_matrix().max_abs_diff(&exact) == 0.0);
    let mut matrices: Vec<&Matrix8> = specs.iter().map(|s| s.exact_matrix()).collect();
    let internal_reference;
    if reference_index.is_none() {
        internal_reference = dct_transform();
        matrices.push(internal_reference.exact_matrix());
    }

    // per image, per matrix, per retention level
    let scored: Vec<Vec<Vec<QualityScores>>> = images
        .par_iter()
        .map(|img| {
            matrices
                .iter()
                .map(|m| {
                    let planes = forward_planes(m, img);
                    policies
                        .iter()
                        .map(|policy| {
                            let recon = reconstruct(m, &planes, policy, img.width(), img.height());
                            score_pair(img, &recon)
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let images_len = images.len() as f64;
    let averaged: Vec<Vec<QualityScores>> = (0..matrices.len())
        .map(|t| {
            (0..r_values.len())
                .map(|i| {
                    let (mut m, mut p, mut u) = (0.0, 0.0, 0.0);
                    for per_image in &scored {
                        let s = per_image[t][i];
                        m += s.mse;
                        p += s.psnr;
                        u += s.uqi;
                    }
                    QualityScores {
                        mse: m / images_len,
                        psnr: p / images_len,
                        uqi: u / images_len,
                    }
                })
                .collect()
        })
        .collect();

    let reference = &averaged[reference_index.unwrap_or(specs.len())];
    let mut reports = Vec::with_capacity(specs.len() * r_values.len());
    for (t, spec) in specs.iter().enumerate() {
        for (i, &r) in r_values.iter().enumerate() {
            let s = averaged[t][i];
            reports.push(CompressionReport {
                transform: spec.name().to_string(),
                r,
                avg_mse: s.mse,
                avg_psnr: s.psnr,
                avg_uqi: s.uqi,
                ape_mse: safe_ape(s.mse, reference[i].mse),
                ape_uqi: safe_ape(s.uqi, reference[i].uqi),
            });
        }
    }
    Ok(reports)
}

/// CSV serialization of sweep rows:
/// `transform,r,avg_mse,avg_psnr,avg_uqi,ape_mse,ape_uqi`. Infinite
/// values print as `inf`.
pub fn write_report_csv(
    reports: &[CompressionReport],
    out: &mut dyn Write,
) -> std::io::Result<()> {
    writeln!(out, "transform,r,avg_mse,avg_psnr,avg_uqi,ape_mse,ape_uqi")?;
    for row in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.transform, row.r, row.avg_mse, row.avg_psnr, row.avg_uqi, row.ape_mse, row.ape_uqi
        )?;
    }
    Ok(())
}
