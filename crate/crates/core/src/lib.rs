//! Multiplication-free approximations of the 8-point DCT, with the
//! machinery to judge them: spectral deviation of each basis row,
//! arithmetic cost audits of the fast evaluation graphs, and a block
//! compression benchmark over grayscale corpora.
//!
//! The crate is organized around [`TransformSpec`], which couples an
//! exact transform matrix with its integer kernel, scaling diagonal,
//! and declared operation cost. Everything downstream (spectral
//! reports, codec runs, cost audits) consumes that one handle.

#![allow(clippy::needless_range_loop)]

pub mod codec;
pub mod imageio;
pub mod matrix;
pub mod metrics;
pub mod spectral;
pub mod transforms;

pub use codec::{Block8, RetentionPolicy, ZigzagOrder};
pub use imageio::GrayImage;
pub use matrix::{Matrix8, Vector8};
pub use metrics::{CompressionReport, QualityScores};
pub use spectral::{ErrorEnergyReport, TransferFunction};
pub use transforms::{ArithmeticCost, TransformSpec};
