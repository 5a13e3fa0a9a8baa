//! Frequency-domain comparison of transform rows against the exact DCT.
//!
//! Row `m` of a transform matrix is treated as an 8-tap FIR filter with
//! transfer function `H_m(w) = sum_n t[m][n] exp(-j n w)`. The deviation
//! from the exact DCT row is integrated over `[0, pi]` to a single error
//! energy per row, both by composite Simpson quadrature and in closed
//! form; the two routes are kept separate so they can check each other.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::matrix::{Matrix8, Vector8};
use crate::transforms::{exact_dct_matrix, TransformSpec};

/// Uniform panel count for the Simpson quadrature over `[0, pi]`. The
/// integrands are trigonometric polynomials of degree at most 7, which
/// this grid resolves to float rounding error.
pub const QUADRATURE_PANELS: usize = 1024;

/// Row indices summed into a report's `total`. Rows 0 and 4 are excluded:
/// the approximations under study reproduce those DCT rows exactly, so the
/// interesting deviation lives in the other six.
pub const TOTAL_ROWS: [usize; 6] = [1, 2, 3, 5, 6, 7];

fn dct() -> &'static Matrix8 {
    static DCT: OnceLock<Matrix8> = OnceLock::new();
    DCT.get_or_init(exact_dct_matrix)
}

/// One matrix row viewed as an 8-tap FIR filter.
#[derive(Clone, Copy, Debug)]
pub struct TransferFunction {
    row: usize,
    coeffs: Vector8,
}

impl TransferFunction {
    /// Filter for row `m` of `matrix`. Panics if `m >= 8`.
    pub fn new(matrix: &Matrix8, m: usize) -> TransferFunction {
        assert!(m < 8, "row index {m} out of range");
        TransferFunction {
            row: m,
            coeffs: matrix.row(m),
        }
    }

    pub fn row(&self) -> usize {
        self.row
    }

    pub fn coeffs(&self) -> &Vector8 {
        &self.coeffs
    }

    /// Frequency response at `omega`. Panics outside `[0, pi]`.
    pub fn response(&self, omega: f64) -> Complex64 {
        assert!(
            (0.0..=PI).contains(&omega),
            "omega {omega} outside [0, pi]"
        );
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, &c) in self.coeffs.iter().enumerate() {
            acc += c * Complex64::from_polar(1.0, -(n as f64) * omega);
        }
        acc
    }
}

/// Frequency response of row `m` of `t` at `omega`.
pub fn transfer_function(t: &Matrix8, m: usize, omega: f64) -> Complex64 {
    TransferFunction::new(t, m).response(omega)
}

/// Squared magnitude deviation of row `m` of `t` from the exact DCT row at
/// frequency `omega`.
pub fn spectral_error(t: &Matrix8, m: usize, omega: f64) -> f64 {
    let reference = TransferFunction::new(dct(), m).response(omega);
    let tested = transfer_function(t, m, omega);
    (reference - tested).norm_sqr()
}

fn simpson(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    assert!(panels >= 2 && panels.is_multiple_of(2), "panel count must be even");
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * i as f64);
    }
    acc * h / 3.0
}

/// Error energy of row `m`: the integral of `spectral_error` over
/// `[0, pi]`, by Simpson quadrature on [`QUADRATURE_PANELS`] panels.
pub fn error_energy(t: &Matrix8, m: usize) -> f64 {
    simpson(|w| spectral_error(t, m, w), 0.0, PI, QUADRATURE_PANELS)
}

/// Same quantity in closed form: cross terms of the squared deviation
/// integrate to zero over `[0, pi]`, leaving `pi * ||c_m - t_m||^2`.
pub fn error_energy_closed_form(t: &Matrix8, m: usize) -> f64 {
    assert!(m < 8, "row index {m} out of range");
    let c = dct().row(m);
    let row = t.row(m);
    let mut norm_sq = 0.0;
    for n in 0..8 {
        let d = c[n] - row[n];
        norm_sq += d * d;
    }
    PI * norm_sq
}

/// Per-row error energies of one transform plus their total over
/// [`TOTAL_ROWS`].
#[derive(Clone, Debug)]
pub struct ErrorEnergyReport {
    pub transform: String,
    pub epsilon: [f64; 8],
    pub total: f64,
}

/// Quadrature error energies for every row of `spec`.
pub fn error_energy_report(spec: &TransformSpec) -> ErrorEnergyReport {
    let epsilon: [f64; 8] = std::array::from_fn(|m| error_energy(spec.exact_matrix(), m));
    let total = TOTAL_ROWS.iter().map(|&m| epsilon[m]).sum();
    ErrorEnergyReport {
        transform: spec.name().to_string(),
        epsilon,
        total,
    }
}

/// CSV with one row per (transform, m) pair and a trailing total row per
/// transform: `transform,m,epsilon`.
pub fn write_energy_csv(
    reports: &[ErrorEnergyReport],
    out: &mut dyn Write,
) -> std::io::Result<()> {
    writeln!(out, "transform,m,epsilon")?;
    for report in reports {
        for (m, eps) in report.epsilon.iter().enumerate() {
            writeln!(out, "{},{},{}", report.transform, m, eps)?;
        }
        writeln!(out, "{},total,{}", report.transform, report.total)?;
    }
    Ok(())
}

/// CSV dump of the deviation curves on the quadrature grid:
/// `transform,m,omega,d`, one row per grid sample.
pub fn write_sweep_csv(specs: &[TransformSpec], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "transform,m,omega,d")?;
    for spec in specs {
        for m in 0..8 {
            for i in 0..=QUADRATURE_PANELS {
                let omega = PI * i as f64 / QUADRATURE_PANELS as f64;
                let d = spectral_error(spec.exact_matrix(), m, omega);
                writeln!(out, "{},{},{},{}", spec.name(), m, omega, d)?;
            }
        }
    }
    Ok(())
}
