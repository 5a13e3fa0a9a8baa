//! Construction of the 8-point DCT and its multiplication-free
//! approximations.
//!
//! The family is built from the exact orthonormal DCT matrix `C` in three
//! steps: round `2*C` elementwise to a ternary kernel, derive the diagonal
//! that renormalizes the kernel's rows, and combine the two into an
//! orthogonal transform. A sign-kernel transform and the exact DCT itself
//! are kept alongside for comparison, and external matrices can be loaded
//! from plain-text files.

mod file;
mod graphs;

pub use file::{load_comparator, parse_matrix_file, write_matrix_file, MatrixFile};
pub use graphs::{fast_forward, fast_inverse};

use std::f64::consts::PI;

use crate::matrix::{Matrix8, Vector8};

/// Gram-matrix off-diagonal entries above this are treated as real
/// non-orthogonality rather than rounding noise.
const GRAM_TOL: f64 = 1e-12;

/// Tolerance for the `exact = diag * kernel` consistency check.
const FACTOR_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("reading matrix file: {0}")]
    Io(#[from] std::io::Error),
    #[error("matrix file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("invalid transform name {0:?}: need a nonempty token of [A-Za-z0-9_.-]")]
    BadName(String),
    #[error("kernel entry ({row}, {col}) is {value}, expected -1, 0, or 1")]
    BadKernelEntry { row: usize, col: usize, value: f64 },
    #[error("kernel rows {row} and {other} are not orthogonal (gram entry {value})")]
    NonOrthogonalRows { row: usize, other: usize, value: f64 },
    #[error("kernel row {0} is zero")]
    ZeroRow(usize),
    #[error("diagonal entry {index} is {value}, expected a positive finite value")]
    BadDiagonal { index: usize, value: f64 },
    #[error("exact matrix disagrees with diag * kernel at ({row}, {col})")]
    FactorMismatch { row: usize, col: usize },
    #[error("flow graph does not evaluate this transform's kernel")]
    GraphKernelMismatch,
    #[error("transform {0:?} has no executable kernel to audit")]
    NoExecutableKernel(String),
}

/// Exact orthonormal 8-point DCT-II matrix.
///
/// Entry `(m, n)` is `a_m * cos((2n + 1) m pi / 16)` with `a_0 = 1/(2 sqrt 2)`
/// and `a_m = 1/2` otherwise, so rows are orthonormal.
pub fn exact_dct_matrix() -> Matrix8 {
    let mut rows = [[0.0; 8]; 8];
    for (m, row) in rows.iter_mut().enumerate() {
        let alpha = if m == 0 { (1.0f64 / 8.0).sqrt() } else { 0.5 };
        for (n, v) in row.iter_mut().enumerate() {
            *v = alpha * ((2 * n + 1) as f64 * m as f64 * PI / 16.0).cos();
        }
    }
    Matrix8(rows)
}

/// Rounds to the nearest integer with halves going away from zero:
/// `0.5 -> 1`, `-0.5 -> -1`.
///
/// Panics on NaN or infinite input.
pub fn round_half_away(x: f64) -> f64 {
    assert!(x.is_finite(), "round_half_away requires finite input, got {x}");
    // f64::round implements round-half-away-from-zero.
    x.round()
}

/// Applies `round` to every entry of `scale * C`, where `C` is the exact
/// DCT matrix. The ternary round-off kernel is the `scale = 2`,
/// round-half-away instance; other scales and rounding rules give the rest
/// of the family.
pub fn rounded_dct_kernel(scale: f64, round: impl Fn(f64) -> f64) -> Matrix8 {
    let c = exact_dct_matrix();
    let mut rows = [[0.0; 8]; 8];
    for r in 0..8 {
        for col in 0..8 {
            rows[r][col] = round(scale * c.0[r][col]);
        }
    }
    Matrix8(rows)
}

const ROUND_OFF_KERNEL: [[i8; 8]; 8] = [
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 0, 0, -1, -1, -1],
    [1, 0, 0, -1, -1, 0, 0, 1],
    [1, 0, -1, -1, 1, 1, 0, -1],
    [1, -1, -1, 1, 1, -1, -1, 1],
    [1, -1, 0, 1, -1, 0, 1, -1],
    [0, -1, 1, 0, 0, 1, -1, 0],
    [0, -1, 1, -1, 1, -1, 1, 0],
];

/// Ternary kernel obtained by rounding `2 * C` half away from zero.
///
/// Rows are mutually orthogonal with squared norms 8, 6, 4, 6, 8, 6, 4, 6.
pub fn round_off_kernel() -> Matrix8 {
    let mut rows = [[0.0; 8]; 8];
    for r in 0..8 {
        for c in 0..8 {
            rows[r][c] = ROUND_OFF_KERNEL[r][c] as f64;
        }
    }
    Matrix8(rows)
}

/// Elementwise sign of the exact DCT matrix. No entry of `C` is zero, so
/// every entry here is -1 or 1.
pub fn sign_kernel() -> Matrix8 {
    let c = exact_dct_matrix();
    let mut rows = [[0.0; 8]; 8];
    for r in 0..8 {
        for col in 0..8 {
            rows[r][col] = if c.0[r][col] > 0.0 { 1.0 } else { -1.0 };
        }
    }
    Matrix8(rows)
}

/// Diagonal `d` such that `diag(d) * kernel` has orthonormal rows, i.e. the
/// polar-decomposition scaling `sqrt((K K^T)^-1)` for a kernel whose gram
/// matrix is diagonal.
///
/// Fails if the kernel's rows are not mutually orthogonal (the scaling
/// would then not be diagonal) or if a row is zero.
pub fn row_normalizing_diagonal(kernel: &Matrix8) -> Result<Vector8, TransformError> {
    let gram = kernel.gram();
    for r in 0..8 {
        for c in 0..8 {
            if r != c && gram.0[r][c].abs() > GRAM_TOL {
                return Err(TransformError::NonOrthogonalRows {
                    row: r,
                    other: c,
                    value: gram.0[r][c],
                });
            }
        }
    }
    let mut d = [0.0; 8];
    for (r, v) in d.iter_mut().enumerate() {
        let norm_sq = gram.0[r][r];
        if norm_sq <= 0.0 {
            return Err(TransformError::ZeroRow(r));
        }
        *v = 1.0 / norm_sq.sqrt();
    }
    Ok(d)
}

/// Row-normalizing diagonal of the ternary round-off kernel:
/// `(1/(2 sqrt 2), 1/sqrt 6, 1/2, 1/sqrt 6, ...)` repeated.
pub fn orthogonalizer_diagonal() -> Vector8 {
    row_normalizing_diagonal(&round_off_kernel())
        .expect("round-off kernel rows are orthogonal and nonzero")
}

/// Scalar `a` minimizing `||a * of - to||_F`, in closed form
/// `trace(of^T to) / trace(of^T of)`.
pub fn least_squares_scale(of: &Matrix8, to: &Matrix8) -> f64 {
    let den = of.frobenius_inner(of);
    assert!(den > 0.0, "least_squares_scale of a zero matrix");
    of.frobenius_inner(to) / den
}

/// Frobenius-optimal single scale replacing the per-row diagonal for the
/// round-off kernel. Rounds to 0.3922.
pub fn frobenius_optimal_scale() -> f64 {
    least_squares_scale(&round_off_kernel(), &exact_dct_matrix())
}

/// Operation counts for one 8-point transform evaluation. Additions include
/// subtractions; `total` is always the sum of the other three fields.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ArithmeticCost {
    pub additions: u32,
    pub multiplications: u32,
    pub bit_shifts: u32,
    pub total: u32,
}

impl ArithmeticCost {
    pub const ZERO: ArithmeticCost = ArithmeticCost::new(0, 0, 0);

    pub const fn new(additions: u32, multiplications: u32, bit_shifts: u32) -> ArithmeticCost {
        ArithmeticCost {
            additions,
            multiplications,
            bit_shifts,
            total: additions + multiplications + bit_shifts,
        }
    }
}

/// How a transform's integer kernel is evaluated and audited.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kernel {
    /// 22-addition butterfly for the ternary round-off kernel.
    RoundOffGraph,
    /// 24-addition butterfly for the sign kernel.
    SignGraph,
    /// Row-by-row dense evaluation of the integer kernel, or of the exact
    /// matrix when no integer kernel exists.
    Dense,
}

/// A named 8-point transform: the real matrix used for fidelity math, plus
/// the optional integer kernel, diagonal factor, and cost bookkeeping that
/// describe its multiplication-free implementation.
#[derive(Clone, Debug)]
pub struct TransformSpec {
    name: String,
    exact_matrix: Matrix8,
    integer_kernel: Option<Matrix8>,
    diagonal: Option<Vector8>,
    declared_cost: ArithmeticCost,
    kernel: Option<Kernel>,
}

impl TransformSpec {
    /// Transform backed only by a real matrix, evaluated densely. Used for
    /// matrices loaded from comparator files. If every entry is exactly
    /// -1, 0, or 1 the matrix doubles as its own integer kernel.
    pub fn from_matrix(
        name: &str,
        exact_matrix: Matrix8,
        declared_cost: ArithmeticCost,
    ) -> Result<TransformSpec, TransformError> {
        let is_ternary = exact_matrix
            .0
            .iter()
            .all(|row| row.iter().all(|&v| v == 0.0 || v == 1.0 || v == -1.0));
        let integer_kernel = is_ternary.then_some(exact_matrix);
        TransformSpec::build(
            name,
            exact_matrix,
            integer_kernel,
            None,
            declared_cost,
            Some(Kernel::Dense),
        )
    }

    /// Transform given as `diag(diagonal) * integer_kernel`, with an
    /// explicit evaluation path.
    pub fn from_kernel(
        name: &str,
        integer_kernel: Matrix8,
        diagonal: Vector8,
        declared_cost: ArithmeticCost,
        kernel: Kernel,
    ) -> Result<TransformSpec, TransformError> {
        let exact_matrix = integer_kernel.scale_rows(&diagonal);
        TransformSpec::build(
            name,
            exact_matrix,
            Some(integer_kernel),
            Some(diagonal),
            declared_cost,
            Some(kernel),
        )
    }

    /// Transform used only for frequency-domain comparison. Carries no
    /// executable kernel, so cost audits reject it.
    pub fn spectral_only(name: &str, exact_matrix: Matrix8) -> Result<TransformSpec, TransformError> {
        TransformSpec::build(name, exact_matrix, None, None, ArithmeticCost::ZERO, None)
    }

    fn build(
        name: &str,
        exact_matrix: Matrix8,
        integer_kernel: Option<Matrix8>,
        diagonal: Option<Vector8>,
        declared_cost: ArithmeticCost,
        kernel: Option<Kernel>,
    ) -> Result<TransformSpec, TransformError> {
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
        {
            return Err(TransformError::BadName(name.to_string()));
        }
        check_finite(&exact_matrix)?;
        if let Some(k) = &integer_kernel {
            for r in 0..8 {
                for c in 0..8 {
                    let v = k.0[r][c];
                    if v != 0.0 && v != 1.0 && v != -1.0 {
                        return Err(TransformError::BadKernelEntry { row: r, col: c, value: v });
                    }
                }
            }
        }
        if let Some(d) = &diagonal {
            for (i, &v) in d.iter().enumerate() {
                if !v.is_finite() || v <= 0.0 {
                    return Err(TransformError::BadDiagonal { index: i, value: v });
                }
            }
        }
        if let (Some(k), Some(d)) = (&integer_kernel, &diagonal) {
            let product = k.scale_rows(d);
            for r in 0..8 {
                for c in 0..8 {
                    if (product.0[r][c] - exact_matrix.0[r][c]).abs() > FACTOR_TOL {
                        return Err(TransformError::FactorMismatch { row: r, col: c });
                    }
                }
            }
        }
        match kernel {
            Some(Kernel::RoundOffGraph) if integer_kernel != Some(round_off_kernel()) => {
                return Err(TransformError::GraphKernelMismatch);
            }
            Some(Kernel::SignGraph) if integer_kernel != Some(sign_kernel()) => {
                return Err(TransformError::GraphKernelMismatch);
            }
            _ => {}
        }
        Ok(TransformSpec {
            name: name.to_string(),
            exact_matrix,
            integer_kernel,
            diagonal,
            declared_cost,
            kernel,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact_matrix(&self) -> &Matrix8 {
        &self.exact_matrix
    }

    pub fn integer_kernel(&self) -> Option<&Matrix8> {
        self.integer_kernel.as_ref()
    }

    pub fn diagonal(&self) -> Option<&Vector8> {
        self.diagonal.as_ref()
    }

    pub fn declared_cost(&self) -> ArithmeticCost {
        self.declared_cost
    }

    pub fn kernel(&self) -> Option<Kernel> {
        self.kernel
    }

    /// Largest absolute entry of `M M^T - I` for the exact matrix.
    pub fn orthogonality_residual(&self) -> f64 {
        self.exact_matrix.orthogonality_residual()
    }
}

fn check_finite(m: &Matrix8) -> Result<(), TransformError> {
    for r in 0..8 {
        for c in 0..8 {
            if !m.0[r][c].is_finite() {
                return Err(TransformError::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Counts the arithmetic performed by one evaluation of the transform's
/// kernel: the butterfly graph when it has one, otherwise the sign-aware
/// dense product (zero entries free, the first nonzero term per row free,
/// every further unit-magnitude term one addition; power-of-two magnitudes
/// add a bit-shift, anything else a multiplication).
pub fn audit_cost(spec: &TransformSpec) -> Result<ArithmeticCost, TransformError> {
    // Counts are data independent; any finite probe works.
    let probe: Vector8 = [3.0, -1.0, 4.0, -1.0, 5.0, -9.0, 2.0, -6.0];
    match spec.kernel {
        None => Err(TransformError::NoExecutableKernel(spec.name.clone())),
        Some(Kernel::RoundOffGraph) => Ok(graphs::count_round_off_graph(&probe)),
        Some(Kernel::SignGraph) => Ok(graphs::count_sign_graph(&probe)),
        Some(Kernel::Dense) => {
            let m = spec.integer_kernel.as_ref().unwrap_or(&spec.exact_matrix);
            Ok(graphs::count_dense_product(m, &probe))
        }
    }
}

/// Exact DCT, evaluated densely: 56 additions and 64 multiplications.
pub fn dct_transform() -> TransformSpec {
    TransformSpec::from_matrix("dct", exact_dct_matrix(), ArithmeticCost::new(56, 64, 0))
        .expect("exact DCT spec is well formed")
}

/// Orthogonal transform `diag * kernel` built from the ternary round-off
/// kernel and its row-normalizing diagonal. 22 additions, nothing else.
pub fn proposed_transform() -> TransformSpec {
    TransformSpec::from_kernel(
        "proposed",
        round_off_kernel(),
        orthogonalizer_diagonal(),
        ArithmeticCost::new(22, 0, 0),
        Kernel::RoundOffGraph,
    )
    .expect("round-off transform spec is well formed")
}

/// Round-off kernel with the uniform 1/2 scale instead of the per-row
/// diagonal. Cheaper to describe but not orthogonal.
pub fn coarse_transform() -> TransformSpec {
    TransformSpec::from_kernel(
        "coarse",
        round_off_kernel(),
        [0.5; 8],
        ArithmeticCost::new(22, 0, 0),
        Kernel::RoundOffGraph,
    )
    .expect("coarse transform spec is well formed")
}

/// Sign-kernel transform with uniform `1/(2 sqrt 2)` row scaling.
/// 24 additions; rows have unit norm but are not mutually orthogonal.
pub fn sdct_transform() -> TransformSpec {
    TransformSpec::from_kernel(
        "sdct",
        sign_kernel(),
        [0.5 / std::f64::consts::SQRT_2; 8],
        ArithmeticCost::new(24, 0, 0),
        Kernel::SignGraph,
    )
    .expect("sign transform spec is well formed")
}

/// Built-in transforms in registry order: dct, proposed, coarse, sdct.
pub fn builtin_transforms() -> Vec<TransformSpec> {
    vec![
        dct_transform(),
        proposed_transform(),
        coarse_transform(),
        sdct_transform(),
    ]
}

/// Looks up one built-in transform by registry name.
pub fn builtin_transform(name: &str) -> Option<TransformSpec> {
    match name {
        "dct" => Some(dct_transform()),
        "proposed" => Some(proposed_transform()),
        "coarse" => Some(coarse_transform()),
        "sdct" => Some(sdct_transform()),
        _ => None,
    }
}
