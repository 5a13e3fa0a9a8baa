//! Dense 8x8 real matrices and length-8 vectors.
//!
//! Everything downstream works on fixed 8-point blocks, so the linear
//! algebra here is deliberately small and allocation-free.

/// Length-8 coefficient or sample vector.
pub type Vector8 = [f64; 8];

/// Row-major 8x8 matrix of `f64`.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct Matrix8(pub [[f64; 8]; 8]);

impl Matrix8 {
    pub const ZERO: Matrix8 = Matrix8([[0.0; 8]; 8]);

    pub fn identity() -> Matrix8 {
        let mut m = [[0.0; 8]; 8];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Matrix8(m)
    }

    pub fn row(&self, m: usize) -> Vector8 {
        self.0[m]
    }

    pub fn transpose(&self) -> Matrix8 {
        let mut t = [[0.0; 8]; 8];
        for r in 0..8 {
            for c in 0..8 {
                t[c][r] = self.0[r][c];
            }
        }
        Matrix8(t)
    }

    pub fn matmul(&self, rhs: &Matrix8) -> Matrix8 {
        let mut out = [[0.0; 8]; 8];
        for r in 0..8 {
            for c in 0..8 {
                let mut acc = 0.0;
                for k in 0..8 {
                    acc += self.0[r][k] * rhs.0[k][c];
                }
                out[r][c] = acc;
            }
        }
        Matrix8(out)
    }

    pub fn mul_vec(&self, x: &Vector8) -> Vector8 {
        let mut out = [0.0; 8];
        for r in 0..8 {
            let mut acc = 0.0;
            for k in 0..8 {
                acc += self.0[r][k] * x[k];
            }
            out[r] = acc;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Matrix8 {
        let mut out = self.0;
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Matrix8(out)
    }

    /// Left-multiplies by `diag(d)`, scaling row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &Vector8) -> Matrix8 {
        let mut out = self.0;
        for (row, &s) in out.iter_mut().zip(d.iter()) {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        Matrix8(out)
    }

    /// `self * self^T`.
    pub fn gram(&self) -> Matrix8 {
        self.matmul(&self.transpose())
    }

    /// Sum of elementwise products, `trace(self^T * other)`.
    pub fn frobenius_inner(&self, other: &Matrix8) -> f64 {
        let mut acc = 0.0;
        for r in 0..8 {
            for c in 0..8 {
                acc += self.0[r][c] * other.0[r][c];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &Matrix8) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..8 {
            for c in 0..8 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).abs());
            }
        }
        worst
    }

    /// Largest absolute entry of `self * self^T - I`. Zero for orthogonal
    /// matrices up to rounding.
    pub fn orthogonality_residual(&self) -> f64 {
        self.gram().max_abs_diff(&Matrix8::identity())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|row| row.iter().all(|v| v.is_finite()))
    }
}
