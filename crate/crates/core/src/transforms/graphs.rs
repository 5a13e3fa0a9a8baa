//! Add-only butterfly evaluation of the integer kernels.
//!
//! Each graph is written once against an arithmetic sink so the same code
//! path serves production evaluation (a no-op sink the optimizer erases)
//! and cost auditing (a counting sink). Counts therefore come from running
//! the real graph, not from a table.

use crate::matrix::{Matrix8, Vector8};
use crate::transforms::ArithmeticCost;

/// Arithmetic sink: every add, subtract, multiply, and shift in a graph
/// flows through one of these calls.
trait Arith {
    fn add(&mut self, a: f64, b: f64) -> f64;
    fn sub(&mut self, a: f64, b: f64) -> f64;
    fn mul(&mut self, a: f64, b: f64) -> f64;
    /// Multiplication by a power of two, the fixed-point bit-shift case.
    fn shift(&mut self, a: f64, pow2: f64) -> f64;
}

struct Plain;

impl Arith for Plain {
    #[inline(always)]
    fn add(&mut self, a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline(always)]
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        a - b
    }
    #[inline(always)]
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        a * b
    }
    #[inline(always)]
    fn shift(&mut self, a: f64, pow2: f64) -> f64 {
        a * pow2
    }
}

#[derive(Default)]
struct Counting {
    additions: u32,
    multiplications: u32,
    bit_shifts: u32,
}

impl Counting {
    fn cost(&self) -> ArithmeticCost {
        ArithmeticCost::new(self.additions, self.multiplications, self.bit_shifts)
    }
}

impl Arith for Counting {
    fn add(&mut self, a: f64, b: f64) -> f64 {
        self.additions += 1;
        a + b
    }
    fn sub(&mut self, a: f64, b: f64) -> f64 {
        self.additions += 1;
        a - b
    }
    fn mul(&mut self, a: f64, b: f64) -> f64 {
        self.multiplications += 1;
        a * b
    }
    fn shift(&mut self, a: f64, pow2: f64) -> f64 {
        self.bit_shifts += 1;
        a * pow2
    }
}

/// Round-off kernel times `x` in 22 additions: symmetric/antisymmetric
/// butterflies, then a shared-sum even half and a three-term odd half.
fn round_off_graph<A: Arith>(x: &Vector8, ar: &mut A) -> Vector8 {
    let a0 = ar.add(x[0], x[7]);
    let a1 = ar.add(x[1], x[6]);
    let a2 = ar.add(x[2], x[5]);
    let a3 = ar.add(x[3], x[4]);
    let b0 = ar.sub(x[0], x[7]);
    let b1 = ar.sub(x[1], x[6]);
    let b2 = ar.sub(x[2], x[5]);
    let b3 = ar.sub(x[3], x[4]);

    let c0 = ar.add(a0, a3);
    let c1 = ar.add(a1, a2);
    let y0 = ar.add(c0, c1);
    let y4 = ar.sub(c0, c1);
    let y2 = ar.sub(a0, a3);
    let y6 = ar.sub(a2, a1);

    let s01 = ar.add(b0, b1);
    let y1 = ar.add(s01, b2);
    let d02 = ar.sub(b0, b2);
    let y3 = ar.sub(d02, b3);
    let d01 = ar.sub(b0, b1);
    let y5 = ar.add(d01, b3);
    let d21 = ar.sub(b2, b1);
    let y7 = ar.sub(d21, b3);

    [y0, y1, y2, y3, y4, y5, y6, y7]
}

/// Transposed round-off graph: kernel transpose times `x`, also 22
/// additions.
fn round_off_graph_transposed<A: Arith>(x: &Vector8, ar: &mut A) -> Vector8 {
    let s = ar.add(x[0], x[4]);
    let t = ar.sub(x[0], x[4]);
    let u0 = ar.add(s, x[2]);
    let u3 = ar.sub(s, x[2]);
    let u1 = ar.sub(t, x[6]);
    let u2 = ar.add(t, x[6]);

    let p13 = ar.add(x[1], x[3]);
    let v0 = ar.add(p13, x[5]);
    let d15 = ar.sub(x[1], x[5]);
    let v1 = ar.sub(d15, x[7]);
    let d13 = ar.sub(x[1], x[3]);
    let v2 = ar.add(d13, x[7]);
    let d53 = ar.sub(x[5], x[3]);
    let v3 = ar.sub(d53, x[7]);

    [
        ar.add(u0, v0),
        ar.add(u1, v1),
        ar.add(u2, v2),
        ar.add(u3, v3),
        ar.sub(u3, v3),
        ar.sub(u2, v2),
        ar.sub(u1, v1),
        ar.sub(u0, v0),
    ]
}

/// Sign kernel times `x` in 24 additions: the even half is a 4-point
/// Hadamard butterfly, the odd half shares two pair sums.
fn sign_graph<A: Arith>(x: &Vector8, ar: &mut A) -> Vector8 {
    let a0 = ar.add(x[0], x[7]);
    let a1 = ar.add(x[1], x[6]);
    let a2 = ar.add(x[2], x[5]);
    let a3 = ar.add(x[3], x[4]);
    let b0 = ar.sub(x[0], x[7]);
    let b1 = ar.sub(x[1], x[6]);
    let b2 = ar.sub(x[2], x[5]);
    let b3 = ar.sub(x[3], x[4]);

    let c0 = ar.add(a0, a1);
    let c1 = ar.add(a2, a3);
    let c2 = ar.sub(a0, a1);
    let c3 = ar.sub(a2, a3);
    let y0 = ar.add(c0, c1);
    let y2 = ar.sub(c0, c1);
    let y4 = ar.sub(c2, c3);
    let y6 = ar.add(c2, c3);

    let s = ar.add(b2, b3);
    let t = ar.sub(b0, b1);
    let p = ar.add(b0, b1);
    let y1 = ar.add(p, s);
    let y3 = ar.sub(t, s);
    let y5 = ar.add(t, s);
    let q = ar.add(t, b2);
    let y7 = ar.sub(q, b3);

    [y0, y1, y2, y3, y4, y5, y6, y7]
}

fn is_power_of_two(v: f64) -> bool {
    // Positive normal f64 with an empty mantissa field.
    v > 0.0 && v.is_normal() && v.to_bits() & ((1u64 << 52) - 1) == 0
}

/// Dense row-by-row product with sign-aware counting. Zero entries cost
/// nothing; the first nonzero term of a row initializes the accumulator
/// for free; each further term costs one addition or subtraction. Terms
/// with non-unit magnitude additionally cost a bit-shift (powers of two)
/// or a multiplication.
fn dense_product<A: Arith>(m: &Matrix8, x: &Vector8, ar: &mut A) -> Vector8 {
    let mut out = [0.0; 8];
    for (r, row) in m.0.iter().enumerate() {
        let mut acc: Option<f64> = None;
        for (n, &e) in row.iter().enumerate() {
            if e == 0.0 {
                continue;
            }
            let mag = e.abs();
            let term = if mag == 1.0 {
                x[n]
            } else if is_power_of_two(mag) {
                ar.shift(x[n], mag)
            } else {
                ar.mul(x[n], mag)
            };
            acc = Some(match acc {
                None => {
                    if e > 0.0 {
                        term
                    } else {
                        -term
                    }
                }
                Some(a) => {
                    if e > 0.0 {
                        ar.add(a, term)
                    } else {
                        ar.sub(a, term)
                    }
                }
            });
        }
        out[r] = acc.unwrap_or(0.0);
    }
    out
}

/// Forward round-off kernel evaluation, `K x`, in 22 additions.
pub fn fast_forward(x: &Vector8) -> Vector8 {
    round_off_graph(x, &mut Plain)
}

/// Transposed round-off kernel evaluation, `K^T x`. Together with the
/// squared orthogonalizer diagonal this inverts `fast_forward`.
pub fn fast_inverse(x: &Vector8) -> Vector8 {
    round_off_graph_transposed(x, &mut Plain)
}

pub(super) fn count_round_off_graph(probe: &Vector8) -> ArithmeticCost {
    let mut counter = Counting::default();
    round_off_graph(probe, &mut counter);
    counter.cost()
}

pub(super) fn count_sign_graph(probe: &Vector8) -> ArithmeticCost {
    let mut counter = Counting::default();
    sign_graph(probe, &mut counter);
    counter.cost()
}

pub(super) fn count_dense_product(m: &Matrix8, probe: &Vector8) -> ArithmeticCost {
    let mut counter = Counting::default();
    dense_product(m, probe, &mut counter);
    counter.cost()
}
