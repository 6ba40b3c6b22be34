//! Matrix exponential by scaling and squaring with a degree-13 Pade core.

use super::{solve, ComplexMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Norm threshold below which the degree-13 approximant is accurate.
const THETA13: f64 = 5.371920351148152;

pub fn expm(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("expm needs a square matrix".into()));
    }
    let norm = m.norm_one();
    if !norm.is_finite() || norm > 1e4 {
        return Err(Error::Overflow { norm });
    }
    let n = m.rows();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let a = m.scale(Complex64::new(1.0 / f64::powi(2.0, squarings as i32), 0.0));
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = PADE13;
    let id = ComplexMatrix::identity(n);
    let term =
        |c6: f64, c4: f64, c2: f64| &(&a6.scale(c6.into()) + &a4.scale(c4.into())) + &a2.scale(c2.into());
    let w1 = term(b[13], b[11], b[9]);
    let w2 = &term(b[7], b[5], b[3]) + &id.scale(b[1].into());
    let u = &a * &(&(&a6 * &w1) + &w2);
    let z1 = term(b[12], b[10], b[8]);
    let v = &(&a6 * &z1) + &(&term(b[6], b[4], b[2]) + &id.scale(b[0].into()));
    // (V - U) X = (V + U)
    let mut x = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        x = &x * &x;
    }
    Ok(x)
}
