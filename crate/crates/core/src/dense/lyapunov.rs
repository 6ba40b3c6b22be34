//! Lyapunov and Stein equation solvers.
//!
//! Two entry points mirror the two equation shapes used throughout:
//!
//! - [`lyap_ct`]: `-S^* Q - Q S + M = 0`
//! - [`stein_dt`]: `S^* Q S - Q + M = 0`
//!
//! Both support a diagonal closed form (exact division by pole sums) and a
//! dense mode. The dense mode reduces to triangular form with a Schur
//! decomposition and back-substitutes, which stays accurate when the
//! coefficient matrix has clustered eigenvalues.

use super::{schur, ComplexMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SylvesterMode {
    DiagonalClosedForm,
    Dense,
}

/// Solve `-S^* Q - Q S + M = 0`.
pub fn lyap_ct(s: &ComplexMatrix, m: &ComplexMatrix, mode: SylvesterMode) -> Result<ComplexMatrix> {
    check_dims(s, m)?;
    match mode {
        SylvesterMode::DiagonalClosedForm => {
            let d = diagonal_of(s)?;
            let n = d.len();
            let mut q = ComplexMatrix::zeros(n, n);
            let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for i in 0..n {
                for j in 0..n {
                    let denom = d[i].conj() + d[j];
                    if denom.norm() <= 1e-14 * scale.max(1e-300) {
                        return Err(Error::SingularPencil {
                            i,
                            j,
                            value: denom.norm(),
                        });
                    }
                    q[(i, j)] = m[(i, j)] / denom;
                }
            }
            Ok(q)
        }
        SylvesterMode::Dense => lyap_dense(&-&s.adjoint(), m),
    }
}

/// Solve `S^* Q S - Q + M = 0`.
pub fn stein_dt(s: &ComplexMatrix, m: &ComplexMatrix, mode: SylvesterMode) -> Result<ComplexMatrix> {
    check_dims(s, m)?;
    match mode {
        SylvesterMode::DiagonalClosedForm => {
            let d = diagonal_of(s)?;
            let n = d.len();
            let mut q = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let denom = Complex64::new(1.0, 0.0) - d[i].conj() * d[j];
                    if denom.norm() <= 1e-14 {
                        return Err(Error::SingularPencil {
                            i,
                            j,
                            value: denom.norm(),
                        });
                    }
                    q[(i, j)] = m[(i, j)] / denom;
                }
            }
            Ok(q)
        }
        SylvesterMode::Dense => stein_dense(&s.adjoint(), m),
    }
}

/// Solve `A X + X A^* + M = 0` via Schur reduction.
pub fn lyap_dense(a: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, m)?;
    let n = a.rows();
    let dec = schur(a)?;
    let mt = &(&dec.z.adjoint() * m) * &dec.z;
    let t = &dec.t;
    // T X + X T^* = -M~, columns right to left; each column is an upper
    // triangular solve in (T + conj(t_jj) I).
    let mut x = ComplexMatrix::zeros(n, n);
    for j in (0..n).rev() {
        let mut rhs: Vec<Complex64> = (0..n).map(|i| -mt[(i, j)]).collect();
        for k in j + 1..n {
            let tjk = t[(j, k)].conj();
            for i in 0..n {
                rhs[i] -= x[(i, k)] * tjk;
            }
        }
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in i + 1..n {
                s -= t[(i, k)] * x[(k, j)];
            }
            let denom = t[(i, i)] + shift;
            if denom.norm() <= f64::EPSILON * t.max_abs() {
                return Err(Error::SingularPencil {
                    i,
                    j,
                    value: denom.norm(),
                });
            }
            x[(i, j)] = s / denom;
        }
    }
    Ok(&(&dec.z * &x) * &dec.z.adjoint())
}

/// Solve `A X A^* - X + M = 0` via Schur reduction.
pub fn stein_dense(a: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_dims(a, m)?;
    let n = a.rows();
    let dec = schur(a)?;
    let mt = &(&dec.z.adjoint() * m) * &dec.z;
    let t = &dec.t;
    // T X T^* - X = -M~. Column j of T X T^* couples columns k >= j of X
    // through conj(T[j,k]); sweep right to left.
    let mut x = ComplexMatrix::zeros(n, n);
    for j in (0..n).rev() {
        // rhs = -M~_j - sum_{k>j} conj(T[j,k]) T x_k
        let mut rhs: Vec<Complex64> = (0..n).map(|i| -mt[(i, j)]).collect();
        for k in j + 1..n {
            let tjk = t[(j, k)].conj();
            if tjk.norm() == 0.0 {
                continue;
            }
            // accumulate T * x_k scaled
            for i in 0..n {
                let mut acc = Complex64::default();
                for l in i..n {
                    acc += t[(i, l)] * x[(l, k)];
                }
                rhs[i] -= acc * tjk;
            }
        }
        // (conj(T[j,j]) T - I) x_j = rhs, upper triangular.
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in i + 1..n {
                s -= shift * t[(i, k)] * x[(k, j)];
            }
            let denom = shift * t[(i, i)] - Complex64::new(1.0, 0.0);
            if denom.norm() <= f64::EPSILON {
                return Err(Error::SingularPencil {
                    i,
                    j,
                    value: denom.norm(),
                });
            }
            x[(i, j)] = s / denom;
        }
    }
    Ok(&(&dec.z * &x) * &dec.z.adjoint())
}

fn check_dims(s: &ComplexMatrix, m: &ComplexMatrix) -> Result<()> {
    if !s.is_square() || !m.is_square() || s.rows() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "coefficient {}x{} vs constant {}x{}",
            s.rows(),
            s.cols(),
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn diagonal_of(s: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = s.rows();
    for i in 0..n {
        for j in 0..n {
            if i != j && s[(i, j)].norm() != 0.0 {
                return Err(Error::BadParams(
                    "diagonal closed form needs a diagonal coefficient matrix".into(),
                ));
            }
        }
    }
    Ok(s.diagonal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{c64, solve};
    use rand::{Rng, SeedableRng};

    /// Kronecker-vectorized direct solve of -S^* Q - Q S + M = 0, the
    /// brute-force oracle for small sizes.
    pub fn lyap_ct_kron(s: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
        let n = s.rows();
        // vec(Q) stacked column-major: (I (x) S^* + S^T (x) I) vec(Q) = vec(M)
        let id = ComplexMatrix::identity(n);
        let lhs = &id.kron(&s.adjoint()) + &s.transpose().kron(&id);
        let rhs = ComplexMatrix::from_fn(n * n, 1, |k, _| m[(k % n, k / n)]);
        let x = solve(&lhs, &rhs).unwrap();
        ComplexMatrix::from_fn(n, n, |i, j| x[(j * n + i, 0)])
    }

    pub fn stein_dt_kron(s: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
        let n = s.rows();
        // (I - S^T (x) S^*) vec(Q) = vec(M)
        let lhs = &ComplexMatrix::identity(n * n) - &s.transpose().kron(&s.adjoint());
        let rhs = ComplexMatrix::from_fn(n * n, 1, |k, _| m[(k % n, k / n)]);
        let x = solve(&lhs, &rhs).unwrap();
        ComplexMatrix::from_fn(n, n, |i, j| x[(j * n + i, 0)])
    }

    fn lyap_residual(s: &ComplexMatrix, m: &ComplexMatrix, q: &ComplexMatrix) -> f64 {
        let r = &(&-&(&s.adjoint() * q) - &(q * s)) + m;
        r.frobenius_norm() / m.frobenius_norm().max(1e-300)
    }

    fn stein_residual(s: &ComplexMatrix, m: &ComplexMatrix, q: &ComplexMatrix) -> f64 {
        let r = &(&(&(&s.adjoint() * q) * s) - q) + m;
        r.frobenius_norm() / m.frobenius_norm().max(1e-300)
    }

    #[test]
    fn cauchy_closed_form_small() {
        let s = ComplexMatrix::diag(&[c64(1.0, 0.0), c64(2.0, 0.0)]);
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let q = lyap_ct(&s, &m, SylvesterMode::DiagonalClosedForm).unwrap();
        let want =
            ComplexMatrix::from_real(2, 2, &[0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25]).unwrap();
        assert!((&q - &want).frobenius_norm() < 1e-15);
        // Agrees with the vectorized direct solve.
        let oracle = lyap_ct_kron(&s, &m);
        assert!((&q - &oracle).frobenius_norm() < 1e-14);
    }

    #[test]
    fn scalar_balance() {
        let s = ComplexMatrix::scalar(c64(1.0, 0.0));
        let m = ComplexMatrix::scalar(c64(2.0, 0.0));
        let q = lyap_ct(&s, &m, SylvesterMode::DiagonalClosedForm).unwrap();
        assert_eq!(q[(0, 0)], c64(1.0, 0.0));
    }

    #[test]
    fn stein_scalar_formula() {
        let s = ComplexMatrix::scalar(c64(0.5, 0.0));
        let m = ComplexMatrix::scalar(c64(1.0, 0.0));
        let q = stein_dt(&s, &m, SylvesterMode::DiagonalClosedForm).unwrap();
        assert!((q[(0, 0)].re - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn stein_memoryless() {
        let s = ComplexMatrix::zeros(3, 3);
        let m = ComplexMatrix::from_fn(3, 3, |i, j| c64((i + j) as f64, 0.0));
        let q = stein_dt(&s, &m, SylvesterMode::DiagonalClosedForm).unwrap();
        assert!((&q - &m).frobenius_norm() < 1e-15);
    }

    #[test]
    fn modes_agree_on_random_diagonal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let n = rng.gen_range(2..=8);
            let d: Vec<_> = (0..n)
                .map(|_| c64(rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let s = ComplexMatrix::diag(&d);
            let l = ComplexMatrix::from_fn(1, n, |_, _| {
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let m = &l.adjoint() * &l;
            let q1 = lyap_ct(&s, &m, SylvesterMode::DiagonalClosedForm).unwrap();
            let q2 = lyap_ct(&s, &m, SylvesterMode::Dense).unwrap();
            assert!((&q1 - &q2).frobenius_norm() < 1e-12 * q1.frobenius_norm().max(1.0));

            let ds: Vec<_> = d.iter().map(|z| z / (z.norm() + 1.5)).collect();
            let sd = ComplexMatrix::diag(&ds);
            let q3 = stein_dt(&sd, &m, SylvesterMode::DiagonalClosedForm).unwrap();
            let q4 = stein_dt(&sd, &m, SylvesterMode::Dense).unwrap();
            assert!((&q3 - &q4).frobenius_norm() < 1e-12 * q3.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn closed_forms_match_kronecker_oracle() {
        // 100 random cases, n <= 8, against the vectorized direct solver.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for case in 0..100 {
            let n = rng.gen_range(1..=8);
            let d: Vec<_> = (0..n)
                .map(|_| c64(rng.gen_range(0.05..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let s = ComplexMatrix::diag(&d);
            let m = ComplexMatrix::from_fn(n, n, |_, _| {
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let q = lyap_ct(&s, &m, SylvesterMode::DiagonalClosedForm).unwrap();
            let oracle = lyap_ct_kron(&s, &m);
            let denom = oracle.frobenius_norm().max(1.0);
            assert!(
                (&q - &oracle).frobenius_norm() < 1e-12 * denom,
                "lyap case {case}"
            );

            let ds: Vec<_> = d
                .iter()
                .map(|z| z.scale(0.9 / (z.norm() + 1.0)))
                .collect();
            let sd = ComplexMatrix::diag(&ds);
            let qd = stein_dt(&sd, &m, SylvesterMode::DiagonalClosedForm).unwrap();
            let oracled = stein_dt_kron(&sd, &m);
            let denomd = oracled.frobenius_norm().max(1.0);
            assert!(
                (&qd - &oracled).frobenius_norm() < 1e-12 * denomd,
                "stein case {case}"
            );
        }
    }

    #[test]
    fn dense_mode_nondiagonal_residual() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        // Shifted random matrix keeps eigenvalues in the right half plane.
        let s = &ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.gen_range(-0.3..0.3), rng.gen_range(-0.5..0.5))
        }) + &ComplexMatrix::identity(n).scale(c64(2.0, 0.0));
        let m = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let q = lyap_ct(&s, &m, SylvesterMode::Dense).unwrap();
        assert!(lyap_residual(&s, &m, &q) < 1e-10);

        let sd = s.scale(c64(0.3, 0.0));
        let qd = stein_dt(&sd, &m, SylvesterMode::Dense).unwrap();
        assert!(stein_residual(&sd, &m, &qd) < 1e-10);
    }

    #[test]
    fn singular_pencil_detected() {
        // s1* + s2 = 0 for a mirrored pair.
        let s = ComplexMatrix::diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        let m = ComplexMatrix::identity(2);
        assert!(matches!(
            lyap_ct(&s, &m, SylvesterMode::DiagonalClosedForm),
            Err(Error::SingularPencil { .. })
        ));
        // 1 - s1* s2 = 0 on the unit circle pair.
        let s = ComplexMatrix::diag(&[c64(2.0, 0.0), c64(0.5, 0.0)]);
        assert!(matches!(
            stein_dt(&s, &m, SylvesterMode::DiagonalClosedForm),
            Err(Error::SingularPencil { .. })
        ));
    }
}
