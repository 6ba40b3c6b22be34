//! LU factorization with partial pivoting, plus Hermitian Cholesky.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Condition estimates above this abort a solve; callers must see the
/// failure rather than a garbage solution.
const COND_LIMIT: f64 = 1e14;

/// LU factorization of a square matrix, reusable across right-hand sides.
pub struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        if scale == 0.0 && n > 0 {
            return Err(Error::Singular("zero matrix".into()));
        }
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu[(k, k)].norm();
            for i in k + 1..n {
                let mag = lu[(i, k)].norm();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag < f64::EPSILON * scale * n as f64 {
                return Err(Error::Singular(format!(
                    "pivot {pivot_mag:.3e} below threshold at column {k}"
                )));
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let upd = factor * lu[(k, j)];
                    lu[(i, j)] -= upd;
                }
            }
        }
        let f = Self { n, lu, perm };
        let cond = f.diag_condition();
        if cond > COND_LIMIT {
            return Err(Error::IllConditioned { cond });
        }
        Ok(f)
    }

    /// Crude condition estimate from the U diagonal spread.
    fn diag_condition(&self) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..self.n {
            let d = self.lu[(i, i)].norm();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.rows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, expected {}",
                b.rows(),
                self.n
            )));
        }
        let n = self.n;
        let m = b.cols();
        let mut x = ComplexMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        // Forward substitution with unit lower factor.
        for k in 0..n {
            for i in k + 1..n {
                let factor = self.lu[(i, k)];
                for j in 0..m {
                    let upd = factor * x[(k, j)];
                    x[(i, j)] -= upd;
                }
            }
        }
        // Back substitution.
        for k in (0..n).rev() {
            let pivot = self.lu[(k, k)];
            for j in 0..m {
                x[(k, j)] /= pivot;
            }
            for i in 0..k {
                let factor = self.lu[(i, k)];
                for j in 0..m {
                    let upd = factor * x[(k, j)];
                    x[(i, j)] -= upd;
                }
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.solve(&ComplexMatrix::identity(self.n))
    }

    pub fn det(&self) -> Complex64 {
        let mut d = Complex64::new(1.0, 0.0);
        for i in 0..self.n {
            d *= self.lu[(i, i)];
        }
        // Permutation sign from the cycle structure.
        let mut seen = vec![false; self.n];
        let mut sign = 1.0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        d * sign
    }
}

/// Solve `A X = B` for square `A`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    Lu::factor(a)?.solve(b)
}

/// Cholesky factor `L` with `L L^* = A` for Hermitian positive definite `A`.
pub fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("cholesky needs square input".into()));
    }
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite(format!(
                "pivot {d:.3e} at column {j}"
            )));
        }
        let dj = d.sqrt();
        l[(j, j)] = Complex64::new(dj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::c64;

    #[test]
    fn solve_identity_returns_rhs() {
        let a = ComplexMatrix::identity(4);
        let b = ComplexMatrix::from_fn(4, 2, |i, j| c64(i as f64 + 1.0, j as f64));
        assert_eq!(solve(&a, &b).unwrap(), b);
    }

    #[test]
    fn solve_scalar() {
        let a = ComplexMatrix::scalar(c64(2.0, 0.0));
        let b = ComplexMatrix::scalar(c64(4.0, 0.0));
        let x = solve(&a, &b).unwrap();
        assert_eq!(x[(0, 0)], c64(2.0, 0.0));
    }

    #[test]
    fn solve_residual_random() {
        // Residual oracle on a well-conditioned seeded system.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let a = ComplexMatrix::from_fn(5, 5, |i, j| {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                + if i == j { c64(4.0, 0.0) } else { c64(0.0, 0.0) }
        });
        let b = ComplexMatrix::from_fn(5, 3, |_, _| {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let x = solve(&a, &b).unwrap();
        let resid = (&(&a * &x) - &b).frobenius_norm();
        assert!(resid <= 1e-10 * a.frobenius_norm() * x.frobenius_norm().max(1.0));
    }

    #[test]
    fn singular_detected() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            solve(&a, &ComplexMatrix::identity(2)),
            Err(Error::Singular(_)) | Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = ComplexMatrix::from_rows(&[
            vec![c64(4.0, 0.0), c64(1.0, 1.0)],
            vec![c64(1.0, -1.0), c64(3.0, 0.0)],
        ])
        .unwrap();
        let l = cholesky(&a).unwrap();
        let r = &l * &l.adjoint();
        assert!((&r - &a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(cholesky(&a), Err(Error::NotPositiveDefinite(_))));
    }
}
