//! Complex Schur decomposition and eigendecomposition.
//!
//! Householder reduction to Hessenberg form followed by a shifted QR
//! iteration with Givens rotations. Eigenvectors come from back-substitution
//! on the triangular Schur factor. Eigenvalues are sorted by (real, imag)
//! so results are deterministic.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Unitary Schur decomposition `A = Z T Z^*` with `T` upper triangular.
pub struct Schur {
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
}

/// Eigendecomposition `A V = V diag(values)`.
pub struct Eig {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let xn = x.norm();
    let yn = y.norm();
    if yn == 0.0 {
        return (1.0, Complex64::default());
    }
    if xn == 0.0 {
        return (0.0, y.conj() / yn);
    }
    let d = (xn * xn + yn * yn).sqrt();
    let c = xn / d;
    let s = (x / xn) * y.conj() / d;
    (c, s)
}

/// Householder reduction to upper Hessenberg form; returns (H, Q) with
/// `A = Q H Q^*`.
fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            norm_sq += h[(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm <= f64::EPSILON * h.max_abs() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        // v = x - alpha e1, restricted to rows k+1..n
        let mut v = vec![Complex64::default(); n];
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let tau = 2.0 / vv;
        // H <- P H
        for j in 0..n {
            let mut dot = Complex64::default();
            for i in k + 1..n {
                dot += v[i].conj() * h[(i, j)];
            }
            dot *= tau;
            for i in k + 1..n {
                let upd = v[i] * dot;
                h[(i, j)] -= upd;
            }
        }
        // H <- H P
        for i in 0..n {
            let mut dot = Complex64::default();
            for j in k + 1..n {
                dot += h[(i, j)] * v[j];
            }
            dot *= tau;
            for j in k + 1..n {
                let upd = dot * v[j].conj();
                h[(i, j)] -= upd;
            }
        }
        // Q <- Q P
        for i in 0..n {
            let mut dot = Complex64::default();
            for j in k + 1..n {
                dot += q[(i, j)] * v[j];
            }
            dot *= tau;
            for j in k + 1..n {
                let upd = dot * v[j].conj();
                q[(i, j)] -= upd;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::default();
        }
        h[(k + 1, k)] = alpha;
    }
    (h, q)
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 block closest to its
/// bottom-right entry.
fn wilkinson_shift(h: &ComplexMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det.scale(4.0)).sqrt();
    let l1 = (tr + disc).scale(0.5);
    let l2 = (tr - disc).scale(0.5);
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Unitary Schur decomposition via shifted QR on the Hessenberg form.
pub fn schur(a: &ComplexMatrix) -> Result<Schur> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("schur needs a square matrix".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Schur {
            t: ComplexMatrix::zeros(0, 0),
            z: ComplexMatrix::zeros(0, 0),
        });
    }
    let (mut t, mut z) = hessenberg(a);
    let mut hi = n - 1;
    let mut stagnation = 0usize;
    let mut total = 0usize;
    let max_total = 60 * n.max(4);
    while hi > 0 {
        // Deflate converged subdiagonals.
        let mut k = hi;
        while k > 0 {
            let off = t[(k, k - 1)].norm();
            let local = t[(k - 1, k - 1)].norm() + t[(k, k)].norm();
            if off <= f64::EPSILON * local.max(f64::MIN_POSITIVE) {
                t[(k, k - 1)] = Complex64::default();
                break;
            }
            k -= 1;
        }
        if k == hi {
            hi -= 1;
            stagnation = 0;
            continue;
        }
        let lo = k;
        total += 1;
        stagnation += 1;
        if total > max_total {
            return Err(Error::NonDiagonalizable(format!(
                "QR iteration cap {max_total} reached"
            )));
        }
        let mu = if stagnation % 12 == 0 {
            // Exceptional shift to break symmetric cycling.
            let extra = t[(hi, hi - 1)].norm() + if hi > 1 { t[(hi - 1, hi - 2)].norm() } else { 0.0 };
            t[(hi, hi)] + Complex64::new(extra, 0.0)
        } else {
            wilkinson_shift(&t, hi)
        };
        // Implicit single-shift sweep over the active window.
        let mut x = t[(lo, lo)] - mu;
        let mut y = t[(lo + 1, lo)];
        for kk in lo..hi {
            let (c, s) = givens(x, y);
            let sc = s.conj();
            // Rows kk, kk+1.
            let jstart = kk.saturating_sub(1).max(lo);
            for j in jstart..n {
                let a1 = t[(kk, j)];
                let a2 = t[(kk + 1, j)];
                t[(kk, j)] = a1.scale(c) + s * a2;
                t[(kk + 1, j)] = -sc * a1 + a2.scale(c);
            }
            // Columns kk, kk+1.
            let iend = (kk + 3).min(hi + 1);
            for i in 0..iend {
                let a1 = t[(i, kk)];
                let a2 = t[(i, kk + 1)];
                t[(i, kk)] = a1.scale(c) + sc * a2;
                t[(i, kk + 1)] = -s * a1 + a2.scale(c);
            }
            for i in 0..n {
                let a1 = z[(i, kk)];
                let a2 = z[(i, kk + 1)];
                z[(i, kk)] = a1.scale(c) + sc * a2;
                z[(i, kk + 1)] = -s * a1 + a2.scale(c);
            }
            if kk + 1 < hi {
                x = t[(kk + 1, kk)];
                y = t[(kk + 2, kk)];
            }
        }
    }
    // Clean the strictly lower part.
    for i in 0..n {
        for j in 0..i {
            t[(i, j)] = Complex64::default();
        }
    }
    Ok(Schur { t, z })
}

/// Eigendecomposition with eigenvalues sorted by (re, im).
pub fn eig(a: &ComplexMatrix) -> Result<Eig> {
    let n = a.rows();
    let Schur { t, z } = schur(a)?;
    let tnorm = t.max_abs().max(f64::MIN_POSITIVE);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let li = t[(i, i)];
        let mut y = vec![Complex64::default(); n];
        y[i] = Complex64::new(1.0, 0.0);
        for k in (0..i).rev() {
            let mut s = Complex64::default();
            for j in k + 1..=i {
                s += t[(k, j)] * y[j];
            }
            let mut denom = t[(k, k)] - li;
            if denom.norm() < f64::EPSILON * tnorm {
                denom = Complex64::new(f64::EPSILON * tnorm, 0.0);
            }
            y[k] = -s / denom;
        }
        let x = z.mul_vec(&y);
        let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        // Fix the free phase so the largest entry is real positive; keeps
        // runs deterministic and conjugate pairs numerically conjugate.
        let lead = x
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .map(|(k, _)| k)
            .unwrap_or(0);
        let phase = if x[lead].norm() > 0.0 {
            x[lead].conj() / x[lead].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for (r, v) in x.iter().enumerate() {
            vectors[(r, i)] = v * phase / norm;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (t[(i, i)], t[(j, j)]);
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let values: Vec<Complex64> = order.iter().map(|&i| t[(i, i)]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(Eig { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::c64;
    use rand::{Rng, SeedableRng};

    fn residual(a: &ComplexMatrix, e: &Eig) -> f64 {
        let av = a * &e.vectors;
        let vl = &e.vectors * &ComplexMatrix::diag(&e.values);
        (&av - &vl).frobenius_norm() / a.frobenius_norm().max(1e-300)
    }

    #[test]
    fn diagonal_sorted() {
        let a = ComplexMatrix::diag(&[c64(2.0, 0.0), c64(-1.0, 0.0)]);
        let e = eig(&a).unwrap();
        assert_eq!(e.values, vec![c64(-1.0, 0.0), c64(2.0, 0.0)]);
    }

    #[test]
    fn rotation_has_imaginary_pair() {
        // Characteristic polynomial x^2 + 1 = 0.
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        let e = eig(&a).unwrap();
        assert!((e.values[0] - c64(0.0, -1.0)).norm() < 1e-12);
        assert!((e.values[1] - c64(0.0, 1.0)).norm() < 1e-12);
        assert!(residual(&a, &e) < 1e-12);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^2 - 3x + 2 has roots 1 and 2.
        let a = ComplexMatrix::from_real(2, 2, &[3.0, -2.0, 1.0, 0.0]).unwrap();
        let e = eig(&a).unwrap();
        assert!((e.values[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((e.values[1] - c64(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn random_residual_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [5usize, 20, 60] {
            let a = ComplexMatrix::from_fn(n, n, |_, _| {
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let e = eig(&a).unwrap();
            assert!(residual(&a, &e) < 1e-8, "residual too big at n={n}");
        }
    }

    #[test]
    fn similarity_invariance_of_spectrum() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 8;
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        // Fixed well-conditioned transform.
        let p = &ComplexMatrix::identity(n)
            + &ComplexMatrix::from_fn(n, n, |i, j| c64(0.1 / (1.0 + (i + 2 * j) as f64), 0.0));
        let pinv = super::super::solve(&p, &ComplexMatrix::identity(n)).unwrap();
        let b = &(&p * &a) * &pinv;
        let ea = eig(&a).unwrap().values;
        let eb = eig(&b).unwrap().values;
        for (x, y) in ea.iter().zip(eb.iter()) {
            assert!((x - y).norm() < 1e-8 * a.frobenius_norm());
        }
    }

    #[test]
    fn schur_is_unitary_similarity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 12;
        let a = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let s = schur(&a).unwrap();
        let back = &(&s.z * &s.t) * &s.z.adjoint();
        assert!((&back - &a).frobenius_norm() < 1e-12 * a.frobenius_norm());
        let ortho = &s.z.adjoint() * &s.z;
        assert!((&ortho - &ComplexMatrix::identity(n)).frobenius_norm() < 1e-12);
    }
}
