//! Singular value decomposition by one-sided Jacobi rotations.
//!
//! Columns are orthogonalized pairwise until the Gram matrix is diagonal.
//! Jacobi converges slowly compared to bidiagonalization but keeps high
//! relative accuracy on small singular values, which matters when the
//! truncation rank is read off the tail of the spectrum.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Economy SVD `A = U diag(s) V^*` with `s` nonincreasing.
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above `tol * s[0]`.
    pub fn rank(&self, tol: f64) -> usize {
        let cutoff = tol * self.s.first().copied().unwrap_or(0.0);
        self.s.iter().take_while(|&&x| x > cutoff).count()
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    if !a.is_finite() {
        return Err(Error::NonFinite { row: 0, col: 0 });
    }
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        // Factor the adjoint and swap factors.
        let f = svd(&a.adjoint())?;
        return Ok(Svd {
            u: f.v,
            s: f.s,
            v: f.u,
        });
    }
    // Large inputs go through a rank-revealing QR first; Jacobi sweeps on a
    // full low-rank matrix spend most of their time churning the null space.
    if n > 64 {
        return svd_via_qr(a);
    }
    svd_jacobi(a)
}

/// One-sided Jacobi on a tall matrix.
fn svd_jacobi(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        let f = svd_jacobi(&a.adjoint())?;
        return Ok(Svd {
            u: f.v,
            s: f.s,
            v: f.u,
        });
    }
    let k = n;
    // Work on transposed storage so each column of A is a contiguous row.
    // Prescaling bounds the dynamic range of the rotations.
    let prescale = a.max_abs();
    let mut work = if prescale > 0.0 {
        a.transpose().scale(Complex64::new(1.0 / prescale, 0.0))
    } else {
        a.transpose()
    };
    let mut vt = ComplexMatrix::identity(n); // row j = column j of V
    // Rotations below this relative coupling are rounding noise; stopping
    // here keeps singular values well past the 1e-10 contracts downstream.
    let tol = 1e-12;
    let max_sweeps = 100;
    // Columns at the backward-error floor carry no usable direction;
    // rotating them forever is what stalls rank-deficient inputs.
    let col_scale = (0..k)
        .map(|j| (0..m).map(|i| work[(j, i)].norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    let floor_sq = col_scale * (f64::EPSILON * f64::EPSILON);
    let mut converged = false;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::default();
                for i in 0..m {
                    let xp = work[(p, i)];
                    let xq = work[(q, i)];
                    app += xp.norm_sqr();
                    aqq += xq.norm_sqr();
                    apq += xp.conj() * xq;
                }
                let mag = apq.norm();
                if mag <= tol * (app * aqq).sqrt() || app <= floor_sq || aqq <= floor_sq {
                    continue;
                }
                rotated = true;
                let phase = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // a_p' = c a_p - s phase^* a_q ; a_q' = s phase a_p + c a_q
                let sp = phase.conj().scale(s);
                let sq = phase.scale(s);
                for i in 0..m {
                    let xp = work[(p, i)];
                    let xq = work[(q, i)];
                    work[(p, i)] = xp.scale(c) - sp * xq;
                    work[(q, i)] = sq * xp + xq.scale(c);
                }
                for i in 0..n {
                    let vp = vt[(p, i)];
                    let vq = vt[(q, i)];
                    vt[(p, i)] = vp.scale(c) - sp * vq;
                    vt[(q, i)] = sq * vp + vq.scale(c);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonDiagonalizable(
            "jacobi SVD sweep cap reached".into(),
        ));
    }
    let mut sigma: Vec<f64> = (0..k)
        .map(|j| {
            (0..m)
                .map(|i| work[(j, i)].norm_sqr())
                .sum::<f64>()
                .sqrt()
                * prescale
        })
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    let sigma_sorted: Vec<f64> = order.iter().map(|&j| sigma[j]).collect();
    sigma = sigma_sorted;
    let mut u = ComplexMatrix::zeros(m, k);
    let scale = sigma.first().copied().unwrap_or(0.0);
    for (col, &j) in order.iter().enumerate() {
        if sigma[col] > scale * f64::EPSILON && sigma[col] > 0.0 {
            let inv = prescale / sigma[col];
            for i in 0..m {
                u[(i, col)] = work[(j, i)].scale(inv);
            }
        }
    }
    complete_orthonormal(&mut u, &sigma, scale);
    let v = ComplexMatrix::from_fn(n, k, |i, col| vt[(order[col], i)]);
    Ok(Svd { u, s: sigma, v })
}

/// Economy SVD of a tall matrix through column-pivoted Householder QR.
///
/// The factorization stops once the remaining column mass sits at the
/// backward-error floor, so the Jacobi stage only sees the numerically
/// nonzero part. Singular values past the revealed rank are reported as
/// zero with zero-padded singular vectors.
fn svd_via_qr(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    let kmax = n.min(m);
    let mut r = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut col_norm_sq: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| r[(i, j)].norm_sqr()).sum())
        .collect();
    let scale0 = col_norm_sq.iter().cloned().fold(0.0, f64::max);
    let floor = scale0 * f64::EPSILON * f64::EPSILON * n as f64;
    let mut reflectors: Vec<(usize, Vec<Complex64>)> = Vec::new();
    let mut k = 0;
    while k < kmax {
        // Pivot on the column with the largest remaining mass.
        let (best, &best_norm) = col_norm_sq[k..]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, v)| (i + k, v))
            .unwrap();
        if best_norm <= floor {
            break;
        }
        if best != k {
            for i in 0..m {
                let t = r[(i, k)];
                r[(i, k)] = r[(i, best)];
                r[(i, best)] = t;
            }
            perm.swap(k, best);
            col_norm_sq.swap(k, best);
        }
        // Householder on rows k..m of column k.
        let norm_sq: f64 = (k..m).map(|i| r[(i, k)].norm_sqr()).sum();
        let norm = norm_sq.sqrt();
        if norm == 0.0 {
            break;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v = vec![Complex64::default(); m];
        for i in k..m {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv > 0.0 {
            let tau = 2.0 / vv;
            for j in k..n {
                let mut dot = Complex64::default();
                for i in k..m {
                    dot += v[i].conj() * r[(i, j)];
                }
                dot *= tau;
                for i in k..m {
                    let upd = v[i] * dot;
                    r[(i, j)] -= upd;
                }
            }
        }
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)] = Complex64::default();
        }
        reflectors.push((k, v));
        for (j, cs) in col_norm_sq.iter_mut().enumerate().skip(k + 1) {
            *cs -= r[(k, j)].norm_sqr();
            if *cs < 0.0 {
                *cs = 0.0;
            }
        }
        k += 1;
    }
    if k == 0 {
        return Ok(Svd {
            u: ComplexMatrix::zeros(m, kmax),
            s: vec![0.0; kmax],
            v: ComplexMatrix::zeros(n, kmax),
        });
    }
    // Economy SVD of the k x n triangular part (small since k is the rank).
    let r1 = r.block(0, 0, k, n);
    let inner = svd_jacobi(&r1)?;
    // U = Q_1 * U_r via the stored reflectors.
    let mut u = ComplexMatrix::zeros(m, kmax);
    u.set_block(0, 0, &inner.u);
    for (start, v) in reflectors.iter().rev() {
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let tau = 2.0 / vv;
        for j in 0..k {
            let mut dot = Complex64::default();
            for i in *start..m {
                dot += v[i].conj() * u[(i, j)];
            }
            dot *= tau;
            for i in *start..m {
                let upd = v[i] * dot;
                u[(i, j)] -= upd;
            }
        }
    }
    let mut s = inner.s;
    s.resize(kmax, 0.0);
    let mut vout = ComplexMatrix::zeros(n, kmax);
    for j in 0..k {
        for i in 0..n {
            vout[(perm[i], j)] = inner.v[(i, j)];
        }
    }
    Ok(Svd { u, s, v: vout })
}

/// Fill null-direction columns of U so it stays column-orthonormal.
fn complete_orthonormal(u: &mut ComplexMatrix, sigma: &[f64], scale: f64) {
    let (m, k) = (u.rows(), u.cols());
    for col in 0..k {
        if sigma[col] > scale * f64::EPSILON && sigma[col] > 0.0 {
            continue;
        }
        // Try coordinate directions, orthogonalize twice, keep the first
        // candidate with a healthy remainder.
        'candidates: for cand in 0..m {
            let mut x = vec![Complex64::default(); m];
            x[cand] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for j in 0..k {
                    if j == col {
                        continue;
                    }
                    let mut dot = Complex64::default();
                    for i in 0..m {
                        dot += u[(i, j)].conj() * x[i];
                    }
                    for i in 0..m {
                        let upd = u[(i, j)] * dot;
                        x[i] -= upd;
                    }
                }
            }
            let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.5 {
                for i in 0..m {
                    u[(i, col)] = x[i] / norm;
                }
                break 'candidates;
            }
        }
    }
}
