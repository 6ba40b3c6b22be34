//! Intrusive reduction baselines: balanced truncation and IRKA.

use super::gramian::psd_factor;
use super::{Domain, StateSpace};
use crate::dense::{eig, orthonormal_columns, solve, svd, ComplexMatrix, Lu};
use crate::error::{Error, Result};
use crate::quadruplet::InterpolationData;
use num_complex::Complex64;

/// Balancing square-root reduction to order `r`.
pub fn intrusive_bt(sys: &StateSpace, r: usize) -> Result<StateSpace> {
    let (p, q) = sys.gramians()?;
    let zp = psd_factor(&p)?;
    let zq = psd_factor(&q)?;
    let f = svd(&(&(&zq.adjoint() * &sys.e) * &zp))?;
    let rank = f.rank(1e-12);
    if r > rank {
        return Err(Error::RankDeficient { requested: r, rank });
    }
    let sqrt_inv = ComplexMatrix::from_fn(r, r, |i, j| {
        if i == j {
            Complex64::new(1.0 / f.s[i].sqrt(), 0.0)
        } else {
            Complex64::default()
        }
    });
    let w = &(&zq * &f.u.take_columns(r)) * &sqrt_inv;
    let v = &(&zp * &f.v.take_columns(r)) * &sqrt_inv;
    StateSpace::new(
        &(&w.adjoint() * &sys.e) * &v,
        &(&w.adjoint() * &sys.a) * &v,
        &w.adjoint() * &sys.b,
        &sys.c * &v,
        sys.domain,
    )
}

/// Convergence trace of an IRKA run.
#[derive(Clone, Debug)]
pub struct IrkaBaselineReport {
    pub iterations: usize,
    pub converged: bool,
    /// Sorted shift eigenvalues per iteration.
    pub eigenvalues: Vec<Vec<Complex64>>,
    /// Iterations at which unstable shifts were reflected back.
    pub reflections: Vec<usize>,
}

/// Greedy nearest-neighbor matching of two sorted eigenvalue lists;
/// returns the largest relative change.
pub(crate) fn eigenvalue_change(old: &[Complex64], new: &[Complex64]) -> f64 {
    let mut used = vec![false; new.len()];
    let mut worst = 0.0f64;
    for o in old {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, n) in new.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (o - n).norm();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        if best == usize::MAX {
            break;
        }
        used[best] = true;
        worst = worst.max(best_d / o.norm().max(1e-300));
    }
    worst
}

/// Reflect a shift into the valid sampling region: positive real part for
/// continuous time, modulus above one for discrete time.
pub(crate) fn reflect_shift(domain: Domain, s: Complex64) -> (Complex64, bool) {
    match domain {
        Domain::Continuous => {
            if s.re > 0.0 {
                (s, false)
            } else {
                (Complex64::new((-s.re).max(1e-12), s.im), true)
            }
        }
        Domain::Discrete => {
            let m = s.norm();
            if m > 1.0 {
                (s, false)
            } else if m < 1e-12 {
                (Complex64::new(1.5, 0.0), true)
            } else {
                // Invert the modulus, keep the phase.
                (s / Complex64::new(m * m, 0.0), true)
            }
        }
    }
}

/// Fixed-point IRKA on the full system; the validation baseline for the
/// data-driven variants.
pub fn intrusive_irka(
    sys: &StateSpace,
    r: usize,
    init: &InterpolationData,
    tol: f64,
    max_iter: usize,
) -> Result<(StateSpace, IrkaBaselineReport)> {
    let mut interp = init.clone();
    let mut history: Vec<Vec<Complex64>> = Vec::new();
    let mut reflections = Vec::new();
    let mut prev: Option<Vec<Complex64>> = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut rom = None;
    for it in 0..max_iter {
        iterations = it + 1;
        let v_raw = krylov_basis(sys, &interp.sigma, &interp.b)?;
        let w_raw = krylov_basis_left(sys, &interp.mu, &interp.c)?;
        let v = orthonormal_columns(&v_raw, 1e-13);
        let w = orthonormal_columns(&w_raw, 1e-13);
        if v.cols() < r || w.cols() < r {
            return Err(Error::RankDeficient {
                requested: r,
                rank: v.cols().min(w.cols()),
            });
        }
        let er = &(&w.adjoint() * &sys.e) * &v;
        let ar = &(&w.adjoint() * &sys.a) * &v;
        let br = &w.adjoint() * &sys.b;
        let cr = &sys.c * &v;
        let lu = Lu::factor(&er).map_err(|_| Error::SingularReducedE { iteration: it })?;
        let dec = eig(&lu.solve(&ar)?)?;
        history.push(dec.values.clone());
        // sigma = -lambda (ct) or 1/lambda (dt), reflected if needed.
        let mut sigma = Vec::with_capacity(r);
        let mut reflected_here = false;
        for &lam in &dec.values {
            let raw = match sys.domain {
                Domain::Continuous => -lam,
                Domain::Discrete => lam.inv(),
            };
            let (s, refl) = reflect_shift(sys.domain, raw);
            reflected_here |= refl;
            sigma.push(s);
        }
        if reflected_here {
            reflections.push(it);
        }
        let t_inv_e_inv_b = solve(&dec.vectors, &lu.solve(&br)?)?;
        let b_dirs = t_inv_e_inv_b.adjoint();
        let c_dirs = &cr * &dec.vectors;
        interp = InterpolationData {
            sigma: sigma.clone(),
            mu: sigma.clone(),
            b: b_dirs,
            c: c_dirs.adjoint(),
        }
        .symmetrized();
        rom = Some(StateSpace::new(er, ar, br, cr, sys.domain)?);
        if let Some(old) = prev.as_ref() {
            if eigenvalue_change(old, &dec.values) < tol {
                converged = true;
                break;
            }
        }
        prev = Some(dec.values);
    }
    Ok((
        rom.expect("at least one iteration"),
        IrkaBaselineReport {
            iterations,
            converged,
            eigenvalues: history,
            reflections,
        },
    ))
}

/// `[(sigma_1 E - A)^{-1} B b_1, ..., (sigma_r E - A)^{-1} B b_r]`.
pub fn krylov_basis(sys: &StateSpace, sigma: &[Complex64], b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = sys.order();
    let r = sigma.len();
    let mut v = ComplexMatrix::zeros(n, r);
    for (j, &s) in sigma.iter().enumerate() {
        let rhs = &sys.b * &ComplexMatrix::from_fn(sys.inputs(), 1, |i, _| b[(i, j)]);
        let m = &sys.e.scale(s) - &sys.a;
        let col = solve(&m, &rhs).map_err(|_| Error::PointIsPole { point: s })?;
        for i in 0..n {
            v[(i, j)] = col[(i, 0)];
        }
    }
    Ok(v)
}

/// `[(mu_1^* E^* - A^*)^{-1} C^* c_1^*, ...]`.
pub fn krylov_basis_left(sys: &StateSpace, mu: &[Complex64], c: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = sys.order();
    let r = mu.len();
    let mut w = ComplexMatrix::zeros(n, r);
    for (j, &s) in mu.iter().enumerate() {
        // row j of c is c_j (1 x p); rhs = C^* c_j^*
        let cj = ComplexMatrix::from_fn(sys.outputs(), 1, |i, _| c[(j, i)].conj());
        let rhs = &sys.c.adjoint() * &cj;
        let m = &sys.e.adjoint().scale(s.conj()) - &sys.a.adjoint();
        let col = solve(&m, &rhs).map_err(|_| Error::PointIsPole { point: s })?;
        for i in 0..n {
            w[(i, j)] = col[(i, 0)];
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::super::gramian::{h2_error, h2_norm, hinf_grid, hsv};
    use super::super::tests::two_state_example;
    use super::*;
    use crate::dense::c64;
    use crate::quadruplet::InterpolationData;

    fn probe_match(a: &StateSpace, b: &StateSpace, tol: f64) {
        for k in 0..100 {
            let s = match a.domain {
                Domain::Continuous => c64(0.0, 0.05 * (k as f64 + 1.0)),
                Domain::Discrete => c64(0.0, 0.031 * k as f64).exp(),
            };
            let ga = a.tf_eval(s).unwrap();
            let gb = b.tf_eval(s).unwrap();
            let rel = (&ga - &gb).frobenius_norm() / ga.frobenius_norm().max(1e-12);
            assert!(rel < tol, "mismatch {rel} at probe {k}");
        }
    }

    #[test]
    fn bt_full_order_reproduces_system() {
        let sys = two_state_example();
        let rom = intrusive_bt(&sys, 2).unwrap();
        probe_match(&sys, &rom, 1e-8);
        let s = hsv(&rom).unwrap();
        assert!((s[0] - 0.2142).abs() < 1e-4);
        assert!((s[1] - 0.0328).abs() < 1e-4);
    }

    #[test]
    fn bt_first_order_identity() {
        let sys = StateSpace::siso_scalar(1.0, -1.0, 1.0, 1.0, Domain::Continuous);
        let rom = intrusive_bt(&sys, 1).unwrap();
        probe_match(&sys, &rom, 1e-10);
    }

    #[test]
    fn bt_error_bound_on_random_system() {
        // Classical bound: grid H-infinity error below twice the truncated tail.
        let sys = super::super::benchgen::random_stable(6, 1, 1, Domain::Continuous, 3).unwrap();
        let rom = intrusive_bt(&sys, 3).unwrap();
        let tail: f64 = hsv(&sys).unwrap()[3..].iter().sum();
        let mut worst = 0.0f64;
        for k in 0..400 {
            let w = 1e-3 * (1e6f64).powf(k as f64 / 399.0);
            let g = sys.tf_eval(c64(0.0, w)).unwrap();
            let gr = rom.tf_eval(c64(0.0, w)).unwrap();
            worst = worst.max((&g - &gr).frobenius_norm());
        }
        assert!(worst <= 2.0 * tail + 1e-12, "{worst} vs tail {tail}");
    }

    #[test]
    fn irka_order_one_fixed_point_ct() {
        // 1/(s+2): the optimal first-order model is the system itself,
        // reached at shift 2.
        let sys = StateSpace::siso_scalar(1.0, -2.0, 1.0, 1.0, Domain::Continuous);
        let init = InterpolationData::siso(vec![c64(0.7, 0.0)]);
        let (rom, rep) = intrusive_irka(&sys, 1, &init, 1e-10, 50).unwrap();
        assert!(rep.converged);
        let pole = rom.poles().unwrap()[0];
        assert!((pole - c64(-2.0, 0.0)).norm() < 1e-8);
        probe_match(&sys, &rom, 1e-8);
    }

    #[test]
    fn irka_order_one_fixed_point_dt() {
        let sys = StateSpace::siso_scalar(1.0, 0.5, 1.0, 1.0, Domain::Discrete);
        let init = InterpolationData::siso(vec![c64(3.0, 0.0)]);
        let (rom, rep) = intrusive_irka(&sys, 1, &init, 1e-10, 50).unwrap();
        assert!(rep.converged);
        let pole = rom.poles().unwrap()[0];
        assert!((pole - c64(0.5, 0.0)).norm() < 1e-8);
        probe_match(&sys, &rom, 1e-8);
    }

    #[test]
    fn irka_multistart_sanity() {
        use rand::{Rng, SeedableRng};
        let sys = super::super::benchgen::random_stable(10, 1, 1, Domain::Continuous, 11).unwrap();
        let det_init = InterpolationData::siso(vec![
            c64(0.1, 0.0),
            c64(0.4, 0.0),
            c64(1.2, 0.0),
            c64(3.0, 0.0),
        ]);
        let (rom, _) = intrusive_irka(&sys, 4, &det_init, 1e-8, 50).unwrap();
        let err = h2_error(&sys, &rom).unwrap();
        let mut best = f64::INFINITY;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5 {
            let init = InterpolationData::siso(
                (0..4).map(|_| c64(rng.gen_range(0.05..4.0), 0.0)).collect(),
            );
            if let Ok((r2, _)) = intrusive_irka(&sys, 4, &init, 1e-8, 50) {
                if let Ok(e2) = h2_error(&sys, &r2) {
                    best = best.min(e2);
                }
            }
        }
        assert!(
            err <= best + 1e-6 * h2_norm(&sys).unwrap(),
            "deterministic {err} vs best-of-5 {best}"
        );
    }

    #[test]
    fn irka_hermite_conditions_at_convergence() {
        let sys = super::super::benchgen::random_stable(8, 1, 1, Domain::Continuous, 22).unwrap();
        let init = InterpolationData::siso(vec![c64(0.2, 0.0), c64(0.9, 0.0), c64(2.5, 0.0)]);
        let (rom, rep) = intrusive_irka(&sys, 3, &init, 1e-9, 50).unwrap();
        assert!(rep.converged);
        // Interpolation at reflected ROM poles.
        for pole in rom.poles().unwrap() {
            let s = -pole;
            let (g, gp) = sys.tf_eval_with_derivative(s).unwrap();
            let (gr, grp) = rom.tf_eval_with_derivative(s).unwrap();
            assert!((g[(0, 0)] - gr[(0, 0)]).norm() < 1e-6 * g[(0, 0)].norm());
            assert!((gp[(0, 0)] - grp[(0, 0)]).norm() < 1e-6 * gp[(0, 0)].norm());
        }
        let _ = hinf_grid(&sys, (1e-3, 1e3), 50).unwrap();
    }
}
