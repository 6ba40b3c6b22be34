//! Pseudo-optimal rational Krylov reduction.
//!
//! One-shot constructions that satisfy one side of the H2 optimality
//! conditions. The reduced Gramian has a closed (Cauchy) form, its inverse
//! factors feed the balancing compression, and for lightly damped shifts
//! the factors collapse to diagonals that sidestep the ill-conditioned
//! Gramian inverse entirely.

use crate::dense::{cholesky, lyap_ct, solve, stein_dt, ComplexMatrix, SylvesterMode};
use crate::error::{Error, Result};
use crate::quadrature::ShiftSet;
use crate::system::{Domain, StateSpace};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PorkSide {
    Input,
    Output,
}

/// Output of a PORK run: the reduced model, the closed-form Gramian of the
/// shift data, and a factor `L` with `L L^* = gramian^{-1}`.
#[derive(Clone, Debug)]
pub struct PorkResult {
    pub rom: StateSpace,
    pub gramian: ComplexMatrix,
    pub inverse_factor: ComplexMatrix,
    pub side: PorkSide,
}

/// Block-interpolation data for the input side: `S = diag(points) (x) I_m`,
/// `L = [1 .. 1] (x) I_m` of shape `m x (n m)`.
pub fn block_data_input(points: &[Complex64], m: usize) -> (ComplexMatrix, ComplexMatrix) {
    let s = ComplexMatrix::diag(points).kron(&ComplexMatrix::identity(m));
    let ones = ComplexMatrix::from_fn(1, points.len(), |_, _| Complex64::new(1.0, 0.0));
    (s, ones.kron(&ComplexMatrix::identity(m)))
}

/// Output-side block data: `L` has shape `(n p) x p`.
pub fn block_data_output(points: &[Complex64], p: usize) -> (ComplexMatrix, ComplexMatrix) {
    let s = ComplexMatrix::diag(points).kron(&ComplexMatrix::identity(p));
    let ones = ComplexMatrix::from_fn(points.len(), 1, |_, _| Complex64::new(1.0, 0.0));
    (s, ones.kron(&ComplexMatrix::identity(p)))
}

/// Barred discrete-time data `(S^{-1}, L S^{-1})` for the input side.
pub fn dt_barred_input(s: &ComplexMatrix, l: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let sbar = invert_diagonal(s)?;
    let lbar = l * &sbar;
    Ok((sbar, lbar))
}

/// Barred discrete-time data `(S^{-1}, S^{-1} L)` for the output side.
pub fn dt_barred_output(s: &ComplexMatrix, l: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let sbar = invert_diagonal(s)?;
    let lbar = &sbar * l;
    Ok((sbar, lbar))
}

fn invert_diagonal(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = s.diagonal();
    for (i, z) in d.iter().enumerate() {
        if z.norm() == 0.0 {
            return Err(Error::BadShift(format!("zero shift at index {i}")));
        }
    }
    Ok(ComplexMatrix::diag(
        &d.iter().map(|z| z.inv()).collect::<Vec<_>>(),
    ))
}

/// Cholesky-based inverse factor `L` with `L L^* = g^{-1}`, refusing
/// Gramians whose estimated condition exceeds 1e12.
fn inverse_factor(g: &ComplexMatrix, not_pd: &str) -> Result<ComplexMatrix> {
    let chol = cholesky(g).map_err(|_| match not_pd {
        "observable" => Error::NotObservable("shift gramian is not positive definite".into()),
        _ => Error::NotControllable("shift gramian is not positive definite".into()),
    })?;
    let d: Vec<f64> = (0..chol.rows()).map(|i| chol[(i, i)].re).collect();
    let hi = d.iter().cloned().fold(0.0, f64::max);
    let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = (hi / lo) * (hi / lo);
    if cond > 1e12 {
        return Err(Error::GramianIllConditioned { cond });
    }
    // g = C C^*  =>  g^{-1} = C^{-*} C^{-1}, so L = C^{-*}.
    Ok(solve(&chol.adjoint(), &ComplexMatrix::identity(g.rows()))?)
}

/// Input PORK, continuous time.
///
/// `Q_s` solves `-S_b^* Q - Q S_b + L_b^* L_b = 0`; the reduced model is
/// `(I, -Q^{-1} S_b^* Q, Q^{-1} L_b^*, CV)` and its controllability Gramian
/// equals `Q^{-1}`.
pub fn ipork_ct(s_b: &ComplexMatrix, l_b: &ComplexMatrix, cv: &ComplexMatrix) -> Result<PorkResult> {
    for z in s_b.diagonal() {
        if z.re <= 0.0 {
            return Err(Error::BadShift(format!("{z} has nonpositive real part")));
        }
    }
    let m = &l_b.adjoint() * l_b;
    let q = lyap_ct(s_b, &m, SylvesterMode::DiagonalClosedForm)?;
    let lp = inverse_factor(&q, "observable")?;
    let qinv_sq = solve(&q, &(&s_b.adjoint() * &q))?;
    let a_r = qinv_sq.scale(Complex64::new(-1.0, 0.0));
    let b_r = solve(&q, &l_b.adjoint())?;
    let rom = StateSpace::new(
        ComplexMatrix::identity(q.rows()),
        a_r,
        b_r,
        cv.clone(),
        Domain::Continuous,
    )?;
    Ok(PorkResult {
        rom,
        gramian: q,
        inverse_factor: lp,
        side: PorkSide::Input,
    })
}

/// Output PORK, continuous time: `P_s` solves
/// `-S_c P - P S_c^* + L_c L_c^* = 0`; the reduced model is
/// `(I, -P S_c^* P^{-1}, W^*B, L_c^* P^{-1})` with observability Gramian
/// `P^{-1}`.
pub fn opork_ct(s_c: &ComplexMatrix, l_c: &ComplexMatrix, wb: &ComplexMatrix) -> Result<PorkResult> {
    for z in s_c.diagonal() {
        if z.re <= 0.0 {
            return Err(Error::BadShift(format!("{z} has nonpositive real part")));
        }
    }
    let m = l_c * &l_c.adjoint();
    let p = lyap_ct(&s_c.adjoint(), &m, SylvesterMode::DiagonalClosedForm)?;
    let lq = inverse_factor(&p, "controllable")?;
    // A_r = -P S_c^* P^{-1} via a transposed solve.
    let ps = &p * &s_c.adjoint();
    let a_r = solve(&p.adjoint(), &ps.adjoint())?
        .adjoint()
        .scale(Complex64::new(-1.0, 0.0));
    let c_r = solve(&p.adjoint(), &l_c)?.adjoint();
    let rom = StateSpace::new(
        ComplexMatrix::identity(p.rows()),
        a_r,
        wb.clone(),
        c_r,
        Domain::Continuous,
    )?;
    Ok(PorkResult {
        rom,
        gramian: p,
        inverse_factor: lq,
        side: PorkSide::Output,
    })
}

/// Input PORK, discrete time, on barred data: `Q_s` solves the Stein
/// equation `Sb^* Q Sb - Q + Lb^* Lb = 0`; the reduced model is
/// `(I, Q^{-1} Sb^* Q, Q^{-1} Lb^*, CV)` with controllability Gramian
/// `Q^{-1}`.
pub fn ipork_dt(
    s_bar: &ComplexMatrix,
    l_bar: &ComplexMatrix,
    cv: &ComplexMatrix,
) -> Result<PorkResult> {
    for z in s_bar.diagonal() {
        if z.norm() >= 1.0 {
            return Err(Error::BadShift(format!(
                "barred shift {z} not inside the unit circle"
            )));
        }
    }
    let m = &l_bar.adjoint() * l_bar;
    let q = stein_dt(s_bar, &m, SylvesterMode::DiagonalClosedForm)?;
    let lp = inverse_factor(&q, "observable")?;
    let a_r = solve(&q, &(&s_bar.adjoint() * &q))?;
    let b_r = solve(&q, &l_bar.adjoint())?;
    let rom = StateSpace::new(
        ComplexMatrix::identity(q.rows()),
        a_r,
        b_r,
        cv.clone(),
        Domain::Discrete,
    )?;
    Ok(PorkResult {
        rom,
        gramian: q,
        inverse_factor: lp,
        side: PorkSide::Input,
    })
}

/// Output PORK, discrete time: `P_s` solves `Sc P Sc^* - P + Lc Lc^* = 0`;
/// the reduced model is `(I, P Sc^* P^{-1}, W^*B, Lc^* P^{-1})` with
/// observability Gramian `P^{-1}`.
pub fn opork_dt(
    s_bar: &ComplexMatrix,
    l_bar: &ComplexMatrix,
    wb: &ComplexMatrix,
) -> Result<PorkResult> {
    for z in s_bar.diagonal() {
        if z.norm() >= 1.0 {
            return Err(Error::BadShift(format!(
                "barred shift {z} not inside the unit circle"
            )));
        }
    }
    let m = l_bar * &l_bar.adjoint();
    let p = stein_dt(&s_bar.adjoint(), &m, SylvesterMode::DiagonalClosedForm)?;
    let lq = inverse_factor(&p, "controllable")?;
    let ps = &p * &s_bar.adjoint();
    let a_r = solve(&p.adjoint(), &ps.adjoint())?.adjoint();
    let c_r = solve(&p.adjoint(), &l_bar)?.adjoint();
    let rom = StateSpace::new(
        ComplexMatrix::identity(p.rows()),
        a_r,
        wb.clone(),
        c_r,
        Domain::Discrete,
    )?;
    Ok(PorkResult {
        rom,
        gramian: p,
        inverse_factor: lq,
        side: PorkSide::Output,
    })
}

/// Diagonal Gramian shortcut for lightly damped shifts.
#[derive(Clone, Debug)]
pub struct LightGramians {
    /// Per-shift diagonal of the inverse Gramian.
    pub inverse_diag: Vec<f64>,
    /// Per-shift factor entries; `factor[i]^2 = inverse_diag[i]`.
    pub factor: Vec<f64>,
    /// Set when the damping used to build the shifts exceeds 1e-2 and the
    /// diagonal approximation becomes questionable.
    pub damping_warning: bool,
}

/// Closed-form inverse Gramian factors from the shifts alone: continuous
/// time `sqrt(2 Re(sigma))`, discrete time `sqrt(|sigma|^2 - 1)`.
pub fn light_gramians(shifts: &ShiftSet) -> Result<LightGramians> {
    let mut inverse_diag = Vec::with_capacity(shifts.shifts.len());
    for &s in &shifts.shifts {
        let v = match shifts.domain {
            Domain::Continuous => {
                if s.re <= 0.0 {
                    return Err(Error::BadShift(format!("{s} has nonpositive real part")));
                }
                2.0 * s.re
            }
            Domain::Discrete => {
                let d = s.norm_sqr() - 1.0;
                if d <= 0.0 {
                    return Err(Error::BadShift(format!("{s} not outside the unit circle")));
                }
                d
            }
        };
        inverse_diag.push(v);
    }
    let factor = inverse_diag.iter().map(|v| v.sqrt()).collect();
    Ok(LightGramians {
        inverse_diag,
        factor,
        damping_warning: shifts.zeta > 1e-2,
    })
}

impl LightGramians {
    /// Diagonal factor expanded over block width `dim`.
    pub fn factor_matrix(&self, dim: usize) -> ComplexMatrix {
        let d = ComplexMatrix::diag(
            &self
                .factor
                .iter()
                .map(|&f| Complex64::new(f, 0.0))
                .collect::<Vec<_>>(),
        );
        if dim == 1 {
            d
        } else {
            d.kron(&ComplexMatrix::identity(dim))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::c64;
    use crate::quadrature::{gen_shifts, ShiftSide};
    use crate::system::{h2_error, h2_norm, random_stable};

    fn cv_for(sys: &StateSpace, sigma: &[Complex64]) -> ComplexMatrix {
        let blocks: Vec<ComplexMatrix> = sigma.iter().map(|&s| sys.tf_eval(s).unwrap()).collect();
        ComplexMatrix::hstack(&blocks.iter().collect::<Vec<_>>())
    }

    fn wb_for(sys: &StateSpace, mu: &[Complex64]) -> ComplexMatrix {
        let blocks: Vec<ComplexMatrix> = mu.iter().map(|&s| sys.tf_eval(s).unwrap()).collect();
        ComplexMatrix::vstack(&blocks.iter().collect::<Vec<_>>())
    }

    #[test]
    fn ipork_ct_order_one_exact() {
        let sys = StateSpace::siso_scalar(1.0, -1.0, 1.0, 1.0, Domain::Continuous);
        let (s, l) = block_data_input(&[c64(1.0, 0.0)], 1);
        let res = ipork_ct(&s, &l, &cv_for(&sys, &[c64(1.0, 0.0)])).unwrap();
        assert!((res.gramian[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((res.rom.a[(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-14);
        assert!((res.rom.b[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-14);
        assert!((res.rom.c[(0, 0)] - c64(0.5, 0.0)).norm() < 1e-14);
        for s in [c64(0.5, 0.1), c64(2.0, -1.0)] {
            let g = sys.tf_eval(s).unwrap()[(0, 0)];
            let gr = res.rom.tf_eval(s).unwrap()[(0, 0)];
            assert!((g - gr).norm() < 1e-13);
        }
    }

    #[test]
    fn ipork_cauchy_gramian() {
        let sys = random_stable(5, 1, 1, Domain::Continuous, 2).unwrap();
        let pts = [c64(1.0, 0.0), c64(2.0, 0.0)];
        let (s, l) = block_data_input(&pts, 1);
        let res = ipork_ct(&s, &l, &cv_for(&sys, &pts)).unwrap();
        let want = ComplexMatrix::from_real(2, 2, &[0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25]).unwrap();
        assert!((&res.gramian - &want).frobenius_norm() < 1e-14);
        // Inverse factor property.
        let inv = solve(&res.gramian, &ComplexMatrix::identity(2)).unwrap();
        let ll = &res.inverse_factor * &res.inverse_factor.adjoint();
        assert!((&ll - &inv).frobenius_norm() < 1e-10);
    }

    #[test]
    fn ipork_rom_controllability_gramian_is_inverse() {
        let sys = random_stable(6, 1, 1, Domain::Continuous, 5).unwrap();
        let pts = [c64(0.5, 0.3), c64(0.5, -0.3), c64(1.5, 0.0)];
        let (s, l) = block_data_input(&pts, 1);
        let res = ipork_ct(&s, &l, &cv_for(&sys, &pts)).unwrap();
        let (p_rom, _) = res.rom.gramians().unwrap();
        let qinv = solve(&res.gramian, &ComplexMatrix::identity(3)).unwrap();
        assert!((&p_rom - &qinv).frobenius_norm() < 1e-10 * qinv.frobenius_norm());
    }

    #[test]
    fn opork_ct_mirror_and_cauchy() {
        let sys = StateSpace::siso_scalar(1.0, -1.0, 1.0, 1.0, Domain::Continuous);
        let (s, l) = block_data_output(&[c64(1.0, 0.0)], 1);
        let res = opork_ct(&s, &l, &wb_for(&sys, &[c64(1.0, 0.0)])).unwrap();
        for z in [c64(0.5, 0.1), c64(2.0, -1.0)] {
            let g = sys.tf_eval(z).unwrap()[(0, 0)];
            let gr = res.rom.tf_eval(z).unwrap()[(0, 0)];
            assert!((g - gr).norm() < 1e-13);
        }
        let sys2 = random_stable(5, 1, 1, Domain::Continuous, 2).unwrap();
        let pts = [c64(1.0, 0.0), c64(2.0, 0.0)];
        let (s2, l2) = block_data_output(&pts, 1);
        let res2 = opork_ct(&s2, &l2, &wb_for(&sys2, &pts)).unwrap();
        let want = ComplexMatrix::from_real(2, 2, &[0.5, 1.0 / 3.0, 1.0 / 3.0, 0.25]).unwrap();
        assert!((&res2.gramian - &want).frobenius_norm() < 1e-14);
        // Observability Gramian of the ROM equals P^{-1}.
        let (_, q_rom) = res2.rom.gramians().unwrap();
        let pinv = solve(&res2.gramian, &ComplexMatrix::identity(2)).unwrap();
        assert!((&q_rom - &pinv).frobenius_norm() < 1e-10 * pinv.frobenius_norm());
    }

    #[test]
    fn energy_identity_ct_both_sides() {
        let sys = random_stable(6, 1, 1, Domain::Continuous, 8).unwrap();
        let pts = [c64(0.4, 0.0), c64(1.7, 0.0)];
        let norm_sq = h2_norm(&sys).unwrap().powi(2);
        let (s, l) = block_data_input(&pts, 1);
        let ipork = ipork_ct(&s, &l, &cv_for(&sys, &pts)).unwrap();
        let err = h2_error(&sys, &ipork.rom).unwrap().powi(2);
        let rom_sq = h2_norm(&ipork.rom).unwrap().powi(2);
        assert!(
            (err - (norm_sq - rom_sq)).abs() < 1e-8 * norm_sq,
            "input side: {err} vs {}",
            norm_sq - rom_sq
        );
        let (so, lo) = block_data_output(&pts, 1);
        let opork = opork_ct(&so, &lo, &wb_for(&sys, &pts)).unwrap();
        let err_o = h2_error(&sys, &opork.rom).unwrap().powi(2);
        let rom_o = h2_norm(&opork.rom).unwrap().powi(2);
        assert!((err_o - (norm_sq - rom_o)).abs() < 1e-8 * norm_sq);
    }

    #[test]
    fn ipork_dt_order_one_exact() {
        let sys = StateSpace::siso_scalar(1.0, 0.5, 1.0, 1.0, Domain::Discrete);
        let (s, l) = block_data_input(&[c64(2.0, 0.0)], 1);
        let (sb, lb) = dt_barred_input(&s, &l).unwrap();
        let res = ipork_dt(&sb, &lb, &cv_for(&sys, &[c64(2.0, 0.0)])).unwrap();
        assert!((res.gramian[(0, 0)].re - 1.0 / 3.0).abs() < 1e-15);
        assert!((res.rom.a[(0, 0)] - c64(0.5, 0.0)).norm() < 1e-14);
        for z in [c64(1.3, 0.2), c64(-2.0, 0.5)] {
            let g = sys.tf_eval(z).unwrap()[(0, 0)];
            let gr = res.rom.tf_eval(z).unwrap()[(0, 0)];
            assert!((g - gr).norm() < 1e-13);
        }
    }

    #[test]
    fn ipork_dt_closed_form_matches_dense_and_theorem_items() {
        let sys = random_stable(6, 1, 1, Domain::Discrete, 3).unwrap();
        let pts = [c64(1.5, 0.4), c64(1.5, -0.4), c64(2.5, 0.0)];
        let (s, l) = block_data_input(&pts, 1);
        let (sb, lb) = dt_barred_input(&s, &l).unwrap();
        let res = ipork_dt(&sb, &lb, &cv_for(&sys, &pts)).unwrap();
        // Dense Stein solve agrees with the closed form.
        let m = &lb.adjoint() * &lb;
        let dense = stein_dt(&sb, &m, SylvesterMode::Dense).unwrap();
        assert!((&res.gramian - &dense).frobenius_norm() < 1e-12 * dense.frobenius_norm());
        // A_r equals the independently recomputed product.
        let qi = solve(&res.gramian, &ComplexMatrix::identity(3)).unwrap();
        let a_check = &(&qi * &sb.adjoint()) * &res.gramian;
        assert!((&a_check - &res.rom.a).frobenius_norm() < 1e-12 * a_check.frobenius_norm());
        // Controllability Gramian of the ROM is the Gramian inverse.
        let (p_rom, _) = res.rom.gramians().unwrap();
        assert!((&p_rom - &qi).frobenius_norm() < 1e-10 * qi.frobenius_norm());
        // Interpolation at reflected reciprocal poles (right side).
        for &pt in &pts {
            let g = sys.tf_eval(pt).unwrap()[(0, 0)];
            let gr = res.rom.tf_eval(pt).unwrap()[(0, 0)];
            assert!((g - gr).norm() < 1e-8 * g.norm());
        }
    }

    #[test]
    fn opork_dt_duals() {
        let sys = StateSpace::siso_scalar(1.0, 0.5, 1.0, 1.0, Domain::Discrete);
        let (s, l) = block_data_output(&[c64(2.0, 0.0)], 1);
        let (sb, lb) = dt_barred_output(&s, &l).unwrap();
        let res = opork_dt(&sb, &lb, &wb_for(&sys, &[c64(2.0, 0.0)])).unwrap();
        for z in [c64(1.3, 0.2), c64(-2.0, 0.5)] {
            let g = sys.tf_eval(z).unwrap()[(0, 0)];
            let gr = res.rom.tf_eval(z).unwrap()[(0, 0)];
            assert!((g - gr).norm() < 1e-13);
        }
        let sys2 = random_stable(6, 1, 1, Domain::Discrete, 9).unwrap();
        let pts = [c64(1.8, 0.0), c64(3.0, 0.0)];
        let (s2, l2) = block_data_output(&pts, 1);
        let (sb2, lb2) = dt_barred_output(&s2, &l2).unwrap();
        let res2 = opork_dt(&sb2, &lb2, &wb_for(&sys2, &pts)).unwrap();
        let m = &lb2 * &lb2.adjoint();
        let dense = stein_dt(&sb2.adjoint(), &m, SylvesterMode::Dense).unwrap();
        assert!((&res2.gramian - &dense).frobenius_norm() < 1e-12 * dense.frobenius_norm());
        // Energy identity on the output side.
        let norm_sq = h2_norm(&sys2).unwrap().powi(2);
        let err = h2_error(&sys2, &res2.rom).unwrap().powi(2);
        let rom_sq = h2_norm(&res2.rom).unwrap().powi(2);
        assert!((err - (norm_sq - rom_sq)).abs() < 1e-8 * norm_sq);
    }

    #[test]
    fn monotone_error_under_nested_shifts() {
        let sys = random_stable(8, 1, 1, Domain::Continuous, 14).unwrap();
        let all = [c64(0.3, 0.0), c64(0.8, 0.0), c64(1.5, 0.0), c64(2.5, 0.0)];
        let mut prev = f64::INFINITY;
        for k in 1..=all.len() {
            let pts = &all[..k];
            let (s, l) = block_data_input(pts, 1);
            let res = ipork_ct(&s, &l, &cv_for(&sys, pts)).unwrap();
            let err = h2_error(&sys, &res.rom).unwrap();
            assert!(err <= prev + 1e-10, "error grew at k={k}: {err} > {prev}");
            prev = err;
        }
    }

    #[test]
    fn light_gramians_values() {
        let ct = ShiftSet {
            shifts: vec![c64(0.001, 1.0)],
            zeta: 1e-3,
            side: ShiftSide::InputGramian,
            domain: Domain::Continuous,
        };
        let lg = light_gramians(&ct).unwrap();
        assert!((lg.factor[0] - 0.002f64.sqrt()).abs() < 1e-12);
        assert!((1.0 / lg.inverse_diag[0] - 500.0).abs() < 1e-9);
        assert!(!lg.damping_warning);

        let dt = ShiftSet {
            shifts: vec![c64(1.1, 0.0)],
            zeta: 5e-2,
            side: ShiftSide::InputGramian,
            domain: Domain::Discrete,
        };
        let lg = light_gramians(&dt).unwrap();
        assert!((lg.factor[0] - 0.21f64.sqrt()).abs() < 1e-12);
        assert!(lg.damping_warning);
    }

    #[test]
    fn light_matches_exact_cholesky_for_small_damping() {
        let freqs: Vec<f64> = (0..10).map(|k| 0.5 + 0.45 * k as f64).collect();
        let shifts = gen_shifts(
            Domain::Continuous,
            1e-4,
            &freqs,
            ShiftSide::InputGramian,
            false,
            false,
        )
        .unwrap();
        let (s, l) = block_data_input(&shifts.shifts, 1);
        let m = &l.adjoint() * &l;
        let q = lyap_ct(&s, &m, SylvesterMode::DiagonalClosedForm).unwrap();
        let exact = inverse_factor(&q, "observable").unwrap();
        let light = light_gramians(&shifts).unwrap();
        for (i, &f) in light.factor.iter().enumerate() {
            let rel = (exact[(i, i)].norm() - f).abs() / f;
            assert!(rel <= 1e-3, "entry {i}: exact {} vs light {f}", exact[(i, i)].norm());
        }
    }

    #[test]
    fn bad_shifts_rejected() {
        let (s, l) = block_data_input(&[c64(-1.0, 0.0)], 1);
        assert!(matches!(
            ipork_ct(&s, &l, &ComplexMatrix::zeros(1, 1)),
            Err(Error::BadShift(_))
        ));
        let bad = ShiftSet {
            shifts: vec![c64(0.9, 0.0)],
            zeta: 1e-4,
            side: ShiftSide::InputGramian,
            domain: Domain::Discrete,
        };
        assert!(matches!(light_gramians(&bad), Err(Error::BadShift(_))));
    }
}
