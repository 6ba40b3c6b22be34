//! Exact Gramians, Hankel singular values, and norm evaluation.

use super::{Domain, StateSpace};
use crate::dense::{lyap_dense, schur, solve, stein_dense, svd, ComplexMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;

impl StateSpace {
    /// Controllability and observability Gramians of a stable system.
    ///
    /// Continuous time solves `A P E^* + E P A^* + B B^* = 0` and
    /// `A^* Q E + E^* Q A + C^* C = 0`; discrete time the Stein analogues
    /// `A P A^* - E P E^* + B B^* = 0` and `A^* Q A - E^* Q E + C^* C = 0`.
    pub fn gramians(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        if !self.is_stable()? {
            return Err(Error::Unstable("gramians need a stable system".into()));
        }
        self.gramians_unchecked()
    }

    /// Gramian solve without the stability precheck; used on interim
    /// iterates where a formal value is still meaningful to report.
    pub fn gramians_unchecked(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let at = self.a_tilde()?;
        let bt = self.b_tilde()?;
        let bbt = &bt * &bt.adjoint();
        let cc = &self.c.adjoint() * &self.c;
        let (p, qt) = match self.domain {
            Domain::Continuous => (
                lyap_dense(&at, &bbt)?,
                lyap_dense(&at.adjoint(), &cc)?,
            ),
            Domain::Discrete => (
                stein_dense(&at, &bbt)?,
                stein_dense(&at.adjoint(), &cc)?,
            ),
        };
        // qt = E^* Q E
        let q = solve(&self.e.adjoint(), &solve(&self.e.adjoint(), &qt.adjoint())?.adjoint())?;
        Ok((p, q))
    }
}

/// Factor a Hermitian positive semidefinite matrix as `Z Z^*`, clipping
/// negative rounding noise on the spectrum.
pub(crate) fn psd_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    // Hermitian input makes the Schur form diagonal with a unitary basis.
    let herm = (&(m + &m.adjoint())).scale(Complex64::new(0.5, 0.0));
    let dec = schur(&herm)?;
    let n = m.rows();
    let mut z = dec.z;
    for j in 0..n {
        let lam = dec.t[(j, j)].re.max(0.0).sqrt();
        for i in 0..n {
            z[(i, j)] = z[(i, j)].scale(lam);
        }
    }
    Ok(z)
}

/// Hankel singular values: singular values of `Z_q^* E Z_p`.
pub fn hsv(sys: &StateSpace) -> Result<Vec<f64>> {
    let (p, q) = sys.gramians()?;
    let zp = psd_factor(&p)?;
    let zq = psd_factor(&q)?;
    let f = svd(&(&(&zq.adjoint() * &sys.e) * &zp))?;
    Ok(f.s)
}

/// H2 norm `sqrt(trace(C P C^*))`.
pub fn h2_norm(sys: &StateSpace) -> Result<f64> {
    let (p, _) = sys.gramians()?;
    let t = (&(&sys.c * &p) * &sys.c.adjoint()).trace();
    Ok(t.re.max(0.0).sqrt())
}

/// H2 norm of the difference `G - G_r` through the stacked error system.
pub fn h2_error(sys: &StateSpace, rom: &StateSpace) -> Result<f64> {
    if sys.domain != rom.domain {
        return Err(Error::DomainMismatch {
            expected: sys.domain.to_string(),
            got: rom.domain.to_string(),
        });
    }
    if sys.inputs() != rom.inputs() || sys.outputs() != rom.outputs() {
        return Err(Error::DimensionMismatch(
            "error system needs matching input/output counts".into(),
        ));
    }
    let (n, r) = (sys.order(), rom.order());
    let mut e = ComplexMatrix::zeros(n + r, n + r);
    e.set_block(0, 0, &sys.e);
    e.set_block(n, n, &rom.e);
    let mut a = ComplexMatrix::zeros(n + r, n + r);
    a.set_block(0, 0, &sys.a);
    a.set_block(n, n, &rom.a);
    let b = ComplexMatrix::vstack(&[&sys.b, &rom.b]);
    let c = ComplexMatrix::hstack(&[&sys.c, &rom.c.scale(Complex64::new(-1.0, 0.0))]);
    let err = StateSpace::new(e, a, b, c, sys.domain)?;
    h2_norm(&err)
}

/// Largest singular value of the frequency response over an evaluation grid.
///
/// Continuous systems use a log-spaced grid on `[band.0, band.1]` rad/s;
/// discrete systems a uniform phase grid on `[0, pi]`.
pub fn hinf_grid(sys: &StateSpace, band: (f64, f64), points: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for s in eval_grid(sys.domain, band, points) {
        let g = sys.tf_eval(s)?;
        let top = svd(&g)?.s.first().copied().unwrap_or(0.0);
        worst = worst.max(top);
    }
    Ok(worst)
}

/// Grid of evaluation points for frequency sweeps.
pub fn eval_grid(domain: Domain, band: (f64, f64), points: usize) -> Vec<Complex64> {
    match domain {
        Domain::Continuous => {
            let (lo, hi) = band;
            let ratio = (hi / lo).ln();
            (0..points)
                .map(|k| {
                    let w = lo * (ratio * k as f64 / (points - 1).max(1) as f64).exp();
                    Complex64::new(0.0, w)
                })
                .collect()
        }
        Domain::Discrete => (0..points)
            .map(|k| {
                let th = std::f64::consts::PI * k as f64 / (points - 1).max(1) as f64;
                Complex64::new(0.0, th).exp()
            })
            .collect(),
    }
}

/// `(frequency, largest singular value in dB)` rows for sigma plots.
pub fn sigma_grid(sys: &StateSpace, band: (f64, f64), points: usize) -> Result<Vec<(f64, f64)>> {
    let grid = eval_grid(sys.domain, band, points);
    let mut rows = Vec::with_capacity(points);
    for s in grid {
        let g = sys.tf_eval(s)?;
        let top = svd(&g)?.s.first().copied().unwrap_or(0.0);
        let freq = match sys.domain {
            Domain::Continuous => s.im,
            Domain::Discrete => s.arg(),
        };
        rows.push((freq, 20.0 * top.max(1e-300).log10()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::super::tests::two_state_example;
    use super::*;

    #[test]
    fn scalar_gramians() {
        let g = StateSpace::siso_scalar(1.0, -1.0, 1.0, 1.0, Domain::Continuous);
        let (p, q) = g.gramians().unwrap();
        assert!((p[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((q[(0, 0)].re - 0.5).abs() < 1e-14);
        assert_eq!(hsv(&g).unwrap().len(), 1);
        assert!((hsv(&g).unwrap()[0] - 0.5).abs() < 1e-13);
    }

    #[test]
    fn scalar_discrete_gramians() {
        let g = StateSpace::siso_scalar(1.0, 0.5, 1.0, 1.0, Domain::Discrete);
        let (p, q) = g.gramians().unwrap();
        assert!((p[(0, 0)].re - 4.0 / 3.0).abs() < 1e-14);
        assert!((q[(0, 0)].re - 4.0 / 3.0).abs() < 1e-14);
        assert!((h2_norm(&g).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn two_state_hsv_reference_values() {
        let sys = two_state_example();
        let s = hsv(&sys).unwrap();
        assert!((s[0] - 0.2142).abs() < 1e-4, "got {}", s[0]);
        assert!((s[1] - 0.0328).abs() < 1e-4, "got {}", s[1]);
    }

    #[test]
    fn h2_norm_scalar_and_dual_form() {
        let g = StateSpace::siso_scalar(1.0, -1.0, 1.0, 1.0, Domain::Continuous);
        assert!((h2_norm(&g).unwrap() - 0.5f64.sqrt()).abs() < 1e-13);
        // Dual trace form trace(B^* Q B) agrees.
        let sys = two_state_example();
        let (p, q) = sys.gramians().unwrap();
        let primal = (&(&sys.c * &p) * &sys.c.adjoint()).trace().re;
        let dual = (&(&sys.b.adjoint() * &q) * &sys.b).trace().re;
        assert!((primal - dual).abs() < 1e-10 * primal.abs().max(1.0));
    }

    #[test]
    fn gramian_residuals() {
        let sys = two_state_example();
        let (p, q) = sys.gramians().unwrap();
        let rp = &(&(&sys.a * &p) * &sys.e.adjoint())
            + &(&(&(&sys.e * &p) * &sys.a.adjoint()) + &(&sys.b * &sys.b.adjoint()));
        let rq = &(&(&sys.a.adjoint() * &q) * &sys.e)
            + &(&(&(&sys.e.adjoint() * &q) * &sys.a) + &(&sys.c.adjoint() * &sys.c));
        let nb = (&sys.b * &sys.b.adjoint()).frobenius_norm();
        let nc = (&sys.c.adjoint() * &sys.c).frobenius_norm();
        assert!(rp.frobenius_norm() <= 1e-9 * nb);
        assert!(rq.frobenius_norm() <= 1e-9 * nc);
    }

    #[test]
    fn hsv_similarity_invariant() {
        let sys = two_state_example();
        let t = ComplexMatrix::from_real(2, 2, &[1.0, 0.4, -0.3, 1.2]).unwrap();
        let ti = solve(&t, &ComplexMatrix::identity(2)).unwrap();
        let sim = StateSpace::new(
            &(&ti * &sys.e) * &t,
            &(&ti * &sys.a) * &t,
            &ti * &sys.b,
            &sys.c * &t,
            Domain::Continuous,
        )
        .unwrap();
        let s1 = hsv(&sys).unwrap();
        let s2 = hsv(&sim).unwrap();
        for (a, b) in s1.iter().zip(s2.iter()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn unstable_rejected() {
        let g = StateSpace::siso_scalar(1.0, 1.0, 1.0, 1.0, Domain::Continuous);
        assert!(matches!(g.gramians(), Err(Error::Unstable(_))));
    }

    #[test]
    fn sigma_grid_first_order_minus_3db() {
        let g = StateSpace::siso_scalar(1.0, -1.0, 1.0, 1.0, Domain::Continuous);
        let rows = sigma_grid(&g, (1e-2, 1e2), 401).unwrap();
        let at_one = rows
            .iter()
            .min_by(|a, b| (a.0 - 1.0).abs().partial_cmp(&(b.0 - 1.0).abs()).unwrap())
            .unwrap();
        assert!((at_one.0 - 1.0).abs() < 1e-9);
        assert!((at_one.1 - (-3.0103)).abs() < 1e-3, "got {}", at_one.1);
    }

    #[test]
    fn h2_error_of_identical_systems_is_zero() {
        let sys = two_state_example();
        let e = h2_error(&sys, &sys).unwrap();
        assert!(e < 1e-10);
    }

    #[test]
    fn eval_grid_poles_dont_crash_hinf() {
        let sys = two_state_example();
        let v = hinf_grid(&sys, (1e-3, 1e3), 100).unwrap();
        assert!(v > 0.0);
    }
}
