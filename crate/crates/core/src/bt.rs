//! Balancing square-root compression of data quadruplets.
//!
//! All variants share one kernel: weight the quadruplet's E matrix with
//! Gramian factors, take the SVD, and project the quadruplet onto the
//! leading singular directions. QuadBT draws its factors from quadrature
//! weights; the shift-based variants draw them from PORK Gramians (exact
//! Cholesky factors, or the diagonal light-mode shortcut for lightly damped
//! shifts).

use crate::dense::{cholesky, lyap_ct, stein_dt, svd, ComplexMatrix, SylvesterMode};
use crate::error::{Error, Result};
use crate::pork::{
    block_data_input, block_data_output, dt_barred_input, dt_barred_output, light_gramians,
};
use crate::quadrature::{QuadratureRule, ShiftSet};
use crate::quadruplet::{build_loewner, DataQuadruplet, InterpolationData, LoewnerStructure, QuadrupletKind, realify};
use crate::sampling::{acquire_samples, SampleSet, SampleSource};
use crate::system::{Domain, StateSpace};
use num_complex::Complex64;

/// Hankel spectrum estimates and non-intrusive quality monitors.
#[derive(Clone, Debug)]
pub struct BtReport {
    /// Full singular value diagonal of the weighted E matrix, nonincreasing.
    pub hsv_estimates: Vec<f64>,
    /// Numerical rank at the 1e-12 relative cutoff.
    pub numerical_rank: usize,
    /// Reduced order actually used.
    pub reduced_order: usize,
    /// `trace(Cq Qs^{-1} Cq^*)`, the input-side Gramian quality monitor.
    pub input_monitor: f64,
    /// `trace(Bq^* Ps^{-1} Bq)`, the output-side monitor.
    pub output_monitor: f64,
}

/// Square-root balancing of a quadruplet against factor matrices
/// `L_p`, `L_q` with `L L^*` the respective inverse shift Gramians (or
/// diagonal quadrature weights).
///
/// `rank` defaults to the largest order with a relative singular value
/// above 1e-10.
pub fn balance_compress(
    q: &DataQuadruplet,
    l_p: &ComplexMatrix,
    l_q: &ComplexMatrix,
    rank: Option<usize>,
) -> Result<(StateSpace, BtReport)> {
    if l_p.rows() != q.eq.cols() || l_q.rows() != q.eq.rows() {
        return Err(Error::DimensionMismatch(format!(
            "factors {}x{} / {}x{} against E {}x{}",
            l_p.rows(),
            l_p.cols(),
            l_q.rows(),
            l_q.cols(),
            q.eq.rows(),
            q.eq.cols()
        )));
    }
    let x = &(&l_q.adjoint() * &q.eq) * l_p;
    let f = svd(&x)?;
    let hard_rank = f.rank(1e-12);
    let r = match rank {
        Some(r) => {
            if r > hard_rank {
                return Err(Error::RankTooLow {
                    requested: r,
                    rank: hard_rank,
                });
            }
            r
        }
        None => f.rank(1e-10),
    };
    let sqrt_inv = ComplexMatrix::from_fn(r, r, |i, j| {
        if i == j {
            Complex64::new(1.0 / f.s[i].sqrt(), 0.0)
        } else {
            Complex64::default()
        }
    });
    let w_r = &(l_q * &f.u.take_columns(r)) * &sqrt_inv;
    let v_r = &(l_p * &f.v.take_columns(r)) * &sqrt_inv;
    let rom = StateSpace::new(
        &(&w_r.adjoint() * &q.eq) * &v_r,
        &(&w_r.adjoint() * &q.aq) * &v_r,
        &w_r.adjoint() * &q.bq,
        &q.cq * &v_r,
        q.provenance.domain,
    )?;
    let (input_monitor, output_monitor) = gramian_monitor(q, l_p, l_q)?;
    Ok((
        rom,
        BtReport {
            hsv_estimates: f.s,
            numerical_rank: hard_rank,
            reduced_order: r,
            input_monitor,
            output_monitor,
        },
    ))
}

/// Non-intrusive Gramian quality monitors
/// `(trace(Cq Qs^{-1} Cq^*), trace(Bq^* Ps^{-1} Bq))` from inverse factors.
/// Both grow monotonically as points are added and approach the squared H2
/// norm of the underlying system.
pub fn gramian_monitor(
    q: &DataQuadruplet,
    l_p: &ComplexMatrix,
    l_q: &ComplexMatrix,
) -> Result<(f64, f64)> {
    if l_p.rows() != q.cq.cols() || l_q.rows() != q.bq.rows() {
        return Err(Error::DimensionMismatch(
            "monitor factors do not match quadruplet".into(),
        ));
    }
    let cin = &q.cq * l_p;
    let bout = &l_q.adjoint() * &q.bq;
    Ok((
        cin.frobenius_norm().powi(2),
        bout.frobenius_norm().powi(2),
    ))
}

/// Which factor construction a shift-based compression uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GramianMode {
    /// Cholesky factors of the closed-form shift Gramian inverses.
    Exact,
    /// Diagonal factors from the shift real parts / moduli; valid for
    /// lightly damped shifts.
    Light,
}

/// Frequency-domain and time-domain quadrature-based balanced truncation.
///
/// The rules must cover the quadruplet's provenance grids: Loewner
/// quadruplets match node frequencies (continuous: `|Im|` of the points;
/// discrete: the phase of the unit-circle points), impulse quadruplets match
/// time nodes. Hankel quadruplets need no rule (unit weights).
pub fn quadbt(
    q: &DataQuadruplet,
    rule_p: Option<&QuadratureRule>,
    rule_q: Option<&QuadratureRule>,
    rank: Option<usize>,
) -> Result<(StateSpace, BtReport)> {
    let (l_p, l_q) = match q.kind {
        QuadrupletKind::HankelDt => (
            ComplexMatrix::identity(q.eq.cols()),
            ComplexMatrix::identity(q.eq.rows()),
        ),
        QuadrupletKind::Loewner | QuadrupletKind::ImpulseCt => {
            let rp = rule_p.ok_or_else(|| Error::GridMismatch("missing right rule".into()))?;
            let rq = rule_q.ok_or_else(|| Error::GridMismatch("missing left rule".into()))?;
            let frequency = q.kind == QuadrupletKind::Loewner;
            let fp = node_factors(q, &q.provenance.right_points, rp, frequency)?;
            let fq = node_factors(q, &q.provenance.left_points, rq, frequency)?;
            (
                diag_factor(&fp, q.block_cols()),
                diag_factor(&fq, q.block_rows()),
            )
        }
    };
    balance_compress(q, &l_p, &l_q, rank)
}

fn diag_factor(entries: &[f64], block: usize) -> ComplexMatrix {
    let d = ComplexMatrix::diag(
        &entries
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect::<Vec<_>>(),
    );
    if block == 1 {
        d
    } else {
        d.kron(&ComplexMatrix::identity(block))
    }
}

/// Squared per-point factors aligned with provenance, for projector blocks.
pub(crate) fn node_factors_sq(
    q: &DataQuadruplet,
    points: &[Complex64],
    rule: &QuadratureRule,
    frequency: bool,
) -> Result<Vec<f64>> {
    Ok(node_factors(q, points, rule, frequency)?
        .into_iter()
        .map(|g| g * g)
        .collect())
}

/// Per-provenance-point Gramian factors looked up from a rule's nodes.
fn node_factors(
    q: &DataQuadruplet,
    points: &[Complex64],
    rule: &QuadratureRule,
    frequency: bool,
) -> Result<Vec<f64>> {
    let factors = rule.gramian_factors(frequency);
    let mut out = Vec::with_capacity(points.len());
    for &pt in points {
        let key = match (q.kind, q.provenance.domain) {
            (QuadrupletKind::ImpulseCt, _) => pt.re,
            (_, Domain::Continuous) => {
                if pt.re.abs() > 1e-9 * pt.norm() {
                    return Err(Error::GridMismatch(format!(
                        "point {pt} is not on the imaginary axis"
                    )));
                }
                pt.im.abs()
            }
            (_, Domain::Discrete) => {
                if (pt.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::GridMismatch(format!(
                        "point {pt} is not on the unit circle"
                    )));
                }
                pt.arg()
            }
        };
        let hit = rule
            .nodes
            .iter()
            .position(|&n| (n - key).abs() <= 1e-9 * n.abs().max(key.abs()).max(1e-12));
        match hit {
            Some(i) => out.push(factors[i]),
            None => {
                return Err(Error::GridMismatch(format!(
                    "no quadrature node for point {pt} (key {key})"
                )))
            }
        }
    }
    Ok(out)
}

/// Options shared by the shift-driven compressions.
#[derive(Clone, Debug, Default)]
pub struct CompressOptions {
    pub rank: Option<usize>,
    /// Tangential directions; block interpolation when absent.
    pub directions: Option<InterpolationData>,
    /// Produce a real reduced model from conjugate-closed data.
    pub realify: bool,
}

/// Data-driven balanced truncation from right-half-plane samples.
///
/// Builds the Loewner quadruplet at the shift points, forms the inverse
/// shift-Gramian factors (exact or light), and compresses. Tangential
/// directions are normalized to unit length before the build so the light
/// factors stay valid.
pub fn dd_adi_bt(
    right: &SampleSet,
    left: &SampleSet,
    shifts_p: &ShiftSet,
    shifts_q: &ShiftSet,
    mode: GramianMode,
    opts: &CompressOptions,
) -> Result<(StateSpace, BtReport)> {
    if shifts_p.domain != Domain::Continuous || shifts_q.domain != Domain::Continuous {
        return Err(Error::DomainMismatch {
            expected: "continuous".into(),
            got: "discrete".into(),
        });
    }
    shifts_p.validate()?;
    shifts_q.validate()?;
    let (q, m_width, p_width, interp) = shift_quadruplet(right, left, shifts_p, shifts_q, opts)?;
    let l_p = match mode {
        GramianMode::Light => light_gramians(shifts_p)?.factor_matrix(m_width),
        GramianMode::Exact => {
            let (s, l) = input_data(&shifts_p.shifts, m_width, interp.as_ref());
            let qs = lyap_ct(&s, &(&l.adjoint() * &l), SylvesterMode::DiagonalClosedForm)?;
            exact_inverse_factor(&qs)?
        }
    };
    let l_q = match mode {
        GramianMode::Light => light_gramians(shifts_q)?.factor_matrix(p_width),
        GramianMode::Exact => {
            let (s, l) = output_data(&shifts_q.shifts, p_width, interp.as_ref());
            let ps = lyap_ct(&s.adjoint(), &(&l * &l.adjoint()), SylvesterMode::DiagonalClosedForm)?;
            exact_inverse_factor(&ps)?
        }
    };
    compress_maybe_real(&q, &l_p, &l_q, opts)
}

/// Discrete-time PORK-based balanced truncation from samples outside the
/// unit circle.
pub fn dd_pork_dtbt(
    right: &SampleSet,
    left: &SampleSet,
    shifts_p: &ShiftSet,
    shifts_q: &ShiftSet,
    mode: GramianMode,
    opts: &CompressOptions,
) -> Result<(StateSpace, BtReport)> {
    if shifts_p.domain != Domain::Discrete || shifts_q.domain != Domain::Discrete {
        return Err(Error::DomainMismatch {
            expected: "discrete".into(),
            got: "continuous".into(),
        });
    }
    shifts_p.validate()?;
    shifts_q.validate()?;
    let (q, m_width, p_width, interp) = shift_quadruplet(right, left, shifts_p, shifts_q, opts)?;
    let l_p = match mode {
        GramianMode::Light => light_gramians(shifts_p)?.factor_matrix(m_width),
        GramianMode::Exact => {
            let (s, l) = input_data(&shifts_p.shifts, m_width, interp.as_ref());
            let (sb, lb) = dt_barred_input(&s, &l)?;
            let qs = stein_dt(&sb, &(&lb.adjoint() * &lb), SylvesterMode::DiagonalClosedForm)?;
            exact_inverse_factor(&qs)?
        }
    };
    let l_q = match mode {
        GramianMode::Light => light_gramians(shifts_q)?.factor_matrix(p_width),
        GramianMode::Exact => {
            let (s, l) = output_data(&shifts_q.shifts, p_width, interp.as_ref());
            let (sb, lb) = dt_barred_output(&s, &l)?;
            let ps = stein_dt(&sb.adjoint(), &(&lb * &lb.adjoint()), SylvesterMode::DiagonalClosedForm)?;
            exact_inverse_factor(&ps)?
        }
    };
    compress_maybe_real(&q, &l_p, &l_q, opts)
}

fn input_data(
    points: &[Complex64],
    m: usize,
    interp: Option<&InterpolationData>,
) -> (ComplexMatrix, ComplexMatrix) {
    match interp {
        Some(i) => (ComplexMatrix::diag(&i.sigma), i.b.clone()),
        None => block_data_input(points, m),
    }
}

fn output_data(
    points: &[Complex64],
    p: usize,
    interp: Option<&InterpolationData>,
) -> (ComplexMatrix, ComplexMatrix) {
    match interp {
        Some(i) => (ComplexMatrix::diag(&i.mu), i.c.clone()),
        None => block_data_output(points, p),
    }
}

fn exact_inverse_factor(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let chol = cholesky(g)
        .map_err(|_| Error::NotPositiveDefinite("shift gramian".into()))?;
    let d: Vec<f64> = (0..chol.rows()).map(|i| chol[(i, i)].re).collect();
    let hi = d.iter().cloned().fold(0.0, f64::max);
    let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = (hi / lo) * (hi / lo);
    if cond > 1e12 {
        return Err(Error::GramianIllConditioned { cond });
    }
    crate::dense::solve(&chol.adjoint(), &ComplexMatrix::identity(g.rows()))
}

/// Assemble the ordered sample data and Loewner quadruplet for a shift pair.
fn shift_quadruplet(
    right: &SampleSet,
    left: &SampleSet,
    shifts_p: &ShiftSet,
    shifts_q: &ShiftSet,
    opts: &CompressOptions,
) -> Result<(DataQuadruplet, usize, usize, Option<InterpolationData>)> {
    // Derivatives are needed wherever the two point sets touch.
    let coincidences: Vec<Complex64> = shifts_p
        .shifts
        .iter()
        .filter(|&&s| {
            shifts_q
                .shifts
                .iter()
                .any(|&m| crate::sampling::points_coincide(s, m))
        })
        .copied()
        .collect();
    let right_ord = acquire_samples(SampleSource::Stored(right), &shifts_p.shifts, &coincidences)?;
    let left_ord = acquire_samples(SampleSource::Stored(left), &shifts_q.shifts, &coincidences)?;
    match &opts.directions {
        Some(dirs) => {
            if dirs.sigma.len() != shifts_p.shifts.len() || dirs.mu.len() != shifts_q.shifts.len() {
                return Err(Error::GridMismatch(
                    "tangential directions do not match shift counts".into(),
                ));
            }
            for (a, b) in dirs.sigma.iter().zip(shifts_p.shifts.iter()) {
                if !crate::sampling::points_coincide(*a, *b) {
                    return Err(Error::GridMismatch(format!(
                        "tangential point {a} differs from shift {b}"
                    )));
                }
            }
            let dirs = dirs.normalized();
            let q = build_loewner(&right_ord, &left_ord, LoewnerStructure::Tangential(&dirs))?;
            Ok((q, 1, 1, Some(dirs)))
        }
        None => {
            let q = build_loewner(&right_ord, &left_ord, LoewnerStructure::Block)?;
            Ok((q, right.inputs, right.outputs, None))
        }
    }
}

fn compress_maybe_real(
    q: &DataQuadruplet,
    l_p: &ComplexMatrix,
    l_q: &ComplexMatrix,
    opts: &CompressOptions,
) -> Result<(StateSpace, BtReport)> {
    if !opts.realify {
        return balance_compress(q, l_p, l_q, opts.rank);
    }
    let (qr, tv, tw) = realify(q)?;
    // Transform the factor Gram matrices into the paired basis; conjugate
    // pairs carry equal weights so the result is real positive definite.
    let gp = &(&tv.adjoint() * &(l_p * &l_p.adjoint())) * &tv;
    let gq = &(&tw.adjoint() * &(l_q * &l_q.adjoint())) * &tw;
    let scale = gp.max_abs().max(gq.max_abs()).max(1e-300);
    if gp.max_imag().max(gq.max_imag()) > 1e-8 * scale {
        return Err(Error::NotConjugateClosed {
            point: Complex64::new(gp.max_imag(), 0.0),
        });
    }
    let l_p_real = cholesky(&gp.into_real())?;
    let l_q_real = cholesky(&gq.into_real())?;
    balance_compress(&qr, &l_p_real, &l_q_real, opts.rank)
}
