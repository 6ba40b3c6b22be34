//! Data quadruplets: the raw objects every reduction algorithm compresses.
//!
//! A quadruplet `(Eq, Aq, Bq, Cq)` is a state-space realization of a rational
//! interpolant assembled purely from response data. Three kinds exist: the
//! Loewner form from transfer-function samples (one formula serves real-axis,
//! imaginary-axis, and unit-circle point sets), the continuous-time impulse
//! form, and the discrete-time Hankel form. The module also provides
//! realification of conjugate-closed quadruplets and the signal-generator
//! trajectory estimator that produces an interpolant from recorded
//! input-output data.

use crate::dense::{expm, solve, svd, ComplexMatrix, Lu};
use crate::error::{Error, Result};
use crate::sampling::{points_coincide, SampleSet};
use crate::system::{Domain, StateSpace};
use num_complex::Complex64;

/// Interpolation points with tangential directions.
///
/// `b` holds `b_i` as columns (m x r); `c` holds `c_i` as rows (r x p).
#[derive(Clone, Debug)]
pub struct InterpolationData {
    pub sigma: Vec<Complex64>,
    pub mu: Vec<Complex64>,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

impl InterpolationData {
    /// Scalar directions, identical left/right points.
    pub fn siso(points: Vec<Complex64>) -> Self {
        let r = points.len();
        let ones = ComplexMatrix::from_fn(1, r, |_, _| Complex64::new(1.0, 0.0));
        Self {
            sigma: points.clone(),
            mu: points,
            b: ones.clone(),
            c: ones.transpose(),
        }
    }

    pub fn new(
        sigma: Vec<Complex64>,
        mu: Vec<Complex64>,
        b: ComplexMatrix,
        c: ComplexMatrix,
    ) -> Result<Self> {
        if b.cols() != sigma.len() || c.rows() != mu.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} right points vs {} right directions; {} left points vs {} left directions",
                sigma.len(),
                b.cols(),
                mu.len(),
                c.rows()
            )));
        }
        for j in 0..b.cols() {
            if b.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>() == 0.0 {
                return Err(Error::BadParams(format!("zero right direction {j}")));
            }
        }
        for i in 0..c.rows() {
            if c.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>() == 0.0 {
                return Err(Error::BadParams(format!("zero left direction {i}")));
            }
        }
        Ok(Self { sigma, mu, b, c })
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Clamp interpolation data onto the conjugate-closed manifold.
    ///
    /// When the right points pair up under conjugation (within a relative
    /// 1e-8), each pair is replaced by an exact conjugate pair of points and
    /// directions, and near-real points are snapped to the real axis with
    /// phase-normalized directions. Data that does not pair up is returned
    /// unchanged. This keeps fixed-point iterations on real systems from
    /// flip-flopping between conjugate configurations.
    pub fn symmetrized(&self) -> Self {
        let pts = &self.sigma;
        let scale = pts.iter().map(|z| z.norm()).fold(1e-300, f64::max);
        let tol = 1e-8 * scale;
        let mut used = vec![false; pts.len()];
        let mut plan: Vec<(usize, Option<usize>)> = Vec::new();
        for i in 0..pts.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            if pts[i].im.abs() <= tol {
                plan.push((i, None));
                continue;
            }
            let partner = (0..pts.len())
                .find(|&j| !used[j] && (pts[j] - pts[i].conj()).norm() <= tol);
            match partner {
                Some(j) => {
                    used[j] = true;
                    if pts[i].im > 0.0 {
                        plan.push((i, Some(j)));
                    } else {
                        plan.push((j, Some(i)));
                    }
                }
                None => return self.clone(),
            }
        }
        let mut out = self.clone();
        for &(i, pair) in &plan {
            match pair {
                None => {
                    // Directions keep their phases; the residue pairing
                    // b_i c_i feeds the error tracking and must survive.
                    out.sigma[i] = Complex64::new(out.sigma[i].re, 0.0);
                    out.mu[i] = out.sigma[i];
                }
                Some(j) => {
                    out.sigma[j] = out.sigma[i].conj();
                    out.mu[i] = out.sigma[i];
                    out.mu[j] = out.sigma[j];
                    for k in 0..out.b.rows() {
                        out.b[(k, j)] = out.b[(k, i)].conj();
                    }
                    for k in 0..out.c.cols() {
                        out.c[(j, k)] = out.c[(i, k)].conj();
                    }
                }
            }
        }
        out
    }

    /// Normalize every direction to unit Euclidean norm.
    pub fn normalized(&self) -> Self {
        let mut b = self.b.clone();
        for j in 0..b.cols() {
            let n = b.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..b.rows() {
                b[(i, j)] = b[(i, j)].scale(1.0 / n);
            }
        }
        let mut c = self.c.clone();
        for i in 0..c.rows() {
            let n = c.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for j in 0..c.cols() {
                c[(i, j)] = c[(i, j)].scale(1.0 / n);
            }
        }
        Self {
            sigma: self.sigma.clone(),
            mu: self.mu.clone(),
            b,
            c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadrupletKind {
    Loewner,
    ImpulseCt,
    HankelDt,
}

/// Point sets and directions a quadruplet was built from.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub right_points: Vec<Complex64>,
    pub left_points: Vec<Complex64>,
    /// Right directions as columns, when tangential.
    pub right_dirs: Option<ComplexMatrix>,
    /// Left directions as rows, when tangential.
    pub left_dirs: Option<ComplexMatrix>,
    pub domain: Domain,
    /// Set once a realification transform has been applied; point lists then
    /// refer to the pre-transform data.
    pub realified: bool,
}

/// The four data matrices plus provenance.
#[derive(Clone, Debug)]
pub struct DataQuadruplet {
    pub eq: ComplexMatrix,
    pub aq: ComplexMatrix,
    pub bq: ComplexMatrix,
    pub cq: ComplexMatrix,
    pub kind: QuadrupletKind,
    pub provenance: Provenance,
}

impl DataQuadruplet {
    /// Row-block height (outputs per left point).
    pub fn block_rows(&self) -> usize {
        self.eq.rows() / self.provenance.left_points.len().max(1)
    }

    /// Column-block width (inputs per right point).
    pub fn block_cols(&self) -> usize {
        self.eq.cols() / self.provenance.right_points.len().max(1)
    }

    /// Evaluate the interpolant `Cq (s Eq - Aq)^{-1} Bq`.
    pub fn interpolant_eval(&self, s: Complex64) -> Result<ComplexMatrix> {
        let m = &self.eq.scale(s) - &self.aq;
        let lu = Lu::factor(&m).map_err(|_| Error::PointIsPole { point: s })?;
        Ok(&self.cq * &lu.solve(&self.bq)?)
    }

    /// The interpolant as a state-space object.
    pub fn as_state_space(&self) -> Result<StateSpace> {
        StateSpace::new(
            self.eq.clone(),
            self.aq.clone(),
            self.bq.clone(),
            self.cq.clone(),
            self.provenance.domain,
        )
    }
}

/// Direction structure for the Loewner build.
pub enum LoewnerStructure<'a> {
    /// Full matrix samples; directions are implicit identity blocks.
    Block,
    /// Tangential samples along the directions in the interpolation data.
    Tangential(&'a InterpolationData),
}

/// Assemble a Loewner quadruplet from right samples at `sigma_j` (columns)
/// and left samples at `mu_i` (rows).
///
/// Entry `(i, j)` of `Eq` is `-(c_i G(sigma_j) b_j - c_i G(mu_i) b_j) /
/// (sigma_j - mu_i)`; `Aq` carries the shifted divided difference. A
/// coincident pair `sigma_j = mu_i` switches to Hermite data:
/// `-c_i G'(sigma_j) b_j` and `-(c_i G(sigma_j) b_j + sigma_j c_i G'(sigma_j)
/// b_j)`. The same formula serves every point geometry; only the point sets
/// differ.
pub fn build_loewner(
    right: &SampleSet,
    left: &SampleSet,
    structure: LoewnerStructure,
) -> Result<DataQuadruplet> {
    if right.outputs != left.outputs || right.inputs != left.inputs {
        return Err(Error::DimensionMismatch(
            "right/left sample dimensions differ".into(),
        ));
    }
    let (p, m) = (right.outputs, right.inputs);
    match structure {
        LoewnerStructure::Block => {
            let sigma = right.points();
            let mu = left.points();
            let (np, nq) = (sigma.len(), mu.len());
            let mut eq = ComplexMatrix::zeros(nq * p, np * m);
            let mut aq = ComplexMatrix::zeros(nq * p, np * m);
            for (i, &mui) in mu.iter().enumerate() {
                let g_mu = left.value_at(mui)?;
                for (j, &sj) in sigma.iter().enumerate() {
                    let g_s = right.value_at(sj)?;
                    let (eblk, ablk) = if points_coincide(sj, mui) {
                        let gp = right
                            .derivative_at(sj)
                            .or_else(|_| left.derivative_at(mui))?;
                        let e = gp.scale(Complex64::new(-1.0, 0.0));
                        let a = &e.scale(sj) - g_s;
                        (e, a)
                    } else {
                        let inv = (sj - mui).inv();
                        let e = (&(g_s - g_mu)).scale(-inv);
                        let a = (&(&g_s.scale(sj) - &g_mu.scale(mui))).scale(-inv);
                        (e, a)
                    };
                    eq.set_block(i * p, j * m, &eblk);
                    aq.set_block(i * p, j * m, &ablk);
                }
            }
            let mut bq = ComplexMatrix::zeros(nq * p, m);
            for (i, &mui) in mu.iter().enumerate() {
                bq.set_block(i * p, 0, left.value_at(mui)?);
            }
            let mut cq = ComplexMatrix::zeros(p, np * m);
            for (j, &sj) in sigma.iter().enumerate() {
                cq.set_block(0, j * m, right.value_at(sj)?);
            }
            finish_quadruplet(eq, aq, bq, cq, sigma, mu, None, None, right.domain)
        }
        LoewnerStructure::Tangential(interp) => {
            let sigma = interp.sigma.clone();
            let mu = interp.mu.clone();
            if interp.b.rows() != m || interp.c.cols() != p {
                return Err(Error::DimensionMismatch(
                    "direction sizes do not match sample dimensions".into(),
                ));
            }
            let (np, nq) = (sigma.len(), mu.len());
            // Precompute c_i G(mu_i) rows and G(sigma_j) b_j columns.
            let mut left_rows = Vec::with_capacity(nq);
            for (i, &mui) in mu.iter().enumerate() {
                let ci = ComplexMatrix::from_fn(1, p, |_, k| interp.c[(i, k)]);
                left_rows.push(&ci * left.value_at(mui)?);
            }
            let mut right_cols = Vec::with_capacity(np);
            for (j, &sj) in sigma.iter().enumerate() {
                let bj = ComplexMatrix::from_fn(m, 1, |k, _| interp.b[(k, j)]);
                right_cols.push(right.value_at(sj)? * &bj);
            }
            let mut eq = ComplexMatrix::zeros(nq, np);
            let mut aq = ComplexMatrix::zeros(nq, np);
            for (i, &mui) in mu.iter().enumerate() {
                let ci = ComplexMatrix::from_fn(1, p, |_, k| interp.c[(i, k)]);
                for (j, &sj) in sigma.iter().enumerate() {
                    let bj = ComplexMatrix::from_fn(m, 1, |k, _| interp.b[(k, j)]);
                    // c_i G(sigma_j) b_j and c_i G(mu_i) b_j
                    let cgs = (&(&ci * right.value_at(sj)?) * &bj)[(0, 0)];
                    let cgm = (&left_rows[i] * &bj)[(0, 0)];
                    if points_coincide(sj, mui) {
                        let gp = right
                            .derivative_at(sj)
                            .or_else(|_| left.derivative_at(mui))?;
                        let cgpb = (&(&ci * gp) * &bj)[(0, 0)];
                        eq[(i, j)] = -cgpb;
                        aq[(i, j)] = -(cgs + sj * cgpb);
                    } else {
                        let inv = (sj - mui).inv();
                        eq[(i, j)] = -(cgs - cgm) * inv;
                        aq[(i, j)] = -(sj * cgs - mui * cgm) * inv;
                    }
                }
            }
            let mut bq = ComplexMatrix::zeros(nq, m);
            for (i, row) in left_rows.iter().enumerate() {
                bq.set_block(i, 0, row);
            }
            let mut cq = ComplexMatrix::zeros(p, np);
            for (j, col) in right_cols.iter().enumerate() {
                cq.set_block(0, j, col);
            }
            finish_quadruplet(
                eq,
                aq,
                bq,
                cq,
                sigma,
                mu,
                Some(interp.b.clone()),
                Some(interp.c.clone()),
                right.domain,
            )
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_quadruplet(
    eq: ComplexMatrix,
    aq: ComplexMatrix,
    bq: ComplexMatrix,
    cq: ComplexMatrix,
    right_points: Vec<Complex64>,
    left_points: Vec<Complex64>,
    right_dirs: Option<ComplexMatrix>,
    left_dirs: Option<ComplexMatrix>,
    domain: Domain,
) -> Result<DataQuadruplet> {
    for m in [&eq, &aq, &bq, &cq] {
        if !m.is_finite() {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
    }
    Ok(DataQuadruplet {
        eq,
        aq,
        bq,
        cq,
        kind: QuadrupletKind::Loewner,
        provenance: Provenance {
            right_points,
            left_points,
            right_dirs,
            left_dirs,
            domain,
            realified: false,
        },
    })
}

/// Impulse-response quadruplet: `Eq[i,j] = h(tau_i + t_j)`,
/// `Aq[i,j] = h'(tau_i + t_j)`, `Bq` stacks `h(tau_i)`, `Cq` lines up
/// `h(t_j)`. The sample set must cover every pairwise sum with derivatives.
pub fn build_impulse_ct(
    samples: &SampleSet,
    t_grid: &[f64],
    tau_grid: &[f64],
) -> Result<DataQuadruplet> {
    let (p, m) = (samples.outputs, samples.inputs);
    let (np, nq) = (t_grid.len(), tau_grid.len());
    // Time points are real; a sorted index makes the dense grid of pairwise
    // sums cheap to look up.
    let mut index: Vec<(f64, usize)> = samples
        .samples
        .iter()
        .enumerate()
        .map(|(k, s)| (s.point.re, k))
        .collect();
    index.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let lookup = |t: f64| -> Result<&crate::sampling::Sample> {
        let pos = index.partition_point(|&(key, _)| key < t);
        for cand in pos.saturating_sub(1)..(pos + 1).min(index.len()) {
            let (key, k) = index[cand];
            if (key - t).abs() <= 1e-12 * key.abs().max(t.abs()).max(1e-300) {
                return Ok(&samples.samples[k]);
            }
        }
        Err(Error::MissingSample {
            point: Complex64::new(t, 0.0),
        })
    };
    let mut eq = ComplexMatrix::zeros(nq * p, np * m);
    let mut aq = ComplexMatrix::zeros(nq * p, np * m);
    for (i, &tau) in tau_grid.iter().enumerate() {
        for (j, &t) in t_grid.iter().enumerate() {
            let sample = lookup(tau + t)?;
            let hp = sample.derivative.as_ref().ok_or(Error::MissingDerivative {
                point: Complex64::new(tau + t, 0.0),
            })?;
            eq.set_block(i * p, j * m, &sample.value);
            aq.set_block(i * p, j * m, hp);
        }
    }
    let mut bq = ComplexMatrix::zeros(nq * p, m);
    for (i, &tau) in tau_grid.iter().enumerate() {
        bq.set_block(i * p, 0, &lookup(tau)?.value);
    }
    let mut cq = ComplexMatrix::zeros(p, np * m);
    for (j, &t) in t_grid.iter().enumerate() {
        cq.set_block(0, j * m, &lookup(t)?.value);
    }
    Ok(DataQuadruplet {
        eq,
        aq,
        bq,
        cq,
        kind: QuadrupletKind::ImpulseCt,
        provenance: Provenance {
            right_points: t_grid.iter().map(|&t| Complex64::new(t, 0.0)).collect(),
            left_points: tau_grid.iter().map(|&t| Complex64::new(t, 0.0)).collect(),
            right_dirs: None,
            left_dirs: None,
            domain: Domain::Continuous,
            realified: false,
        },
    })
}

/// Discrete-time Hankel quadruplet from Markov parameters
/// `h(0) .. h(n_p + n_q - 1)`.
///
/// `Eq[i,j] = h(i+j)` over `n_q x n_p` blocks, `Aq` the shifted Hankel
/// `h(i+j+1)`, `Bq` the first block column of `Eq` and `Cq` its first block
/// row, so the quadruplet reduces consistently.
pub fn build_hankel_dt(h: &[ComplexMatrix], n_p: usize, n_q: usize) -> Result<DataQuadruplet> {
    if n_p == 0 || n_q == 0 {
        return Err(Error::BadParams("hankel needs n_p, n_q >= 1".into()));
    }
    if h.len() < n_p + n_q {
        return Err(Error::TooFewSamples {
            need: n_p + n_q,
            have: h.len(),
        });
    }
    let (p, m) = (h[0].rows(), h[0].cols());
    let mut eq = ComplexMatrix::zeros(n_q * p, n_p * m);
    let mut aq = ComplexMatrix::zeros(n_q * p, n_p * m);
    for i in 0..n_q {
        for j in 0..n_p {
            eq.set_block(i * p, j * m, &h[i + j]);
            aq.set_block(i * p, j * m, &h[i + j + 1]);
        }
    }
    let bq = eq.block(0, 0, n_q * p, m);
    let cq = eq.block(0, 0, p, n_p * m);
    Ok(DataQuadruplet {
        eq,
        aq,
        bq,
        cq,
        kind: QuadrupletKind::HankelDt,
        provenance: Provenance {
            right_points: (0..n_p).map(|k| Complex64::new(k as f64, 0.0)).collect(),
            left_points: (0..n_q).map(|k| Complex64::new(k as f64, 0.0)).collect(),
            right_dirs: None,
            left_dirs: None,
            domain: Domain::Discrete,
            realified: false,
        },
    })
}

/// Pairing of a conjugate-closed point list: `Real(i)` for points on the
/// real axis, `Pair(i, j)` for a conjugate pair with `im > 0` first.
pub(crate) fn conjugate_pairing(points: &[Complex64]) -> Result<Vec<PairEntry>> {
    let scale = points.iter().map(|z| z.norm()).fold(1e-300, f64::max);
    let mut used = vec![false; points.len()];
    let mut out = Vec::new();
    for (i, &pt) in points.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if pt.im.abs() <= 1e-12 * scale {
            out.push(PairEntry::Real(i));
            continue;
        }
        let partner = points
            .iter()
            .enumerate()
            .find(|&(j, &q)| !used[j] && (q - pt.conj()).norm() <= 1e-10 * scale)
            .map(|(j, _)| j);
        match partner {
            Some(j) => {
                used[j] = true;
                if pt.im > 0.0 {
                    out.push(PairEntry::Pair(i, j));
                } else {
                    out.push(PairEntry::Pair(j, i));
                }
            }
            None => return Err(Error::NotConjugateClosed { point: pt }),
        }
    }
    Ok(out)
}

pub(crate) enum PairEntry {
    Real(usize),
    Pair(usize, usize),
}

/// Unitary block transform taking conjugate-paired blocks to real
/// combinations: per pair the 2x2 map `[[1, -i], [1, i]] / sqrt(2)`.
pub(crate) fn pairing_transform(entries: &[PairEntry], n: usize, block: usize) -> ComplexMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut t = ComplexMatrix::zeros(n, n);
    for e in entries {
        match *e {
            PairEntry::Real(i) => t[(i, i)] = Complex64::new(1.0, 0.0),
            PairEntry::Pair(i, j) => {
                t[(i, i)] = Complex64::new(inv_sqrt2, 0.0);
                t[(j, i)] = Complex64::new(inv_sqrt2, 0.0);
                t[(i, j)] = Complex64::new(0.0, -inv_sqrt2);
                t[(j, j)] = Complex64::new(0.0, inv_sqrt2);
            }
        }
    }
    if block == 1 {
        t
    } else {
        t.kron(&ComplexMatrix::identity(block))
    }
}

/// Realify a conjugate-closed quadruplet.
///
/// Applies the conjugate-pair unitary on both sides, verifies the result is
/// real to rounding (relative 1e-10), and truncates the imaginary parts.
/// Downstream projections are unchanged up to similarity. Returns the
/// transformed quadruplet together with the right and left transforms, so
/// factor matrices built against the original ordering can be mapped.
pub fn realify(q: &DataQuadruplet) -> Result<(DataQuadruplet, ComplexMatrix, ComplexMatrix)> {
    let right_pairs = conjugate_pairing(&q.provenance.right_points)?;
    let left_pairs = conjugate_pairing(&q.provenance.left_points)?;
    let tv = pairing_transform(&right_pairs, q.provenance.right_points.len(), q.block_cols());
    let tw = pairing_transform(&left_pairs, q.provenance.left_points.len(), q.block_rows());
    let twa = tw.adjoint();
    let eq = &(&twa * &q.eq) * &tv;
    let aq = &(&twa * &q.aq) * &tv;
    let bq = &twa * &q.bq;
    let cq = &q.cq * &tv;
    let scale = eq
        .max_abs()
        .max(aq.max_abs())
        .max(bq.max_abs())
        .max(cq.max_abs())
        .max(1e-300);
    let imag = eq
        .max_imag()
        .max(aq.max_imag())
        .max(bq.max_imag())
        .max(cq.max_imag());
    if imag > 1e-10 * scale {
        return Err(Error::NotConjugateClosed {
            point: Complex64::new(imag, 0.0),
        });
    }
    let mut out = q.clone();
    out.eq = eq.into_real();
    out.aq = aq.into_real();
    out.bq = bq.into_real();
    out.cq = cq.into_real();
    out.provenance.realified = true;
    Ok((out, tv, tw))
}

/// Estimate a rational interpolant from recorded signal-generator data.
///
/// The generator `w' = S w, u = L w, w(0) = w0` excites the plant; `y` is
/// the recorded plant output on a uniform time grid with step `dt`. A least
/// squares fit of the output against the generator state over the selected
/// window produces the output map, and the interpolant is returned as
/// `(I, -S^T, L^T, fit)`. Its transfer function matches the plant at the
/// eigenvalues of `S`.
pub fn estimate_from_trajectories(
    s: &ComplexMatrix,
    l: &ComplexMatrix,
    w0: &ComplexMatrix,
    y: &ComplexMatrix,
    dt: f64,
    window_start: usize,
    window_len: usize,
) -> Result<StateSpace> {
    let ns = s.rows();
    if !s.is_square() || l.cols() != ns || w0.rows() != ns || w0.cols() != 1 {
        return Err(Error::DimensionMismatch(
            "generator matrices are inconsistent".into(),
        ));
    }
    if window_start + window_len > y.rows() {
        return Err(Error::BadParams(format!(
            "window {window_start}+{window_len} exceeds trajectory length {}",
            y.rows()
        )));
    }
    // Observability of (S, L) and controllability of (S, w0).
    let mut obs_blocks: Vec<ComplexMatrix> = Vec::with_capacity(ns);
    let mut row = l.clone();
    for _ in 0..ns {
        obs_blocks.push(row.clone());
        row = &row * s;
    }
    let obs = ComplexMatrix::vstack(&obs_blocks.iter().collect::<Vec<_>>());
    if svd(&obs)?.rank(1e-10) < ns {
        return Err(Error::UnobservableGenerator);
    }
    let mut ctr_blocks: Vec<ComplexMatrix> = Vec::with_capacity(ns);
    let mut col = w0.clone();
    for _ in 0..ns {
        ctr_blocks.push(col.clone());
        col = s * &col;
    }
    let ctr = ComplexMatrix::hstack(&ctr_blocks.iter().collect::<Vec<_>>());
    if svd(&ctr)?.rank(1e-10) < ns {
        return Err(Error::NotControllable(
            "generator initial state excites a proper subspace".into(),
        ));
    }
    // Regenerate the generator trajectory exactly.
    let phi = expm(&s.scale(Complex64::new(dt, 0.0)))?;
    let mut w = w0.clone();
    let mut regressor = ComplexMatrix::zeros(window_len, ns);
    let mut response = ComplexMatrix::zeros(window_len, y.cols());
    for k in 0..window_start + window_len {
        if k >= window_start {
            let row = k - window_start;
            for j in 0..ns {
                regressor[(row, j)] = w[(j, 0)];
            }
            for j in 0..y.cols() {
                response[(row, j)] = y[(k, j)];
            }
        }
        w = &phi * &w;
    }
    // Least squares fit of the output against the generator state. The
    // trajectory grows exponentially, so equilibrate the regressor columns
    // before factorizing.
    let col_norms: Vec<f64> = (0..ns)
        .map(|j| {
            regressor
                .column(j)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    if col_norms.iter().any(|&n| n == 0.0) {
        return Err(Error::RankDeficientRegressor { rank: 0, need: ns });
    }
    let scaled = ComplexMatrix::from_fn(window_len, ns, |i, j| {
        regressor[(i, j)].scale(1.0 / col_norms[j])
    });
    let f = svd(&scaled)?;
    let rank = f.rank(1e-10);
    if rank < ns {
        return Err(Error::RankDeficientRegressor { rank, need: ns });
    }
    // x = V S^{-1} U^* y, then undo the column scaling.
    let uy = &f.u.adjoint() * &response;
    let mut scaled_solution = ComplexMatrix::zeros(ns, y.cols());
    for i in 0..ns {
        for j in 0..y.cols() {
            scaled_solution[(i, j)] = uy[(i, j)].scale(1.0 / f.s[i]);
        }
    }
    let x = &f.v * &scaled_solution;
    let fit = ComplexMatrix::from_fn(y.cols(), ns, |i, j| x[(j, i)].scale(1.0 / col_norms[j]));
    StateSpace::new(
        ComplexMatrix::identity(ns),
        s.transpose().scale(Complex64::new(-1.0, 0.0)),
        l.transpose(),
        fit,
        Domain::Continuous,
    )
}

/// Reconstruct the right-side Sylvester data `(S_b, L_b)` of a quadruplet
/// from provenance: `diag(points) (x) I` and stacked directions.
pub fn sylvester_data_right(q: &DataQuadruplet) -> (ComplexMatrix, ComplexMatrix) {
    let m = q.block_cols();
    let points = ComplexMatrix::diag(&q.provenance.right_points);
    let sb = points.kron(&ComplexMatrix::identity(m));
    let lb = match &q.provenance.right_dirs {
        Some(b) => b.clone(),
        None => {
            let ones = ComplexMatrix::from_fn(1, q.provenance.right_points.len(), |_, _| {
                Complex64::new(1.0, 0.0)
            });
            ones.kron(&ComplexMatrix::identity(m))
        }
    };
    (sb, lb)
}

/// Left-side Sylvester data `(S_c, L_c)` from provenance.
pub fn sylvester_data_left(q: &DataQuadruplet) -> (ComplexMatrix, ComplexMatrix) {
    let p = q.block_rows();
    let points = ComplexMatrix::diag(&q.provenance.left_points);
    let sc = points.kron(&ComplexMatrix::identity(p));
    let lc = match &q.provenance.left_dirs {
        Some(c) => c.clone(),
        None => {
            let ones = ComplexMatrix::from_fn(
                q.provenance.left_points.len(),
                1,
                |_, _| Complex64::new(1.0, 0.0),
            );
            ones.kron(&ComplexMatrix::identity(p))
        }
    };
    (sc, lc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{c64, eig};
    use crate::sampling::{acquire_samples, SampleSource};

    fn sample_siso(
        sys: &StateSpace,
        points: &[Complex64],
        deriv: &[Complex64],
    ) -> SampleSet {
        acquire_samples(SampleSource::Oracle(sys), points, deriv).unwrap()
    }

    fn first_order() -> StateSpace {
        StateSpace::siso_scalar(1.0, -1.0, 1.0, 1.0, Domain::Continuous)
    }

    #[test]
    fn loewner_distinct_points_frozen_entries() {
        // G = 1/(s+1), sigma = 1, mu = 2.
        let sys = first_order();
        let right = sample_siso(&sys, &[c64(1.0, 0.0)], &[]);
        let left = sample_siso(&sys, &[c64(2.0, 0.0)], &[]);
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        assert!((q.eq[(0, 0)] - c64(1.0 / 6.0, 0.0)).norm() < 1e-15);
        assert!((q.aq[(0, 0)] - c64(-1.0 / 6.0, 0.0)).norm() < 1e-15);
        assert!((q.bq[(0, 0)] - c64(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((q.cq[(0, 0)] - c64(0.5, 0.0)).norm() < 1e-15);
        // The order-1 interpolant reproduces G exactly.
        for s in [c64(0.3, 0.0), c64(5.0, 1.0)] {
            let g = sys.tf_eval(s).unwrap()[(0, 0)];
            let gi = q.interpolant_eval(s).unwrap()[(0, 0)];
            assert!((g - gi).norm() < 1e-14);
        }
    }

    #[test]
    fn loewner_confluent_hermite_entries() {
        let sys = first_order();
        let pts = [c64(1.0, 0.0)];
        let right = sample_siso(&sys, &pts, &pts);
        let left = sample_siso(&sys, &pts, &pts);
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        // -G'(1) = 1/4 and -(G(1) + 1*G'(1)) = -1/4.
        assert!((q.eq[(0, 0)] - c64(0.25, 0.0)).norm() < 1e-15);
        assert!((q.aq[(0, 0)] - c64(-0.25, 0.0)).norm() < 1e-15);
        for s in [c64(0.7, 0.2), c64(3.0, 0.0)] {
            let g = sys.tf_eval(s).unwrap()[(0, 0)];
            let gi = q.interpolant_eval(s).unwrap()[(0, 0)];
            assert!((g - gi).norm() < 1e-14);
        }
    }

    #[test]
    fn confluent_without_derivative_errors() {
        let sys = first_order();
        let pts = [c64(1.0, 0.0)];
        let right = sample_siso(&sys, &pts, &[]);
        let left = sample_siso(&sys, &pts, &[]);
        assert!(matches!(
            build_loewner(&right, &left, LoewnerStructure::Block),
            Err(Error::MissingDerivative { .. })
        ));
    }

    #[test]
    fn impulse_quadruplet_exponential() {
        // h(t) = exp(-t): Eq is the kernel matrix, Aq = -Eq, Bq/Cq the edges.
        let sys = first_order();
        let grid = [0.0, 1.0];
        let samples =
            crate::sampling::acquire_impulse_samples_ct(&sys, &grid, &grid).unwrap();
        let q = build_impulse_ct(&samples, &grid, &grid).unwrap();
        let e = (-1.0f64).exp();
        let want = [1.0, e, e, e * e];
        for i in 0..2 {
            for j in 0..2 {
                assert!((q.eq[(i, j)].re - want[i * 2 + j]).abs() < 1e-12);
                assert!((q.aq[(i, j)] + q.eq[(i, j)]).norm() < 1e-12);
            }
        }
        assert!((q.bq[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((q.bq[(1, 0)].re - e).abs() < 1e-12);
        assert!((q.cq[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((q.cq[(0, 1)].re - e).abs() < 1e-12);
    }

    #[test]
    fn hankel_quadruplet_geometric() {
        // Markov parameters of 1/(z - 0.5).
        let h: Vec<ComplexMatrix> = [1.0, 0.5, 0.25, 0.125]
            .iter()
            .map(|&v| ComplexMatrix::scalar(c64(v, 0.0)))
            .collect();
        let q = build_hankel_dt(&h, 2, 2).unwrap();
        assert_eq!(q.eq.rows(), 2);
        let eq_want = [1.0, 0.5, 0.5, 0.25];
        let aq_want = [0.5, 0.25, 0.25, 0.125];
        for i in 0..2 {
            for j in 0..2 {
                assert!((q.eq[(i, j)].re - eq_want[i * 2 + j]).abs() < 1e-15);
                assert!((q.aq[(i, j)].re - aq_want[i * 2 + j]).abs() < 1e-15);
            }
        }
        assert!((q.bq[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((q.bq[(1, 0)].re - 0.5).abs() < 1e-15);
        assert!((q.cq[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hankel_finite_impulse_rank_one() {
        let h: Vec<ComplexMatrix> = [1.0, 0.0, 0.0, 0.0]
            .iter()
            .map(|&v| ComplexMatrix::scalar(c64(v, 0.0)))
            .collect();
        let q = build_hankel_dt(&h, 2, 2).unwrap();
        assert_eq!(q.eq[(0, 0)].re, 1.0);
        assert_eq!(q.eq[(1, 1)].re, 0.0);
        let f = svd(&q.eq).unwrap();
        assert_eq!(f.rank(1e-12), 1);
    }

    #[test]
    fn hankel_too_few_samples() {
        let h = vec![ComplexMatrix::scalar(c64(1.0, 0.0)); 3];
        assert!(matches!(
            build_hankel_dt(&h, 2, 2),
            Err(Error::TooFewSamples { need: 4, have: 3 })
        ));
    }

    #[test]
    fn hankel_rank_matches_system_order() {
        let sys = crate::system::random_stable(3, 1, 1, Domain::Discrete, 13).unwrap();
        let h = sys.impulse_dt_sequence(13).unwrap();
        let q = build_hankel_dt(&h, 6, 6).unwrap();
        assert_eq!(svd(&q.eq).unwrap().rank(1e-9), 3);
    }

    #[test]
    fn realify_conjugate_loewner() {
        let sys = crate::system::random_stable(2, 1, 1, Domain::Continuous, 77).unwrap();
        let sigma = [c64(1.0, 1.0), c64(1.0, -1.0)];
        let mu = [c64(2.0, 1.0), c64(2.0, -1.0)];
        let right = sample_siso(&sys, &sigma, &[]);
        let left = sample_siso(&sys, &mu, &[]);
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        let (qr, _, _) = realify(&q).unwrap();
        assert_eq!(qr.eq.max_imag(), 0.0);
        assert!(qr.provenance.realified);
        // Pencil eigenvalues are preserved by the similarity.
        let pencil = |q: &DataQuadruplet| {
            eig(&solve(&q.eq, &q.aq).unwrap()).unwrap().values
        };
        let before = pencil(&q);
        let after = pencil(&qr);
        for (a, b) in before.iter().zip(after.iter()) {
            assert!((a - b).norm() < 1e-10);
        }
        // Interpolant behavior unchanged.
        for s in [c64(0.5, 0.3), c64(4.0, -1.0)] {
            let g1 = q.interpolant_eval(s).unwrap()[(0, 0)];
            let g2 = qr.interpolant_eval(s).unwrap()[(0, 0)];
            assert!((g1 - g2).norm() < 1e-12);
        }
    }

    #[test]
    fn realify_already_real_is_identity() {
        let sys = first_order();
        let right = sample_siso(&sys, &[c64(1.0, 0.0)], &[]);
        let left = sample_siso(&sys, &[c64(2.0, 0.0)], &[]);
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        let (qr, _, _) = realify(&q).unwrap();
        assert!((&qr.eq - &q.eq).frobenius_norm() < 1e-15);
    }

    #[test]
    fn realify_rejects_open_point_set() {
        let sys = first_order();
        let right = sample_siso(&sys, &[c64(1.0, 1.0)], &[]);
        let left = sample_siso(&sys, &[c64(2.0, 0.0)], &[]);
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        assert!(matches!(realify(&q), Err(Error::NotConjugateClosed { .. })));
    }

    #[test]
    fn sylvester_relations_from_provenance() {
        // Aq = Eq S_b - Bq L_b and Aq = S_c Eq - L_c Cq.
        let sys = crate::system::random_stable(4, 2, 2, Domain::Continuous, 29).unwrap();
        let sigma = [c64(0.5, 0.4), c64(1.5, 0.0), c64(2.0, -0.7)];
        let mu = [c64(0.8, 0.0), c64(1.1, 0.9), c64(3.0, 0.0)];
        let right = acquire_samples(SampleSource::Oracle(&sys), &sigma, &[]).unwrap();
        let left = acquire_samples(SampleSource::Oracle(&sys), &mu, &[]).unwrap();
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        let (sb, lb) = sylvester_data_right(&q);
        let (sc, lc) = sylvester_data_left(&q);
        let r1 = &(&q.eq * &sb) - &(&q.bq * &lb);
        assert!((&r1 - &q.aq).frobenius_norm() < 1e-12 * q.aq.frobenius_norm());
        let r2 = &(&sc * &q.eq) - &(&lc * &q.cq);
        assert!((&r2 - &q.aq).frobenius_norm() < 1e-12 * q.aq.frobenius_norm());
    }

    #[test]
    fn square_block_quadruplet_interpolates() {
        let sys = crate::system::random_stable(6, 1, 1, Domain::Continuous, 51).unwrap();
        let sigma: Vec<Complex64> = (0..4).map(|k| c64(0.4 + 0.5 * k as f64, 0.0)).collect();
        let mu: Vec<Complex64> = (0..4).map(|k| c64(0.65 + 0.5 * k as f64, 0.0)).collect();
        let right = acquire_samples(SampleSource::Oracle(&sys), &sigma, &[]).unwrap();
        let left = acquire_samples(SampleSource::Oracle(&sys), &mu, &[]).unwrap();
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        for &s in sigma.iter().chain(mu.iter()) {
            let g = sys.tf_eval(s).unwrap()[(0, 0)];
            let gi = q.interpolant_eval(s).unwrap()[(0, 0)];
            assert!((g - gi).norm() < 1e-8 * g.norm(), "point {s}");
        }
    }

}
