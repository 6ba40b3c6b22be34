//! Descriptor state-space systems and their exact responses.
//!
//! [`StateSpace`] is both the ground-truth object that produces response
//! data and the output object of every reduction algorithm. Exact Gramians,
//! Hankel singular values, intrusive balanced truncation and intrusive IRKA
//! live in the submodules and serve as validation baselines for the
//! data-driven pipelines.

mod benchgen;
mod gramian;
mod reduce;

pub use benchgen::{butterworth_dt, diffusion_chain, generate_benchmark, random_stable, BenchmarkSpec};
pub use gramian::{eval_grid, h2_error, h2_norm, hinf_grid, hsv, sigma_grid};
pub use reduce::{intrusive_bt, intrusive_irka, krylov_basis, krylov_basis_left, IrkaBaselineReport};
pub(crate) use reduce::{eigenvalue_change as reduce_eigenvalue_change, reflect_shift as reduce_reflect};

use crate::dense::{eig, expm, solve, ComplexMatrix, Lu};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Continuous-time systems evaluate along `s`; discrete-time along `z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Continuous,
    Discrete,
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Continuous => write!(f, "continuous"),
            Domain::Discrete => write!(f, "discrete"),
        }
    }
}

/// Descriptor realization `(E, A, B, C)` with invertible `E`.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub e: ComplexMatrix,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub domain: Domain,
}

impl StateSpace {
    pub fn new(
        e: ComplexMatrix,
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        domain: Domain,
    ) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || !e.is_square() || e.rows() != n || b.rows() != n || c.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "E {}x{}, A {}x{}, B {}x{}, C {}x{}",
                e.rows(),
                e.cols(),
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols()
            )));
        }
        for m in [&e, &a, &b, &c] {
            if !m.is_finite() {
                return Err(Error::NonFinite { row: 0, col: 0 });
            }
        }
        // E must be invertible; the LU guard rejects near-singular E.
        Lu::factor(&e)?;
        Ok(Self { e, a, b, c, domain })
    }

    /// Convenience constructor for a scalar system.
    pub fn siso_scalar(e: f64, a: f64, b: f64, c: f64, domain: Domain) -> Self {
        Self::new(
            ComplexMatrix::from_real(1, 1, &[e]).unwrap(),
            ComplexMatrix::from_real(1, 1, &[a]).unwrap(),
            ComplexMatrix::from_real(1, 1, &[b]).unwrap(),
            ComplexMatrix::from_real(1, 1, &[c]).unwrap(),
            domain,
        )
        .unwrap()
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    /// `E^{-1} A`.
    pub fn a_tilde(&self) -> Result<ComplexMatrix> {
        solve(&self.e, &self.a)
    }

    /// `E^{-1} B`.
    pub fn b_tilde(&self) -> Result<ComplexMatrix> {
        solve(&self.e, &self.b)
    }

    /// Generalized eigenvalues of the pencil `(A, E)`, sorted by (re, im).
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        Ok(eig(&self.a_tilde()?)?.values)
    }

    pub fn is_stable(&self) -> Result<bool> {
        let poles = self.poles()?;
        Ok(match self.domain {
            Domain::Continuous => poles.iter().all(|l| l.re < 0.0),
            Domain::Discrete => poles.iter().all(|l| l.norm() < 1.0),
        })
    }

    /// Transfer function value `C (sE - A)^{-1} B`.
    pub fn tf_eval(&self, s: Complex64) -> Result<ComplexMatrix> {
        Ok(self.tf_eval_with_derivative(s)?.0)
    }

    /// Value and derivative `-C (sE - A)^{-1} E (sE - A)^{-1} B`.
    pub fn tf_eval_with_derivative(&self, s: Complex64) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let r = &self.e.scale(s) - &self.a;
        let lu = Lu::factor(&r).map_err(|_| Error::PointIsPole { point: s })?;
        let x = lu.solve(&self.b)?;
        let value = &self.c * &x;
        let ex = &self.e * &x;
        let deriv = (&self.c * &lu.solve(&ex)?).scale(Complex64::new(-1.0, 0.0));
        Ok((value, deriv))
    }

    /// Continuous-time impulse response `h(t) = C e^{E^{-1}A t} E^{-1} B`
    /// and, on request, its derivative `h'(t) = C e^{E^{-1}A t} E^{-1}A E^{-1}B`.
    pub fn impulse_ct(&self, t: f64, with_derivative: bool) -> Result<(ComplexMatrix, Option<ComplexMatrix>)> {
        if self.domain != Domain::Continuous {
            return Err(Error::DomainMismatch {
                expected: "continuous".into(),
                got: self.domain.to_string(),
            });
        }
        if t < 0.0 {
            return Err(Error::BadParams(format!("negative time {t}")));
        }
        let at = self.a_tilde()?;
        let bt = self.b_tilde()?;
        let phi = expm(&at.scale(Complex64::new(t, 0.0)))?;
        let h = &(&self.c * &phi) * &bt;
        let hp = if with_derivative {
            Some(&(&(&self.c * &phi) * &at) * &bt)
        } else {
            None
        };
        Ok((h, hp))
    }

    /// Discrete-time impulse response `h(k) = C (E^{-1}A)^k E^{-1} B`.
    pub fn impulse_dt(&self, k: usize) -> Result<ComplexMatrix> {
        if self.domain != Domain::Discrete {
            return Err(Error::DomainMismatch {
                expected: "discrete".into(),
                got: self.domain.to_string(),
            });
        }
        let at = self.a_tilde()?;
        let mut x = self.b_tilde()?;
        for _ in 0..k {
            x = &at * &x;
        }
        Ok(&self.c * &x)
    }

    /// Discrete impulse response sequence `h(0) .. h(len-1)` by stepping.
    pub fn impulse_dt_sequence(&self, len: usize) -> Result<Vec<ComplexMatrix>> {
        if self.domain != Domain::Discrete {
            return Err(Error::DomainMismatch {
                expected: "discrete".into(),
                got: self.domain.to_string(),
            });
        }
        let at = self.a_tilde()?;
        let mut x = self.b_tilde()?;
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(&self.c * &x);
            x = &at * &x;
        }
        Ok(out)
    }

    /// Impulse response and derivative on a grid of times, evaluated through
    /// the modal form so large grids stay cheap.
    pub fn impulse_ct_grid(&self, times: &[f64]) -> Result<Vec<(ComplexMatrix, ComplexMatrix)>> {
        if self.domain != Domain::Continuous {
            return Err(Error::DomainMismatch {
                expected: "continuous".into(),
                got: self.domain.to_string(),
            });
        }
        let at = self.a_tilde()?;
        let bt = self.b_tilde()?;
        let dec = eig(&at)?;
        let ct = &self.c * &dec.vectors;
        let tb = solve(&dec.vectors, &bt)?;
        let (p, m, n) = (self.outputs(), self.inputs(), self.order());
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            if t < 0.0 {
                return Err(Error::BadParams(format!("negative time {t}")));
            }
            let mut h = ComplexMatrix::zeros(p, m);
            let mut hp = ComplexMatrix::zeros(p, m);
            for k in 0..n {
                let lam = dec.values[k];
                let e = (lam.scale(t)).exp();
                for i in 0..p {
                    for j in 0..m {
                        let w = ct[(i, k)] * tb[(k, j)] * e;
                        h[(i, j)] += w;
                        hp[(i, j)] += w * lam;
                    }
                }
            }
            out.push((h, hp));
        }
        Ok(out)
    }
}

/// Pole-residue form `G(s) = sum_k l_k r_k^* / (s - lambda_k)`.
#[derive(Clone, Debug)]
pub struct PoleResidueForm {
    pub poles: Vec<Complex64>,
    /// Column k holds `l_k` (length p).
    pub left: ComplexMatrix,
    /// Column k holds `r_k` (length m).
    pub right: ComplexMatrix,
}

impl PoleResidueForm {
    pub fn from_state_space(sys: &StateSpace) -> Result<Self> {
        let at = sys.a_tilde()?;
        let dec = eig(&at)?;
        let n = sys.order();
        for i in 0..n {
            for j in i + 1..n {
                if (dec.values[i] - dec.values[j]).norm() < 1e-10 {
                    return Err(Error::BadParams(format!(
                        "repeated pole {} within tolerance",
                        dec.values[i]
                    )));
                }
            }
        }
        let left = &sys.c * &dec.vectors;
        let rt = solve(&dec.vectors, &sys.b_tilde()?)?;
        Ok(Self {
            poles: dec.values,
            left,
            right: rt.adjoint(),
        })
    }

    pub fn eval(&self, s: Complex64) -> ComplexMatrix {
        let (p, m) = (self.left.rows(), self.right.rows());
        let mut g = ComplexMatrix::zeros(p, m);
        for (k, &pole) in self.poles.iter().enumerate() {
            let w = (s - pole).inv();
            for i in 0..p {
                for j in 0..m {
                    g[(i, j)] += self.left[(i, k)] * self.right[(j, k)].conj() * w;
                }
            }
        }
        g
    }
}
