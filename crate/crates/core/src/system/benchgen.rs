//! Synthetic benchmark generators.
//!
//! Three families cover the test corpus: a discrete-time low-pass
//! Butterworth filter realized as a cascade of second-order sections, seeded
//! random stable systems with eigenvalues in a stability-margin band, and a
//! one-dimensional diffusion chain.

use super::{Domain, StateSpace};
use crate::dense::{orthonormal_columns, ComplexMatrix};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Parameter bundle for [`generate_benchmark`].
#[derive(Clone, Debug)]
pub enum BenchmarkSpec {
    ButterworthDt { order: usize, cutoff: f64 },
    RandomStable { order: usize, inputs: usize, outputs: usize, domain: Domain, seed: u64 },
    DiffusionChain { order: usize, diffusivity: f64 },
}

pub fn generate_benchmark(spec: &BenchmarkSpec) -> Result<StateSpace> {
    match *spec {
        BenchmarkSpec::ButterworthDt { order, cutoff } => butterworth_dt(order, cutoff),
        BenchmarkSpec::RandomStable { order, inputs, outputs, domain, seed } => {
            random_stable(order, inputs, outputs, domain, seed)
        }
        BenchmarkSpec::DiffusionChain { order, diffusivity } => diffusion_chain(order, diffusivity),
    }
}

/// One second-order (or first-order) state-space section.
struct Section {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: f64,
}

/// Discrete-time low-pass Butterworth filter with unit DC gain.
///
/// Analog prototype poles on the unit circle are prewarped with
/// `tan(cutoff/2)` and mapped through the bilinear transform. Conjugate pole
/// pairs become second-order sections composed in series, which keeps the
/// realization well conditioned at high orders. The bilinear filter is
/// biproper, so one pure-delay state is appended: the result is a strictly
/// proper realization of `z^{-1} H(z)` with `order + 1` states and exactly
/// the magnitude response of the order-`order` filter.
pub fn butterworth_dt(order: usize, cutoff: f64) -> Result<StateSpace> {
    if order < 1 {
        return Err(Error::BadParams("butterworth order must be >= 1".into()));
    }
    if !(cutoff > 0.0 && cutoff < PI) {
        return Err(Error::BadParams(format!(
            "cutoff {cutoff} outside (0, pi)"
        )));
    }
    let wc = (cutoff / 2.0).tan();
    let n = order;
    let mut sections = Vec::new();
    let npairs = n / 2;
    for k in 1..=npairs {
        let theta = PI / 2.0 + (2 * k - 1) as f64 * PI / (2.0 * n as f64);
        let p = Complex64::new(theta.cos(), theta.sin()).scale(wc);
        // z = (1 + p) / (1 - p)
        let z = (Complex64::new(1.0, 0.0) + p) / (Complex64::new(1.0, 0.0) - p);
        let a1 = -2.0 * z.re;
        let a2 = z.norm_sqr();
        let g = (1.0 + a1 + a2) / 4.0;
        let (b0, b1, b2) = (g, 2.0 * g, g);
        sections.push(Section {
            a: ComplexMatrix::from_real(2, 2, &[-a1, -a2, 1.0, 0.0])?,
            b: ComplexMatrix::from_real(2, 1, &[1.0, 0.0])?,
            c: ComplexMatrix::from_real(1, 2, &[b1 - b0 * a1, b2 - b0 * a2])?,
            d: b0,
        });
    }
    if n % 2 == 1 {
        // Real analog pole at -wc.
        let p = -wc;
        let z = (1.0 + p) / (1.0 - p);
        let g = (1.0 - z) / 2.0;
        sections.push(Section {
            a: ComplexMatrix::from_real(1, 1, &[z])?,
            b: ComplexMatrix::from_real(1, 1, &[1.0])?,
            c: ComplexMatrix::from_real(1, 1, &[g * (1.0 + z)])?,
            d: g,
        });
    }
    // Trailing one-sample delay removes the direct feedthrough.
    sections.push(Section {
        a: ComplexMatrix::zeros(1, 1),
        b: ComplexMatrix::from_real(1, 1, &[1.0])?,
        c: ComplexMatrix::from_real(1, 1, &[1.0])?,
        d: 0.0,
    });
    // Series composition u -> s1 -> s2 -> ... -> y.
    let mut acc = sections.remove(0);
    for s in sections {
        let n1 = acc.a.rows();
        let n2 = s.a.rows();
        let mut a = ComplexMatrix::zeros(n1 + n2, n1 + n2);
        a.set_block(0, 0, &acc.a);
        a.set_block(n1, n1, &s.a);
        a.set_block(n1, 0, &(&s.b * &acc.c));
        let b = ComplexMatrix::vstack(&[&acc.b, &s.b.scale(Complex64::new(acc.d, 0.0))]);
        let c = ComplexMatrix::hstack(&[&acc.c.scale(Complex64::new(s.d, 0.0)), &s.c]);
        acc = Section { a, b, c, d: acc.d * s.d };
    }
    StateSpace::new(
        ComplexMatrix::identity(n + 1),
        acc.a,
        acc.b,
        acc.c,
        Domain::Discrete,
    )
}

fn randn(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller on uniform draws.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Seeded random stable system. Eigenvalues sit in a stability-margin band
/// (real part in [-2, -0.05] continuous, modulus in [0.05, 0.95] discrete),
/// closed under conjugation, and are hidden behind a random orthogonal
/// similarity. B and C are standard normal.
pub fn random_stable(
    order: usize,
    inputs: usize,
    outputs: usize,
    domain: Domain,
    seed: u64,
) -> Result<StateSpace> {
    if order < 1 || inputs < 1 || outputs < 1 {
        return Err(Error::BadParams("order, inputs, outputs must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lam = ComplexMatrix::zeros(order, order);
    let mut at = 0;
    while at < order {
        let pair = order - at >= 2 && rng.gen_bool(0.7);
        match domain {
            Domain::Continuous => {
                let re = rng.gen_range(-2.0..-0.05);
                if pair {
                    let im = rng.gen_range(0.2..3.0);
                    lam[(at, at)] = Complex64::new(re, 0.0);
                    lam[(at, at + 1)] = Complex64::new(im, 0.0);
                    lam[(at + 1, at)] = Complex64::new(-im, 0.0);
                    lam[(at + 1, at + 1)] = Complex64::new(re, 0.0);
                    at += 2;
                } else {
                    lam[(at, at)] = Complex64::new(re, 0.0);
                    at += 1;
                }
            }
            Domain::Discrete => {
                let m = rng.gen_range(0.05..0.95);
                if pair {
                    let ph: f64 = rng.gen_range(0.1..PI - 0.1);
                    lam[(at, at)] = Complex64::new(m * ph.cos(), 0.0);
                    lam[(at, at + 1)] = Complex64::new(m * ph.sin(), 0.0);
                    lam[(at + 1, at)] = Complex64::new(-m * ph.sin(), 0.0);
                    lam[(at + 1, at + 1)] = Complex64::new(m * ph.cos(), 0.0);
                    at += 2;
                } else {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    lam[(at, at)] = Complex64::new(sign * m, 0.0);
                    at += 1;
                }
            }
        }
    }
    let raw = ComplexMatrix::from_fn(order, order, |_, _| Complex64::new(randn(&mut rng), 0.0));
    let q = orthonormal_columns(&raw, 1e-12);
    if q.cols() < order {
        return Err(Error::BadParams("degenerate random basis".into()));
    }
    let a = &(&q * &lam) * &q.adjoint();
    let b = ComplexMatrix::from_fn(order, inputs, |_, _| Complex64::new(randn(&mut rng), 0.0));
    let c = ComplexMatrix::from_fn(outputs, order, |_, _| Complex64::new(randn(&mut rng), 0.0));
    StateSpace::new(ComplexMatrix::identity(order), a, b, c, domain)
}

/// One-dimensional diffusion chain: tridiagonal stiffness, input at the
/// first cell, output at the last.
pub fn diffusion_chain(order: usize, diffusivity: f64) -> Result<StateSpace> {
    if order < 1 || diffusivity <= 0.0 {
        return Err(Error::BadParams(
            "diffusion chain needs order >= 1 and positive diffusivity".into(),
        ));
    }
    let mut a = ComplexMatrix::zeros(order, order);
    for i in 0..order {
        a[(i, i)] = Complex64::new(-2.0 * diffusivity, 0.0);
        if i > 0 {
            a[(i, i - 1)] = Complex64::new(diffusivity, 0.0);
        }
        if i + 1 < order {
            a[(i, i + 1)] = Complex64::new(diffusivity, 0.0);
        }
    }
    let mut b = ComplexMatrix::zeros(order, 1);
    b[(0, 0)] = Complex64::new(1.0, 0.0);
    let mut c = ComplexMatrix::zeros(1, order);
    c[(0, order - 1)] = Complex64::new(1.0, 0.0);
    StateSpace::new(ComplexMatrix::identity(order), a, b, c, Domain::Continuous)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::c64;

    #[test]
    fn butterworth_cutoff_magnitude() {
        let sys = butterworth_dt(2, PI / 2.0).unwrap();
        let h = sys.tf_eval(c64(0.0, PI / 2.0).exp()).unwrap();
        assert!((h[(0, 0)].norm() - 0.7071068).abs() < 1e-6);
    }

    #[test]
    fn butterworth_order_40_dc_and_cutoff() {
        let sys = butterworth_dt(40, 0.6).unwrap();
        assert_eq!(sys.order(), 41);
        let dc = sys.tf_eval(c64(1.0, 0.0)).unwrap();
        assert!((dc[(0, 0)].norm() - 1.0).abs() < 1e-6, "dc {}", dc[(0, 0)].norm());
        let hc = sys.tf_eval(c64(0.0, 0.6).exp()).unwrap();
        assert!(
            (hc[(0, 0)].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6,
            "cutoff {}",
            hc[(0, 0)].norm()
        );
        assert!(sys.is_stable().unwrap());
    }

    #[test]
    fn butterworth_odd_order() {
        let sys = butterworth_dt(5, 1.0).unwrap();
        let hc = sys.tf_eval(c64(0.0, 1.0).exp()).unwrap();
        assert!((hc[(0, 0)].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn random_stable_deterministic() {
        let a = random_stable(10, 2, 3, Domain::Continuous, 7).unwrap();
        let b = random_stable(10, 2, 3, Domain::Continuous, 7).unwrap();
        assert_eq!(a.a.data(), b.a.data());
        assert_eq!(a.b.data(), b.b.data());
        assert_eq!(a.c.data(), b.c.data());
        assert!(a.is_stable().unwrap());
        let c = random_stable(10, 2, 3, Domain::Continuous, 8).unwrap();
        assert_ne!(a.a.data(), c.a.data());
    }

    #[test]
    fn random_stable_dt_in_band() {
        let sys = random_stable(9, 1, 1, Domain::Discrete, 5).unwrap();
        for p in sys.poles().unwrap() {
            let m = p.norm();
            assert!(m >= 0.04 && m <= 0.96, "pole modulus {m}");
        }
    }

    #[test]
    fn diffusion_chain_stable() {
        let sys = diffusion_chain(20, 1.5).unwrap();
        assert!(sys.is_stable().unwrap());
        assert_eq!(sys.inputs(), 1);
    }

    #[test]
    fn bad_params_rejected() {
        assert!(matches!(butterworth_dt(0, 0.5), Err(Error::BadParams(_))));
        assert!(matches!(butterworth_dt(4, 3.5), Err(Error::BadParams(_))));
        assert!(matches!(
            diffusion_chain(3, -1.0),
            Err(Error::BadParams(_))
        ));
    }
}
