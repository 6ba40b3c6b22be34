use num_complex::Complex64;
use quadmor::dense::{lyap_ct, stein_dt, SylvesterMode};
use quadmor::pork::{block_data_input, dt_barred_input};
use quadmor::system::krylov_basis;
use quadmor::*;
use std::f64::consts::PI;

fn main() {
    let sys = random_stable(6, 1, 1, Domain::Discrete, 5).unwrap();
    let (p_true, _) = sys.gramians().unwrap();
    let ones_dirs = |n: usize| ComplexMatrix::from_fn(1, n, |_, _| Complex64::new(1.0, 0.0));
    for n in [8usize, 20, 50, 100] {
        let zeta = 1e-4f64;
        let shifts: Vec<Complex64> = (0..n)
            .map(|k| {
                let w = -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64;
                Complex64::new(0.0, w).exp().scale((zeta * w.abs() / (1.0 - zeta * zeta).sqrt()).exp())
            })
            .collect();
        let v = krylov_basis(&sys, &shifts, &ones_dirs(n)).unwrap();
        let (s, l) = block_data_input(&shifts, 1);
        let (sb, lb) = dt_barred_input(&s, &l).unwrap();
        let qs = stein_dt(&sb, &(&lb.adjoint() * &lb), SylvesterMode::DiagonalClosedForm).unwrap();
        let qs_inv = quadmor::dense::solve(&qs, &ComplexMatrix::identity(n)).unwrap();
        let approx = &(&v * &qs_inv) * &v.adjoint();
        let rel = (&approx - &p_true).frobenius_norm() / p_true.frobenius_norm();
        println!("dt n={n}: ||V Qs^-1 V* - P||/||P|| = {rel:.3e}");
    }
    // Continuous-time sanity for the same identity.
    let sysc = random_stable(6, 1, 1, Domain::Continuous, 5).unwrap();
    let (pc, _) = sysc.gramians().unwrap();
    for n in [8usize, 20, 50, 100] {
        let zeta = 1e-4f64;
        let shifts: Vec<Complex64> = (0..n / 2)
            .flat_map(|k| {
                let w = 0.05 * (3.0f64 / 0.05).powf(k as f64 / (n as f64 / 2.0 - 1.0));
                let s = Complex64::new(zeta * w / (1.0 - zeta * zeta).sqrt(), w);
                [s, s.conj()]
            })
            .collect();
        let v = krylov_basis(&sysc, &shifts, &ones_dirs(n)).unwrap();
        let (s, l) = block_data_input(&shifts, 1);
        let qs = lyap_ct(&s, &(&l.adjoint() * &l), SylvesterMode::DiagonalClosedForm).unwrap();
        let qs_inv = quadmor::dense::solve(&qs, &ComplexMatrix::identity(n)).unwrap();
        let approx = &(&v * &qs_inv) * &v.adjoint();
        let rel = (&approx - &pc).frobenius_norm() / pc.frobenius_norm();
        println!("ct n={n}: ||V Qs^-1 V* - P||/||P|| = {rel:.3e}");
    }
}
