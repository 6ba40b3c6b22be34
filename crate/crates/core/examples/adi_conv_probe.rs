use num_complex::Complex64;
use quadmor::dense::{lyap_ct, SylvesterMode};
use quadmor::pork::{block_data_input, dt_barred_input};
use quadmor::system::krylov_basis;
use quadmor::*;

fn main() {
    let sysc = random_stable(6, 1, 1, Domain::Continuous, 5).unwrap();
    let (pc, _) = sysc.gramians().unwrap();
    let ones = |n: usize| ComplexMatrix::from_fn(1, n, |_, _| Complex64::new(1.0, 0.0));
    for zeta in [1e-4f64, 0.05, 0.3, 0.7] {
        for n in [10usize, 20, 40] {
            let shifts: Vec<Complex64> = (0..n / 2)
                .flat_map(|k| {
                    let w = 0.05 * (5.0f64 / 0.05).powf(k as f64 / (n as f64 / 2.0 - 1.0));
                    let s = Complex64::new(zeta * w / (1.0 - zeta * zeta).sqrt(), w);
                    [s, s.conj()]
                })
                .collect();
            let v = krylov_basis(&sysc, &shifts, &ones(n)).unwrap();
            let (s, l) = block_data_input(&shifts, 1);
            let qs = lyap_ct(&s, &(&l.adjoint() * &l), SylvesterMode::DiagonalClosedForm).unwrap();
            let qs_inv = quadmor::dense::solve(&qs, &ComplexMatrix::identity(n)).unwrap();
            let approx = &(&v * &qs_inv) * &v.adjoint();
            let rel = (&approx - &pc).frobenius_norm() / pc.frobenius_norm();
            print!("z={zeta:.0e} n={n}: {rel:.2e}  ");
        }
        println!();
    }
    let _ = dt_barred_input(&ComplexMatrix::identity(1), &ComplexMatrix::identity(1));
}
