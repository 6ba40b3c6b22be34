// scratch: probe IRKA convergence behavior
fn main() {
    use quadmor::quadruplet::InterpolationData;
    use quadmor::system::{intrusive_irka, random_stable, Domain};
    use num_complex::Complex64;
    let c64 = |re: f64, im: f64| Complex64::new(re, im);
    for seed in [21u64, 22, 23, 24, 25] {
        let sys = random_stable(8, 1, 1, Domain::Continuous, seed).unwrap();
        let init = InterpolationData::siso(vec![c64(0.2, 0.0), c64(0.9, 0.0), c64(2.5, 0.0)]);
        match intrusive_irka(&sys, 3, &init, 1e-9, 200) {
            Ok((_, rep)) => {
                println!("seed {seed}: iters={} conv={} refl={:?}", rep.iterations, rep.converged, rep.reflections.len());
                if !rep.converged {
                    let h = &rep.eigenvalues;
                    for k in (h.len().saturating_sub(4))..h.len() {
                        println!("  it{k}: {:?}", h[k].iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect::<Vec<_>>());
                    }
                }
            }
            Err(e) => println!("seed {seed}: error {e}"),
        }
    }
}
