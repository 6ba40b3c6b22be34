// scratch: signal-generator trajectory experiment
use num_complex::Complex64;
use quadmor::quadrature::{ShiftSet, ShiftSide};
use quadmor::*;

fn main() {
    let c = |x: f64| Complex64::new(x, 0.0);
    let sys = StateSpace::new(
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real(2, 2, &[-3.2556, 1.1671, -1.1671, -0.4906]).unwrap(),
        ComplexMatrix::from_real(2, 1, &[-1.1810, -0.1793]).unwrap(),
        ComplexMatrix::from_real(1, 2, &[1.1810, -0.1793]).unwrap(),
        Domain::Continuous,
    ).unwrap();
    println!("true hsv: {:?}", hsv(&sys).unwrap());
    let s = ComplexMatrix::from_real(4, 4, &[
        2.6141, 5.2282, 3.4406, 3.4406,
        0.0, 2.6141, 3.4406, 3.4406,
        0.0, 0.0, 1.1321, 2.2642,
        0.0, 0.0, 0.0, 1.1321,
    ]).unwrap();
    let l = ComplexMatrix::from_real(1, 4, &[-2.2865, -2.2865, -1.5047, -1.5047]).unwrap();
    let w0 = ComplexMatrix::from_real(4, 1, &[1.0, 2.0, 3.0, 4.0]).unwrap();
    // Simulate the generator driving the plant, dt = 0.01 over [0, 10].
    let dt = 0.01;
    let steps = 1001usize;
    let mut aug = ComplexMatrix::zeros(6, 6);
    aug.set_block(0, 0, &s);
    aug.set_block(4, 4, &sys.a);
    aug.set_block(4, 0, &(&sys.b * &l));
    let phi = quadmor::dense::expm(&aug.scale(c(dt))).unwrap();
    let mut z = ComplexMatrix::zeros(6, 1);
    z.set_block(0, 0, &w0);
    let mut y = ComplexMatrix::zeros(steps, 1);
    for k in 0..steps {
        y[(k, 0)] = (&sys.c * &z.block(4, 0, 2, 1))[(0, 0)];
        z = &phi * &z;
    }
    // Window: rows 120 .. 120+458.
    let interp = estimate_from_trajectories(&s, &l, &w0, &y, dt, 120, 458).unwrap();
    // Check interpolation at generator eigenvalues.
    for a in [2.6141, 1.1321] {
        let (gt, gdt) = interp.tf_eval_with_derivative(c(a)).unwrap();
        let (g, gd) = sys.tf_eval_with_derivative(c(a)).unwrap();
        println!("a={a}: G {:.6} vs est {:.6}; G' {:.6} vs est {:.6}",
            g[(0,0)].re, gt[(0,0)].re, gd[(0,0)].re, gdt[(0,0)].re);
    }
    // Loewner at the shift points with derivatives, from the estimated interpolant.
    let pts = [c(2.6141), c(1.1321)];
    let samples = acquire_samples(SampleSource::Oracle(&interp), &pts, &pts).unwrap();
    let set = ShiftSet { shifts: pts.to_vec(), zeta: 1.0, side: ShiftSide::InputGramian, domain: Domain::Continuous };
    let opts = CompressOptions { rank: Some(2), ..Default::default() };
    let (rom, rep) = dd_adi_bt(&samples, &samples, &set, &set, GramianMode::Exact, &opts).unwrap();
    println!("rom hsv: {:?}", hsv(&rom).unwrap());
    println!("report estimates: {:?}", rep.hsv_estimates);
    println!("rom A: {:?}", rom.a);
    println!("rom B: {:?} C: {:?}", rom.b, rom.c);
}
