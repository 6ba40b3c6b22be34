// scratch: butterworth quadbt vs intrusive
use num_complex::Complex64;
use quadmor::*;
use std::f64::consts::PI;

fn main() {
    let sys = butterworth_dt(40, 0.6).unwrap();
    let true_hsv = hsv(&sys).unwrap();
    println!("true hsv[0..12]: {:?}", &true_hsv[..12].iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>());
    let rule = map_domain(&gauss_legendre(100).unwrap(), MapTarget::Interval(-PI, PI)).unwrap();
    let pts: Vec<Complex64> = rule.nodes.iter().map(|&th| Complex64::new(0.0, th).exp()).collect();
    let samples = acquire_samples(SampleSource::Oracle(&sys), &pts, &pts).unwrap();
    let q = build_loewner(&samples, &samples, LoewnerStructure::Block).unwrap();
    let (rom, rep) = quadbt(&q, Some(&rule), Some(&rule), Some(10)).unwrap();
    println!("quadbt hsv[0..12]: {:?}", &rep.hsv_estimates[..12].iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>());
    let mut worst = 0.0f64;
    for (t, e) in true_hsv.iter().zip(rep.hsv_estimates.iter()).take(10) {
        worst = worst.max((t - e).abs() / t);
    }
    println!("top-10 hsv rel err: {worst:.3e}");
    // Grid error of quadbt rom vs intrusive bt rom at order 10.
    let ibt = intrusive_bt(&sys, 10).unwrap();
    let denom = hinf_grid(&sys, (1e-3, 1e3), 400).unwrap();
    let grid_err = |r: &StateSpace| -> f64 {
        let mut w = 0.0f64;
        for k in 0..400 {
            let th = PI * k as f64 / 399.0;
            let z = Complex64::new(0.0, th).exp();
            let g = sys.tf_eval(z).unwrap();
            let gr = r.tf_eval(z).unwrap();
            w = w.max((&g - &gr).frobenius_norm());
        }
        w / denom
    };
    println!("intrusive bt r=10 err {:.3e}; quadbt r=10 err {:.3e}", grid_err(&ibt), grid_err(&rom));
    println!("rom stable: {}", rom.is_stable().unwrap());
}
