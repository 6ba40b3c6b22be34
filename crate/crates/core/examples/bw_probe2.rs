use num_complex::Complex64;
use quadmor::*;
use std::f64::consts::PI;

fn quadbt_err(sys: &StateSpace, n: usize, top: usize) -> f64 {
    let true_hsv = hsv(sys).unwrap();
    let rule = map_domain(&gauss_legendre(n).unwrap(), MapTarget::Interval(-PI, PI)).unwrap();
    let pts: Vec<Complex64> = rule.nodes.iter().map(|&th| Complex64::new(0.0, th).exp()).collect();
    let samples = acquire_samples(SampleSource::Oracle(sys), &pts, &pts).unwrap();
    let q = build_loewner(&samples, &samples, LoewnerStructure::Block).unwrap();
    let (_, rep) = quadbt(&q, Some(&rule), Some(&rule), Some(2)).unwrap();
    let mut worst = 0.0f64;
    for (t, e) in true_hsv.iter().zip(rep.hsv_estimates.iter()).take(top) {
        worst = worst.max((t - e).abs() / t);
    }
    worst
}

fn main() {
    let easy = random_stable(10, 1, 1, Domain::Discrete, 5).unwrap();
    for n in [50, 100, 200, 400] {
        println!("easy n={n}: top-5 rel {:.3e}", quadbt_err(&easy, n, 5));
    }
    let bw = butterworth_dt(40, 0.6).unwrap();
    let pmax = bw.poles().unwrap().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    println!("bw max pole modulus: {pmax:.6} (dist {:.2e})", 1.0 - pmax);
    for n in [100, 200, 400] {
        println!("bw n={n}: top-10 rel {:.3e}", quadbt_err(&bw, n, 10));
    }
}
