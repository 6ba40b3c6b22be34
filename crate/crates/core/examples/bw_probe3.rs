use num_complex::Complex64;
use quadmor::quadrature::{QuadratureRule, RuleDomain, WeightConvention};
use quadmor::*;
use std::f64::consts::PI;

fn top10(sys: &StateSpace, rule: &QuadratureRule) -> f64 {
    let true_hsv = hsv(sys).unwrap();
    let pts: Vec<Complex64> = rule.nodes.iter().map(|&th| Complex64::new(0.0, th).exp()).collect();
    let samples = acquire_samples(SampleSource::Oracle(sys), &pts, &pts).unwrap();
    let q = build_loewner(&samples, &samples, LoewnerStructure::Block).unwrap();
    let (_, rep) = quadbt(&q, Some(rule), Some(rule), Some(2)).unwrap();
    true_hsv.iter().zip(rep.hsv_estimates.iter()).take(10)
        .map(|(t, e)| (t - e).abs() / t).fold(0.0f64, f64::max)
}

fn main() {
    let gl = map_domain(&gauss_legendre(100).unwrap(), MapTarget::Interval(-PI, PI)).unwrap();
    let n = 100;
    let uniform = QuadratureRule {
        nodes: (0..n).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64).collect(),
        weights: vec![2.0 * PI / n as f64; n],
        domain: RuleDomain::Interval(-PI, PI),
        convention: WeightConvention::Classical,
    };
    for cutoff in [0.6, 0.6 * PI] {
        let sys = butterworth_dt(40, cutoff).unwrap();
        let dist = 1.0 - sys.poles().unwrap().iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        println!("cutoff {cutoff:.4}: pole dist {dist:.3e}, GL100 {:.3e}, uniform100 {:.3e}",
            top10(&sys, &gl), top10(&sys, &uniform));
    }
}
