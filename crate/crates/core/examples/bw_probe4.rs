use num_complex::Complex64;
use quadmor::quadrature::{QuadratureRule, RuleDomain, ShiftSet, ShiftSide, WeightConvention};
use quadmor::*;
use std::f64::consts::PI;

fn top10_quadbt(sys: &StateSpace, rule: &QuadratureRule) -> f64 {
    let true_hsv = hsv(sys).unwrap();
    let pts: Vec<Complex64> = rule.nodes.iter().map(|&th| Complex64::new(0.0, th).exp()).collect();
    let samples = acquire_samples(SampleSource::Oracle(sys), &pts, &pts).unwrap();
    let q = build_loewner(&samples, &samples, LoewnerStructure::Block).unwrap();
    let (_, rep) = quadbt(&q, Some(rule), Some(rule), Some(2)).unwrap();
    true_hsv.iter().zip(rep.hsv_estimates.iter()).take(10)
        .map(|(t, e)| (t - e).abs() / t).fold(0.0f64, f64::max)
}

fn main() {
    let sys = butterworth_dt(40, 0.6).unwrap();
    let true_hsv = hsv(&sys).unwrap();
    // DD-PORK-DTBT: 100 lightly damped shifts at uniform phases.
    let n = 100;
    let phases: Vec<f64> = (0..n).map(|k| -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64).collect();
    let zeta = 1e-4;
    let shifts: Vec<Complex64> = phases.iter()
        .map(|&w| Complex64::new(0.0, w).exp().scale((zeta * w.abs() / (1.0 - zeta * zeta as f64).sqrt()).exp()))
        .collect();
    let set = ShiftSet { shifts: shifts.clone(), zeta, side: ShiftSide::InputGramian, domain: Domain::Discrete };
    let samples = acquire_samples(SampleSource::Oracle(&sys), &shifts, &shifts).unwrap();
    for mode in [GramianMode::Light, GramianMode::Exact] {
        match dd_pork_dtbt(&samples, &samples, &set, &set, mode, &CompressOptions::default()) {
            Ok((_, rep)) => {
                let worst = true_hsv.iter().zip(rep.hsv_estimates.iter()).take(10)
                    .map(|(t, e)| (t - e).abs() / t).fold(0.0f64, f64::max);
                println!("dd-pork-dtbt {mode:?}: top-10 rel {worst:.3e}");
            }
            Err(e) => println!("dd-pork-dtbt {mode:?}: {e}"),
        }
    }
    // Composite Gauss-Legendre: p panels x k nodes = 100.
    for (panels, k) in [(10usize, 10usize), (25, 4), (50, 2)] {
        let base = gauss_legendre(k).unwrap();
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let h = 2.0 * PI / panels as f64;
        for p in 0..panels {
            let a = -PI + h * p as f64;
            let m = map_domain(&base, MapTarget::Interval(a, a + h)).unwrap();
            nodes.extend(m.nodes);
            weights.extend(m.weights);
        }
        let rule = QuadratureRule { nodes, weights, domain: RuleDomain::Interval(-PI, PI), convention: WeightConvention::Classical };
        println!("composite {panels}x{k}: top-10 rel {:.3e}", top10_quadbt(&sys, &rule));
    }
}
