use num_complex::Complex64;
use quadmor::quadrature::{QuadratureRule, RuleDomain, ShiftSet, ShiftSide, WeightConvention};
use quadmor::*;
use std::f64::consts::PI;

fn main() {
    let sys = butterworth_dt(40, 0.6).unwrap();
    let true_hsv = hsv(&sys).unwrap();
    let gl = map_domain(&gauss_legendre(100).unwrap(), MapTarget::Interval(-PI, PI)).unwrap();
    let pts: Vec<Complex64> = gl.nodes.iter().map(|&th| Complex64::new(0.0, th).exp()).collect();
    let samples = acquire_samples(SampleSource::Oracle(&sys), &pts, &pts).unwrap();
    let q = build_loewner(&samples, &samples, LoewnerStructure::Block).unwrap();
    for r in [15usize, 20, 25] {
        let (rom, _) = quadbt(&q, Some(&gl), Some(&gl), Some(r)).unwrap();
        match rom.is_stable() {
            Ok(true) => {
                let rh = hsv(&rom).unwrap();
                let worst = true_hsv.iter().zip(rh.iter()).take(10)
                    .map(|(t, e)| (t - e).abs() / t).fold(0.0f64, f64::max);
                println!("quadbt r={r}: hsv(rom) top-10 rel {worst:.3e}");
            }
            _ => println!("quadbt r={r}: rom unstable"),
        }
    }
    let n = 100;
    let zeta = 1e-4;
    let shifts: Vec<Complex64> = (0..n)
        .map(|k| {
            let w = -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64;
            Complex64::new(0.0, w).exp().scale((zeta * w.abs() / (1.0f64 - zeta * zeta).sqrt()).exp())
        })
        .collect();
    let set = ShiftSet { shifts: shifts.clone(), zeta, side: ShiftSide::InputGramian, domain: Domain::Discrete };
    let s2 = acquire_samples(SampleSource::Oracle(&sys), &shifts, &shifts).unwrap();
    for r in [15usize, 20, 25] {
        let opts = CompressOptions { rank: Some(r), ..Default::default() };
        match dd_pork_dtbt(&s2, &s2, &set, &set, GramianMode::Light, &opts) {
            Ok((rom, _)) => match rom.is_stable() {
                Ok(true) => {
                    let rh = hsv(&rom).unwrap();
                    let worst = true_hsv.iter().zip(rh.iter()).take(10)
                        .map(|(t, e)| (t - e).abs() / t).fold(0.0f64, f64::max);
                    println!("dd-pork-dtbt r={r}: hsv(rom) top-10 rel {worst:.3e}");
                }
                _ => println!("dd-pork-dtbt r={r}: rom unstable"),
            },
            Err(e) => println!("dd-pork-dtbt r={r}: {e}"),
        }
    }
    let _ = (RuleDomain::TimeAxis, WeightConvention::Classical, QuadratureRule { nodes: vec![], weights: vec![], domain: RuleDomain::TimeAxis, convention: WeightConvention::Classical });
}
