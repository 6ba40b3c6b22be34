// scratch: tracked-term accuracy vs node count
use num_complex::Complex64;
use quadmor::bt::GramianMode;
use quadmor::irka::{irka_run, IrkaConfig, ProjectorStrategy};
use quadmor::quadrature::{gauss_legendre, map_domain, MapTarget};
use quadmor::quadruplet::{build_loewner, InterpolationData, LoewnerStructure};
use quadmor::sampling::{acquire_samples, SampleSource};
use quadmor::system::{h2_norm, Domain, StateSpace};

fn main() {
    let c64 = |re: f64, im: f64| Complex64::new(re, im);
    let sys = StateSpace::siso_scalar(1.0, -2.0, 1.0, 1.0, Domain::Continuous);
    let gsq = h2_norm(&sys).unwrap().powi(2);
    let init = InterpolationData::siso(vec![c64(0.3, 0.0)]);
    for n in [50usize, 100, 200, 400] {
        let rule = map_domain(&gauss_legendre(n).unwrap(), MapTarget::InfiniteAxis).unwrap();
        let pts: Vec<Complex64> = rule.nodes.iter().map(|&w| c64(0.0, w)).collect();
        let right = acquire_samples(SampleSource::Oracle(&sys), &pts, &pts).unwrap();
        let q = build_loewner(&right, &right, LoewnerStructure::Block).unwrap();
        let (_, rep) = irka_run(
            &q,
            ProjectorStrategy::FrequencyCt { rule_right: &rule, rule_left: &rule },
            &init,
            &IrkaConfig::default(),
        )
        .unwrap();
        let term = rep.tracked_error_term.last().unwrap().unwrap();
        println!("fd n={n}: total {:e}", gsq + term);
    }
    for n in [8usize, 16, 32, 64] {
        let alphas: Vec<Complex64> = (0..n)
            .map(|k| c64(0.05 * (400.0f64).powf(k as f64 / (n - 1) as f64), 0.0))
            .collect();
        let right = acquire_samples(SampleSource::Oracle(&sys), &alphas, &[]).unwrap();
        let betas: Vec<Complex64> = alphas.iter().map(|a| a * 1.07).collect();
        let left = acquire_samples(SampleSource::Oracle(&sys), &betas, &[]).unwrap();
        let q = build_loewner(&right, &left, LoewnerStructure::Block).unwrap();
        let (_, rep) = irka_run(
            &q,
            ProjectorStrategy::PorkCt { mode: GramianMode::Exact },
            &init,
            &IrkaConfig::default(),
        )
        .unwrap();
        let term = rep.tracked_error_term.last().unwrap().unwrap();
        println!("pork n={n}: total {:e}", gsq + term);
    }
}
