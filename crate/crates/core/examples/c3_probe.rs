// scratch: criterion-3 shape
use num_complex::Complex64;
use quadmor::quadrature::{ShiftSet, ShiftSide};
use quadmor::*;

fn grid_err(sys: &StateSpace, rom: &StateSpace, band: (f64, f64)) -> f64 {
    let denom = hinf_grid(sys, band, 400).unwrap();
    let mut w = 0.0f64;
    for s in quadmor::system::eval_grid(sys.domain, band, 400) {
        let g = sys.tf_eval(s).unwrap();
        let gr = rom.tf_eval(s).unwrap();
        w = w.max((&g - &gr).frobenius_norm());
    }
    w / denom
}

fn main() {
    for seed in [7u64, 11, 30] {
        let sys = random_stable(30, 1, 1, Domain::Continuous, seed).unwrap();
        let band = (1e-3, 1e3);
        let ibt = intrusive_bt(&sys, 10).unwrap();
        let e_bt = grid_err(&sys, &ibt, band);
        // DD-ADI-BT: 300 lightly damped shifts on a log grid + conjugates.
        let freqs: Vec<f64> = (0..150)
            .map(|k| 1e-3 * (1e6f64).powf(k as f64 / 149.0))
            .collect();
        let shifts = gen_shifts(Domain::Continuous, 1e-4, &freqs, ShiftSide::InputGramian, true, false).unwrap();
        let samples = acquire_samples(SampleSource::Oracle(&sys), &shifts.shifts, &shifts.shifts).unwrap();
        let opts = CompressOptions { rank: Some(10), ..Default::default() };
        let e_adi = match dd_adi_bt(&samples, &samples, &shifts, &shifts, GramianMode::Light, &opts) {
            Ok((rom, _)) => grid_err(&sys, &rom, band),
            Err(e) => { println!("adi err: {e}"); f64::NAN }
        };
        // QuadBT: 300-node exp-trapezoid.
        let rule = exp_trapezoid(1e-3, 1e3, 300).unwrap();
        let mut pts: Vec<Complex64> = rule.nodes.iter().map(|&w| Complex64::new(0.0, w)).collect();
        pts.extend(rule.nodes.iter().map(|&w| Complex64::new(0.0, -w)));
        let qs = acquire_samples(SampleSource::Oracle(&sys), &pts, &pts).unwrap();
        let q = build_loewner(&qs, &qs, LoewnerStructure::Block).unwrap();
        let e_quad = match quadbt(&q, Some(&rule), Some(&rule), Some(10)) {
            Ok((rom, _)) => grid_err(&sys, &rom, band),
            Err(e) => { println!("quad err: {e}"); f64::NAN }
        };
        println!("seed {seed}: intrusive {e_bt:.3e}, dd-adi {e_adi:.3e} ({:.1}x), quadbt {e_quad:.3e} ({:.1}x)",
            e_adi / e_bt, e_quad / e_bt);
    }
}
