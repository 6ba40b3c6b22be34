// scratch: criterion-4 shape
use num_complex::Complex64;
use quadmor::irka::sylvester_residual;
use quadmor::quadruplet::InterpolationData;
use quadmor::*;
use std::f64::consts::PI;
use std::time::Instant;

fn c(x: f64) -> Complex64 { Complex64::new(x, 0.0) }

fn pole_match(a: &StateSpace, b: &StateSpace) -> f64 {
    let pa = a.poles().unwrap();
    let pb = b.poles().unwrap();
    let mut used = vec![false; pb.len()];
    let mut worst = 0.0f64;
    for p in &pa {
        let (j, d) = pb.iter().enumerate().filter(|(j, _)| !used[*j])
            .map(|(j, q)| (j, (p - q).norm()))
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap()).unwrap();
        used[j] = true;
        worst = worst.max(d / p.norm());
    }
    worst
}

fn main() {
    let t0 = Instant::now();
    let sys = random_stable(30, 1, 1, Domain::Continuous, 7).unwrap();
    let init = InterpolationData::siso((0..8).map(|k| c(0.05 * (100.0f64).powf(k as f64 / 7.0))).collect());
    let cfg = IrkaConfig::default();
    let (rom_i, rep_i) = intrusive_irka(&sys, 8, &init, 1e-6, 50).unwrap();
    let err_i = h2_error(&sys, &rom_i).unwrap() / h2_norm(&sys).unwrap();
    println!("[{:?}] intrusive: conv={} iters={} err {err_i:.4e}", t0.elapsed(), rep_i.converged, rep_i.iterations);

    // FD: 300 tan-mapped nodes.
    let rule = map_domain(&gauss_legendre(300).unwrap(), MapTarget::InfiniteAxis).unwrap();
    let pts: Vec<Complex64> = rule.nodes.iter().map(|&w| Complex64::new(0.0, w)).collect();
    let s = acquire_samples(SampleSource::Oracle(&sys), &pts, &pts).unwrap();
    let qf = build_loewner(&s, &s, LoewnerStructure::Block).unwrap();
    println!("fd sylvester residual: {:?}", sylvester_residual(&qf));
    let (rom_f, rep_f) = irka_run(&qf, ProjectorStrategy::FrequencyCt { rule_right: &rule, rule_left: &rule }, &init, &cfg).unwrap();
    let err_f = h2_error(&sys, &rom_f).unwrap() / h2_norm(&sys).unwrap();
    println!("[{:?}] fd: conv={} iters={} err {err_f:.4e} ratio {:.3} poles {:.2e}",
        t0.elapsed(), rep_f.converged, rep_f.iterations, err_f / err_i, pole_match(&rom_f, &rom_i));

    // TD: [0, 40] GL 200.
    let trule = map_domain(&gauss_legendre(200).unwrap(), MapTarget::Interval(0.0, 40.0)).unwrap();
    let ts = acquire_impulse_samples_ct(&sys, &trule.nodes, &trule.nodes).unwrap();
    let qt = build_impulse_ct(&ts, &trule.nodes, &trule.nodes).unwrap();
    let (rom_t, rep_t) = irka_run(&qt, ProjectorStrategy::TimeCt { rule_right: &trule, rule_left: &trule }, &init, &cfg).unwrap();
    let err_t = h2_error(&sys, &rom_t).unwrap() / h2_norm(&sys).unwrap();
    println!("[{:?}] td: conv={} iters={} err {err_t:.4e} ratio {:.3} poles {:.2e}",
        t0.elapsed(), rep_t.converged, rep_t.iterations, err_t / err_i, pole_match(&rom_t, &rom_i));

    // PORK: 100 lightly damped alpha/beta points.
    let freqs: Vec<f64> = (0..50).map(|k| 2e-2 * (2.5e3f64).powf(k as f64 / 49.0)).collect();
    let aset = gen_shifts(Domain::Continuous, 1e-4, &freqs, ShiftSide::InputGramian, true, false).unwrap();
    let ps = acquire_samples(SampleSource::Oracle(&sys), &aset.shifts, &aset.shifts).unwrap();
    let qp = build_loewner(&ps, &ps, LoewnerStructure::Block).unwrap();
    let (rom_p, rep_p) = irka_run(&qp, ProjectorStrategy::PorkCt { mode: GramianMode::Light }, &init, &cfg).unwrap();
    let err_p = h2_error(&sys, &rom_p).unwrap() / h2_norm(&sys).unwrap();
    println!("[{:?}] pork: conv={} iters={} err {err_p:.4e} ratio {:.3} poles {:.2e}",
        t0.elapsed(), rep_p.converged, rep_p.iterations, err_p / err_i, pole_match(&rom_p, &rom_i));

    // Discrete: butterworth(40, 0.6), r = 15.
    let bsys = butterworth_dt(40, 0.6).unwrap();
    let mut bphases: Vec<f64> = vec![0.0];
    for k in 0..7 {
        let ph = 0.06 + (0.9 - 0.06) * k as f64 / 6.0;
        bphases.push(ph);
        bphases.push(-ph);
    }
    let binit = InterpolationData::siso(bphases.iter().map(|&ph| Complex64::new(0.0, ph).exp().scale(1.2)).collect());
    let (brom_i, brep_i) = intrusive_irka(&bsys, 15, &binit, 1e-6, 50).unwrap();
    let berr_i = h2_error(&bsys, &brom_i).unwrap() / h2_norm(&bsys).unwrap();
    println!("[{:?}] dt intrusive: conv={} iters={} err {berr_i:.4e}", t0.elapsed(), brep_i.converged, brep_i.iterations);

    let grule = map_domain(&gauss_legendre(100).unwrap(), MapTarget::Interval(-PI, PI)).unwrap();
    let gpts: Vec<Complex64> = grule.nodes.iter().map(|&th| Complex64::new(0.0, th).exp()).collect();
    let gs = acquire_samples(SampleSource::Oracle(&bsys), &gpts, &gpts).unwrap();
    let qg = build_loewner(&gs, &gs, LoewnerStructure::Block).unwrap();
    match irka_run(&qg, ProjectorStrategy::FrequencyDt { rule_right: &grule, rule_left: &grule }, &binit, &cfg) {
        Ok((rom, rep)) => {
            let err = h2_error(&bsys, &rom).unwrap() / h2_norm(&bsys).unwrap();
            println!("[{:?}] dt fd: conv={} iters={} err {err:.4e} ratio {:.3}", t0.elapsed(), rep.converged, rep.iterations, err / berr_i);
        }
        Err(e) => println!("dt fd: {e}"),
    }

    let h = bsys.impulse_dt_sequence(240).unwrap();
    let qh = build_hankel_dt(&h, 120, 120).unwrap();
    match irka_run(&qh, ProjectorStrategy::TimeDt, &binit, &cfg) {
        Ok((rom, rep)) => {
            let err = h2_error(&bsys, &rom).unwrap() / h2_norm(&bsys).unwrap();
            println!("[{:?}] dt td: conv={} iters={} err {err:.4e} ratio {:.3}", t0.elapsed(), rep.converged, rep.iterations, err / berr_i);
        }
        Err(e) => println!("dt td: {e}"),
    }

    let n = 100;
    let zeta = 1e-4;
    let dshifts: Vec<Complex64> = (0..n).map(|k| {
        let w = -PI + 2.0 * PI * (k as f64 + 0.5) / n as f64;
        Complex64::new(0.0, w).exp().scale((zeta * w.abs() / (1.0f64 - zeta * zeta).sqrt()).exp())
    }).collect();
    let ds = acquire_samples(SampleSource::Oracle(&bsys), &dshifts, &dshifts).unwrap();
    let qd = build_loewner(&ds, &ds, LoewnerStructure::Block).unwrap();
    match irka_run(&qd, ProjectorStrategy::PorkDt { mode: GramianMode::Light }, &binit, &cfg) {
        Ok((rom, rep)) => {
            let err = h2_error(&bsys, &rom).unwrap() / h2_norm(&bsys).unwrap();
            println!("[{:?}] dt pork: conv={} iters={} err {err:.4e} ratio {:.3}", t0.elapsed(), rep.converged, rep.iterations, err / berr_i);
        }
        Err(e) => println!("dt pork: {e}"),
    }
    println!("total {:?}", t0.elapsed());
}
