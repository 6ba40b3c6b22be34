//! Subcommand implementations.

use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use quadmor::io::{
    load_dataset, save_hsv_csv, save_irka_csv, save_quadruplet, save_rule, save_sample_set,
    save_shifts, save_sigma_csv, save_state_space, Dataset,
};
use quadmor::{
    acquire_impulse_samples_ct, acquire_samples, build_hankel_dt, build_impulse_ct, build_loewner,
    dd_adi_bt, dd_pork_dtbt, default_init, exp_trapezoid, gauss_legendre, gen_shifts, h2_error,
    h2_norm, hinf_grid, hsv, irka_run, map_domain, quadbt, BenchmarkSpec,
    CompressOptions, DataQuadruplet, Domain, Error, GramianMode, IrkaConfig, LoewnerStructure,
    MapTarget, ProjectorStrategy, QuadratureRule, QuadrupletKind, Result, SampleSet, SampleSource,
    ShiftSet, ShiftSide, StateSpace,
};
use std::path::{Path, PathBuf};

fn verbose() -> bool {
    std::env::var("QUADMOR_VERBOSE").map(|v| v != "0").unwrap_or(false)
}

macro_rules! note {
    ($($arg:tt)*) => {
        if verbose() {
            eprintln!($($arg)*);
        }
    };
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic benchmark system.
    Gen(GenArgs),
    /// Evaluate a system oracle at stored points (the only oracle consumer).
    Sample(SampleArgs),
    /// Build quadrature rules, shift sets, and data quadruplets.
    #[command(subcommand)]
    Quad(QuadCommand),
    /// Balanced-truncation style compression of sampled data.
    ReduceBt(ReduceBtArgs),
    /// Data-driven IRKA distillation of a quadruplet.
    ReduceIrka(ReduceIrkaArgs),
    /// Compare a reduced model against the truth system.
    Compare(CompareArgs),
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Sample(a) => sample(a),
        Command::Quad(a) => quad(a),
        Command::ReduceBt(a) => reduce_bt(a),
        Command::ReduceIrka(a) => reduce_irka(a),
        Command::Compare(a) => compare(a),
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DomainArg {
    Ct,
    Dt,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Domain {
        match d {
            DomainArg::Ct => Domain::Continuous,
            DomainArg::Dt => Domain::Discrete,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GenKind {
    ButterworthDt,
    RandomStable,
    DiffusionChain,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    #[arg(long)]
    order: usize,
    /// Cutoff frequency in rad/sample (butterworth-dt).
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    inputs: usize,
    #[arg(long, default_value_t = 1)]
    outputs: usize,
    #[arg(long, value_enum, default_value = "ct")]
    domain: DomainArg,
    /// Diffusivity (diffusion-chain).
    #[arg(long, default_value_t = 1.0)]
    diffusivity: f64,
    #[arg(long)]
    out: PathBuf,
}

fn gen(a: GenArgs) -> Result<()> {
    let spec = match a.kind {
        GenKind::ButterworthDt => BenchmarkSpec::ButterworthDt {
            order: a.order,
            cutoff: a.cutoff.ok_or_else(|| {
                Error::BadParams("butterworth-dt needs --cutoff".into())
            })?,
        },
        GenKind::RandomStable => BenchmarkSpec::RandomStable {
            order: a.order,
            inputs: a.inputs,
            outputs: a.outputs,
            domain: a.domain.into(),
            seed: a.seed,
        },
        GenKind::DiffusionChain => BenchmarkSpec::DiffusionChain {
            order: a.order,
            diffusivity: a.diffusivity,
        },
    };
    let sys = quadmor::generate_benchmark(&spec)?;
    save_state_space(&sys, &a.out)?;
    note!("wrote order-{} system to {}", sys.order(), a.out.display());
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DerivPolicy {
    /// Derivatives only where the point list repeats.
    Auto,
    /// Derivatives everywhere.
    All,
    /// No derivatives.
    None,
}

/// How rule nodes map to evaluation points.
#[derive(Clone, Copy, ValueEnum)]
pub enum PointMap {
    /// `j w` for each node (conjugate closure appended).
    ImagAxis,
    /// `exp(j theta)` for each node.
    UnitCircle,
}

#[derive(Args)]
pub struct SampleArgs {
    #[arg(long)]
    system: PathBuf,
    /// Shift set or quadrature rule supplying the evaluation points.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Node-to-point mapping when `--points` is a quadrature rule.
    #[arg(long, value_enum)]
    map: Option<PointMap>,
    /// Impulse-response sampling over a time rule (right and left grids).
    #[arg(long)]
    impulse_rule: Option<PathBuf>,
    /// Markov-parameter sampling: h(0) .. h(count-1) of a discrete system.
    #[arg(long)]
    markov: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    deriv: DerivPolicy,
    #[arg(long)]
    out: PathBuf,
}

fn load_system(path: &Path) -> Result<StateSpace> {
    match load_dataset(path)? {
        Dataset::System(s) => Ok(s),
        _ => Err(Error::FileFormat {
            line: 1,
            message: format!("{} is not a state_space file", path.display()),
        }),
    }
}

fn load_samples(path: &Path) -> Result<SampleSet> {
    match load_dataset(path)? {
        Dataset::Samples(s) => Ok(s),
        _ => Err(Error::FileFormat {
            line: 1,
            message: format!("{} is not a sample_set file", path.display()),
        }),
    }
}

fn load_rule(path: &Path) -> Result<QuadratureRule> {
    match load_dataset(path)? {
        Dataset::Rule(r) => Ok(r),
        _ => Err(Error::FileFormat {
            line: 1,
            message: format!("{} is not a quadrature_rule file", path.display()),
        }),
    }
}

fn load_shift_set(path: &Path) -> Result<ShiftSet> {
    match load_dataset(path)? {
        Dataset::Shifts(s) => Ok(s),
        _ => Err(Error::FileFormat {
            line: 1,
            message: format!("{} is not a shift_set file", path.display()),
        }),
    }
}

fn load_quad(path: &Path) -> Result<DataQuadruplet> {
    match load_dataset(path)? {
        Dataset::Quadruplet(q) => Ok(q),
        _ => Err(Error::FileFormat {
            line: 1,
            message: format!("{} is not a data_quadruplet file", path.display()),
        }),
    }
}

fn sample(a: SampleArgs) -> Result<()> {
    let sys = load_system(&a.system)?;
    if let Some(rule_path) = &a.impulse_rule {
        let rule = load_rule(rule_path)?;
        let set = acquire_impulse_samples_ct(&sys, &rule.nodes, &rule.nodes)?;
        save_sample_set(&set, &a.out)?;
        note!("wrote {} impulse samples", set.samples.len());
        return Ok(());
    }
    if let Some(count) = a.markov {
        let h = sys.impulse_dt_sequence(count)?;
        let set = SampleSet {
            domain: sys.domain,
            kind: quadmor::SampleKind::ImpulseResponse,
            outputs: sys.outputs(),
            inputs: sys.inputs(),
            samples: h
                .into_iter()
                .enumerate()
                .map(|(k, value)| quadmor::sampling::Sample {
                    point: Complex64::new(k as f64, 0.0),
                    value,
                    derivative: None,
                })
                .collect(),
        };
        save_sample_set(&set, &a.out)?;
        return Ok(());
    }
    let points_path = a.points.as_ref().ok_or_else(|| {
        Error::BadParams("need --points, --impulse-rule, or --markov".into())
    })?;
    let points: Vec<Complex64> = match load_dataset(points_path)? {
        Dataset::Shifts(s) => s.shifts,
        Dataset::Rule(r) => match a.map {
            Some(PointMap::ImagAxis) => {
                let mut pts: Vec<Complex64> =
                    r.nodes.iter().map(|&w| Complex64::new(0.0, w)).collect();
                pts.extend(r.nodes.iter().map(|&w| Complex64::new(0.0, -w)));
                pts
            }
            Some(PointMap::UnitCircle) => r
                .nodes
                .iter()
                .map(|&th| Complex64::new(0.0, th).exp())
                .collect(),
            None => {
                return Err(Error::BadParams(
                    "--map is required when --points is a quadrature rule".into(),
                ))
            }
        },
        _ => {
            return Err(Error::FileFormat {
                line: 1,
                message: "points file must be a shift_set or quadrature_rule".into(),
            })
        }
    };
    let deriv: Vec<Complex64> = match a.deriv {
        DerivPolicy::All => points.clone(),
        DerivPolicy::None | DerivPolicy::Auto => vec![],
    };
    let set = acquire_samples(SampleSource::Oracle(&sys), &points, &deriv)?;
    save_sample_set(&set, &a.out)?;
    note!("wrote {} samples to {}", set.samples.len(), a.out.display());
    Ok(())
}

#[derive(Subcommand)]
pub enum QuadCommand {
    /// Build a quadrature rule.
    Rule(RuleArgs),
    /// Build a damped shift set.
    Shifts(ShiftArgs),
    /// Assemble a Loewner quadruplet from sample files (block structure).
    Loewner(LoewnerArgs),
    /// Assemble an impulse-response quadruplet.
    Impulse(ImpulseArgs),
    /// Assemble a discrete-time Hankel quadruplet from Markov parameters.
    Hankel(HankelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum RuleKind {
    GaussLegendre,
    ExpTrapezoid,
}

#[derive(Args)]
pub struct RuleArgs {
    #[arg(long, value_enum)]
    kind: RuleKind,
    #[arg(long)]
    n: usize,
    /// Map the base rule onto [a, b], given as "a,b".
    #[arg(long)]
    interval: Option<String>,
    /// Map the base rule onto the whole axis.
    #[arg(long, default_value_t = false)]
    infinite: bool,
    #[arg(long)]
    fmin: Option<f64>,
    #[arg(long)]
    fmax: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::BadParams(format!("expected 'a,b', got '{s}'")));
    }
    let a = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::BadParams(format!("bad number '{}'", parts[0])))?;
    let b = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::BadParams(format!("bad number '{}'", parts[1])))?;
    Ok((a, b))
}

fn quad(cmd: QuadCommand) -> Result<()> {
    match cmd {
        QuadCommand::Rule(a) => {
            let rule = match a.kind {
                RuleKind::GaussLegendre => {
                    let base = gauss_legendre(a.n)?;
                    if a.infinite {
                        map_domain(&base, MapTarget::InfiniteAxis)?
                    } else if let Some(iv) = &a.interval {
                        let (lo, hi) = parse_pair(iv)?;
                        map_domain(&base, MapTarget::Interval(lo, hi))?
                    } else {
                        base
                    }
                }
                RuleKind::ExpTrapezoid => {
                    let fmin = a.fmin.ok_or_else(|| Error::BadParams("need --fmin".into()))?;
                    let fmax = a.fmax.ok_or_else(|| Error::BadParams("need --fmax".into()))?;
                    exp_trapezoid(fmin, fmax, a.n)?
                }
            };
            save_rule(&rule, &a.out)
        }
        QuadCommand::Shifts(a) => {
            let freqs: Vec<f64> = if let Some(spec) = &a.freq_log {
                let parts: Vec<&str> = spec.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::BadParams("expected 'fmin,fmax,n'".into()));
                }
                let lo: f64 = parts[0].trim().parse().map_err(|_| Error::BadParams("bad fmin".into()))?;
                let hi: f64 = parts[1].trim().parse().map_err(|_| Error::BadParams("bad fmax".into()))?;
                let n: usize = parts[2].trim().parse().map_err(|_| Error::BadParams("bad n".into()))?;
                if !(lo > 0.0 && hi > lo && n >= 2) {
                    return Err(Error::BadRange("need 0 < fmin < fmax and n >= 2".into()));
                }
                (0..n)
                    .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
                    .collect()
            } else if let Some(path) = &a.freq_rule {
                load_rule(path)?.nodes
            } else {
                return Err(Error::BadParams("need --freq-log or --freq-rule".into()));
            };
            let set = gen_shifts(
                a.domain.into(),
                a.zeta,
                &freqs,
                ShiftSide::InputGramian,
                a.conjugate,
                a.allow_real,
            )?;
            save_shifts(&set, &a.out)
        }
        QuadCommand::Loewner(a) => {
            let right = load_samples(&a.right)?;
            let left = match &a.left {
                Some(p) => load_samples(p)?,
                None => right.clone(),
            };
            let q = build_loewner(&right, &left, LoewnerStructure::Block)?;
            save_quadruplet(&q, &a.out)
        }
        QuadCommand::Impulse(a) => {
            let samples = load_samples(&a.samples)?;
            let t = load_rule(&a.t_rule)?;
            let tau = match &a.tau_rule {
                Some(p) => load_rule(p)?,
                None => t.clone(),
            };
            let q = build_impulse_ct(&samples, &t.nodes, &tau.nodes)?;
            save_quadruplet(&q, &a.out)
        }
        QuadCommand::Hankel(a) => {
            let samples = load_samples(&a.samples)?;
            let h: Vec<quadmor::ComplexMatrix> =
                samples.samples.iter().map(|s| s.value.clone()).collect();
            let q = build_hankel_dt(&h, a.np, a.nq)?;
            save_quadruplet(&q, &a.out)
        }
    }
}

#[derive(Args)]
pub struct ShiftArgs {
    #[arg(long, value_enum)]
    domain: DomainArg,
    #[arg(long)]
    zeta: f64,
    /// Log-spaced frequencies "fmin,fmax,n".
    #[arg(long)]
    freq_log: Option<String>,
    /// Frequencies from a rule file's nodes.
    #[arg(long)]
    freq_rule: Option<PathBuf>,
    #[arg(long, default_value_t = false)]
    conjugate: bool,
    #[arg(long, default_value_t = false)]
    allow_real: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct LoewnerArgs {
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    left: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct ImpulseArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    t_rule: PathBuf,
    #[arg(long)]
    tau_rule: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct HankelArgs {
    #[arg(long)]
    samples: PathBuf,
    #[arg(long)]
    np: usize,
    #[arg(long)]
    nq: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum BtAlgo {
    DdAdi,
    DdPorkDt,
    Quadbt,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GramianArg {
    Exact,
    Light,
}

impl From<GramianArg> for GramianMode {
    fn from(g: GramianArg) -> GramianMode {
        match g {
            GramianArg::Exact => GramianMode::Exact,
            GramianArg::Light => GramianMode::Light,
        }
    }
}

#[derive(Args)]
pub struct ReduceBtArgs {
    #[arg(long, value_enum)]
    algo: BtAlgo,
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    left_samples: Option<PathBuf>,
    #[arg(long)]
    shifts: Option<PathBuf>,
    #[arg(long)]
    left_shifts: Option<PathBuf>,
    /// Prebuilt quadruplet (quadbt).
    #[arg(long)]
    quad: Option<PathBuf>,
    #[arg(long)]
    rule_p: Option<PathBuf>,
    #[arg(long)]
    rule_q: Option<PathBuf>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    gramians: GramianArg,
    #[arg(long, default_value_t = false)]
    realify: bool,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn reduce_bt(a: ReduceBtArgs) -> Result<()> {
    let opts = CompressOptions {
        rank: a.r,
        directions: None,
        realify: a.realify,
    };
    let (rom, report) = match a.algo {
        BtAlgo::Quadbt => {
            let q = load_quad(a.quad.as_ref().ok_or_else(|| {
                Error::BadParams("quadbt needs --quad".into())
            })?)?;
            let rp = a.rule_p.as_ref().map(|p| load_rule(p)).transpose()?;
            let rq = a.rule_q.as_ref().map(|p| load_rule(p)).transpose()?;
            if q.kind != QuadrupletKind::HankelDt && (rp.is_none() || rq.is_none()) {
                return Err(Error::BadParams("quadbt needs --rule-p and --rule-q".into()));
            }
            quadbt(&q, rp.as_ref(), rq.as_ref(), a.r)?
        }
        BtAlgo::DdAdi | BtAlgo::DdPorkDt => {
            let samples = load_samples(a.samples.as_ref().ok_or_else(|| {
                Error::BadParams("need --samples".into())
            })?)?;
            let left = match &a.left_samples {
                Some(p) => load_samples(p)?,
                None => samples.clone(),
            };
            let shifts = load_shift_set(a.shifts.as_ref().ok_or_else(|| {
                Error::BadParams("need --shifts".into())
            })?)?;
            let left_shifts = match &a.left_shifts {
                Some(p) => load_shift_set(p)?,
                None => shifts.clone(),
            };
            match a.algo {
                BtAlgo::DdAdi => {
                    dd_adi_bt(&samples, &left, &shifts, &left_shifts, a.gramians.into(), &opts)?
                }
                _ => dd_pork_dtbt(&samples, &left, &shifts, &left_shifts, a.gramians.into(), &opts)?,
            }
        }
    };
    save_state_space(&rom, &a.out)?;
    if let Some(report_path) = &a.report {
        save_hsv_csv(&report.hsv_estimates, report_path)?;
    }
    note!(
        "reduced to order {} (numerical rank {})",
        report.reduced_order,
        report.numerical_rank
    );
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
pub enum IrkaStrategy {
    Fd,
    Td,
    Pork,
}

#[derive(Args)]
pub struct ReduceIrkaArgs {
    #[arg(long)]
    quad: PathBuf,
    #[arg(long, value_enum)]
    strategy: IrkaStrategy,
    #[arg(long)]
    rule_p: Option<PathBuf>,
    #[arg(long)]
    rule_q: Option<PathBuf>,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long, value_enum, default_value = "light")]
    gramians: GramianArg,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn reduce_irka(a: ReduceIrkaArgs) -> Result<()> {
    let q = load_quad(&a.quad)?;
    let rp = a.rule_p.as_ref().map(|p| load_rule(p)).transpose()?;
    let rq = a.rule_q.as_ref().map(|p| load_rule(p)).transpose()?;
    let need_rules = || -> Result<(&QuadratureRule, &QuadratureRule)> {
        match (&rp, &rq) {
            (Some(p), Some(qq)) => Ok((p, qq)),
            _ => Err(Error::BadParams("this strategy needs --rule-p and --rule-q".into())),
        }
    };
    let strategy = match (a.strategy, q.provenance.domain, q.kind) {
        (IrkaStrategy::Fd, Domain::Continuous, _) => {
            let (p, qq) = need_rules()?;
            ProjectorStrategy::FrequencyCt { rule_right: p, rule_left: qq }
        }
        (IrkaStrategy::Fd, Domain::Discrete, _) => {
            let (p, qq) = need_rules()?;
            ProjectorStrategy::FrequencyDt { rule_right: p, rule_left: qq }
        }
        (IrkaStrategy::Td, Domain::Continuous, _) => {
            let (p, qq) = need_rules()?;
            ProjectorStrategy::TimeCt { rule_right: p, rule_left: qq }
        }
        (IrkaStrategy::Td, Domain::Discrete, _) => ProjectorStrategy::TimeDt,
        (IrkaStrategy::Pork, Domain::Continuous, _) => {
            ProjectorStrategy::PorkCt { mode: a.gramians.into() }
        }
        (IrkaStrategy::Pork, Domain::Discrete, _) => {
            ProjectorStrategy::PorkDt { mode: a.gramians.into() }
        }
    };
    let init = default_init(&q, a.r)?;
    let cfg = IrkaConfig {
        tol: a.tol,
        max_iter: a.max_iter,
        stability_reflection: true,
    };
    let (rom, report) = irka_run(&q, strategy, &init, &cfg)?;
    save_state_space(&rom, &a.out)?;
    if let Some(path) = &a.report {
        save_irka_csv(&report, path)?;
    }
    note!(
        "irka: {} iterations, converged = {}",
        report.iterations,
        report.converged
    );
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Metric {
    /// Relative grid H-infinity error.
    HinfGrid,
    /// Relative H2 error.
    H2,
    /// Worst relative deviation over the leading Hankel singular values.
    Hsv,
}

#[derive(Args)]
pub struct CompareArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    rom: PathBuf,
    #[arg(long, value_enum)]
    metric: Metric,
    /// Frequency band "lo,hi" for continuous-time grids.
    #[arg(long, default_value = "1e-3,1e3")]
    band: String,
    #[arg(long, default_value_t = 400)]
    grid: usize,
    /// Also dump the truth sigma plot to this CSV.
    #[arg(long)]
    sigma_csv: Option<PathBuf>,
}

fn compare(a: CompareArgs) -> Result<()> {
    let truth = load_system(&a.truth)?;
    let rom = load_system(&a.rom)?;
    let band = parse_pair(&a.band)?;
    let value = match a.metric {
        Metric::HinfGrid => {
            let denom = hinf_grid(&truth, band, a.grid)?;
            let mut worst = 0.0f64;
            for s in quadmor::system::eval_grid(truth.domain, band, a.grid) {
                let g = truth.tf_eval(s)?;
                let gr = rom.tf_eval(s)?;
                let d = (&g - &gr).frobenius_norm();
                worst = worst.max(d);
            }
            worst / denom.max(1e-300)
        }
        Metric::H2 => h2_error(&truth, &rom)? / h2_norm(&truth)?.max(1e-300),
        Metric::Hsv => {
            let ht = hsv(&truth)?;
            let hr = hsv(&rom)?;
            let mut worst = 0.0f64;
            for (a, b) in ht.iter().zip(hr.iter()) {
                worst = worst.max((a - b).abs() / a.max(1e-300));
            }
            worst
        }
    };
    if let Some(path) = &a.sigma_csv {
        let rows = quadmor::sigma_grid(&truth, band, a.grid)?;
        save_sigma_csv(&rows, path)?;
    }
    println!("{value:.6e}");
    Ok(())
}
