//! Quadrature rules, domain transformations, and shift generation.
//!
//! Two weight conventions coexist. Plain rules ([`gauss_legendre`],
//! [`map_domain`]) carry classical weights where `sum w_i f(x_i)`
//! approximates the integral. Gramian-factor rules ([`exp_trapezoid`]) store
//! the square root of the measure-normalized cell weight, ready to sit on
//! the diagonal of a balancing factor. [`QuadratureRule::gramian_factors`]
//! converts either convention to the Gramian form that the compression and
//! projector code consumes.

use crate::error::{Error, Result};
use crate::system::Domain;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Geometric descriptor of where the nodes live.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleDomain {
    /// Finite interval `[a, b]`.
    Interval(f64, f64),
    /// Frequency axis in rad/s (or rad/sample); nodes are frequencies.
    FrequencyAxis,
    /// Time axis in seconds; nodes are times.
    TimeAxis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightConvention {
    /// `sum w_i f(x_i)` approximates the integral.
    Classical,
    /// `w_i` is a Gramian factor; `w_i^2` carries the measure normalization.
    GramianFactor,
}

/// Nodes and weights on a stated domain.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub domain: RuleDomain,
    pub convention: WeightConvention,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Classical approximation `sum w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        debug_assert_eq!(self.convention, WeightConvention::Classical);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Per-node Gramian factors `g_i` such that `g_i^2` multiplies the
    /// sampled integrand in a Gramian sum. Frequency-domain sums carry the
    /// `1/(2 pi)` of the inverse transform; time-domain sums do not.
    pub fn gramian_factors(&self, frequency_measure: bool) -> Vec<f64> {
        match self.convention {
            WeightConvention::GramianFactor => self.weights.clone(),
            WeightConvention::Classical => {
                let scale = if frequency_measure { 2.0 * PI } else { 1.0 };
                self.weights.iter().map(|w| (w / scale).sqrt()).collect()
            }
        }
    }
}

/// Classical Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are Legendre roots found by Newton iteration on the three-term
/// recurrence; exact for polynomials up to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n < 1 {
        return Err(Error::BadParams("gauss-legendre needs n >= 1".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: RuleDomain::Interval(-1.0, 1.0),
        convention: WeightConvention::Classical,
    })
}

/// Legendre polynomial value and derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Log-spaced trapezoid rule over a positive frequency band, stored in
/// Gramian-factor convention: `w_i = sqrt(delta_i / (2 pi))` where
/// `delta_i` is the trapezoid cell width.
pub fn exp_trapezoid(f_min: f64, f_max: f64, n: usize) -> Result<QuadratureRule> {
    if !(f_min > 0.0 && f_min < f_max) {
        return Err(Error::BadRange(format!(
            "need 0 < f_min < f_max, got [{f_min}, {f_max}]"
        )));
    }
    if n < 2 {
        return Err(Error::BadRange("exp-trapezoid needs n >= 2".into()));
    }
    let ratio = (f_max / f_min).ln();
    let mut nodes: Vec<f64> = (0..n)
        .map(|i| f_min * (ratio * i as f64 / (n - 1) as f64).exp())
        .collect();
    nodes[n - 1] = f_max;
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let delta = if i == 0 {
                (nodes[1] - nodes[0]) / 2.0
            } else if i == n - 1 {
                (nodes[n - 1] - nodes[n - 2]) / 2.0
            } else {
                (nodes[i + 1] - nodes[i - 1]) / 2.0
            };
            (delta / (2.0 * PI)).sqrt()
        })
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        domain: RuleDomain::FrequencyAxis,
        convention: WeightConvention::GramianFactor,
    })
}

/// Target of [`map_domain`].
#[derive(Clone, Copy, Debug)]
pub enum MapTarget {
    /// `y = tan(pi x / 2)` onto the whole axis.
    InfiniteAxis,
    /// Affine map onto `[a, b]`.
    Interval(f64, f64),
}

/// Transform a classical rule on `[-1, 1]` onto another domain.
pub fn map_domain(rule: &QuadratureRule, target: MapTarget) -> Result<QuadratureRule> {
    if rule.domain != RuleDomain::Interval(-1.0, 1.0)
        || rule.convention != WeightConvention::Classical
    {
        return Err(Error::BadParams(
            "map_domain expects a classical rule on [-1, 1]".into(),
        ));
    }
    match target {
        MapTarget::InfiniteAxis => {
            let mut nodes = Vec::with_capacity(rule.len());
            let mut weights = Vec::with_capacity(rule.len());
            for (&x, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
                if (x.abs() - 1.0).abs() < 1e-14 {
                    return Err(Error::NodeAtSingularity(x));
                }
                let half = 0.5 * PI * x;
                nodes.push(half.tan());
                let sec = 1.0 / half.cos();
                weights.push(w * 0.5 * PI * sec * sec);
            }
            Ok(QuadratureRule {
                nodes,
                weights,
                domain: RuleDomain::FrequencyAxis,
                convention: WeightConvention::Classical,
            })
        }
        MapTarget::Interval(a, b) => {
            if !(b > a) {
                return Err(Error::BadRange(format!("empty interval [{a}, {b}]")));
            }
            let nodes = rule
                .nodes
                .iter()
                .map(|&x| a + (b - a) * (x + 1.0) / 2.0)
                .collect();
            let weights = rule.weights.iter().map(|&w| w * (b - a) / 2.0).collect();
            Ok(QuadratureRule {
                nodes,
                weights,
                domain: RuleDomain::Interval(a, b),
                convention: WeightConvention::Classical,
            })
        }
    }
}

/// Which Gramian a shift set targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftSide {
    InputGramian,
    OutputGramian,
}

/// Interpolation shifts with the damping used to build them.
#[derive(Clone, Debug)]
pub struct ShiftSet {
    pub shifts: Vec<Complex64>,
    pub zeta: f64,
    pub side: ShiftSide,
    pub domain: Domain,
}

/// Build damped shifts from frequencies.
///
/// Continuous: `sigma = zeta |w| / sqrt(1 - zeta^2) + j w`, so the real part
/// is the damping radius. Discrete: `sigma = exp(zeta |w| / sqrt(1 - zeta^2))
/// * exp(j w)`, modulus just outside the unit circle. A zero frequency is
/// only admitted with `allow_real`, yielding the real shift at unit
/// reference frequency.
pub fn gen_shifts(
    domain: Domain,
    zeta: f64,
    frequencies: &[f64],
    side: ShiftSide,
    conjugate_closure: bool,
    allow_real: bool,
) -> Result<ShiftSet> {
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(Error::BadDamping(format!("zeta {zeta} outside (0, 1]")));
    }
    if zeta == 1.0 && frequencies.iter().any(|&w| w != 0.0) {
        return Err(Error::BadDamping(
            "zeta = 1 only admits zero frequencies".into(),
        ));
    }
    let radius = |w: f64| -> f64 {
        if w == 0.0 {
            zeta / (1.0 - zeta * zeta).sqrt().max(f64::MIN_POSITIVE)
        } else {
            zeta * w.abs() / (1.0 - zeta * zeta).sqrt()
        }
    };
    let mut shifts = Vec::with_capacity(frequencies.len() * 2);
    for &w in frequencies {
        if w == 0.0 && !allow_real {
            return Err(Error::BadDamping(
                "zero frequency needs the real-shift flag".into(),
            ));
        }
        let s = match domain {
            Domain::Continuous => {
                if w == 0.0 {
                    Complex64::new(radius(0.0), 0.0)
                } else {
                    Complex64::new(radius(w), w)
                }
            }
            Domain::Discrete => {
                let m = radius(w).exp();
                Complex64::new(0.0, w).exp().scale(m)
            }
        };
        shifts.push(s);
        if conjugate_closure && s.im != 0.0 {
            shifts.push(s.conj());
        }
    }
    Ok(ShiftSet {
        shifts,
        zeta,
        side,
        domain,
    })
}

impl ShiftSet {
    /// Check shift validity: positive real part (continuous) or modulus
    /// above one (discrete).
    pub fn validate(&self) -> Result<()> {
        for &s in &self.shifts {
            match self.domain {
                Domain::Continuous => {
                    if s.re <= 0.0 {
                        return Err(Error::BadShift(format!("{s} has nonpositive real part")));
                    }
                }
                Domain::Discrete => {
                    if s.norm() <= 1.0 {
                        return Err(Error::BadShift(format!("{s} is not outside the unit circle")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_one_point() {
        let r = gauss_legendre(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_eq!(r.weights, vec![2.0]);
    }

    #[test]
    fn gauss_legendre_two_points() {
        let r = gauss_legendre(2).unwrap();
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-14);
        assert!((r.nodes[1] - x).abs() < 1e-14);
        assert!((r.weights[0] - 1.0).abs() < 1e-14);
        assert!((r.weights[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_x8() {
        let r = gauss_legendre(5).unwrap();
        let v = r.integrate(|x| x.powi(8));
        assert!((v - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exact_to_degree_2n_minus_1() {
        for n in 1..=12usize {
            let r = gauss_legendre(n).unwrap();
            for d in 0..2 * n {
                let v = r.integrate(|x| x.powi(d as i32));
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((v - exact).abs() < 1e-12, "n={n} degree={d}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn exp_trapezoid_two_nodes() {
        let r = exp_trapezoid(1.0, 10.0, 2).unwrap();
        assert_eq!(r.nodes, vec![1.0, 10.0]);
        let w = (4.5 / (2.0 * PI)).sqrt();
        assert!((r.weights[0] - w).abs() < 1e-14);
        assert!((r.weights[1] - w).abs() < 1e-14);
    }

    #[test]
    fn exp_trapezoid_geometric_nodes_and_cell_sum() {
        let r = exp_trapezoid(1e-2, 1e3, 37).unwrap();
        let ratio = r.nodes[1] / r.nodes[0];
        for w in r.nodes.windows(2) {
            assert!((w[1] / w[0] - ratio).abs() < 1e-12 * ratio);
        }
        let total: f64 = r.weights.iter().map(|w| w * w * 2.0 * PI).sum();
        assert!((total - (1e3 - 1e-2)).abs() < 1e-12 * 1e3);
    }

    #[test]
    fn map_interval_center_point() {
        let r = gauss_legendre(1).unwrap();
        let m = map_domain(&r, MapTarget::Interval(0.0, 40.0)).unwrap();
        assert!((m.nodes[0] - 20.0).abs() < 1e-14);
        assert!((m.weights[0] - 40.0).abs() < 1e-14);
        let inf = map_domain(&r, MapTarget::InfiniteAxis).unwrap();
        assert!(inf.nodes[0].abs() < 1e-14);
        assert!((inf.weights[0] - PI).abs() < 1e-14);
    }

    #[test]
    fn mapped_rule_integrates_decaying_exponential() {
        let r = gauss_legendre(40).unwrap();
        let m = map_domain(&r, MapTarget::Interval(0.0, 40.0)).unwrap();
        let v = m.integrate(|y| (-y).exp());
        assert!((v - 1.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn infinite_axis_lorentzian_converges_to_pi() {
        let r = gauss_legendre(200).unwrap();
        let m = map_domain(&r, MapTarget::InfiniteAxis).unwrap();
        let v = m.integrate(|y| 1.0 / (1.0 + y * y));
        assert!((v - PI).abs() < 1e-4, "got {v}");
    }

    #[test]
    fn shifts_ct_unit_damping_ratio() {
        let s = gen_shifts(
            Domain::Continuous,
            std::f64::consts::FRAC_1_SQRT_2,
            &[1.0],
            ShiftSide::InputGramian,
            false,
            false,
        )
        .unwrap();
        assert!((s.shifts[0] - Complex64::new(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn shifts_ct_small_damping() {
        let s = gen_shifts(
            Domain::Continuous,
            1e-4,
            &[10.0],
            ShiftSide::InputGramian,
            false,
            false,
        )
        .unwrap();
        assert!((s.shifts[0].re - 1e-3).abs() < 1e-7 * 1e-3);
        s.validate().unwrap();
    }

    #[test]
    fn shifts_dt_modulus() {
        let s = gen_shifts(
            Domain::Discrete,
            1e-4,
            &[1.0],
            ShiftSide::OutputGramian,
            false,
            false,
        )
        .unwrap();
        let want = (1e-4f64 / (1.0 - 1e-8f64).sqrt()).exp();
        assert!((s.shifts[0].norm() - want).abs() < 1e-12);
        assert!(s.shifts[0].norm() > 1.0);
    }

    #[test]
    fn zero_frequency_needs_flag_and_is_real() {
        assert!(matches!(
            gen_shifts(Domain::Continuous, 0.5, &[0.0], ShiftSide::InputGramian, false, false),
            Err(Error::BadDamping(_))
        ));
        let s = gen_shifts(
            Domain::Continuous,
            0.999999,
            &[0.0],
            ShiftSide::InputGramian,
            true,
            true,
        )
        .unwrap();
        assert_eq!(s.shifts[0].im, 0.0);
        assert!(s.shifts[0].re > 0.0);
    }

    #[test]
    fn conjugate_closure_appends_pairs() {
        let s = gen_shifts(
            Domain::Continuous,
            0.1,
            &[1.0, 2.0],
            ShiftSide::InputGramian,
            true,
            false,
        )
        .unwrap();
        assert_eq!(s.shifts.len(), 4);
        assert_eq!(s.shifts[1], s.shifts[0].conj());
    }

    #[test]
    fn gramian_factor_conversion() {
        // Classical interval rule: factor^2 = w / (2 pi) on the frequency
        // measure, w alone on the time measure.
        let r = map_domain(&gauss_legendre(3).unwrap(), MapTarget::Interval(-PI, PI)).unwrap();
        let gf = r.gramian_factors(true);
        for (g, w) in gf.iter().zip(r.weights.iter()) {
            assert!((g * g - w / (2.0 * PI)).abs() < 1e-14);
        }
        let gt = r.gramian_factors(false);
        for (g, w) in gt.iter().zip(r.weights.iter()) {
            assert!((g * g - w).abs() < 1e-14);
        }
        // Gramian-factor rules pass through unchanged.
        let e = exp_trapezoid(1.0, 10.0, 5).unwrap();
        assert_eq!(e.gramian_factors(true), e.weights);
    }
}
