//! File formats: JSON documents for structured objects, JSON lines for
//! sample streams, CSV for plot data.
//!
//! Doubles are printed with 17 significant digits so every value round-trips
//! bit for bit. Complex numbers are always `[re, im]` pairs. Writers go
//! through a temp file and rename, so partially written artifacts never
//! appear under the target name.

use crate::dense::ComplexMatrix;
use crate::error::{Error, Result};
use crate::irka::IrkaReport;
use crate::quadrature::{QuadratureRule, RuleDomain, ShiftSet, ShiftSide, WeightConvention};
use crate::quadruplet::{DataQuadruplet, Provenance, QuadrupletKind};
use crate::sampling::{Sample, SampleKind, SampleSet};
use crate::system::{Domain, StateSpace};
use num_complex::Complex64;
use serde_json::Value;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

/// Any loadable artifact, dispatched on the `kind` header tag.
#[derive(Debug)]
pub enum Dataset {
    System(StateSpace),
    Samples(SampleSet),
    Quadruplet(DataQuadruplet),
    Rule(QuadratureRule),
    Shifts(ShiftSet),
}

const KNOWN_KINDS: &str = "state_space, sample_set, data_quadruplet, quadrature_rule, shift_set";

fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

fn fmt_c(z: Complex64) -> String {
    format!("[{},{}]", fmt_f64(z.re), fmt_f64(z.im))
}

fn fmt_matrix(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    write!(s, "{{\"rows\":{},\"cols\":{},\"data\":[", m.rows(), m.cols()).unwrap();
    for (k, z) in m.data().iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&fmt_c(*z));
    }
    s.push_str("]}");
    s
}

fn fmt_points(pts: &[Complex64]) -> String {
    let mut s = String::from("[");
    for (k, z) in pts.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&fmt_c(*z));
    }
    s.push(']');
    s
}

fn domain_str(d: Domain) -> &'static str {
    match d {
        Domain::Continuous => "continuous",
        Domain::Discrete => "discrete",
    }
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp~");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn save_state_space(sys: &StateSpace, path: &Path) -> Result<()> {
    write_atomic(path, &state_space_to_string(sys))
}

pub fn state_space_to_string(sys: &StateSpace) -> String {
    format!(
        "{{\"kind\":\"state_space\",\"domain\":\"{}\",\"n\":{},\"m\":{},\"p\":{},\"e\":{},\"a\":{},\"b\":{},\"c\":{}}}\n",
        domain_str(sys.domain),
        sys.order(),
        sys.inputs(),
        sys.outputs(),
        fmt_matrix(&sys.e),
        fmt_matrix(&sys.a),
        fmt_matrix(&sys.b),
        fmt_matrix(&sys.c),
    )
}

pub fn save_sample_set(set: &SampleSet, path: &Path) -> Result<()> {
    let mut s = format!(
        "{{\"kind\":\"sample_set\",\"domain\":\"{}\",\"sample_kind\":\"{}\",\"p\":{},\"m\":{}}}\n",
        domain_str(set.domain),
        match set.kind {
            SampleKind::TransferFunction => "transfer_function",
            SampleKind::ImpulseResponse => "impulse_response",
        },
        set.outputs,
        set.inputs,
    );
    for sample in &set.samples {
        write!(
            s,
            "{{\"point\":{},\"value\":{}",
            fmt_c(sample.point),
            fmt_matrix(&sample.value)
        )
        .unwrap();
        match &sample.derivative {
            Some(d) => write!(s, ",\"derivative\":{}}}\n", fmt_matrix(d)).unwrap(),
            None => s.push_str(",\"derivative\":null}\n"),
        }
    }
    write_atomic(path, &s)
}

pub fn save_quadruplet(q: &DataQuadruplet, path: &Path) -> Result<()> {
    let kind = match q.kind {
        QuadrupletKind::Loewner => "loewner",
        QuadrupletKind::ImpulseCt => "impulse_ct",
        QuadrupletKind::HankelDt => "hankel_dt",
    };
    let dirs = |d: &Option<ComplexMatrix>| match d {
        Some(m) => fmt_matrix(m),
        None => "null".into(),
    };
    let s = format!(
        "{{\"kind\":\"data_quadruplet\",\"quad_kind\":\"{}\",\"domain\":\"{}\",\"realified\":{},\
         \"eq\":{},\"aq\":{},\"bq\":{},\"cq\":{},\
         \"right_points\":{},\"left_points\":{},\"right_dirs\":{},\"left_dirs\":{}}}\n",
        kind,
        domain_str(q.provenance.domain),
        q.provenance.realified,
        fmt_matrix(&q.eq),
        fmt_matrix(&q.aq),
        fmt_matrix(&q.bq),
        fmt_matrix(&q.cq),
        fmt_points(&q.provenance.right_points),
        fmt_points(&q.provenance.left_points),
        dirs(&q.provenance.right_dirs),
        dirs(&q.provenance.left_dirs),
    );
    write_atomic(path, &s)
}

pub fn save_rule(rule: &QuadratureRule, path: &Path) -> Result<()> {
    let domain = match rule.domain {
        RuleDomain::Interval(a, b) => format!("{{\"interval\":[{},{}]}}", fmt_f64(a), fmt_f64(b)),
        RuleDomain::FrequencyAxis => "\"frequency_axis\"".into(),
        RuleDomain::TimeAxis => "\"time_axis\"".into(),
    };
    let nums = |xs: &[f64]| {
        let mut s = String::from("[");
        for (k, x) in xs.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&fmt_f64(*x));
        }
        s.push(']');
        s
    };
    let s = format!(
        "{{\"kind\":\"quadrature_rule\",\"domain\":{},\"convention\":\"{}\",\"nodes\":{},\"weights\":{}}}\n",
        domain,
        match rule.convention {
            WeightConvention::Classical => "classical",
            WeightConvention::GramianFactor => "gramian_factor",
        },
        nums(&rule.nodes),
        nums(&rule.weights),
    );
    write_atomic(path, &s)
}

pub fn save_shifts(set: &ShiftSet, path: &Path) -> Result<()> {
    let s = format!(
        "{{\"kind\":\"shift_set\",\"domain\":\"{}\",\"side\":\"{}\",\"zeta\":{},\"shifts\":{}}}\n",
        domain_str(set.domain),
        match set.side {
            ShiftSide::InputGramian => "input",
            ShiftSide::OutputGramian => "output",
        },
        fmt_f64(set.zeta),
        fmt_points(&set.shifts),
    );
    write_atomic(path, &s)
}

/// CSV rows `(index, hsv_estimate)` behind the singular value plots.
pub fn save_hsv_csv(values: &[f64], path: &Path) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut s = String::from("index,hsv_estimate\n");
    for (k, v) in values.iter().enumerate() {
        writeln!(s, "{},{}", k + 1, fmt_f64(*v)).unwrap();
    }
    write_atomic(path, &s)
}

/// CSV rows `(frequency, magnitude_db)` for sigma plots.
pub fn save_sigma_csv(rows: &[(f64, f64)], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut s = String::from("frequency,magnitude_db\n");
    for (f, db) in rows {
        writeln!(s, "{},{}", fmt_f64(*f), fmt_f64(*db)).unwrap();
    }
    write_atomic(path, &s)
}

/// CSV convergence trace: iteration, eigenvalues, tracked error term.
pub fn save_irka_csv(report: &IrkaReport, path: &Path) -> Result<()> {
    if report.eigenvalues.is_empty() {
        return Err(Error::EmptyReport);
    }
    let r = report.eigenvalues[0].len();
    let mut s = String::from("iteration");
    for k in 0..r {
        write!(s, ",re_lambda{0},im_lambda{0}", k + 1).unwrap();
    }
    s.push_str(",tracked_error_term\n");
    for (it, lams) in report.eigenvalues.iter().enumerate() {
        write!(s, "{}", it + 1).unwrap();
        for z in lams {
            write!(s, ",{},{}", fmt_f64(z.re), fmt_f64(z.im)).unwrap();
        }
        match report.tracked_error_term.get(it).copied().flatten() {
            Some(t) => writeln!(s, ",{}", fmt_f64(t)).unwrap(),
            None => s.push_str(",\n"),
        }
    }
    write_atomic(path, &s)
}

fn format_err(line: usize, message: impl Into<String>) -> Error {
    Error::FileFormat {
        line,
        message: message.into(),
    }
}

fn get<'a>(v: &'a Value, key: &str, line: usize) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| format_err(line, format!("missing field '{key}'")))
}

fn as_f64(v: &Value, line: usize) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| format_err(line, format!("expected a number, got {v}")))
}

fn as_usize(v: &Value, line: usize) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| format_err(line, format!("expected a count, got {v}")))
}

fn as_complex(v: &Value, line: usize) -> Result<Complex64> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| format_err(line, "expected an [re, im] pair"))?;
    Ok(Complex64::new(as_f64(&arr[0], line)?, as_f64(&arr[1], line)?))
}

fn as_matrix(v: &Value, line: usize) -> Result<ComplexMatrix> {
    let rows = as_usize(get(v, "rows", line)?, line)?;
    let cols = as_usize(get(v, "cols", line)?, line)?;
    let data = get(v, "data", line)?
        .as_array()
        .ok_or_else(|| format_err(line, "matrix data must be an array"))?;
    if data.len() != rows * cols {
        return Err(format_err(
            line,
            format!("matrix data length {} != {}x{}", data.len(), rows, cols),
        ));
    }
    let entries = data
        .iter()
        .map(|z| as_complex(z, line))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::new(rows, cols, entries)
}

fn as_points(v: &Value, line: usize) -> Result<Vec<Complex64>> {
    v.as_array()
        .ok_or_else(|| format_err(line, "expected an array of points"))?
        .iter()
        .map(|z| as_complex(z, line))
        .collect()
}

fn as_domain(v: &Value, line: usize) -> Result<Domain> {
    match v.as_str() {
        Some("continuous") => Ok(Domain::Continuous),
        Some("discrete") => Ok(Domain::Discrete),
        _ => Err(format_err(line, format!("unknown domain {v}"))),
    }
}

fn parse_json(text: &str, line_base: usize) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        format_err(line_base + e.line().saturating_sub(1), e.to_string())
    })
}

/// Load any artifact, dispatching on its `kind` tag.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let first_line = text
        .lines()
        .next()
        .ok_or_else(|| format_err(1, "empty file"))?;
    // Sample sets are line oriented; everything else is one JSON document.
    let header = parse_json(first_line, 1)?;
    let kind = get(&header, "kind", 1)?
        .as_str()
        .ok_or_else(|| format_err(1, "'kind' must be a string"))?
        .to_string();
    match kind.as_str() {
        "sample_set" => Ok(Dataset::Samples(load_samples_text(&text)?)),
        "state_space" => {
            let v = parse_json(&text, 1)?;
            Ok(Dataset::System(load_system_value(&v)?))
        }
        "data_quadruplet" => {
            let v = parse_json(&text, 1)?;
            Ok(Dataset::Quadruplet(load_quadruplet_value(&v)?))
        }
        "quadrature_rule" => {
            let v = parse_json(&text, 1)?;
            Ok(Dataset::Rule(load_rule_value(&v)?))
        }
        "shift_set" => {
            let v = parse_json(&text, 1)?;
            Ok(Dataset::Shifts(load_shifts_value(&v)?))
        }
        other => Err(format_err(
            1,
            format!("unknown kind '{other}'; expected one of: {KNOWN_KINDS}"),
        )),
    }
}

fn load_system_value(v: &Value) -> Result<StateSpace> {
    let domain = as_domain(get(v, "domain", 1)?, 1)?;
    StateSpace::new(
        as_matrix(get(v, "e", 1)?, 1)?,
        as_matrix(get(v, "a", 1)?, 1)?,
        as_matrix(get(v, "b", 1)?, 1)?,
        as_matrix(get(v, "c", 1)?, 1)?,
        domain,
    )
}

fn load_samples_text(text: &str) -> Result<SampleSet> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| format_err(1, "empty file"))?;
    let header = parse_json(first, 1)?;
    let domain = as_domain(get(&header, "domain", 1)?, 1)?;
    let kind = match get(&header, "sample_kind", 1)?.as_str() {
        Some("transfer_function") => SampleKind::TransferFunction,
        Some("impulse_response") => SampleKind::ImpulseResponse,
        other => return Err(format_err(1, format!("unknown sample_kind {other:?}"))),
    };
    let p = as_usize(get(&header, "p", 1)?, 1)?;
    let m = as_usize(get(&header, "m", 1)?, 1)?;
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let v = parse_json(line, lineno)?;
        let point = as_complex(get(&v, "point", lineno)?, lineno)?;
        let value = as_matrix(get(&v, "value", lineno)?, lineno)?;
        if value.rows() != p || value.cols() != m {
            return Err(format_err(
                lineno,
                format!("value is {}x{}, header says {}x{}", value.rows(), value.cols(), p, m),
            ));
        }
        let derivative = match v.get("derivative") {
            None | Some(Value::Null) => None,
            Some(d) => Some(as_matrix(d, lineno)?),
        };
        samples.push(Sample {
            point,
            value,
            derivative,
        });
    }
    Ok(SampleSet {
        domain,
        kind,
        outputs: p,
        inputs: m,
        samples,
    })
}

fn load_quadruplet_value(v: &Value) -> Result<DataQuadruplet> {
    let kind = match get(v, "quad_kind", 1)?.as_str() {
        Some("loewner") => QuadrupletKind::Loewner,
        Some("impulse_ct") => QuadrupletKind::ImpulseCt,
        Some("hankel_dt") => QuadrupletKind::HankelDt,
        other => return Err(format_err(1, format!("unknown quad_kind {other:?}"))),
    };
    let dirs = |key: &str| -> Result<Option<ComplexMatrix>> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(d) => Ok(Some(as_matrix(d, 1)?)),
        }
    };
    Ok(DataQuadruplet {
        eq: as_matrix(get(v, "eq", 1)?, 1)?,
        aq: as_matrix(get(v, "aq", 1)?, 1)?,
        bq: as_matrix(get(v, "bq", 1)?, 1)?,
        cq: as_matrix(get(v, "cq", 1)?, 1)?,
        kind,
        provenance: Provenance {
            right_points: as_points(get(v, "right_points", 1)?, 1)?,
            left_points: as_points(get(v, "left_points", 1)?, 1)?,
            right_dirs: dirs("right_dirs")?,
            left_dirs: dirs("left_dirs")?,
            domain: as_domain(get(v, "domain", 1)?, 1)?,
            realified: get(v, "realified", 1)?.as_bool().unwrap_or(false),
        },
    })
}

fn load_rule_value(v: &Value) -> Result<QuadratureRule> {
    let domain = match get(v, "domain", 1)? {
        Value::String(s) if s == "frequency_axis" => RuleDomain::FrequencyAxis,
        Value::String(s) if s == "time_axis" => RuleDomain::TimeAxis,
        Value::Object(o) => {
            let iv = o
                .get("interval")
                .and_then(|x| x.as_array())
                .filter(|a| a.len() == 2)
                .ok_or_else(|| format_err(1, "interval domain needs [a, b]"))?;
            RuleDomain::Interval(as_f64(&iv[0], 1)?, as_f64(&iv[1], 1)?)
        }
        other => return Err(format_err(1, format!("unknown rule domain {other}"))),
    };
    let convention = match get(v, "convention", 1)?.as_str() {
        Some("classical") => WeightConvention::Classical,
        Some("gramian_factor") => WeightConvention::GramianFactor,
        other => return Err(format_err(1, format!("unknown convention {other:?}"))),
    };
    let nums = |key: &str| -> Result<Vec<f64>> {
        get(v, key, 1)?
            .as_array()
            .ok_or_else(|| format_err(1, format!("'{key}' must be an array")))?
            .iter()
            .map(|x| as_f64(x, 1))
            .collect()
    };
    let nodes = nums("nodes")?;
    let weights = nums("weights")?;
    if nodes.len() != weights.len() {
        return Err(format_err(1, "nodes and weights differ in length"));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        domain,
        convention,
    })
}

fn load_shifts_value(v: &Value) -> Result<ShiftSet> {
    let side = match get(v, "side", 1)?.as_str() {
        Some("input") => ShiftSide::InputGramian,
        Some("output") => ShiftSide::OutputGramian,
        other => return Err(format_err(1, format!("unknown side {other:?}"))),
    };
    Ok(ShiftSet {
        shifts: as_points(get(v, "shifts", 1)?, 1)?,
        zeta: as_f64(get(v, "zeta", 1)?, 1)?,
        side,
        domain: as_domain(get(v, "domain", 1)?, 1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::c64;
    use crate::quadrature::{exp_trapezoid, gen_shifts};
    use crate::sampling::{acquire_samples, SampleSource};
    use crate::system::random_stable;

    #[test]
    fn state_space_round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sys.json");
        let sys = random_stable(7, 2, 3, Domain::Continuous, 100).unwrap();
        save_state_space(&sys, &path).unwrap();
        let Dataset::System(back) = load_dataset(&path).unwrap() else {
            panic!("wrong kind")
        };
        assert_eq!(sys.a.data(), back.a.data());
        assert_eq!(sys.b.data(), back.b.data());
        assert_eq!(sys.c.data(), back.c.data());
        assert_eq!(sys.domain, back.domain);
    }

    #[test]
    fn sample_set_round_trip_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let sys = random_stable(5, 1, 2, Domain::Continuous, 101).unwrap();
        let pts = [c64(0.31, 0.77), c64(1.5, -0.2)];
        let set = acquire_samples(SampleSource::Oracle(&sys), &pts, &pts[..1]).unwrap();
        save_sample_set(&set, &path).unwrap();
        let Dataset::Samples(back) = load_dataset(&path).unwrap() else {
            panic!("wrong kind")
        };
        assert_eq!(back.samples.len(), 2);
        for (a, b) in set.samples.iter().zip(back.samples.iter()) {
            assert_eq!(a.point, b.point);
            assert_eq!(a.value.data(), b.value.data());
            assert_eq!(
                a.derivative.as_ref().map(|m| m.data().to_vec()),
                b.derivative.as_ref().map(|m| m.data().to_vec())
            );
        }
    }

    #[test]
    fn rule_and_shift_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let rule = exp_trapezoid(1e-2, 1e2, 9).unwrap();
        let rp = dir.path().join("rule.json");
        save_rule(&rule, &rp).unwrap();
        let Dataset::Rule(rback) = load_dataset(&rp).unwrap() else {
            panic!()
        };
        assert_eq!(rule, rback);
        let shifts = gen_shifts(
            Domain::Continuous,
            1e-3,
            &[0.5, 2.0],
            ShiftSide::InputGramian,
            true,
            false,
        )
        .unwrap();
        let sp = dir.path().join("shifts.json");
        save_shifts(&shifts, &sp).unwrap();
        let Dataset::Shifts(sback) = load_dataset(&sp).unwrap() else {
            panic!()
        };
        assert_eq!(shifts.shifts, sback.shifts);
        assert_eq!(shifts.zeta, sback.zeta);
    }

    #[test]
    fn truncated_file_names_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let text = "{\"kind\":\"sample_set\",\"domain\":\"continuous\",\"sample_kind\":\"transfer_function\",\"p\":1,\"m\":1}\n{\"point\":[1.0,0.0],\"value\"";
        fs::write(&path, text).unwrap();
        match load_dataset(&path) {
            Err(Error::FileFormat { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected FileFormat, got {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_lists_alternatives() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        fs::write(&path, "{\"kind\":\"mystery\"}\n").unwrap();
        match load_dataset(&path) {
            Err(Error::FileFormat { message, .. }) => {
                assert!(message.contains("state_space"));
                assert!(message.contains("quadrature_rule"));
            }
            other => panic!("expected FileFormat, got {other:?}"),
        }
    }

    #[test]
    fn empty_reports_refused() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            save_hsv_csv(&[], &dir.path().join("h.csv")),
            Err(Error::EmptyReport)
        ));
        assert!(matches!(
            save_sigma_csv(&[], &dir.path().join("s.csv")),
            Err(Error::EmptyReport)
        ));
    }

    #[test]
    fn quadruplet_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let sys = random_stable(4, 1, 1, Domain::Continuous, 103).unwrap();
        let pts = [c64(0.5, 0.0), c64(1.5, 0.0)];
        let set = acquire_samples(SampleSource::Oracle(&sys), &pts, &[]).unwrap();
        let q = crate::quadruplet::build_loewner(
            &set,
            &acquire_samples(SampleSource::Oracle(&sys), &[c64(0.9, 0.0), c64(2.5, 0.0)], &[])
                .unwrap(),
            crate::quadruplet::LoewnerStructure::Block,
        )
        .unwrap();
        let path = dir.path().join("q.json");
        save_quadruplet(&q, &path).unwrap();
        let Dataset::Quadruplet(back) = load_dataset(&path).unwrap() else {
            panic!()
        };
        assert_eq!(q.eq.data(), back.eq.data());
        assert_eq!(q.provenance.right_points, back.provenance.right_points);
        assert_eq!(q.kind, back.kind);
    }
}
