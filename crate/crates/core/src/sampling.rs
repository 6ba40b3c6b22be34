//! Sample acquisition: turning an oracle or a stored file into a
//! [`SampleSet`] at requested evaluation points.

use crate::dense::ComplexMatrix;
use crate::error::{Error, Result};
use crate::system::{Domain, StateSpace};
use num_complex::Complex64;

/// What the sample values mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    /// Transfer function values at complex points.
    TransferFunction,
    /// Impulse response values at (real) times or step indices.
    ImpulseResponse,
}

/// One matrix-valued sample, optionally with a derivative sample.
#[derive(Clone, Debug)]
pub struct Sample {
    pub point: Complex64,
    pub value: ComplexMatrix,
    pub derivative: Option<ComplexMatrix>,
}

/// Matrix-valued samples over a point set.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub domain: Domain,
    pub kind: SampleKind,
    pub outputs: usize,
    pub inputs: usize,
    pub samples: Vec<Sample>,
}

impl SampleSet {
    pub fn points(&self) -> Vec<Complex64> {
        self.samples.iter().map(|s| s.point).collect()
    }

    /// Lookup by point with a relative tolerance.
    pub fn find(&self, point: Complex64) -> Option<&Sample> {
        self.samples.iter().find(|s| points_coincide(s.point, point))
    }

    pub fn value_at(&self, point: Complex64) -> Result<&ComplexMatrix> {
        self.find(point)
            .map(|s| &s.value)
            .ok_or(Error::MissingSample { point })
    }

    pub fn derivative_at(&self, point: Complex64) -> Result<&ComplexMatrix> {
        self.find(point)
            .and_then(|s| s.derivative.as_ref())
            .ok_or(Error::MissingDerivative { point })
    }
}

/// Coincidence test used everywhere divided differences appear: below this
/// the difference quotient is numerically meaningless and Hermite data is
/// required instead.
pub fn points_coincide(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * a.norm().max(b.norm()).max(1e-300)
}

/// Where samples come from.
pub enum SampleSource<'a> {
    Oracle(&'a StateSpace),
    Stored(&'a SampleSet),
}

/// Evaluate (or validate) transfer-function samples at `points`, with
/// derivative samples at the sublist `need_derivative_at`. Duplicate points
/// collapse to one sample carrying the union of derivative requirements;
/// output order follows first occurrence.
pub fn acquire_samples(
    source: SampleSource,
    points: &[Complex64],
    need_derivative_at: &[Complex64],
) -> Result<SampleSet> {
    let mut unique: Vec<(Complex64, bool)> = Vec::with_capacity(points.len());
    for &p in points {
        if let Some(entry) = unique.iter_mut().find(|(q, _)| points_coincide(*q, p)) {
            // A repeated point is a confluent request: it needs the
            // derivative to stay well defined downstream.
            entry.1 = true;
        } else {
            unique.push((p, false));
        }
    }
    for &p in need_derivative_at {
        if let Some(entry) = unique.iter_mut().find(|(q, _)| points_coincide(*q, p)) {
            entry.1 = true;
        } else {
            return Err(Error::MissingSample { point: p });
        }
    }
    match source {
        SampleSource::Oracle(sys) => {
            let mut samples = Vec::with_capacity(unique.len());
            for (p, want_deriv) in unique {
                let sample = if want_deriv {
                    let (v, d) = sys.tf_eval_with_derivative(p)?;
                    Sample {
                        point: p,
                        value: v,
                        derivative: Some(d),
                    }
                } else {
                    Sample {
                        point: p,
                        value: sys.tf_eval(p)?,
                        derivative: None,
                    }
                };
                samples.push(sample);
            }
            Ok(SampleSet {
                domain: sys.domain,
                kind: SampleKind::TransferFunction,
                outputs: sys.outputs(),
                inputs: sys.inputs(),
                samples,
            })
        }
        SampleSource::Stored(set) => {
            let mut samples = Vec::with_capacity(unique.len());
            for (p, want_deriv) in unique {
                let found = set.find(p).ok_or(Error::MissingSample { point: p })?;
                if want_deriv && found.derivative.is_none() {
                    return Err(Error::MissingDerivative { point: p });
                }
                samples.push(Sample {
                    point: p,
                    value: found.value.clone(),
                    derivative: found.derivative.clone(),
                });
            }
            Ok(SampleSet {
                domain: set.domain,
                kind: set.kind,
                outputs: set.outputs,
                inputs: set.inputs,
                samples,
            })
        }
    }
}

/// Impulse-response samples (values and derivatives) of a continuous-time
/// system at the union of `t_grid`, `tau_grid`, and all pairwise sums.
pub fn acquire_impulse_samples_ct(
    sys: &StateSpace,
    t_grid: &[f64],
    tau_grid: &[f64],
) -> Result<SampleSet> {
    let times = impulse_sample_times(t_grid, tau_grid);
    let responses = sys.impulse_ct_grid(&times)?;
    let samples = times
        .iter()
        .zip(responses)
        .map(|(&t, (h, hp))| Sample {
            point: Complex64::new(t, 0.0),
            value: h,
            derivative: Some(hp),
        })
        .collect();
    Ok(SampleSet {
        domain: Domain::Continuous,
        kind: SampleKind::ImpulseResponse,
        outputs: sys.outputs(),
        inputs: sys.inputs(),
        samples,
    })
}

/// Deduplicated union of the grids and their pairwise sums; the quadruplet
/// builder enumerates the same sums so lookups match bit for bit.
pub fn impulse_sample_times(t_grid: &[f64], tau_grid: &[f64]) -> Vec<f64> {
    let mut times: Vec<f64> = Vec::with_capacity(t_grid.len() * tau_grid.len());
    times.extend_from_slice(t_grid);
    times.extend_from_slice(tau_grid);
    for &tau in tau_grid {
        for &t in t_grid {
            times.push(tau + t);
        }
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    times
}
