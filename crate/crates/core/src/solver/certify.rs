use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decay::{geometric_decay_check, DecayOptions, DecayReport};
use super::picard::{picard_iterate, IterationTrace, StopReason, StoppingRule};
use crate::cone_space::{ConeMetricSpace, Point};
use crate::contractions::{primary_form_rate, ClassSpec, MapPair};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointCheck {
    pub point: Point,
    pub residual_norm: f64,
    pub certified: bool,
}

/// Certifies `z` as a fixed point of `S` when `‖d(Sz, z)‖ ≤ epsilon`.
pub fn certify_fixed_point(
    space: &ConeMetricSpace,
    maps: &MapPair,
    z: &Point,
    epsilon: f64,
) -> Result<FixedPointCheck> {
    space.check_point(z)?;
    let sz = maps.apply_s(space, z)?;
    let residual_norm = space.cone().norm(&space.distance_unchecked(&sz, z));
    Ok(FixedPointCheck {
        point: z.clone(),
        residual_norm,
        certified: residual_norm <= epsilon,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Uniqueness {
    Unique { fixed_point: Point },
    NonUnique { witnesses: Vec<Point> },
    Unknown { reason: String },
}

impl Uniqueness {
    pub fn is_unique(&self) -> bool {
        matches!(self, Uniqueness::Unique { .. })
    }
}

/// Iterates from every start (in parallel) and compares the limits.
///
/// Limits within `rule.merge_tolerance` of an earlier one, in start order,
/// are merged into it. Any run that does not converge to a certified fixed
/// point makes the verdict unknown.
pub fn uniqueness_probe(
    space: &ConeMetricSpace,
    maps: &MapPair,
    starts: &[Point],
    rule: &StoppingRule,
) -> Result<Uniqueness> {
    if starts.is_empty() {
        return Err(Error::config("uniqueness probe needs at least one start"));
    }
    let traces: Vec<IterationTrace> = starts
        .par_iter()
        .map(|x0| picard_iterate(space, maps, x0, rule))
        .collect::<Result<_>>()?;
    uniqueness_from_traces(space, maps, &traces, rule)
}

pub(crate) fn uniqueness_from_traces(
    space: &ConeMetricSpace,
    maps: &MapPair,
    traces: &[IterationTrace],
    rule: &StoppingRule,
) -> Result<Uniqueness> {
    let mut reps: Vec<Point> = Vec::new();
    for (i, trace) in traces.iter().enumerate() {
        if trace.stop_reason != StopReason::Converged {
            return Ok(Uniqueness::Unknown {
                reason: format!("start {i} stopped with {:?}", trace.stop_reason),
            });
        }
        let z = trace.final_point();
        let check = certify_fixed_point(space, maps, z, rule.epsilon)?;
        if !check.certified {
            return Ok(Uniqueness::Unknown {
                reason: format!("limit of start {i} has residual {:e}", check.residual_norm),
            });
        }
        let cone = space.cone();
        let merged = reps
            .iter()
            .any(|r| cone.norm(&space.distance_unchecked(r, z)) <= rule.merge_tolerance);
        if !merged {
            reps.push(z.clone());
        }
    }
    Ok(if reps.len() == 1 {
        Uniqueness::Unique {
            fixed_point: reps.pop().unwrap(),
        }
    } else {
        Uniqueness::NonUnique { witnesses: reps }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Present only when the residual is within the rule's epsilon.
    pub fixed_point: Option<Point>,
    pub residual_norm: f64,
    /// Enforced per-step factor, the `δ` of the promoted weak form.
    pub rate_h: Option<f64>,
    /// `δ/(1−2δ)`, reported for comparison and never enforced.
    pub primary_form_rate: Option<f64>,
    pub measured_rate: Option<f64>,
    pub cauchy_bound_ok: Option<bool>,
    pub uniqueness: Uniqueness,
    /// Last `T Sⁿ x₀` of the main run.
    pub t_image_limit: Point,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Class the pair is claimed to satisfy; enables the decay check.
    pub class: Option<ClassSpec>,
    pub normal_constant: Option<f64>,
    /// Extra starts for the uniqueness probe, besides `x0`.
    pub extra_starts: Vec<Point>,
    pub decay: DecayOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub trace: IterationTrace,
    pub certificate: Certificate,
    pub decay: Option<DecayReport>,
}

impl SolveReport {
    /// Converged to a certified point and, when checked, the decay bounds held.
    pub fn passed(&self) -> bool {
        self.certificate.fixed_point.is_some() && self.decay.as_ref().is_none_or(|d| d.passed)
    }
}

/// Iterates from `x0`, certifies the limit, checks the decay bounds when a
/// class is given and probes uniqueness over `x0` and the extra starts.
pub fn solve(
    space: &ConeMetricSpace,
    maps: &MapPair,
    x0: &Point,
    rule: &StoppingRule,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    let mut starts = vec![x0.clone()];
    starts.extend(opts.extra_starts.iter().cloned());
    let traces: Vec<IterationTrace> = starts
        .par_iter()
        .map(|s| picard_iterate(space, maps, s, rule))
        .collect::<Result<_>>()?;
    let uniqueness = uniqueness_from_traces(space, maps, &traces, rule)?;
    let trace = traces.into_iter().next().expect("x0 is always a start");

    let check = certify_fixed_point(space, maps, trace.final_point(), rule.epsilon)?;
    let rate_h = match &opts.class {
        Some(spec) => {
            spec.validate()?;
            spec.step_rate()
        }
        None => None,
    };
    let decay = match rate_h {
        Some(h) => Some(geometric_decay_check(
            space,
            &trace,
            h,
            opts.normal_constant.unwrap_or(1.0),
            &opts.decay,
        )?),
        None => None,
    };
    let certificate = Certificate {
        fixed_point: check.certified.then(|| check.point.clone()),
        residual_norm: check.residual_norm,
        rate_h,
        primary_form_rate: rate_h.and_then(primary_form_rate),
        measured_rate: trace.step_ratios().into_iter().reduce(f64::max),
        cauchy_bound_ok: decay.as_ref().map(|d| d.cauchy_ok),
        uniqueness,
        t_image_limit: trace.t_image_limit().clone(),
    };
    Ok(SolveReport {
        trace,
        certificate,
        decay,
    })
}
