//! The four commands. Each returns a JSON report and whether every requested
//! check passed.

use serde_json::{json, Value};

use super::file::Instance;
use super::trace::{render_trace, BoundParams, TraceFormat};
use crate::cone_space::{
    verify_cone_axioms, verify_metric_axioms, ConeSamplePlan, MetricSamplePlan, Point,
};
use crate::contractions::{
    check_condition, fit_constants, verify_zamfirescu_reduction, ClassKind, ClassSpec, FitOptions,
    FitOutcome, PairSet,
};
use crate::error::{Error, Result};
use crate::oracle::{
    cross_validate, enumerate_fixed_points, exhaustive_condition_check, exhaustive_promotion_check,
    exhaustive_reduction_check, tightest_constants, FiniteInstance,
};
use crate::solver::{solve, DecayOptions, SolveOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Solve,
    Oracle,
    Fit,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Solve => "solve",
            Command::Oracle => "oracle",
            Command::Fit => "fit",
        }
    }
}

/// Command-line overrides of the instance's run section.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub x0: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub format: TraceFormat,
    pub class: Option<ClassKind>,
    pub pin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub passed: bool,
    pub report: Value,
    /// The rendered trace, for `solve`.
    pub trace: Option<String>,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn run(command: Command, inst: &Instance, opts: &RunOptions) -> Result<RunOutcome> {
    let seed = opts.seed.unwrap_or(inst.run.seed);
    let samples = opts.samples.unwrap_or(inst.run.samples);
    if samples == 0 {
        return Err(Error::config("samples must be >= 1"));
    }
    let mut outcome = match command {
        Command::Verify => verify(inst, seed, samples)?,
        Command::Solve => solve_command(inst, opts, seed)?,
        Command::Oracle => oracle(inst)?,
        Command::Fit => fit(inst, opts)?,
    };
    if let Value::Object(map) = &mut outcome.report {
        map.insert("command".into(), json!(command.name()));
        map.insert("instance".into(), json!(inst.name));
        map.insert("seed".into(), json!(seed));
        map.insert("passed".into(), json!(outcome.passed));
    }
    Ok(outcome)
}

fn verify(inst: &Instance, seed: u64, samples: usize) -> Result<RunOutcome> {
    let space = &inst.space;
    let cone = verify_cone_axioms(
        space.cone(),
        &ConeSamplePlan {
            count: samples,
            seed,
        },
    );
    let plan = if space.carrier().is_finite() {
        MetricSamplePlan::Exhaustive
    } else {
        MetricSamplePlan::Random {
            count: samples,
            seed,
        }
    };
    let metric = verify_metric_axioms(space, &plan)?;
    let mut passed = cone.passed && metric.passed;
    let mut report = json!({ "cone_axioms": cone, "metric_axioms": metric });
    if let Some(class) = &inst.class {
        let cond = check_condition(space, &inst.maps, class, &PairSet::Grid)?;
        passed &= cond.holds;
        report["condition"] = to_value(&cond);
        if let ClassSpec::Tz { a, b, c } = *class {
            let red = verify_zamfirescu_reduction(space, &inst.maps, a, b, c, &PairSet::Grid)?;
            passed &= red.holds();
            report["reduction"] = to_value(&red);
        }
    }
    Ok(RunOutcome {
        passed,
        report,
        trace: None,
    })
}

fn solve_command(inst: &Instance, opts: &RunOptions, seed: u64) -> Result<RunOutcome> {
    let space = &inst.space;
    let x0 = match opts.x0.as_ref().or(inst.run.x0.as_ref()) {
        Some(c) => Point::new(c.clone()),
        None => space
            .carrier()
            .grid_points()
            .pop()
            .expect("carriers have at least one point"),
    };
    space
        .check_point(&x0)
        .map_err(|_| Error::config(format!("x0 {x0} is not a carrier point")))?;
    let mut rule = inst.run.stopping;
    if let Some(e) = opts.epsilon {
        rule.epsilon = e;
    }
    rule.validate()?;
    let k = inst.run.normal_constant.unwrap_or(1.0);
    let solve_opts = SolveOptions {
        class: inst.class,
        normal_constant: Some(k),
        extra_starts: inst.run.starts.iter().cloned().map(Point::new).collect(),
        decay: DecayOptions {
            seed,
            ..DecayOptions::default()
        },
    };
    let r = solve(space, &inst.maps, &x0, &rule, &solve_opts)?;
    let bound = r.certificate.rate_h.map(|h| BoundParams { h, k });
    let trace = render_trace(&r.trace, opts.format, bound)?;
    let report = json!({
        "x0": x0,
        "stopping": rule,
        "iterations": r.trace.iterations,
        "stop_reason": r.trace.stop_reason,
        "certificate": r.certificate,
        "decay": r.decay,
    });
    Ok(RunOutcome {
        passed: r.passed(),
        report,
        trace: Some(trace),
    })
}

fn oracle(inst: &Instance) -> Result<RunOutcome> {
    if !inst.space.carrier().is_finite() {
        return Err(Error::Unsupported(
            "the oracle command needs a finite carrier".into(),
        ));
    }
    let fin = FiniteInstance::from_space(&inst.space, &inst.maps)?;
    let mut tightest = serde_json::Map::new();
    for kind in ClassKind::ALL.into_iter().filter(|k| *k != ClassKind::Tz) {
        tightest.insert(
            kind.name().into(),
            to_value(&tightest_constants(&fin, kind, None)?),
        );
    }
    let mut report = json!({
        "points": fin.len(),
        "t_injective": fin.t_injective(),
        "fixed_points": enumerate_fixed_points(&fin),
        "tightest": tightest,
    });
    let mut passed = true;
    if let Some(class) = &inst.class {
        let check = exhaustive_condition_check(&fin, class)?;
        let cv = cross_validate(&fin, class)?;
        passed &= check.holds && cv.passed;
        report["condition"] = to_value(&check);
        report["cross_validation"] = to_value(&cv);
        if let ClassSpec::Tz { a, b, c } = *class {
            let red = exhaustive_reduction_check(&fin, a, b, c)?;
            passed &= red.holds();
            report["reduction"] = to_value(&red);
        }
        if let Some(p) = exhaustive_promotion_check(&fin, class)? {
            passed &= p.sound();
            report["promotion"] = to_value(&p);
        }
    }
    Ok(RunOutcome {
        passed,
        report,
        trace: None,
    })
}

fn fit(inst: &Instance, opts: &RunOptions) -> Result<RunOutcome> {
    let kind = opts
        .class
        .or(inst.class.map(|c| c.kind()))
        .ok_or_else(|| Error::config("fit needs a class kind (--class or the instance's class)"))?;
    let fit_opts = FitOptions {
        pinned: opts.pin,
        ..FitOptions::default()
    };
    let outcome = fit_constants(&inst.space, &inst.maps, kind, &PairSet::Grid, &fit_opts)?;
    Ok(RunOutcome {
        passed: matches!(outcome, FitOutcome::Fitted { .. }),
        report: json!({ "class_kind": kind, "fit": outcome }),
        trace: None,
    })
}
