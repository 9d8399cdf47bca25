//! Smallest class constants that pass on a pair set, by bisection.

use serde::{Deserialize, Serialize};

use super::check::{all_terms, holds_on, report_from_terms, rhs_terms, PairSet, Terms};
use super::class::{ClassKind, ClassSpec};
use super::maps::MapPair;
use crate::cone_space::{ConeMetricSpace, ConeSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Absolute bisection tolerance.
    pub tolerance: f64,
    /// Upper end of the search for the unbounded weak-class coefficient.
    pub l_max: f64,
    /// Fixes `δ` (or `θ`) for the weak classes and fits only the second constant.
    pub pinned: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tolerance: 1e-6,
            l_max: 1e6,
            pinned: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted {
        spec: ClassSpec,
        pairs_used: usize,
        degenerate_pairs: usize,
    },
    Infeasible {
        reason: String,
        witnesses: Vec<(Vec<f64>, Vec<f64>)>,
    },
    Inconclusive {
        reason: String,
    },
}

impl FitOutcome {
    pub fn spec(&self) -> Option<&ClassSpec> {
        match self {
            FitOutcome::Fitted { spec, .. } => Some(spec),
            _ => None,
        }
    }
}

fn spec_for(kind: ClassKind, first: f64, second: f64) -> ClassSpec {
    match kind {
        ClassKind::Tb => ClassSpec::Tb { a: first },
        ClassKind::Tk => ClassSpec::Tk { b: first },
        ClassKind::Tc => ClassSpec::Tc { c: first },
        ClassKind::Tw => ClassSpec::Tw {
            delta: first,
            l: second,
        },
        ClassKind::TwDual => ClassSpec::TwDual {
            delta: first,
            l: second,
        },
        ClassKind::Twu => ClassSpec::Twu {
            theta: first,
            l1: second,
        },
        ClassKind::Tz => unreachable!("no single-parameter family for the Zamfirescu class"),
    }
}

/// Smallest value in `[lo, hi]` passing `ok`, assuming `ok` is monotone.
/// Returns `None` when `hi` fails.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, ok: impl Fn(f64) -> bool) -> Option<f64> {
    if ok(lo) {
        return Some(lo);
    }
    if !ok(hi) {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

fn witnesses(cone: &ConeSpec, spec: &ClassSpec, terms: &[Terms]) -> Vec<(Vec<f64>, Vec<f64>)> {
    report_from_terms(cone, spec, terms)
        .violations
        .into_iter()
        .take(16)
        .map(|v| (v.x, v.y))
        .collect()
}

/// Fits the smallest in-range constants of `kind` for which the class
/// inequality holds on `pairs`.
///
/// The single-constant classes search `[0, sup − tol]`; the weak classes
/// first minimise `δ` with the second constant at `l_max`, then minimise the
/// second constant at that `δ`. Pairs whose right-hand terms all vanish are
/// skipped, or returned as infeasibility witnesses when their left-hand side
/// does not vanish.
pub fn fit_constants(
    space: &ConeMetricSpace,
    maps: &MapPair,
    kind: ClassKind,
    pairs: &PairSet,
    opts: &FitOptions,
) -> Result<FitOutcome> {
    if kind == ClassKind::Tz {
        return Err(Error::Unsupported(
            "fitting the Zamfirescu class has no unique minimiser; fit tb, tk or tc".into(),
        ));
    }
    if !(opts.tolerance > 0.0 && opts.l_max.is_finite() && opts.l_max > 0.0) {
        return Err(Error::config("fit tolerance and l_max must be positive"));
    }
    let pairs = pairs.materialize(space);
    let terms = all_terms(space, maps, &pairs)?;
    let probe = spec_for(kind, 0.0, 0.0);
    let mut kept = Vec::with_capacity(terms.len());
    let mut hard = Vec::new();
    let mut degenerate = 0;
    for t in terms {
        if rhs_terms(&probe, &t).iter().all(|v| v.is_zero()) {
            if t.lhs.is_zero() {
                degenerate += 1;
            } else {
                hard.push((t.x.coords().to_vec(), t.y.coords().to_vec()));
            }
        } else {
            kept.push(t);
        }
    }
    if !hard.is_empty() {
        return Ok(FitOutcome::Infeasible {
            reason: "pairs with nonzero left side and vanishing right-hand terms".into(),
            witnesses: hard,
        });
    }
    if kept.is_empty() {
        return Ok(FitOutcome::Inconclusive {
            reason: "every pair is degenerate".into(),
        });
    }
    let cone = space.cone();
    let tol = opts.tolerance;
    let passes = |first: f64, second: f64| holds_on(cone, &spec_for(kind, first, second), &kept);

    let fitted = match kind {
        ClassKind::Tb | ClassKind::Tk | ClassKind::Tc => {
            let sup = if kind == ClassKind::Tb { 1.0 } else { 0.5 };
            bisect(0.0, sup - tol, tol, |k| passes(k, 0.0)).map(|k| spec_for(kind, k, 0.0))
        }
        _ => {
            let first = match opts.pinned {
                Some(p) => {
                    spec_for(kind, p, 0.0).validate()?;
                    Some(p)
                }
                None => bisect(0.0, 1.0 - tol, tol, |d| passes(d, opts.l_max)),
            };
            first.and_then(|d| {
                bisect(0.0, opts.l_max, tol, |l| passes(d, l)).map(|l| spec_for(kind, d, l))
            })
        }
    };
    Ok(match fitted {
        Some(spec) => FitOutcome::Fitted {
            spec,
            pairs_used: kept.len(),
            degenerate_pairs: degenerate,
        },
        None => {
            let edge = match kind {
                ClassKind::Tb => spec_for(kind, 1.0 - tol, 0.0),
                ClassKind::Tk | ClassKind::Tc => spec_for(kind, 0.5 - tol, 0.0),
                _ => spec_for(kind, opts.pinned.unwrap_or(1.0 - tol), opts.l_max),
            };
            FitOutcome::Infeasible {
                reason: format!("no in-range constant passes; {kind} fails at {edge:?}"),
                witnesses: witnesses(cone, &edge, &kept),
            }
        }
    })
}
