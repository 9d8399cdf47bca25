//! Sampled verification of class inequalities as cone-order tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::class::{zamfirescu_delta, ClassSpec};
use super::maps::MapPair;
use crate::cone_space::{ConeMetricSpace, ConeSpec, Point, VectorE};
use crate::error::{Error, Result};
use crate::sampling;

/// Which ordered pairs `(x, y)` a check runs over.
#[derive(Clone, Debug, PartialEq)]
pub enum PairSet {
    /// Every ordered pair of carrier grid points (every pair of labels when finite).
    Grid,
    Random {
        count: usize,
        seed: u64,
    },
    Explicit(Vec<(Point, Point)>),
}

impl PairSet {
    pub fn materialize(&self, space: &ConeMetricSpace) -> Vec<(Point, Point)> {
        match self {
            PairSet::Grid => {
                let g = space.carrier().grid_points();
                g.iter()
                    .flat_map(|x| g.iter().map(move |y| (x.clone(), y.clone())))
                    .collect()
            }
            PairSet::Random { count, seed } => {
                let mut rng = sampling::rng(*seed);
                (0..*count)
                    .map(|_| {
                        let c = space.carrier();
                        (c.sample(&mut rng), c.sample(&mut rng))
                    })
                    .collect()
            }
            PairSet::Explicit(pairs) => pairs.clone(),
        }
    }
}

/// The six distances any class inequality can mention, for one pair.
#[derive(Clone, Debug)]
pub(crate) struct Terms {
    pub x: Point,
    pub y: Point,
    /// `d(TSx, TSy)`
    pub lhs: VectorE,
    pub tx_ty: VectorE,
    pub tx_tsx: VectorE,
    pub ty_tsy: VectorE,
    pub tx_tsy: VectorE,
    pub ty_tsx: VectorE,
}

pub(crate) fn pair_terms(
    space: &ConeMetricSpace,
    maps: &MapPair,
    x: &Point,
    y: &Point,
) -> Result<Terms> {
    let tx = maps.apply_t(space, x)?;
    let ty = maps.apply_t(space, y)?;
    let tsx = maps.apply_t(space, &maps.apply_s(space, x)?)?;
    let tsy = maps.apply_t(space, &maps.apply_s(space, y)?)?;
    let d = |p: &Point, q: &Point| space.distance_unchecked(p, q);
    Ok(Terms {
        x: x.clone(),
        y: y.clone(),
        lhs: d(&tsx, &tsy),
        tx_ty: d(&tx, &ty),
        tx_tsx: d(&tx, &tsx),
        ty_tsy: d(&ty, &tsy),
        tx_tsy: d(&tx, &tsy),
        ty_tsx: d(&ty, &tsx),
    })
}

pub(crate) fn all_terms(
    space: &ConeMetricSpace,
    maps: &MapPair,
    pairs: &[(Point, Point)],
) -> Result<Vec<Terms>> {
    pairs
        .par_iter()
        .map(|(x, y)| pair_terms(space, maps, x, y))
        .collect()
}

/// Right-hand sides of the class inequality; the pair passes when any holds.
pub(crate) fn branches(spec: &ClassSpec, t: &Terms) -> Vec<VectorE> {
    match *spec {
        ClassSpec::Tb { a } => vec![a * &t.tx_ty],
        ClassSpec::Tk { b } => vec![b * &(&t.tx_tsx + &t.ty_tsy)],
        ClassSpec::Tc { c } => vec![c * &(&t.tx_tsy + &t.ty_tsx)],
        ClassSpec::Tz { a, b, c } => vec![
            a * &t.tx_ty,
            b * &(&t.tx_tsx + &t.ty_tsy),
            c * &(&t.tx_tsy + &t.ty_tsx),
        ],
        ClassSpec::Tw { delta, l } => vec![(delta * &t.tx_ty).add_scaled(l, &t.ty_tsx)],
        ClassSpec::TwDual { delta, l } => vec![(delta * &t.tx_ty).add_scaled(l, &t.tx_tsy)],
        ClassSpec::Twu { theta, l1 } => vec![(theta * &t.tx_ty).add_scaled(l1, &t.tx_tsx)],
    }
}

/// The distance terms on the right-hand side for a class, used to detect
/// pairs no constant can help.
pub(crate) fn rhs_terms<'a>(spec: &ClassSpec, t: &'a Terms) -> Vec<&'a VectorE> {
    match spec {
        ClassSpec::Tb { .. } => vec![&t.tx_ty],
        ClassSpec::Tk { .. } => vec![&t.tx_tsx, &t.ty_tsy],
        ClassSpec::Tc { .. } => vec![&t.tx_tsy, &t.ty_tsx],
        ClassSpec::Tz { .. } => vec![&t.tx_ty, &t.tx_tsx, &t.ty_tsy, &t.tx_tsy, &t.ty_tsx],
        ClassSpec::Tw { .. } => vec![&t.tx_ty, &t.ty_tsx],
        ClassSpec::TwDual { .. } => vec![&t.tx_ty, &t.tx_tsy],
        ClassSpec::Twu { .. } => vec![&t.tx_ty, &t.tx_tsx],
    }
}

pub(crate) fn holds_on(cone: &ConeSpec, spec: &ClassSpec, terms: &[Terms]) -> bool {
    terms
        .par_iter()
        .all(|t| branches(spec, t).iter().any(|rhs| cone.leq(&t.lhs, rhs)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionViolation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lhs: Vec<f64>,
    /// For the Zamfirescu class, the branch that came closest to holding.
    pub rhs: Vec<f64>,
    /// `rhs − lhs`, which lies outside the cone.
    pub residual: Vec<f64>,
}

/// How often each Zamfirescu branch was satisfied.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchStats {
    /// Pairs on which branch `i` held (a pair can count for several).
    pub satisfied: [usize; 3],
    /// Pairs on which branch `i` was the only one to hold.
    pub sole: [usize; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub class: ClassSpec,
    pub status: CheckStatus,
    pub holds: bool,
    pub pairs_checked: usize,
    pub violations: Vec<ConditionViolation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branch_stats: Option<BranchStats>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

struct PairOutcome {
    satisfied: Vec<bool>,
    violation: Option<ConditionViolation>,
}

fn evaluate_pair(cone: &ConeSpec, spec: &ClassSpec, t: &Terms) -> PairOutcome {
    let rhs = branches(spec, t);
    let satisfied: Vec<bool> = rhs.iter().map(|r| cone.leq(&t.lhs, r)).collect();
    let violation = (!satisfied.iter().any(|&s| s)).then(|| {
        let closest = rhs
            .iter()
            .max_by(|p, q| slack_score(cone, &t.lhs, p).total_cmp(&slack_score(cone, &t.lhs, q)))
            .expect("at least one branch");
        ConditionViolation {
            x: t.x.coords().to_vec(),
            y: t.y.coords().to_vec(),
            lhs: t.lhs.coords().to_vec(),
            rhs: closest.coords().to_vec(),
            residual: (closest - &t.lhs).into_inner(),
        }
    });
    PairOutcome {
        satisfied,
        violation,
    }
}

fn slack_score(cone: &ConeSpec, lhs: &VectorE, rhs: &VectorE) -> f64 {
    cone.row_residuals(&(rhs - lhs))
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn report_from_terms(
    cone: &ConeSpec,
    spec: &ClassSpec,
    terms: &[Terms],
) -> ConditionReport {
    let outcomes: Vec<PairOutcome> = terms
        .par_iter()
        .map(|t| evaluate_pair(cone, spec, t))
        .collect();
    let branch_stats = matches!(spec, ClassSpec::Tz { .. }).then(|| {
        let mut stats = BranchStats::default();
        for o in &outcomes {
            for (i, &s) in o.satisfied.iter().enumerate() {
                if s {
                    stats.satisfied[i] += 1;
                }
            }
            if o.satisfied.iter().filter(|&&s| s).count() == 1 {
                let i = o.satisfied.iter().position(|&s| s).unwrap();
                stats.sole[i] += 1;
            }
        }
        stats
    });
    let violations: Vec<ConditionViolation> =
        outcomes.into_iter().filter_map(|o| o.violation).collect();
    let status = if terms.is_empty() {
        CheckStatus::Inconclusive
    } else if violations.is_empty() {
        CheckStatus::Holds
    } else {
        CheckStatus::Violated
    };
    let mut notes = Vec::new();
    if terms.is_empty() {
        notes.push("empty pair set".to_string());
    }
    if matches!(spec, ClassSpec::Tk { .. } | ClassSpec::Tz { .. }) {
        notes.push("Kannan term reads b[d(Tx,TSx) + d(Ty,TSy)]".to_string());
    }
    ConditionReport {
        class: *spec,
        status,
        holds: status == CheckStatus::Holds,
        pairs_checked: terms.len(),
        violations,
        branch_stats,
        notes,
    }
}

/// Evaluates the class inequality on every pair as `rhs − lhs ∈ P`, up to the
/// cone's relative slack.
pub fn check_condition(
    space: &ConeMetricSpace,
    maps: &MapPair,
    spec: &ClassSpec,
    pairs: &PairSet,
) -> Result<ConditionReport> {
    spec.validate()?;
    let pairs = pairs.materialize(space);
    let terms = all_terms(space, maps, &pairs)?;
    Ok(report_from_terms(space.cone(), spec, &terms))
}

/// Outcome of checking the single-constant bounds implied by a Zamfirescu class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    /// False when the Zamfirescu condition itself fails on the pair set.
    pub applicable: bool,
    pub precondition: ConditionReport,
    /// `d(TSx,TSy) ≤ δ·d(Tx,Ty) + 2δ·d(Tx,TSx)`
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub primary: Option<ConditionReport>,
    /// `d(TSx,TSy) ≤ δ·d(Tx,Ty) + 2δ·d(Tx,TSy)`
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dual: Option<ConditionReport>,
}

impl ReductionReport {
    pub fn holds(&self) -> bool {
        self.applicable
            && self.primary.as_ref().is_some_and(|r| r.holds)
            && self.dual.as_ref().is_some_and(|r| r.holds)
    }
}

/// The reduced forms of a Zamfirescu class checked pairwise.
pub(crate) fn reduced_forms(delta: f64) -> (ClassSpec, ClassSpec) {
    (
        ClassSpec::Twu {
            theta: delta,
            l1: 2.0 * delta,
        },
        ClassSpec::TwDual {
            delta,
            l: 2.0 * delta,
        },
    )
}

/// Checks that a Zamfirescu class collapses to the single constant
/// `δ = max{a, b/(1−b), c/(1−c)}` in both the primary and the dual form.
pub fn verify_zamfirescu_reduction(
    space: &ConeMetricSpace,
    maps: &MapPair,
    a: f64,
    b: f64,
    c: f64,
    pairs: &PairSet,
) -> Result<ReductionReport> {
    let delta = zamfirescu_delta(a, b, c)?;
    let pairs = pairs.materialize(space);
    if pairs.is_empty() {
        return Err(Error::config("reduction check needs a nonempty pair set"));
    }
    let terms = all_terms(space, maps, &pairs)?;
    let cone = space.cone();
    let precondition = report_from_terms(cone, &ClassSpec::Tz { a, b, c }, &terms);
    let applicable = precondition.holds;
    let (primary, dual) = if applicable {
        let (p, d) = reduced_forms(delta);
        (
            Some(report_from_terms(cone, &p, &terms)),
            Some(report_from_terms(cone, &d, &terms)),
        )
    } else {
        (None, None)
    };
    Ok(ReductionReport {
        a,
        b,
        c,
        delta,
        applicable,
        precondition,
        primary,
        dual,
    })
}
