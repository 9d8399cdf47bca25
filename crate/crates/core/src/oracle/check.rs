use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{q, q_int, to_f64_up, Q};
use super::instance::FiniteInstance;
use crate::contractions::{BranchStats, ClassKind, ClassSpec};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Term {
    TxTy,
    TxTsx,
    TyTsy,
    TxTsy,
    TyTsx,
}

/// A class inequality with exact constants: the pair passes when, for some
/// branch, `d(TSx,TSy) ≤ Σ cₖ·termₖ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactClass {
    pub(crate) kind: ClassKind,
    pub(crate) branches: Vec<Vec<(Q, Term)>>,
}

fn ratio(k: &Q) -> Q {
    k / (q_int(1) - k)
}

/// `max{a, b/(1−b), c/(1−c)}` without rounding.
pub fn exact_zamfirescu_delta(a: f64, b: f64, c: f64) -> Result<Q> {
    ClassSpec::Tz { a, b, c }.validate()?;
    let (a, b, c) = (q(a)?, q(b)?, q(c)?);
    Ok(a.max(ratio(&b)).max(ratio(&c)))
}

impl ExactClass {
    pub fn from_spec(spec: &ClassSpec) -> Result<Self> {
        spec.validate()?;
        use Term::*;
        let branches = match *spec {
            ClassSpec::Tb { a } => vec![vec![(q(a)?, TxTy)]],
            ClassSpec::Tk { b } => vec![vec![(q(b)?, TxTsx), (q(b)?, TyTsy)]],
            ClassSpec::Tc { c } => vec![vec![(q(c)?, TxTsy), (q(c)?, TyTsx)]],
            ClassSpec::Tz { a, b, c } => vec![
                vec![(q(a)?, TxTy)],
                vec![(q(b)?, TxTsx), (q(b)?, TyTsy)],
                vec![(q(c)?, TxTsy), (q(c)?, TyTsx)],
            ],
            ClassSpec::Tw { delta, l } => return Ok(Self::two(ClassKind::Tw, q(delta)?, q(l)?)),
            ClassSpec::TwDual { delta, l } => {
                return Ok(Self::two(ClassKind::TwDual, q(delta)?, q(l)?))
            }
            ClassSpec::Twu { theta, l1 } => {
                return Ok(Self::two(ClassKind::Twu, q(theta)?, q(l1)?))
            }
        };
        Ok(ExactClass {
            kind: spec.kind(),
            branches,
        })
    }

    /// A two-constant class `first·d(Tx,Ty) + second·term` with exact constants.
    pub fn two(kind: ClassKind, first: Q, second: Q) -> Self {
        let term = match kind {
            ClassKind::Tw => Term::TyTsx,
            ClassKind::TwDual => Term::TxTsy,
            ClassKind::Twu => Term::TxTsx,
            _ => panic!("{kind} is not a two-constant class"),
        };
        ExactClass {
            kind,
            branches: vec![vec![(first, Term::TxTy), (second, term)]],
        }
    }

    /// The weak-contraction constants implied by a Banach, Kannan, Chatterjea
    /// or Zamfirescu spec, exactly.
    pub fn promoted(spec: &ClassSpec) -> Result<Option<Self>> {
        spec.validate()?;
        let two = |delta: Q| {
            let l = &delta * q_int(2);
            Self::two(ClassKind::Tw, delta, l)
        };
        Ok(match *spec {
            ClassSpec::Tb { a } => Some(Self::two(ClassKind::Tw, q(a)?, q_int(0))),
            ClassSpec::Tk { b: k } | ClassSpec::Tc { c: k } => Some(two(ratio(&q(k)?))),
            ClassSpec::Tz { a, b, c } => Some(two(exact_zamfirescu_delta(a, b, c)?)),
            _ => None,
        })
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .branches
            .iter()
            .map(|b| {
                b.iter()
                    .map(|(c, t)| format!("{c}·{t:?}"))
                    .collect::<Vec<_>>()
                    .join(" + ")
            })
            .collect();
        format!("{} [{}]", self.kind, parts.join(" | "))
    }

    /// Which branches hold on the ordered pair `(x, y)`.
    pub(crate) fn satisfied(&self, fin: &FiniteInstance, x: usize, y: usize) -> Vec<bool> {
        let (t, s) = (fin.t_table(), fin.s_table());
        let (tx, ty, tsx, tsy) = (t[x], t[y], t[s[x]], t[s[y]]);
        let lhs = fin.p(tsx, tsy);
        let term = |k: Term| match k {
            Term::TxTy => fin.p(tx, ty),
            Term::TxTsx => fin.p(tx, tsx),
            Term::TyTsy => fin.p(ty, tsy),
            Term::TxTsy => fin.p(tx, tsy),
            Term::TyTsx => fin.p(ty, tsx),
        };
        self.branches
            .iter()
            .map(|branch| {
                lhs.iter().enumerate().all(|(r, l)| {
                    let rhs: Q = branch.iter().map(|(c, k)| c * &term(*k)[r]).sum();
                    rhs >= *l
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub class: String,
    pub holds: bool,
    pub pairs_checked: usize,
    /// Violating ordered pairs of labels, sorted.
    pub violations: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub branch_stats: Option<BranchStats>,
}

/// Evaluates an exact class on all `n²` ordered pairs.
pub fn exhaustive_check_exact(fin: &FiniteInstance, class: &ExactClass) -> OracleReport {
    let n = fin.len();
    let outcomes: Vec<Vec<bool>> = (0..n * n)
        .into_par_iter()
        .map(|k| class.satisfied(fin, k / n, k % n))
        .collect();
    let violations: Vec<(usize, usize)> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, sat)| !sat.iter().any(|&b| b))
        .map(|(k, _)| (k / n, k % n))
        .collect();
    let branch_stats = (class.branches.len() == 3).then(|| {
        let mut stats = BranchStats::default();
        for sat in &outcomes {
            for (i, &ok) in sat.iter().enumerate() {
                if ok {
                    stats.satisfied[i] += 1;
                    if sat.iter().filter(|&&b| b).count() == 1 {
                        stats.sole[i] += 1;
                    }
                }
            }
        }
        stats
    });
    OracleReport {
        class: class.describe(),
        holds: violations.is_empty(),
        pairs_checked: n * n,
        violations,
        branch_stats,
    }
}

pub fn exhaustive_condition_check(fin: &FiniteInstance, spec: &ClassSpec) -> Result<OracleReport> {
    Ok(exhaustive_check_exact(fin, &ExactClass::from_spec(spec)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactReduction {
    /// Whether the Zamfirescu condition itself holds on every pair.
    pub applicable: bool,
    pub delta_exact: String,
    /// Smallest `f64` not below the exact `δ`.
    pub delta: f64,
    pub primary: Option<OracleReport>,
    pub dual: Option<OracleReport>,
}

impl ExactReduction {
    pub fn holds(&self) -> bool {
        self.applicable
            && self.primary.as_ref().is_some_and(|r| r.holds)
            && self.dual.as_ref().is_some_and(|r| r.holds)
    }
}

/// When the Zamfirescu condition holds on every pair, checks both reduced
/// forms `δ d(Tx,Ty) + 2δ d(Tx,TSx)` and `δ d(Tx,Ty) + 2δ d(Tx,TSy)` with
/// the exact `δ`.
pub fn exhaustive_reduction_check(
    fin: &FiniteInstance,
    a: f64,
    b: f64,
    c: f64,
) -> Result<ExactReduction> {
    let delta = exact_zamfirescu_delta(a, b, c)?;
    let source = exhaustive_condition_check(fin, &ClassSpec::Tz { a, b, c })?;
    let l = &delta * q_int(2);
    let (primary, dual) = if source.holds {
        (
            Some(exhaustive_check_exact(
                fin,
                &ExactClass::two(ClassKind::Twu, delta.clone(), l.clone()),
            )),
            Some(exhaustive_check_exact(
                fin,
                &ExactClass::two(ClassKind::TwDual, delta.clone(), l),
            )),
        )
    } else {
        (None, None)
    };
    Ok(ExactReduction {
        applicable: source.holds,
        delta_exact: delta.to_string(),
        delta: to_f64_up(&delta),
        primary,
        dual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromotionCheck {
    pub source: OracleReport,
    pub target: String,
    /// Present when the source holds.
    pub target_report: Option<OracleReport>,
}

impl PromotionCheck {
    /// The source failing counts as sound: there is nothing to promote.
    pub fn sound(&self) -> bool {
        !self.source.holds || self.target_report.as_ref().is_some_and(|r| r.holds)
    }
}

/// Checks that the promoted weak form holds wherever the source class does.
pub fn exhaustive_promotion_check(
    fin: &FiniteInstance,
    spec: &ClassSpec,
) -> Result<Option<PromotionCheck>> {
    let Some(target) = ExactClass::promoted(spec)? else {
        return Ok(None);
    };
    let source = exhaustive_condition_check(fin, spec)?;
    let target_report = source.holds.then(|| exhaustive_check_exact(fin, &target));
    Ok(Some(PromotionCheck {
        source,
        target: target.describe(),
        target_report,
    }))
}
