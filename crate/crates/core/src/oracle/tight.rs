use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::check::Term;
use super::exact::{q, q_int, to_f64_up, Q};
use super::instance::FiniteInstance;
use crate::contractions::{ClassKind, ClassSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum TightConstants {
    Feasible {
        /// Constants rounded up to the nearest `f64`, so the class inequality still holds.
        spec: ClassSpec,
        /// The exact minimal constants, as rationals. For two-constant classes
        /// the second is minimal for the first as emitted in `spec`.
        exact: Vec<String>,
        /// Pairs at which the first constant is attained.
        attained_at: Vec<(usize, usize)>,
    },
    Infeasible {
        reason: String,
        /// The exact requirement on the first constant, when finite.
        exact: Option<String>,
        witnesses: Vec<(usize, usize)>,
    },
}

impl TightConstants {
    pub fn spec(&self) -> Option<&ClassSpec> {
        match self {
            TightConstants::Feasible { spec, .. } => Some(spec),
            TightConstants::Infeasible { .. } => None,
        }
    }
}

/// Per-pair requirement on a constant `k` from `k·t ≥ l` row by row.
enum Need {
    AtLeast(Q),
    Impossible,
}

fn need(l: &[Q], t: &[Q]) -> Need {
    let mut lo = Q::zero();
    for (l, t) in l.iter().zip(t) {
        if t.is_positive() {
            lo = lo.max(l / t);
        } else if l.is_positive() {
            return Need::Impossible;
        }
    }
    Need::AtLeast(lo)
}

struct PairView<'a> {
    fin: &'a FiniteInstance,
    tx: usize,
    ty: usize,
    tsx: usize,
    tsy: usize,
}

impl PairView<'_> {
    fn new(fin: &FiniteInstance, x: usize, y: usize) -> PairView<'_> {
        let (t, s) = (fin.t_table(), fin.s_table());
        PairView {
            fin,
            tx: t[x],
            ty: t[y],
            tsx: t[s[x]],
            tsy: t[s[y]],
        }
    }

    fn lhs(&self) -> &[Q] {
        self.fin.p(self.tsx, self.tsy)
    }

    fn term(&self, k: Term) -> &[Q] {
        let p = |i, j| self.fin.p(i, j);
        match k {
            Term::TxTy => p(self.tx, self.ty),
            Term::TxTsx => p(self.tx, self.tsx),
            Term::TyTsy => p(self.ty, self.tsy),
            Term::TxTsy => p(self.tx, self.tsy),
            Term::TyTsx => p(self.ty, self.tsx),
        }
    }

    fn sum(&self, a: Term, b: Term) -> Vec<Q> {
        self.term(a)
            .iter()
            .zip(self.term(b))
            .map(|(x, y)| x + y)
            .collect()
    }
}

type LabelPairs = Vec<(usize, usize)>;

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

/// The largest requirement over all pairs and where it is attained, or the
/// pairs no constant can satisfy.
fn sup_over_pairs(
    n: usize,
    mut per_pair: impl FnMut(usize, usize) -> Need,
) -> std::result::Result<(Q, LabelPairs), LabelPairs> {
    let mut best = Q::zero();
    let mut at = Vec::new();
    let mut hard = Vec::new();
    for (x, y) in pairs(n) {
        match per_pair(x, y) {
            Need::Impossible => hard.push((x, y)),
            Need::AtLeast(v) => {
                if v > best {
                    best = v;
                    at.clear();
                    at.push((x, y));
                } else if v == best && !v.is_zero() {
                    at.push((x, y));
                }
            }
        }
    }
    if hard.is_empty() {
        Ok((best, at))
    } else {
        Err(hard)
    }
}

fn second_term(kind: ClassKind) -> Term {
    match kind {
        ClassKind::Tw => Term::TyTsx,
        ClassKind::TwDual => Term::TxTsy,
        _ => Term::TxTsx,
    }
}

fn spec_of(kind: ClassKind, first: f64, second: f64) -> ClassSpec {
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
        ClassKind::Tz => unreachable!(),
    }
}

/// Exact minimal constants of `kind` over all ordered pairs.
///
/// For the two-constant classes the first constant is minimised first (the
/// second may be arbitrarily large), then the second at that value; with
/// `pinned` the first is fixed instead.
pub fn tightest_constants(
    fin: &FiniteInstance,
    kind: ClassKind,
    pinned: Option<f64>,
) -> Result<TightConstants> {
    let n = fin.len();
    let sup = match kind {
        ClassKind::Tz => {
            return Err(Error::Unsupported(
                "the Zamfirescu class has no unique minimal constants; use tb, tk or tc".into(),
            ))
        }
        ClassKind::Tb => q_int(1),
        ClassKind::Tk | ClassKind::Tc => Q::new(1.into(), 2.into()),
        _ => q_int(1),
    };
    let single = matches!(kind, ClassKind::Tb | ClassKind::Tk | ClassKind::Tc);
    let first = if single {
        sup_over_pairs(n, |x, y| {
            let v = PairView::new(fin, x, y);
            let t = match kind {
                ClassKind::Tb => v.term(Term::TxTy).to_vec(),
                ClassKind::Tk => v.sum(Term::TxTsx, Term::TyTsy),
                _ => v.sum(Term::TxTsy, Term::TyTsx),
            };
            need(v.lhs(), &t)
        })
    } else {
        let second = second_term(kind);
        // rows where the second term vanishes constrain the first constant alone
        sup_over_pairs(n, |x, y| {
            let v = PairView::new(fin, x, y);
            let (l, p, s) = (v.lhs(), v.term(Term::TxTy), v.term(second));
            let keep: Vec<usize> = (0..l.len()).filter(|&r| s[r].is_zero()).collect();
            let l: Vec<Q> = keep.iter().map(|&r| l[r].clone()).collect();
            let p: Vec<Q> = keep.iter().map(|&r| p[r].clone()).collect();
            need(&l, &p)
        })
    };
    let (min_first, attained_at) = match first {
        Ok(v) => v,
        Err(hard) => {
            return Ok(TightConstants::Infeasible {
                reason: "pairs with nonzero left side and vanishing right-hand terms".into(),
                exact: None,
                witnesses: hard,
            })
        }
    };
    let first = match pinned {
        Some(p) if !single => {
            spec_of(kind, p, 0.0).validate()?;
            let p = q(p)?;
            if p < min_first {
                return Ok(TightConstants::Infeasible {
                    reason: format!("pinned value is below the required {min_first}"),
                    exact: Some(min_first.to_string()),
                    witnesses: attained_at,
                });
            }
            p
        }
        _ => {
            if min_first >= sup {
                return Ok(TightConstants::Infeasible {
                    reason: format!(
                        "{kind} needs a first constant of {min_first}, at or above {sup}"
                    ),
                    exact: Some(min_first.to_string()),
                    witnesses: attained_at,
                });
            }
            min_first
        }
    };
    let min_exact = first.clone();
    let (spec, exact) = if single {
        (
            spec_of(kind, to_f64_up(&first), 0.0),
            vec![first.to_string()],
        )
    } else {
        let second = second_term(kind);
        // the second constant is minimised for the first one as emitted
        let first_f = to_f64_up(&first);
        let first = q(first_f)?;
        let (l_min, _) = sup_over_pairs(n, |x, y| {
            let v = PairView::new(fin, x, y);
            let rest: Vec<Q> = v
                .lhs()
                .iter()
                .zip(v.term(Term::TxTy))
                .map(|(l, p)| l - &first * p)
                .collect();
            need(&rest, v.term(second))
        })
        .expect("rows with a vanishing second term are covered by the first constant");
        (
            spec_of(kind, first_f, to_f64_up(&l_min)),
            vec![min_exact.to_string(), l_min.to_string()],
        )
    };
    if let Err(e) = spec.validate() {
        return Ok(TightConstants::Infeasible {
            reason: format!("rounded constants leave the admissible range: {e}"),
            exact: exact.first().cloned(),
            witnesses: attained_at,
        });
    }
    Ok(TightConstants::Feasible {
        spec,
        exact,
        attained_at,
    })
}
