use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone_space::{CarrierSpec, ConeMetricSpace, Point};
use crate::contractions::MapPair;
use crate::error::Result;

/// Test sequences fed through `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeSequence {
    /// Geometric approach to the carrier midpoint (label 0 when finite).
    Convergent,
    /// Jumps between the two ends of the carrier.
    Alternating,
    /// Geometric approach to the upper end.
    TowardBoundary,
    Explicit {
        name: String,
        points: Vec<Point>,
    },
}

impl ProbeSequence {
    pub const BUILTIN: [ProbeSequence; 3] = [
        ProbeSequence::Convergent,
        ProbeSequence::Alternating,
        ProbeSequence::TowardBoundary,
    ];

    pub fn name(&self) -> &str {
        match self {
            ProbeSequence::Convergent => "convergent",
            ProbeSequence::Alternating => "alternating",
            ProbeSequence::TowardBoundary => "toward_boundary",
            ProbeSequence::Explicit { name, .. } => name,
        }
    }

    pub fn terms(&self, carrier: &CarrierSpec, len: usize) -> Vec<Point> {
        if let ProbeSequence::Explicit { points, .. } = self {
            return points.clone();
        }
        let (lo, hi): (Vec<f64>, Vec<f64>) = match carrier {
            CarrierSpec::Interval { lo, hi, .. } => (vec![*lo], vec![*hi]),
            CarrierSpec::Box { lo, hi, .. } => (lo.clone(), hi.clone()),
            CarrierSpec::Finite { points } => {
                let last = points - 1;
                let label = |n: usize| -> usize {
                    match self {
                        ProbeSequence::Convergent => last.saturating_sub(n),
                        ProbeSequence::Alternating => {
                            if n.is_multiple_of(2) {
                                0
                            } else {
                                last
                            }
                        }
                        _ => n.min(last),
                    }
                };
                return (0..len).map(|n| Point::label(label(n))).collect();
            }
        };
        let term = |n: usize| -> Point {
            let w = 0.5f64.powi(n as i32);
            let coords = lo
                .iter()
                .zip(&hi)
                .map(|(&l, &h)| {
                    let mid = 0.5 * (l + h);
                    match self {
                        ProbeSequence::Convergent => mid + (h - mid) * w,
                        ProbeSequence::Alternating => {
                            if n.is_multiple_of(2) {
                                l
                            } else {
                                h
                            }
                        }
                        _ => h - (h - l) * 0.5 * w,
                    }
                })
                .collect();
            Point::new(coords)
        };
        (0..len).map(term).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnoseProbes {
    /// Points for the injectivity scan; `None` uses the carrier grid.
    pub points: Option<Vec<Point>>,
    pub sequences: Vec<ProbeSequence>,
    pub sequence_len: usize,
    /// Convergence is judged on the last `window` terms.
    pub window: usize,
    pub tolerance: f64,
}

impl Default for DiagnoseProbes {
    fn default() -> Self {
        DiagnoseProbes {
            points: None,
            sequences: ProbeSequence::BUILTIN.to_vec(),
            sequence_len: 64,
            window: 8,
            tolerance: 1e-12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Consistent,
    Inconsistent,
    /// `T(yₙ)` did not converge, so the property says nothing.
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceVerdict {
    pub name: String,
    pub t_image_convergent: bool,
    pub sequence_convergent: bool,
    pub subsequence_convergent: bool,
    pub sequential: Evidence,
    pub subsequential: Evidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TDiagnostics {
    pub injectivity_points: usize,
    pub injectivity_violations: Vec<(Vec<f64>, Vec<f64>)>,
    pub sequences: Vec<SequenceVerdict>,
    /// Declared properties contradicted by the probes.
    pub mismatches: Vec<String>,
}

fn cauchy_tail(space: &ConeMetricSpace, seq: &[Point], window: usize, tol: f64) -> bool {
    let tail = &seq[seq.len().saturating_sub(window)..];
    tail.iter().enumerate().all(|(i, a)| {
        tail[i + 1..]
            .iter()
            .all(|b| space.cone().norm(&space.distance_unchecked(a, b)) <= tol)
    })
}

/// Looks for evidence against the declared regularity of `T`: pairs it
/// collapses, and test sequences whose images converge while they do not.
/// Nothing here proves a property; it can only contradict one.
pub fn diagnose_t(
    space: &ConeMetricSpace,
    maps: &MapPair,
    probes: &DiagnoseProbes,
) -> Result<TDiagnostics> {
    let points = match &probes.points {
        Some(p) => p.clone(),
        None => space.carrier().grid_points(),
    };
    let images: Vec<Point> = points
        .iter()
        .map(|p| maps.apply_t(space, p))
        .collect::<Result<_>>()?;
    let cone = space.cone();
    let injectivity_violations: Vec<(Vec<f64>, Vec<f64>)> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (points, images) = (&points, &images);
            (i + 1..points.len()).filter_map(move |j| {
                let collapsed = points[i] != points[j]
                    && cone.norm(&space.distance_unchecked(&images[i], &images[j]))
                        <= probes.tolerance;
                collapsed.then(|| (points[i].coords().to_vec(), points[j].coords().to_vec()))
            })
        })
        .collect();

    let mut sequences = Vec::with_capacity(probes.sequences.len());
    for probe in &probes.sequences {
        let ys = probe.terms(space.carrier(), probes.sequence_len);
        let tys: Vec<Point> = ys
            .iter()
            .map(|y| maps.apply_t(space, y))
            .collect::<Result<_>>()?;
        let conv = |s: &[Point]| cauchy_tail(space, s, probes.window, probes.tolerance);
        let t_image_convergent = conv(&tys);
        let sequence_convergent = conv(&ys);
        let evens: Vec<Point> = ys.iter().step_by(2).cloned().collect();
        let odds: Vec<Point> = ys.iter().skip(1).step_by(2).cloned().collect();
        let subsequence_convergent = sequence_convergent || conv(&evens) || conv(&odds);
        let judge = |ok: bool| match (t_image_convergent, ok) {
            (false, _) => Evidence::NotApplicable,
            (true, true) => Evidence::Consistent,
            (true, false) => Evidence::Inconsistent,
        };
        sequences.push(SequenceVerdict {
            name: probe.name().to_string(),
            t_image_convergent,
            sequence_convergent,
            subsequence_convergent,
            sequential: judge(sequence_convergent),
            subsequential: judge(subsequence_convergent),
        });
    }

    let declared = maps.properties;
    let mut mismatches = Vec::new();
    if declared.t_injective && !injectivity_violations.is_empty() {
        mismatches.push(format!(
            "T declared injective but collapses {} pair(s)",
            injectivity_violations.len()
        ));
    }
    for v in &sequences {
        if declared.t_sequentially_convergent && v.sequential == Evidence::Inconsistent {
            mismatches.push(format!(
                "T declared sequentially convergent but probe {} converges only under T",
                v.name
            ));
        }
        if declared.t_subsequentially_convergent && v.subsequential == Evidence::Inconsistent {
            mismatches.push(format!(
                "T declared subsequentially convergent but probe {} has no convergent subsequence",
                v.name
            ));
        }
    }
    Ok(TDiagnostics {
        injectivity_points: points.len(),
        injectivity_violations,
        sequences,
        mismatches,
    })
}
