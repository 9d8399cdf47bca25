use serde::{Deserialize, Serialize};

use super::check::exhaustive_condition_check;
use super::instance::FiniteInstance;
use crate::contractions::ClassSpec;
use crate::error::Result;

/// Every label with `S(p) = p`.
pub fn enumerate_fixed_points(fin: &FiniteInstance) -> Vec<usize> {
    let s = fin.s_table();
    (0..fin.len()).filter(|&p| s[p] == p).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Orbit {
    pub start: usize,
    /// Fixed point the orbit lands on, if any.
    pub reaches: Option<usize>,
    /// Transitions taken until the fixed point, or until a label repeated.
    pub steps: usize,
}

/// Follows `S` from `start` until it stops or revisits a label. Every orbit on
/// a finite carrier is eventually periodic, so this takes at most `n` steps.
pub fn orbit(fin: &FiniteInstance, start: usize) -> Orbit {
    let s = fin.s_table();
    let mut seen = vec![false; fin.len()];
    let mut x = start;
    let mut steps = 0;
    loop {
        if s[x] == x {
            return Orbit {
                start,
                reaches: Some(x),
                steps,
            };
        }
        if std::mem::replace(&mut seen[x], true) {
            return Orbit {
                start,
                reaches: None,
                steps,
            };
        }
        x = s[x];
        steps += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub class: ClassSpec,
    /// False when the class fails somewhere or `T` is not injective; the
    /// conclusions below are then not expected.
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    pub fixed_points: Vec<usize>,
    pub uniqueness_required: bool,
    pub orbits: Vec<Orbit>,
    pub exists: bool,
    pub unique_ok: bool,
    pub orbits_converge: bool,
    pub passed: bool,
}

/// Checks the fixed-point conclusions for a class that holds on every pair:
/// a fixed point exists, it is unique unless the class is a weak contraction,
/// and every Picard orbit lands on a fixed point within `n` steps (on the
/// unique one when uniqueness is required).
pub fn cross_validate(fin: &FiniteInstance, spec: &ClassSpec) -> Result<CrossValidation> {
    let check = exhaustive_condition_check(fin, spec)?;
    let fixed_points = enumerate_fixed_points(fin);
    let orbits: Vec<Orbit> = (0..fin.len()).map(|p| orbit(fin, p)).collect();
    let uniqueness_required = spec.kind().forces_uniqueness();
    let reason = if !check.holds {
        Some(format!("class fails on {} pair(s)", check.violations.len()))
    } else if !fin.t_injective() {
        Some("T is not injective".to_string())
    } else {
        None
    };
    let applicable = reason.is_none();
    let exists = !fixed_points.is_empty();
    let unique_ok = !uniqueness_required || fixed_points.len() == 1;
    let orbits_converge = orbits
        .iter()
        .all(|o| o.reaches.is_some() && o.steps <= fin.len());
    Ok(CrossValidation {
        class: *spec,
        applicable,
        reason,
        passed: applicable && exists && unique_ok && orbits_converge,
        fixed_points,
        uniqueness_required,
        orbits,
        exists,
        unique_ok,
        orbits_converge,
    })
}
