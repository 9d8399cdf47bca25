use serde::{Deserialize, Serialize};

use crate::cone_space::{ConeMetricSpace, Point, VectorE};
use crate::contractions::MapPair;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StoppingRule {
    /// Threshold on both the T-image gap and the carrier step, in the norm of E.
    pub epsilon: f64,
    pub max_iter: usize,
    /// How many recent iterates are compared for an exact repeat.
    pub stall_window: usize,
    /// Two limits closer than this (in `‖d‖`) count as the same fixed point.
    pub merge_tolerance: f64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            epsilon: 1e-12,
            max_iter: 1_000_000,
            stall_window: 50,
            merge_tolerance: 1e-6,
        }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::config("epsilon must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter must be >= 1"));
        }
        if !(self.merge_tolerance.is_finite() && self.merge_tolerance >= 0.0) {
            return Err(Error::config("merge tolerance must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIter,
    CycleDetected,
}

/// A Picard orbit with the monitored quantities. Row `n` holds `x_n`,
/// `T x_n`, the gap `d(T x_n, T S x_n)` and the carrier step `‖d(x_n, S x_n)‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub x_sequence: Vec<Point>,
    pub t_images: Vec<Point>,
    pub t_image_gaps: Vec<VectorE>,
    pub gap_norms: Vec<f64>,
    pub step_norms: Vec<f64>,
    /// Number of evaluations of `S`; equals the number of rows.
    pub iterations: usize,
    pub stop_reason: StopReason,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.x_sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_sequence.is_empty()
    }

    pub fn final_point(&self) -> &Point {
        self.x_sequence
            .last()
            .expect("trace has at least the start point")
    }

    /// Last recorded `T Sⁿ x₀`, the numerical limit of the T-image sequence.
    pub fn t_image_limit(&self) -> &Point {
        self.t_images.last().expect("trace has at least one row")
    }

    /// `‖d_{n+1}‖ / ‖d_n‖` wherever the denominator is nonzero.
    pub fn step_ratios(&self) -> Vec<f64> {
        self.gap_norms
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Runs `x_{n+1} = S x_n` from `x0`.
///
/// Stops when the T-image gap and the carrier step both drop to `epsilon`,
/// when `max_iter` transitions have been taken, or when `S x_n` repeats one of
/// the last `stall_window` iterates exactly.
pub fn picard_iterate(
    space: &ConeMetricSpace,
    maps: &MapPair,
    x0: &Point,
    rule: &StoppingRule,
) -> Result<IterationTrace> {
    rule.validate()?;
    space.check_point(x0)?;
    let cone = space.cone();
    let mut trace = IterationTrace {
        x_sequence: vec![x0.clone()],
        t_images: Vec::new(),
        t_image_gaps: Vec::new(),
        gap_norms: Vec::new(),
        step_norms: Vec::new(),
        iterations: 0,
        stop_reason: StopReason::MaxIter,
    };
    loop {
        let n = trace.x_sequence.len() - 1;
        let x = &trace.x_sequence[n];
        let at = |e: Error| match e {
            Error::Domain(msg) => Error::Domain(format!("iterate {n}: {msg}")),
            other => other,
        };
        let sx = maps.apply_s(space, x).map_err(at)?;
        let tx = maps.apply_t(space, x).map_err(at)?;
        let tsx = maps.apply_t(space, &sx).map_err(at)?;
        let gap = space.distance_unchecked(&tx, &tsx);
        let gap_norm = cone.norm(&gap);
        let step_norm = cone.norm(&space.distance_unchecked(x, &sx));
        trace.t_images.push(tx);
        trace.t_image_gaps.push(gap);
        trace.gap_norms.push(gap_norm);
        trace.step_norms.push(step_norm);
        trace.iterations += 1;

        if gap_norm <= rule.epsilon && step_norm <= rule.epsilon {
            trace.stop_reason = StopReason::Converged;
            break;
        }
        if n >= rule.max_iter {
            trace.stop_reason = StopReason::MaxIter;
            break;
        }
        let window_start = trace.x_sequence.len().saturating_sub(rule.stall_window);
        if trace.x_sequence[window_start..].contains(&sx) {
            trace.stop_reason = StopReason::CycleDetected;
            break;
        }
        trace.x_sequence.push(sx);
    }
    Ok(trace)
}
