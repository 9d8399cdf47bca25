use rand::Rng;
use serde::{Deserialize, Serialize};

use super::picard::IterationTrace;
use crate::cone_space::ConeMetricSpace;
use crate::error::{Error, Result};
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayOptions {
    /// Relative slack on every bound.
    pub relative_eps: f64,
    /// All `m > n` pairs are checked when there are at most this many;
    /// otherwise this many are drawn at random.
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            relative_eps: 1e-9,
            max_pairs: 32_640,
            seed: sampling::DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundFailure {
    pub m: usize,
    pub n: usize,
    pub observed: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub h: f64,
    pub k: f64,
    pub passed: bool,
    pub steps_checked: usize,
    /// First `n` with `‖d_n‖ > K hⁿ ‖d_0‖`; `m` is `n + 1`.
    pub step_failure: Option<BoundFailure>,
    pub cauchy_pairs_checked: usize,
    pub cauchy_ok: bool,
    pub cauchy_failure: Option<BoundFailure>,
    /// Largest observed `‖d_{n+1}‖ / ‖d_n‖`.
    pub max_step_ratio: Option<f64>,
}

/// `K·hⁿ·‖d₀‖`, the bound on the `n`-th gap.
pub fn step_bound(h: f64, k: f64, d0: f64, n: usize) -> f64 {
    k * h.powi(n as i32) * d0
}

/// Checks the geometric bound on the T-image gaps and the Cauchy tail
/// `‖d(TSᵐx₀, TSⁿx₀)‖ ≤ K hⁿ/(1−h) ‖d₀‖` for `m > n`.
pub fn geometric_decay_check(
    space: &ConeMetricSpace,
    trace: &IterationTrace,
    h: f64,
    k: f64,
    opts: &DecayOptions,
) -> Result<DecayReport> {
    if !(h.is_finite() && (0.0..1.0).contains(&h)) {
        return Err(Error::config(format!("rate h must be in [0,1), got {h}")));
    }
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::config(format!(
            "normal constant K must be >= 1, got {k}"
        )));
    }
    if trace.gap_norms.is_empty() {
        return Err(Error::config("trace is empty"));
    }
    let slack = 1.0 + opts.relative_eps;
    let d0 = trace.gap_norms[0];
    let cone = space.cone();

    let step_failure = trace.gap_norms.iter().enumerate().find_map(|(n, &g)| {
        let bound = step_bound(h, k, d0, n);
        (g > bound * slack).then_some(BoundFailure {
            m: n + 1,
            n,
            observed: g,
            bound,
        })
    });

    let len = trace.t_images.len();
    let total = len * len.saturating_sub(1) / 2;
    let pairs: Vec<(usize, usize)> = if total <= opts.max_pairs {
        (0..len)
            .flat_map(|n| (n + 1..len).map(move |m| (m, n)))
            .collect()
    } else {
        let mut rng = sampling::rng(opts.seed);
        let mut picked: Vec<(usize, usize)> = (0..opts.max_pairs)
            .map(|_| {
                let n = rng.gen_range(0..len - 1);
                (rng.gen_range(n + 1..len), n)
            })
            .collect();
        picked.sort_unstable_by_key(|&(m, n)| (n, m));
        picked.dedup();
        picked
    };
    let cauchy_failure = pairs.iter().find_map(|&(m, n)| {
        let observed = cone.norm(&space.distance_unchecked(&trace.t_images[m], &trace.t_images[n]));
        let bound = step_bound(h, k, d0, n) / (1.0 - h);
        (observed > bound * slack).then_some(BoundFailure {
            m,
            n,
            observed,
            bound,
        })
    });

    let max_step_ratio = trace.step_ratios().into_iter().reduce(f64::max);
    Ok(DecayReport {
        h,
        k,
        passed: step_failure.is_none() && cauchy_failure.is_none(),
        steps_checked: trace.gap_norms.len(),
        step_failure,
        cauchy_pairs_checked: pairs.len(),
        cauchy_ok: cauchy_failure.is_none(),
        cauchy_failure,
        max_step_ratio,
    })
}
