//! Sampled lower bound on the normal constant of a cone.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cone::ConeSpec;
use super::vector::VectorE;
use crate::sampling;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalConstantEstimate {
    /// `sup ‖x‖/‖y‖` over the sampled pairs; `None` when no pair was drawn.
    pub value: Option<f64>,
    pub pairs: usize,
    pub inconclusive: bool,
    /// The pair `(x, y)` attaining the supremum.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Lower bound `K̂` on the normal constant from `n` draws.
///
/// Each draw takes `u, w ∈ P` with log-uniform magnitudes in `[1e-3, 1e3]`,
/// sets `y = u + w` and scores the three ordered pairs `0 ≤ x ≤ y` with
/// `x ∈ {u, w, y}`. Draw `k` does not depend on `n`, so `K̂` is nondecreasing
/// in `n` for a fixed seed, and `K̂ ≥ 1` as soon as one draw succeeds.
pub fn estimate_normal_constant(cone: &ConeSpec, seed: u64, n: usize) -> NormalConstantEstimate {
    let mut rng = sampling::rng(seed);
    let mut best: Option<(f64, VectorE, VectorE)> = None;
    let mut pairs = 0;
    for _ in 0..n {
        let (Some(u), Some(w)) = (cone.sample_member(&mut rng), cone.sample_member(&mut rng))
        else {
            continue;
        };
        let su = 10f64.powf(rng.gen_range(-3.0..=3.0));
        let sw = 10f64.powf(rng.gen_range(-3.0..=3.0));
        let u = su * &u;
        let w = sw * &w;
        let y = &u + &w;
        let ny = cone.norm(&y);
        if ny == 0.0 {
            continue;
        }
        pairs += 1;
        for x in [&u, &w, &y] {
            let ratio = cone.norm(x) / ny;
            if best.as_ref().is_none_or(|(b, _, _)| ratio > *b) {
                best = Some((ratio, x.clone(), y.clone()));
            }
        }
    }
    match best {
        Some((value, x, y)) => NormalConstantEstimate {
            value: Some(value),
            pairs,
            inconclusive: false,
            witness: Some((x.into_inner(), y.into_inner())),
        },
        None => NormalConstantEstimate {
            value: None,
            pairs,
            inconclusive: true,
            witness: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_space::{ConeFamily, NormKind};

    #[test]
    fn orthant_is_normal_with_constant_one() {
        for norm in [NormKind::Max, NormKind::Euclidean] {
            let cone = ConeSpec::orthant(3).with_norm(norm);
            for n in [1, 10, 1000] {
                assert_eq!(estimate_normal_constant(&cone, 3, n).value, Some(1.0));
            }
        }
    }

    #[test]
    fn zero_draws_is_inconclusive() {
        let est = estimate_normal_constant(&ConeSpec::orthant(2), 1, 0);
        assert!(est.inconclusive);
        assert_eq!(est.value, None);
    }

    #[test]
    fn nondecreasing_in_sample_size() {
        let obtuse = ConeSpec::new(
            2,
            ConeFamily::Polyhedral {
                matrix: vec![vec![0.0, 1.0], vec![1.0, 1.0]],
            },
        )
        .unwrap()
        .with_norm(NormKind::Euclidean);
        let mut prev = 0.0;
        for n in [1, 5, 50, 500, 5000] {
            let k = estimate_normal_constant(&obtuse, 11, n).value.unwrap();
            assert!(k >= prev);
            prev = k;
        }
    }
}
