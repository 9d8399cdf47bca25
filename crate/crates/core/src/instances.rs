//! The canonical built-in instances.
//!
//! * A: `M = [0,1]`, `d(x,y) = (|x−y|, 2|x−y|)`, `T = id`, `S(x) = x/2`.
//! * B: same space, `T(x) = x³`, `S(x) = x/4`.
//! * C: same space, `T = S = id`; every point is fixed.
//! * D: labels `{0,…,9}`, tabulated `d(i,j) = (|i−j|, 2|i−j|)`, `T = id`,
//!   `S(k) = ⌊k/2⌋`.

use crate::cone_space::{BaseMetric, CarrierSpec, ConeMetricSpace, ConeSpec, MetricSpec};
use crate::contractions::{MapFamily, MapPair};

/// A cone metric space together with the maps acting on it.
#[derive(Clone, Debug, PartialEq)]
pub struct MappedSpace {
    pub space: ConeMetricSpace,
    pub maps: MapPair,
}

pub const GRID: usize = 101;

fn unit_interval_space() -> ConeMetricSpace {
    ConeMetricSpace::new(
        ConeSpec::orthant(2),
        CarrierSpec::interval(0.0, 1.0, GRID),
        MetricSpec::Direction {
            direction: vec![1.0, 2.0],
            base: BaseMetric::Euclidean,
        },
    )
    .expect("valid built-in space")
}

pub fn instance_a() -> MappedSpace {
    MappedSpace {
        space: unit_interval_space(),
        maps: MapPair::new(
            MapFamily::Identity,
            MapFamily::Affine {
                alpha: 0.5,
                beta: 0.0,
            },
        ),
    }
}

pub fn instance_b() -> MappedSpace {
    MappedSpace {
        space: unit_interval_space(),
        maps: MapPair::new(
            MapFamily::Power { exponent: 3.0 },
            MapFamily::Affine {
                alpha: 0.25,
                beta: 0.0,
            },
        ),
    }
}

pub fn instance_c() -> MappedSpace {
    MappedSpace {
        space: unit_interval_space(),
        maps: MapPair::new(MapFamily::Identity, MapFamily::Identity),
    }
}

/// `(|i−j|, 2|i−j|)` on `n` labels.
pub fn line_table(n: usize) -> Vec<Vec<Vec<f64>>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = (i as f64 - j as f64).abs();
                    vec![d, 2.0 * d]
                })
                .collect()
        })
        .collect()
}

pub fn instance_d() -> MappedSpace {
    instance_d_with(|k| k / 2)
}

/// Instance D's space with `T = id` and the given `S`.
pub fn instance_d_with(s: impl Fn(usize) -> usize) -> MappedSpace {
    let n = 10;
    MappedSpace {
        space: ConeMetricSpace::new(
            ConeSpec::orthant(2),
            CarrierSpec::Finite { points: n },
            MetricSpec::Tabulated {
                table: line_table(n),
            },
        )
        .expect("valid built-in space"),
        maps: MapPair::new(
            MapFamily::Tabulated {
                table: (0..n).collect(),
            },
            MapFamily::Tabulated {
                table: (0..n).map(s).collect(),
            },
        ),
    }
}
