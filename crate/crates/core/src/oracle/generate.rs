//! Random finite instances on dyadic grids, kept by rejection.
//!
//! Labels sit at distinct dyadic positions, so every table entry and every
//! sum the checks form is exact in `f64` as well as in rationals.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::check::{exhaustive_condition_check, ExactClass};
use super::instance::FiniteInstance;
use super::tight::{tightest_constants, TightConstants};
use crate::cone_space::ConeSpec;
use crate::contractions::{ClassKind, ClassSpec};
use crate::error::{Error, Result};
use crate::sampling;

pub const MAX_ATTEMPTS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricShape {
    /// `d(i,j) = |pᵢ − pⱼ|·(1, w)` for positions on a line.
    Line { weight: u32 },
    /// `d(i,j) = (|Δx|, |Δy|)` for positions in the plane.
    Plane,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub fin: FiniteInstance,
    pub spec: ClassSpec,
    pub shape: MetricShape,
    pub attempts: usize,
}

struct Layout {
    shape: MetricShape,
    /// Position of each label, in grid units.
    pos: Vec<(i64, i64)>,
    scale: f64,
}

impl Layout {
    fn random(rng: &mut ChaCha8Rng, n: usize) -> Layout {
        if rng.gen_bool(0.5) {
            let mut slots: Vec<i64> = (0..4 * n as i64).collect();
            slots.shuffle(rng);
            Layout {
                shape: MetricShape::Line {
                    weight: rng.gen_range(1..=3),
                },
                pos: slots[..n].iter().map(|&p| (p, 0)).collect(),
                scale: 0.125,
            }
        } else {
            let mut slots: Vec<(i64, i64)> =
                (0..8).flat_map(|x| (0..8).map(move |y| (x, y))).collect();
            slots.shuffle(rng);
            Layout {
                shape: MetricShape::Plane,
                pos: slots[..n].to_vec(),
                scale: 0.25,
            }
        }
    }

    fn distance(&self, i: usize, j: usize) -> Vec<f64> {
        let (a, b) = (self.pos[i], self.pos[j]);
        let dx = (a.0 - b.0).abs() as f64 * self.scale;
        let dy = (a.1 - b.1).abs() as f64 * self.scale;
        match self.shape {
            MetricShape::Line { weight } => vec![dx, dx * f64::from(weight)],
            MetricShape::Plane => vec![dx, dy],
        }
    }

    fn table(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.pos.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.distance(i, j)).collect())
            .collect()
    }

    fn grid_gap(&self, a: (i64, i64), b: (f64, f64)) -> f64 {
        (a.0 as f64 - b.0).abs() + (a.1 as f64 - b.1).abs()
    }
}

fn random_s(rng: &mut ChaCha8Rng, layout: &Layout, t: &[usize]) -> Vec<usize> {
    let n = t.len();
    let z = rng.gen_range(0..n);
    let lambda = f64::from(rng.gen_range(1..8u32)) / 8.0;
    let noise = [0.0, 0.05, 0.2][rng.gen_range(0..3)];
    // contract the T-images towards T(z) and snap to the nearest image
    let image = |x: usize| layout.pos[t[x]];
    let (zx, zy) = image(z);
    (0..n)
        .map(|x| {
            if x == z {
                return z;
            }
            if rng.gen_bool(noise) {
                return rng.gen_range(0..n);
            }
            let (px, py) = image(x);
            let target = (
                zx as f64 + lambda * (px - zx) as f64,
                zy as f64 + lambda * (py - zy) as f64,
            );
            (0..n)
                .min_by(|&a, &b| {
                    layout
                        .grid_gap(image(a), target)
                        .total_cmp(&layout.grid_gap(image(b), target))
                })
                .expect("nonempty carrier")
        })
        .collect()
}

/// A random D-family instance: dyadic positions, a random permutation `T`
/// and a random function `S`, with no class imposed.
pub fn random_instance(seed: u64, index: u64, max_points: usize) -> Result<FiniteInstance> {
    let mut rng = sampling::substream(seed, index);
    draw(&mut rng, max_points, true).map(|(fin, _)| fin)
}

fn draw(
    rng: &mut ChaCha8Rng,
    max_points: usize,
    free_s: bool,
) -> Result<(FiniteInstance, MetricShape)> {
    let n = rng.gen_range(2..=max_points.clamp(2, 64));
    let layout = Layout::random(rng, n);
    let mut t: Vec<usize> = (0..n).collect();
    t.shuffle(rng);
    let s = if free_s {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    } else {
        random_s(rng, &layout, &t)
    };
    let fin = FiniteInstance::new(ConeSpec::orthant(2), &layout.table(), t, s)?;
    Ok((fin, layout.shape))
}

fn sixty_fourths(rng: &mut ChaCha8Rng, below: u32) -> f64 {
    f64::from(rng.gen_range(0..below)) / 64.0
}

fn search(
    seed: u64,
    index: u64,
    max_points: usize,
    what: &str,
    mut accept: impl FnMut(&mut ChaCha8Rng, &FiniteInstance) -> Result<Option<ClassSpec>>,
) -> Result<Generated> {
    let mut rng = sampling::substream(seed, index);
    for attempt in 1..=MAX_ATTEMPTS {
        let (fin, shape) = draw(&mut rng, max_points, false)?;
        if let Some(spec) = accept(&mut rng, &fin)? {
            return Ok(Generated {
                fin,
                spec,
                shape,
                attempts: attempt,
            });
        }
    }
    Err(Error::Unsupported(format!(
        "no {what} instance found in {MAX_ATTEMPTS} attempts"
    )))
}

/// A finite instance on which the Zamfirescu condition holds exhaustively
/// for randomly drawn in-range constants.
pub fn generate_tz(seed: u64, index: u64, max_points: usize) -> Result<Generated> {
    search(seed, index, max_points, "Zamfirescu", |rng, fin| {
        let spec = ClassSpec::Tz {
            a: sixty_fourths(rng, 64),
            b: sixty_fourths(rng, 32),
            c: sixty_fourths(rng, 32),
        };
        Ok(exhaustive_condition_check(fin, &spec)?
            .holds
            .then_some(spec))
    })
}

/// A finite instance satisfying the uniqueness condition with random
/// constants, and some weak contraction as well so a fixed point exists.
pub fn generate_twu(seed: u64, index: u64, max_points: usize) -> Result<Generated> {
    search(
        seed,
        index,
        max_points,
        "uniqueness-condition",
        |rng, fin| {
            let spec = ClassSpec::Twu {
                theta: sixty_fourths(rng, 64),
                l1: f64::from(rng.gen_range(0..=16u32)) / 4.0,
            };
            let exact = ExactClass::from_spec(&spec)?;
            if !super::check::exhaustive_check_exact(fin, &exact).holds {
                return Ok(None);
            }
            let weak = tightest_constants(fin, ClassKind::Tw, None)?;
            Ok(matches!(weak, TightConstants::Feasible { .. }).then_some(spec))
        },
    )
}
