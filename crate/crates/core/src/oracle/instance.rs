use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::exact::{all_nonneg, all_zero, q, q_int, to_f64, ExactCone, Q};
use crate::cone_space::{
    BaseMetric, CarrierSpec, ComponentForm, ConeMetricSpace, ConeSpec, MetricSpec, Point,
};
use crate::contractions::{MapFamily, MapPair, MapProperties};
use crate::error::{Error, Result};
use crate::instances::MappedSpace;

pub const MAX_POINTS: usize = 200;

/// A finite carrier with an exact metric table and tabulated maps.
///
/// The metric is checked against d1–d3 over every pair and triple at
/// construction, in exact arithmetic, so later scans can rely on it.
#[derive(Clone, Debug)]
pub struct FiniteInstance {
    cone: ConeSpec,
    labels: Vec<Point>,
    /// `d(i, j)` at `i * n + j`.
    table: Vec<Vec<Q>>,
    /// `A·d(i, j)`, the cone-row values of each distance.
    proj: Vec<Vec<Q>>,
    t: Vec<usize>,
    s: Vec<usize>,
}

impl FiniteInstance {
    /// Builds an instance from an `f64` table; every entry is taken at its exact value.
    pub fn new(
        cone: ConeSpec,
        table: &[Vec<Vec<f64>>],
        t_table: Vec<usize>,
        s_table: Vec<usize>,
    ) -> Result<Self> {
        let n = table.len();
        if table.iter().any(|row| row.len() != n) {
            return Err(Error::config(format!("metric table must be {n}x{n}")));
        }
        let exact = table
            .iter()
            .flatten()
            .map(|v| {
                if v.len() != cone.dimension() {
                    return Err(Error::Dimension {
                        expected: cone.dimension(),
                        found: v.len(),
                    });
                }
                v.iter().map(|&x| q(x)).collect()
            })
            .collect::<Result<Vec<Vec<Q>>>>()?;
        let labels = (0..n).map(Point::label).collect();
        Self::from_exact(cone, labels, exact, t_table, s_table)
    }

    pub(crate) fn from_exact(
        cone: ConeSpec,
        labels: Vec<Point>,
        table: Vec<Vec<Q>>,
        t: Vec<usize>,
        s: Vec<usize>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut problems = Vec::new();
        if n == 0 || n > MAX_POINTS {
            problems.push(format!(
                "finite instances need 1..={MAX_POINTS} points, got {n}"
            ));
        }
        for (name, map) in [("T", &t), ("S", &s)] {
            if map.len() != n {
                problems.push(format!(
                    "{name} table has {} entries for {n} points",
                    map.len()
                ));
            } else if let Some(k) = map.iter().find(|&&k| k >= n) {
                problems.push(format!("{name} table entry {k} is not a label below {n}"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::config(problems.join("; ")));
        }
        let exact_cone = ExactCone::new(&cone)?;
        let proj = table.iter().map(|v| exact_cone.project(v)).collect();
        let fin = FiniteInstance {
            cone,
            labels,
            table,
            proj,
            t,
            s,
        };
        let problems = fin.metric_problems();
        if problems.is_empty() {
            Ok(fin)
        } else {
            Err(Error::config(problems.join("; ")))
        }
    }

    /// Tabulates a space whose carrier is finite, or the grid of a continuous
    /// carrier when both maps send grid points to grid points.
    pub fn from_space(space: &ConeMetricSpace, maps: &MapPair) -> Result<Self> {
        let labels = space.carrier().grid_points();
        if labels.len() > MAX_POINTS {
            return Err(Error::Unsupported(format!(
                "{} carrier points exceed the oracle limit of {MAX_POINTS}",
                labels.len()
            )));
        }
        let index: HashMap<Vec<u64>, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, p)| (bits(p), i))
            .collect();
        let lookup = |name: &str, img: Point| -> Result<usize> {
            index.get(&bits(&img)).copied().ok_or_else(|| {
                Error::Unsupported(format!(
                    "map {name} sends a grid point to {img}, off the grid"
                ))
            })
        };
        let mut t = Vec::with_capacity(labels.len());
        let mut s = Vec::with_capacity(labels.len());
        for p in &labels {
            t.push(lookup("T", maps.apply_t(space, p)?)?);
            s.push(lookup("S", maps.apply_s(space, p)?)?);
        }
        let mut table = Vec::with_capacity(labels.len() * labels.len());
        for x in &labels {
            for y in &labels {
                table.push(exact_distance(space.metric(), x, y)?);
            }
        }
        let fin = Self::from_exact(space.cone().clone(), labels, table, t, s)?;
        if maps.properties.t_injective && !fin.t_injective() {
            return Err(Error::config(
                "T is declared injective but its table is not",
            ));
        }
        Ok(fin)
    }

    fn metric_problems(&self) -> Vec<String> {
        let n = self.len();
        let mut out = Vec::new();
        let first = |found: Vec<(usize, usize)>, what: &str, out: &mut Vec<String>| {
            if let Some((i, j)) = found.first() {
                out.push(format!(
                    "{what} fails at ({i},{j}) [{} pair(s)]",
                    found.len()
                ));
            }
        };
        let diag: Vec<_> = (0..n)
            .filter(|&i| !all_zero(self.d(i, i)))
            .map(|i| (i, i))
            .collect();
        first(diag, "d1 positivity (d(x,x) = 0)", &mut out);
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        let positive: Vec<_> = pairs
            .iter()
            .copied()
            .filter(|&(i, j)| !all_nonneg(self.p(i, j)) || all_zero(self.d(i, j)))
            .collect();
        first(positive, "d1 positivity (0 < d(x,y) in the cone)", &mut out);
        let symmetric: Vec<_> = pairs
            .iter()
            .copied()
            .filter(|&(i, j)| i < j && self.d(i, j) != self.d(j, i))
            .collect();
        first(symmetric, "d2 symmetry", &mut out);
        let triangle = match scaled_integers(&self.proj) {
            Some(ints) => self.triangle_failures(|i, j, r| ints[i * n + j][r]),
            None => self.triangle_failures(|i, j, r| self.p(i, j)[r].clone()),
        };
        if let Some((i, j, k)) = triangle.first() {
            out.push(format!(
                "d3 triangle inequality fails at ({i},{j},{k}) [{} triple(s)]",
                triangle.len()
            ));
        }
        out
    }

    fn triangle_failures<V>(
        &self,
        row: impl Fn(usize, usize, usize) -> V + Sync,
    ) -> Vec<(usize, usize, usize)>
    where
        V: std::ops::Add<Output = V> + PartialOrd,
    {
        let n = self.len();
        let rows = self.cone.rows().len();
        (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let row = &row;
                (0..n).flat_map(move |j| {
                    (0..n).filter_map(move |k| {
                        let ok = (0..rows).all(|r| row(i, j, r) + row(j, k, r) >= row(i, k, r));
                        (!ok).then_some((i, j, k))
                    })
                })
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    /// The carrier point behind each label.
    pub fn labels(&self) -> &[Point] {
        &self.labels
    }

    pub fn t_table(&self) -> &[usize] {
        &self.t
    }

    pub fn s_table(&self) -> &[usize] {
        &self.s
    }

    /// Exact `d(i, j)`.
    pub fn d(&self, i: usize, j: usize) -> &[Q] {
        &self.table[i * self.len() + j]
    }

    /// Exact `A·d(i, j)`.
    pub(crate) fn p(&self, i: usize, j: usize) -> &[Q] {
        &self.proj[i * self.len() + j]
    }

    pub fn t_injective(&self) -> bool {
        let mut seen = vec![false; self.len()];
        self.t
            .iter()
            .all(|&k| !std::mem::replace(&mut seen[k], true))
    }

    /// The same carrier and metric with another `S`.
    pub fn with_s(&self, s_table: Vec<usize>) -> Result<Self> {
        if s_table.len() != self.len() || s_table.iter().any(|&k| k >= self.len()) {
            return Err(Error::config("S table does not fit the carrier"));
        }
        Ok(FiniteInstance {
            s: s_table,
            ..self.clone()
        })
    }

    /// The metric table rounded to `f64` (exact for dyadic tables).
    pub fn table_f64(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.d(i, j).iter().map(to_f64).collect())
                    .collect()
            })
            .collect()
    }

    /// The instance as a labelled space with tabulated maps.
    pub fn to_mapped_space(&self) -> Result<MappedSpace> {
        let space = ConeMetricSpace::new(
            self.cone.clone(),
            CarrierSpec::Finite { points: self.len() },
            MetricSpec::Tabulated {
                table: self.table_f64(),
            },
        )?;
        let properties = MapProperties {
            t_injective: self.t_injective(),
            ..MapProperties::all()
        };
        let maps = MapPair::new(
            MapFamily::Tabulated {
                table: self.t.clone(),
            },
            MapFamily::Tabulated {
                table: self.s.clone(),
            },
        )
        .with_properties(properties);
        Ok(MappedSpace { space, maps })
    }
}

/// The whole table over one common denominator as `i128` numerators, when
/// they fit with room for a sum of two. Entries built from `f64` values are
/// dyadic, so this nearly always succeeds.
fn scaled_integers(proj: &[Vec<Q>]) -> Option<Vec<Vec<i128>>> {
    let mut den = BigInt::one();
    for v in proj.iter().flatten() {
        den = den.lcm(v.denom());
        if den.bits() > 120 {
            return None;
        }
    }
    let limit = BigInt::one() << 125u32;
    proj.iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    let scaled = x.numer() * (&den / x.denom());
                    if scaled.abs() >= limit {
                        None
                    } else {
                        scaled.to_i128()
                    }
                })
                .collect()
        })
        .collect()
}

fn bits(p: &Point) -> Vec<u64> {
    // -0.0 and 0.0 are the same carrier point
    p.coords().iter().map(|x| (x + 0.0).to_bits()).collect()
}

/// `d(x, y)` computed in exact arithmetic from the exact coordinates.
fn exact_distance(metric: &MetricSpec, x: &Point, y: &Point) -> Result<Vec<Q>> {
    let (xs, ys) = (x.coords(), y.coords());
    Ok(match metric {
        MetricSpec::Direction { direction, base } => {
            let diffs = xs
                .iter()
                .zip(ys)
                .map(|(a, b)| Ok((q(*a)? - q(*b)?).abs()))
                .collect::<Result<Vec<Q>>>()?;
            let rho =
                match base {
                    BaseMetric::Max => diffs.iter().cloned().fold(Q::zero(), |m, d| m.max(d)),
                    BaseMetric::Manhattan => diffs.iter().sum(),
                    BaseMetric::Discrete => q_int(i64::from(xs != ys)),
                    BaseMetric::Euclidean => {
                        let nonzero: Vec<&Q> = diffs.iter().filter(|d| !d.is_zero()).collect();
                        match nonzero.as_slice() {
                            [] => Q::zero(),
                            [d] => (*d).clone(),
                            _ => return Err(Error::Unsupported(
                                "exact Euclidean distances need points differing in one coordinate"
                                    .into(),
                            )),
                        }
                    }
                };
            direction
                .iter()
                .map(|u| Ok(&rho * q(*u)?))
                .collect::<Result<_>>()?
        }
        MetricSpec::Componentwise { components } => {
            let diff = q(xs[0])? - q(ys[0])?;
            components
                .iter()
                .map(|c| {
                    let g = match c.form {
                        ComponentForm::Abs => diff.abs(),
                        ComponentForm::Signed => diff.clone(),
                    };
                    Ok(q(c.scale)? * g + q(c.offset)?)
                })
                .collect::<Result<_>>()?
        }
        MetricSpec::Tabulated { table } => {
            let (i, j) = (
                x.as_label().expect("finite label"),
                y.as_label().expect("finite label"),
            );
            table[i][j].iter().map(|&v| q(v)).collect::<Result<_>>()?
        }
    })
}
