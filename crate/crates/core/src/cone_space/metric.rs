//! Carriers, vector-valued metrics and the cone metric space built from them.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cone::ConeSpec;
use super::vector::VectorE;
use crate::error::{Error, Result};

/// A point of the carrier set M. Interval carriers use one coordinate, boxes
/// use `k`, and finite carriers store the integer label as a single coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn scalar(x: f64) -> Self {
        Point(vec![x])
    }

    pub fn label(k: usize) -> Self {
        Point(vec![k as f64])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// The label of a finite-carrier point.
    pub fn as_label(&self) -> Option<usize> {
        match self.0.as_slice() {
            [x] if *x >= 0.0 && x.fract() == 0.0 && *x < usize::MAX as f64 => Some(*x as usize),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [x] => write!(f, "{x}"),
            coords => {
                let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

fn default_interval_grid() -> usize {
    101
}

fn default_box_grid() -> usize {
    11
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CarrierSpec {
    /// `[lo, hi]` with `grid` equally spaced sample points (endpoints included).
    Interval {
        lo: f64,
        hi: f64,
        #[serde(default = "default_interval_grid")]
        grid: usize,
    },
    /// Axis-aligned box with `grid` points per axis.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default = "default_box_grid")]
        grid: usize,
    },
    /// Labels `0..points`.
    Finite { points: usize },
}

impl CarrierSpec {
    pub fn interval(lo: f64, hi: f64, grid: usize) -> Self {
        CarrierSpec::Interval { lo, hi, grid }
    }

    /// Every range problem with the carrier description.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            CarrierSpec::Interval { lo, hi, grid } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    out.push(format!(
                        "interval carrier needs finite lo < hi, got [{lo}, {hi}]"
                    ));
                }
                if *grid < 2 {
                    out.push(format!("interval grid must be >= 2, got {grid}"));
                }
            }
            CarrierSpec::Box { lo, hi, grid } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    out.push(format!(
                        "box carrier needs matching nonempty bounds, got {} and {}",
                        lo.len(),
                        hi.len()
                    ));
                }
                if lo
                    .iter()
                    .zip(hi)
                    .any(|(l, h)| !(l.is_finite() && h.is_finite() && l < h))
                {
                    out.push("box carrier needs finite lo < hi on every axis".into());
                }
                if *grid < 2 {
                    out.push(format!("box grid must be >= 2, got {grid}"));
                }
            }
            CarrierSpec::Finite { points } => {
                if *points == 0 {
                    out.push("finite carrier needs at least one point".into());
                }
            }
        }
        out
    }

    pub fn point_dim(&self) -> usize {
        match self {
            CarrierSpec::Interval { .. } | CarrierSpec::Finite { .. } => 1,
            CarrierSpec::Box { lo, .. } => lo.len(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, CarrierSpec::Finite { .. })
    }

    pub fn contains(&self, p: &Point) -> bool {
        let c = p.coords();
        if c.len() != self.point_dim() || c.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self {
            CarrierSpec::Interval { lo, hi, .. } => *lo <= c[0] && c[0] <= *hi,
            CarrierSpec::Box { lo, hi, .. } => c
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(x, (l, h))| l <= x && x <= h),
            CarrierSpec::Finite { points } => p.as_label().is_some_and(|k| k < *points),
        }
    }

    /// Grid points of a continuous carrier, or every label of a finite one.
    pub fn grid_points(&self) -> Vec<Point> {
        match self {
            CarrierSpec::Interval { lo, hi, grid } => grid_axis(*lo, *hi, *grid)
                .into_iter()
                .map(Point::scalar)
                .collect(),
            CarrierSpec::Box { lo, hi, grid } => {
                let axes: Vec<Vec<f64>> = lo
                    .iter()
                    .zip(hi)
                    .map(|(l, h)| grid_axis(*l, *h, *grid))
                    .collect();
                let mut points = vec![Vec::new()];
                for axis in &axes {
                    points = points
                        .into_iter()
                        .flat_map(|prefix| {
                            axis.iter().map(move |&x| {
                                let mut p = prefix.clone();
                                p.push(x);
                                p
                            })
                        })
                        .collect();
                }
                points.into_iter().map(Point::new).collect()
            }
            CarrierSpec::Finite { points } => (0..*points).map(Point::label).collect(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            CarrierSpec::Interval { lo, hi, .. } => Point::scalar(rng.gen_range(*lo..=*hi)),
            CarrierSpec::Box { lo, hi, .. } => Point::new(
                lo.iter()
                    .zip(hi)
                    .map(|(l, h)| rng.gen_range(*l..=*h))
                    .collect(),
            ),
            CarrierSpec::Finite { points } => Point::label(rng.gen_range(0..*points)),
        }
    }
}

fn grid_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Scalar metric ρ on carrier coordinates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMetric {
    #[default]
    Euclidean,
    Max,
    Manhattan,
    /// 0 on the diagonal, 1 elsewhere.
    Discrete,
}

impl BaseMetric {
    pub fn eval(self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            BaseMetric::Euclidean => {
                if x.len() == 1 {
                    (x[0] - y[0]).abs()
                } else {
                    diffs.map(|d| d * d).sum::<f64>().sqrt()
                }
            }
            BaseMetric::Max => diffs.fold(0.0, f64::max),
            BaseMetric::Manhattan => diffs.sum(),
            BaseMetric::Discrete => {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentForm {
    #[default]
    Abs,
    Signed,
}

fn one() -> f64 {
    1.0
}

/// One coordinate of a componentwise metric on a one-dimensional carrier:
/// `scale · g(x − y) + offset` with `g = |·|` or the identity.
///
/// This family admits deliberately broken metrics so the axiom checker has
/// something to catch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    #[serde(default)]
    pub form: ComponentForm,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    /// `d(x, y) = ρ(x, y) · u` for a fixed direction `u`, normally in `Int P`.
    Direction {
        direction: Vec<f64>,
        #[serde(default)]
        base: BaseMetric,
    },
    Componentwise {
        components: Vec<Component>,
    },
    /// `table[i][j]` is `d(i, j)` on a finite carrier.
    Tabulated {
        table: Vec<Vec<Vec<f64>>>,
    },
}

/// A carrier set with a vector-valued metric into an ordered space `(E, P)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeMetricSpace {
    cone: ConeSpec,
    carrier: CarrierSpec,
    metric: MetricSpec,
}

impl ConeMetricSpace {
    /// Checks shapes and finiteness. Whether `d` satisfies d1–d3 is left to
    /// [`crate::cone_space::verify_metric_axioms`].
    pub fn new(cone: ConeSpec, carrier: CarrierSpec, metric: MetricSpec) -> Result<Self> {
        let problems = carrier.problems();
        if !problems.is_empty() {
            return Err(Error::config(problems.join("; ")));
        }
        let m = cone.dimension();
        let dim_err = |found: usize| Error::Dimension { expected: m, found };
        match &metric {
            MetricSpec::Direction { direction, .. } => {
                if direction.len() != m {
                    return Err(dim_err(direction.len()));
                }
                if direction.iter().any(|c| !c.is_finite()) {
                    return Err(Error::config("metric direction must be finite"));
                }
            }
            MetricSpec::Componentwise { components } => {
                if components.len() != m {
                    return Err(dim_err(components.len()));
                }
                if carrier.point_dim() != 1 {
                    return Err(Error::config(
                        "componentwise metrics need a one-dimensional carrier",
                    ));
                }
                if components
                    .iter()
                    .any(|c| !(c.scale.is_finite() && c.offset.is_finite()))
                {
                    return Err(Error::config("metric components must be finite"));
                }
            }
            MetricSpec::Tabulated { table } => {
                let CarrierSpec::Finite { points } = carrier else {
                    return Err(Error::config("tabulated metrics need a finite carrier"));
                };
                if table.len() != points || table.iter().any(|row| row.len() != points) {
                    return Err(Error::config(format!(
                        "metric table must be {points}x{points}"
                    )));
                }
                for entry in table.iter().flatten() {
                    if entry.len() != m {
                        return Err(dim_err(entry.len()));
                    }
                    if entry.iter().any(|c| !c.is_finite()) {
                        return Err(Error::config("metric table entries must be finite"));
                    }
                }
            }
        }
        Ok(ConeMetricSpace {
            cone,
            carrier,
            metric,
        })
    }

    pub fn cone(&self) -> &ConeSpec {
        &self.cone
    }

    pub fn carrier(&self) -> &CarrierSpec {
        &self.carrier
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if self.carrier.contains(p) {
            Ok(())
        } else {
            Err(Error::domain(format!("point {p} is outside the carrier")))
        }
    }

    /// `d(x, y)`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<VectorE> {
        self.check_point(x)?;
        self.check_point(y)?;
        Ok(self.distance_unchecked(x, y))
    }

    pub(crate) fn distance_unchecked(&self, x: &Point, y: &Point) -> VectorE {
        let coords = match &self.metric {
            MetricSpec::Direction { direction, base } => {
                let rho = base.eval(x.coords(), y.coords());
                direction.iter().map(|u| rho * u).collect()
            }
            MetricSpec::Componentwise { components } => {
                let diff = x.coords()[0] - y.coords()[0];
                components
                    .iter()
                    .map(|c| {
                        let g = match c.form {
                            ComponentForm::Abs => diff.abs(),
                            ComponentForm::Signed => diff,
                        };
                        c.scale * g + c.offset
                    })
                    .collect()
            }
            MetricSpec::Tabulated { table } => {
                let (i, j) = (
                    x.as_label().expect("finite label"),
                    y.as_label().expect("finite label"),
                );
                table[i][j].clone()
            }
        };
        VectorE::from_raw(coords)
    }

    /// `‖d(x, y)‖` in the norm of E.
    pub fn distance_norm(&self, x: &Point, y: &Point) -> Result<f64> {
        Ok(self.cone.norm(&self.distance(x, y)?))
    }
}
