use serde::{Deserialize, Serialize};

use crate::cone_space::{ConeMetricSpace, Point};
use crate::error::{Error, Result};

/// Built-in self-map families on a carrier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapFamily {
    Identity,
    /// `x ↦ αx + β`, coordinatewise.
    Affine {
        alpha: f64,
        beta: f64,
    },
    /// `x ↦ x^p`, coordinatewise. Integer exponents accept negative inputs.
    Power {
        exponent: f64,
    },
    /// `k ↦ table[k]` on a finite carrier.
    Tabulated {
        table: Vec<usize>,
    },
}

impl MapFamily {
    pub fn problems(&self, name: &str) -> Vec<String> {
        match self {
            MapFamily::Affine { alpha, beta } if !(alpha.is_finite() && beta.is_finite()) => {
                vec![format!("map {name}: affine coefficients must be finite")]
            }
            MapFamily::Power { exponent } if !exponent.is_finite() => {
                vec![format!("map {name}: exponent must be finite")]
            }
            _ => vec![],
        }
    }

    /// Raw evaluation; carrier membership of the result is not checked here.
    pub fn eval(&self, p: &Point) -> Point {
        match self {
            MapFamily::Identity => p.clone(),
            MapFamily::Affine { alpha, beta } => {
                Point::new(p.coords().iter().map(|x| alpha * x + beta).collect())
            }
            MapFamily::Power { exponent } => {
                let e = *exponent;
                let integral = e.fract() == 0.0 && e.abs() <= i32::MAX as f64;
                Point::new(
                    p.coords()
                        .iter()
                        .map(|&x| {
                            if integral {
                                x.powi(e as i32)
                            } else {
                                x.powf(e)
                            }
                        })
                        .collect(),
                )
            }
            MapFamily::Tabulated { table } => match p.as_label().and_then(|k| table.get(k)) {
                Some(&img) => Point::label(img),
                None => Point::new(vec![f64::NAN]),
            },
        }
    }
}

/// Regularity the user asserts for `T` and `S`; [`crate::solver::diagnose_t`]
/// looks for counterexamples to the `T` flags.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapProperties {
    pub t_continuous: bool,
    pub t_injective: bool,
    pub t_sequentially_convergent: bool,
    pub t_subsequentially_convergent: bool,
    pub s_continuous: bool,
}

impl MapProperties {
    /// Everything declared, as for a continuous injective `T` on a compact carrier.
    pub fn all() -> Self {
        MapProperties {
            t_continuous: true,
            t_injective: true,
            t_sequentially_convergent: true,
            t_subsequentially_convergent: true,
            s_continuous: true,
        }
    }
}

/// The auxiliary map `T` and the iterated map `S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapPair {
    pub t: MapFamily,
    pub s: MapFamily,
    #[serde(default)]
    pub properties: MapProperties,
}

impl MapPair {
    pub fn new(t: MapFamily, s: MapFamily) -> Self {
        MapPair {
            t,
            s,
            properties: MapProperties::all(),
        }
    }

    pub fn with_properties(mut self, properties: MapProperties) -> Self {
        self.properties = properties;
        self
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = self.t.problems("T");
        out.extend(self.s.problems("S"));
        out
    }

    pub fn apply_t(&self, space: &ConeMetricSpace, p: &Point) -> Result<Point> {
        apply(&self.t, "T", space, p)
    }

    pub fn apply_s(&self, space: &ConeMetricSpace, p: &Point) -> Result<Point> {
        apply(&self.s, "S", space, p)
    }

    /// Checks that both maps send every grid point of the carrier into the carrier.
    pub fn check_into(&self, space: &ConeMetricSpace) -> Result<()> {
        for p in space.carrier().grid_points() {
            self.apply_t(space, &p)?;
            self.apply_s(space, &p)?;
        }
        Ok(())
    }
}

fn apply(map: &MapFamily, name: &str, space: &ConeMetricSpace, p: &Point) -> Result<Point> {
    space.check_point(p)?;
    let img = map.eval(p);
    if space.carrier().contains(&img) {
        Ok(img)
    } else {
        Err(Error::domain(format!(
            "map {name} sends {p} to {img}, outside the carrier"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_space::{BaseMetric, CarrierSpec, ConeSpec, MetricSpec};

    fn unit_interval() -> ConeMetricSpace {
        ConeMetricSpace::new(
            ConeSpec::orthant(2),
            CarrierSpec::interval(0.0, 1.0, 11),
            MetricSpec::Direction {
                direction: vec![1.0, 2.0],
                base: BaseMetric::Euclidean,
            },
        )
        .unwrap()
    }

    #[test]
    fn families_evaluate() {
        let x = Point::scalar(-0.5);
        assert_eq!(
            MapFamily::Power { exponent: 2.0 }.eval(&x),
            Point::scalar(0.25)
        );
        assert_eq!(
            MapFamily::Power { exponent: 3.0 }.eval(&x),
            Point::scalar(-0.125)
        );
        assert_eq!(
            MapFamily::Affine {
                alpha: 0.5,
                beta: 1.0
            }
            .eval(&x),
            Point::scalar(0.75)
        );
        let tab = MapFamily::Tabulated {
            table: vec![0, 0, 1],
        };
        assert_eq!(tab.eval(&Point::label(2)), Point::label(1));
    }

    #[test]
    fn leaving_the_carrier_is_a_domain_error() {
        let space = unit_interval();
        let maps = MapPair::new(
            MapFamily::Identity,
            MapFamily::Affine {
                alpha: 2.0,
                beta: 0.0,
            },
        );
        assert!(maps.apply_s(&space, &Point::scalar(0.25)).is_ok());
        assert!(matches!(
            maps.apply_s(&space, &Point::scalar(0.75)),
            Err(Error::Domain(_))
        ));
        assert!(maps.check_into(&space).is_err());
    }
}
