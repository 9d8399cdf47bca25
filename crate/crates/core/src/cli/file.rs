//! The JSON instance file: parsing with accumulated validation, and emission.

use serde::{Deserialize, Serialize};

use crate::cone_space::{
    CarrierSpec, ConeFamily, ConeMetricSpace, ConeSpec, MetricSpec, NormKind, Point, VectorE,
    DEFAULT_INTERIOR_MARGIN, DEFAULT_SLACK,
};
use crate::contractions::{ClassSpec, MapPair};
use crate::sampling;
use crate::solver::StoppingRule;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Orthant,
    ScaledOrthant,
    Polyhedral,
}

fn default_margin() -> f64 {
    DEFAULT_INTERIOR_MARGIN
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSection {
    pub family: FamilyName,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default = "default_margin")]
    pub interior_margin: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_point: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub carrier: CarrierSpec,
    pub metric: MetricSpec,
}

fn default_seed() -> u64 {
    sampling::DEFAULT_SEED
}

fn default_samples() -> usize {
    sampling::DEFAULT_SAMPLES
}

/// Command defaults; flags on the command line override them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Further starts for the uniqueness probe.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub starts: Vec<Vec<f64>>,
    #[serde(default)]
    pub stopping: StoppingRule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_constant: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            seed: default_seed(),
            samples: default_samples(),
            x0: None,
            starts: Vec::new(),
            stopping: StoppingRule::default(),
            normal_constant: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub cone: ConeSection,
    pub space: SpaceSection,
    pub maps: MapPair,
    /// The class the maps are claimed to satisfy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassSpec>,
    #[serde(default)]
    pub run: RunSection,
}

/// A validated instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: Option<String>,
    pub space: ConeMetricSpace,
    pub maps: MapPair,
    pub class: Option<ClassSpec>,
    pub run: RunSection,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

impl ParseError {
    pub fn problems(&self) -> Vec<String> {
        match self {
            ParseError::Syntax { .. } => vec![self.to_string()],
            ParseError::Invalid(p) => p.clone(),
        }
    }
}

fn build_cone(c: &ConeSection, out: &mut Vec<String>) -> Option<ConeSpec> {
    let before = out.len();
    if c.dimension == 0 {
        out.push("cone dimension must be >= 1".into());
    }
    let family = match c.family {
        FamilyName::Orthant => {
            if c.weights.is_some() || c.matrix.is_some() {
                out.push("orthant cones take neither weights nor matrix".into());
            }
            ConeFamily::Orthant
        }
        FamilyName::ScaledOrthant => match (&c.weights, &c.matrix) {
            (Some(w), None) => {
                if w.len() != c.dimension {
                    out.push(format!(
                        "cone weights have dimension {}, expected {}",
                        w.len(),
                        c.dimension
                    ));
                }
                if w.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    out.push("cone weights must be finite and > 0".into());
                }
                ConeFamily::ScaledOrthant { weights: w.clone() }
            }
            _ => {
                out.push("scaled_orthant cones need weights and no matrix".into());
                ConeFamily::Orthant
            }
        },
        FamilyName::Polyhedral => match (&c.matrix, &c.weights) {
            (Some(m), None) => {
                if m.is_empty() {
                    out.push("polyhedral matrix needs at least one row".into());
                }
                for (i, row) in m.iter().enumerate() {
                    if row.len() != c.dimension {
                        out.push(format!(
                            "polyhedral matrix row {i} has dimension {}, expected {}",
                            row.len(),
                            c.dimension
                        ));
                    }
                }
                if m.iter().flatten().any(|x| !x.is_finite()) {
                    out.push("polyhedral matrix entries must be finite".into());
                }
                ConeFamily::Polyhedral { matrix: m.clone() }
            }
            _ => {
                out.push("polyhedral cones need a matrix and no weights".into());
                ConeFamily::Orthant
            }
        },
    };
    if !(c.interior_margin.is_finite() && c.interior_margin > 0.0) {
        out.push("cone interior_margin must be > 0".into());
    }
    if !(c.slack.is_finite() && c.slack >= 0.0) {
        out.push("cone slack must be finite and >= 0".into());
    }
    if let Some(p) = &c.interior_point {
        if p.len() != c.dimension || p.iter().any(|x| !x.is_finite()) {
            out.push(format!(
                "cone interior_point must be {} finite coordinates",
                c.dimension
            ));
        }
    }
    if out.len() > before {
        return None;
    }
    let built = ConeSpec::new(c.dimension, family)
        .and_then(|s| s.with_interior_margin(c.interior_margin))
        .and_then(|s| s.with_slack(c.slack))
        .map(|s| s.with_norm(c.norm))
        .and_then(|s| match &c.interior_point {
            Some(p) => s.with_interior_point(VectorE::new(p.clone())?),
            None => Ok(s),
        });
    match built {
        Ok(s) => Some(s),
        Err(e) => {
            out.push(e.to_string());
            None
        }
    }
}

fn metric_problems(
    metric: &MetricSpec,
    dimension: usize,
    carrier: &CarrierSpec,
    out: &mut Vec<String>,
) {
    match metric {
        MetricSpec::Direction { direction, .. } => {
            if direction.len() != dimension {
                out.push(format!(
                    "metric direction has dimension {}, expected {dimension}",
                    direction.len()
                ));
            }
        }
        MetricSpec::Componentwise { components } => {
            if components.len() != dimension {
                out.push(format!(
                    "metric has {} components, expected {dimension}",
                    components.len()
                ));
            }
        }
        MetricSpec::Tabulated { table } => {
            if let Some(bad) = table.iter().flatten().find(|e| e.len() != dimension) {
                out.push(format!(
                    "metric table entries have dimension {}, expected {dimension}",
                    bad.len()
                ));
            }
            if !carrier.is_finite() {
                out.push("tabulated metrics need a finite carrier".into());
            }
        }
    }
}

fn point_problems(what: &str, p: &[f64], carrier: &CarrierSpec, out: &mut Vec<String>) {
    if !carrier.contains(&Point::new(p.to_vec())) {
        out.push(format!("{what} {p:?} is not a carrier point"));
    }
}

/// Parses and validates an instance, reporting every problem found.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    validate(file)
}

pub fn validate(file: InstanceFile) -> Result<Instance, ParseError> {
    let mut out = Vec::new();
    if file.schema_version != SCHEMA_VERSION {
        out.push(format!(
            "schema_version must be \"{SCHEMA_VERSION}\", got {:?}",
            file.schema_version
        ));
    }
    let cone = build_cone(&file.cone, &mut out);
    let carrier = &file.space.carrier;
    out.extend(carrier.problems());
    metric_problems(&file.space.metric, file.cone.dimension, carrier, &mut out);
    out.extend(file.maps.problems());
    if let Some(class) = &file.class {
        out.extend(class.problems());
    }
    let run = &file.run;
    if let Err(e) = run.stopping.validate() {
        out.push(e.to_string());
    }
    if let Some(k) = run.normal_constant {
        if !(k.is_finite() && k >= 1.0) {
            out.push("run normal_constant must be >= 1".into());
        }
    }
    if carrier.problems().is_empty() {
        if let Some(x0) = &run.x0 {
            point_problems("run x0", x0, carrier, &mut out);
        }
        for s in &run.starts {
            point_problems("run start", s, carrier, &mut out);
        }
    }
    let space = match cone {
        Some(cone) if out.is_empty() => {
            match ConeMetricSpace::new(cone, carrier.clone(), file.space.metric.clone()) {
                Ok(space) => Some(space),
                Err(e) => {
                    out.push(e.to_string());
                    None
                }
            }
        }
        _ => None,
    };
    if let Some(space) = &space {
        if let Err(e) = file.maps.check_into(space) {
            out.push(e.to_string());
        }
    }
    match space {
        Some(space) if out.is_empty() => Ok(Instance {
            name: file.name,
            space,
            maps: file.maps,
            class: file.class,
            run: file.run,
        }),
        _ => Err(ParseError::Invalid(out)),
    }
}

impl Instance {
    pub fn to_file(&self) -> InstanceFile {
        let cone = self.space.cone();
        let (family, weights, matrix) = match cone.family() {
            ConeFamily::Orthant => (FamilyName::Orthant, None, None),
            ConeFamily::ScaledOrthant { weights } => {
                (FamilyName::ScaledOrthant, Some(weights.clone()), None)
            }
            ConeFamily::Polyhedral { matrix } => {
                (FamilyName::Polyhedral, None, Some(matrix.clone()))
            }
        };
        InstanceFile {
            schema_version: SCHEMA_VERSION.into(),
            name: self.name.clone(),
            cone: ConeSection {
                family,
                dimension: cone.dimension(),
                weights,
                matrix,
                norm: cone.norm_kind(),
                interior_margin: cone.interior_margin(),
                slack: cone.slack(),
                interior_point: cone.declared_interior().map(|v| v.coords().to_vec()),
            },
            space: SpaceSection {
                carrier: self.space.carrier().clone(),
                metric: self.space.metric().clone(),
            },
            maps: self.maps.clone(),
            class: self.class,
            run: self.run.clone(),
        }
    }

    /// Pretty JSON that [`parse_instance`] reads back to an equal instance.
    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("instance serializes");
        s.push('\n');
        s
    }
}
