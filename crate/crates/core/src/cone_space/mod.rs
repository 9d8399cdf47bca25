//! The ordered space `(E, P)` with `E = ℝ^m`, its partial order, and cone
//! metric spaces over it.

mod axioms;
mod cone;
mod metric;
mod normal;
mod vector;

pub use axioms::{
    verify_cone_axioms, verify_metric_axioms, AxiomId, AxiomReport, AxiomViolation, ConeSamplePlan,
    MetricSamplePlan,
};
pub use cone::{
    ConeFamily, ConeSpec, Membership, Relation, DEFAULT_INTERIOR_MARGIN, DEFAULT_SLACK,
};
pub use metric::{
    BaseMetric, CarrierSpec, Component, ComponentForm, ConeMetricSpace, MetricSpec, Point,
};
pub use normal::{estimate_normal_constant, NormalConstantEstimate};
pub use vector::{NormKind, VectorE};
