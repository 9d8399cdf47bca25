//! Sampled verification of the cone axioms and the cone-metric axioms.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cone::{ConeSpec, Membership};
use super::metric::{ConeMetricSpace, Point};
use super::vector::VectorE;
use crate::error::{Error, Result};
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomId {
    /// P is nonempty, contains 0 and is not {0}.
    P1Nonempty,
    InteriorNonempty,
    /// Closed under nonnegative combinations.
    P2Combination,
    /// P ∩ (−P) = {0}.
    P3Pointed,
    D1Positivity,
    D2Symmetry,
    D3Triangle,
}

impl AxiomId {
    /// Human-readable label carried into reports next to each failure.
    pub fn anchor(self) -> &'static str {
        match self {
            AxiomId::P1Nonempty => "P1 cone is closed, nonempty and not {0}",
            AxiomId::InteriorNonempty => "cone interior is nonempty",
            AxiomId::P2Combination => "P2 closed under nonnegative combinations",
            AxiomId::P3Pointed => "P3 cone is pointed, P ∩ (−P) = {0}",
            AxiomId::D1Positivity => "d1 d(x,y) in P and d(x,y) = 0 iff x = y",
            AxiomId::D2Symmetry => "d2 symmetry d(x,y) = d(y,x)",
            AxiomId::D3Triangle => "d3 triangle inequality d(x,y) <= d(x,z) + d(z,y)",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: AxiomId,
    pub anchor: String,
    /// Points or vectors that exhibit the failure, as coordinate lists.
    pub witness: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
}

impl AxiomViolation {
    fn new(axiom: AxiomId, witness: Vec<Vec<f64>>, residual: Vec<f64>) -> Self {
        AxiomViolation {
            axiom,
            anchor: axiom.anchor().to_string(),
            witness,
            residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub passed: bool,
    pub axioms_checked: Vec<AxiomId>,
    pub sample_count: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    fn new(
        axioms_checked: Vec<AxiomId>,
        sample_count: usize,
        violations: Vec<AxiomViolation>,
    ) -> Self {
        AxiomReport {
            passed: violations.is_empty(),
            axioms_checked,
            sample_count,
            violations,
        }
    }

    pub fn violations_of(&self, axiom: AxiomId) -> impl Iterator<Item = &AxiomViolation> {
        self.violations.iter().filter(move |v| v.axiom == axiom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeSamplePlan {
    pub count: usize,
    pub seed: u64,
}

impl Default for ConeSamplePlan {
    fn default() -> Self {
        ConeSamplePlan {
            count: sampling::DEFAULT_SAMPLES,
            seed: sampling::DEFAULT_SEED,
        }
    }
}

/// Checks P1, a nonempty interior, P2 on sampled `(a, b, x, y)` with
/// `a, b ∈ [0, 10]`, and P3 on coordinate probes, the null space of the
/// defining matrix and sampled vectors. Degenerate cones yield violation
/// entries rather than errors.
pub fn verify_cone_axioms(cone: &ConeSpec, plan: &ConeSamplePlan) -> AxiomReport {
    let m = cone.dimension();
    let mut violations = Vec::new();
    let zero = VectorE::zeros(m);

    let interior = cone.interior_point();
    if !cone.contains(&zero, Membership::Closed).unwrap_or(false) {
        violations.push(AxiomViolation::new(
            AxiomId::P1Nonempty,
            vec![zero.coords().to_vec()],
            cone.row_residuals(&zero),
        ));
    }
    match (&interior, cone.declared_interior()) {
        (Some(p), _) => {
            if !cone.contains(p, Membership::Closed).unwrap_or(false) {
                violations.push(AxiomViolation::new(
                    AxiomId::P1Nonempty,
                    vec![p.coords().to_vec()],
                    cone.row_residuals(p),
                ));
            }
        }
        (None, declared) => {
            let witness = declared
                .map(|d| vec![d.coords().to_vec()])
                .unwrap_or_default();
            let residual = declared.map(|d| cone.row_residuals(d)).unwrap_or_default();
            violations.push(AxiomViolation::new(
                AxiomId::InteriorNonempty,
                witness,
                residual,
            ));
        }
    }

    let mut rng = sampling::rng(plan.seed);
    let mut members = Vec::with_capacity(plan.count);
    let mut p2 = Vec::new();
    for _ in 0..plan.count {
        let (Some(x), Some(y)) = (cone.sample_member(&mut rng), cone.sample_member(&mut rng))
        else {
            continue;
        };
        let a: f64 = rng.gen_range(0.0..=10.0);
        let b: f64 = rng.gen_range(0.0..=10.0);
        let z = (a * &x).add_scaled(b, &y);
        let scale = a * cone.norm(&x) + b * cone.norm(&y);
        if !cone.contains_within(&z, cone.slack() * scale) {
            p2.push(AxiomViolation::new(
                AxiomId::P2Combination,
                vec![x.coords().to_vec(), y.coords().to_vec(), vec![a, b]],
                cone.row_residuals(&z),
            ));
        }
        members.push(x);
    }
    violations.extend(p2);

    if interior.is_none() && members.iter().all(VectorE::is_zero) {
        violations.push(AxiomViolation::new(AxiomId::P1Nonempty, vec![], vec![]));
    }

    let mut probes: Vec<VectorE> = (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            VectorE::from_raw(e)
        })
        .collect();
    probes.extend(nullspace(cone.rows(), m).into_iter().map(VectorE::from_raw));
    probes.extend(
        (0..plan.count)
            .map(|_| VectorE::from_raw((0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect())),
    );
    let mut seen: Vec<VectorE> = Vec::new();
    for v in probes {
        if v.is_zero() || seen.contains(&v) || seen.contains(&-&v) {
            continue;
        }
        let both = cone.contains(&v, Membership::Closed).unwrap_or(false)
            && cone.contains(&-&v, Membership::Closed).unwrap_or(false);
        if both {
            violations.push(AxiomViolation::new(
                AxiomId::P3Pointed,
                vec![v.coords().to_vec()],
                cone.row_residuals(&-&v),
            ));
            seen.push(v);
        }
    }

    AxiomReport::new(
        vec![
            AxiomId::P1Nonempty,
            AxiomId::InteriorNonempty,
            AxiomId::P2Combination,
            AxiomId::P3Pointed,
        ],
        plan.count,
        violations,
    )
}

/// Basis of `{v : Av = 0}` from the reduced row echelon form of `A`.
fn nullspace(rows: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    const TOL: f64 = 1e-12;
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        if r == a.len() {
            break;
        }
        let Some(best) = (r..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
        else {
            break;
        };
        if a[best][c].abs() <= TOL {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for x in a[r].iter_mut() {
            *x /= p;
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0.0 {
                let f = a[i][c];
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..m)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0.0; m];
            v[free] = 1.0;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free];
            }
            v
        })
        .collect()
}

/// Which points feed the metric-axiom check.
#[derive(Clone, Debug, PartialEq)]
pub enum MetricSamplePlan {
    /// `count` random triples from a seeded stream.
    Random { count: usize, seed: u64 },
    /// All pairs and triples over an explicit point list.
    Points(Vec<Point>),
    /// All pairs and triples over the carrier grid (every label when finite).
    Exhaustive,
}

impl Default for MetricSamplePlan {
    fn default() -> Self {
        MetricSamplePlan::Random {
            count: sampling::DEFAULT_SAMPLES,
            seed: sampling::DEFAULT_SEED,
        }
    }
}

/// Checks d1 on pairs and diagonal points, d2 on pairs and d3 on triples.
pub fn verify_metric_axioms(
    space: &ConeMetricSpace,
    plan: &MetricSamplePlan,
) -> Result<AxiomReport> {
    let (diag, pairs, triples) = match plan {
        MetricSamplePlan::Random { count, seed } => {
            if *count == 0 {
                return Err(Error::config(
                    "metric sampling plan must yield at least one triple",
                ));
            }
            let mut rng = sampling::rng(*seed);
            let triples: Vec<[Point; 3]> = (0..*count)
                .map(|_| {
                    let c = space.carrier();
                    [c.sample(&mut rng), c.sample(&mut rng), c.sample(&mut rng)]
                })
                .collect();
            let diag = triples.iter().map(|t| t[0].clone()).collect();
            let pairs = triples
                .iter()
                .map(|t| (t[0].clone(), t[1].clone()))
                .collect();
            (diag, pairs, triples)
        }
        MetricSamplePlan::Points(points) => all_tuples(points),
        MetricSamplePlan::Exhaustive => all_tuples(&space.carrier().grid_points()),
    };
    for p in &diag {
        space.check_point(p)?;
    }
    let cone = space.cone();
    let slack = cone.slack();

    let mut violations: Vec<AxiomViolation> = diag
        .par_iter()
        .filter_map(|x| {
            let d = space.distance_unchecked(x, x);
            (!d.is_zero()).then(|| {
                AxiomViolation::new(
                    AxiomId::D1Positivity,
                    vec![x.coords().to_vec(), x.coords().to_vec()],
                    d.into_inner(),
                )
            })
        })
        .collect();

    let pair_violations: Vec<Vec<AxiomViolation>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let mut out = Vec::new();
            let dxy = space.distance_unchecked(x, y);
            let dyx = space.distance_unchecked(y, x);
            let witness = vec![x.coords().to_vec(), y.coords().to_vec()];
            let in_cone = cone.contains_within(&dxy, slack * cone.norm(&dxy));
            if x != y && (!in_cone || dxy.is_zero()) {
                out.push(AxiomViolation::new(
                    AxiomId::D1Positivity,
                    witness.clone(),
                    cone.row_residuals(&dxy),
                ));
            }
            let scale = cone.norm(&dxy).max(cone.norm(&dyx));
            let asym = &dxy - &dyx;
            if asym.coords().iter().any(|c| c.abs() > slack * scale) {
                out.push(AxiomViolation::new(
                    AxiomId::D2Symmetry,
                    witness,
                    asym.into_inner(),
                ));
            }
            out
        })
        .collect();
    violations.extend(pair_violations.into_iter().flatten());

    let triangle: Vec<AxiomViolation> = triples
        .par_iter()
        .filter_map(|[x, y, z]| {
            let direct = space.distance_unchecked(x, y);
            let detour = &space.distance_unchecked(x, z) + &space.distance_unchecked(z, y);
            (!cone.leq(&direct, &detour)).then(|| {
                AxiomViolation::new(
                    AxiomId::D3Triangle,
                    vec![
                        x.coords().to_vec(),
                        y.coords().to_vec(),
                        z.coords().to_vec(),
                    ],
                    (&detour - &direct).into_inner(),
                )
            })
        })
        .collect();
    violations.extend(triangle);

    Ok(AxiomReport::new(
        vec![
            AxiomId::D1Positivity,
            AxiomId::D2Symmetry,
            AxiomId::D3Triangle,
        ],
        triples.len(),
        violations,
    ))
}

type Tuples = (Vec<Point>, Vec<(Point, Point)>, Vec<[Point; 3]>);

fn all_tuples(points: &[Point]) -> Tuples {
    let pairs = points
        .iter()
        .enumerate()
        .flat_map(|(i, x)| points[i + 1..].iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let triples = points
        .iter()
        .flat_map(|x| {
            points.iter().flat_map(move |y| {
                points
                    .iter()
                    .map(move |z| [x.clone(), y.clone(), z.clone()])
            })
        })
        .collect();
    (points.to_vec(), pairs, triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_space::{
        BaseMetric, CarrierSpec, Component, ComponentForm, ConeFamily, MetricSpec,
    };

    fn plan(count: usize) -> ConeSamplePlan {
        ConeSamplePlan { count, seed: 7 }
    }

    #[test]
    fn orthant_passes() {
        let r = verify_cone_axioms(&ConeSpec::orthant(2), &plan(100));
        assert!(r.passed, "{:?}", r.violations);
        assert_eq!(r.sample_count, 100);
    }

    #[test]
    fn half_plane_is_not_pointed() {
        let half = ConeSpec::new(
            2,
            ConeFamily::Polyhedral {
                matrix: vec![vec![1.0, 0.0]],
            },
        )
        .unwrap();
        let r = verify_cone_axioms(&half, &plan(100));
        assert!(!r.passed);
        let p3: Vec<_> = r.violations_of(AxiomId::P3Pointed).collect();
        assert_eq!(p3[0].witness, vec![vec![0.0, 1.0]]);
    }

    #[test]
    fn collapsed_scaled_orthant_has_empty_interior() {
        let c = ConeSpec::new(
            2,
            ConeFamily::ScaledOrthant {
                weights: vec![1.0, 0.0],
            },
        )
        .unwrap();
        let r = verify_cone_axioms(&c, &plan(100));
        assert_eq!(r.violations_of(AxiomId::InteriorNonempty).count(), 1);
    }

    #[test]
    fn nullspace_of_half_plane() {
        assert_eq!(nullspace(&[vec![1.0, 0.0]], 2), vec![vec![0.0, 1.0]]);
        assert!(nullspace(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2).is_empty());
    }

    fn line_space(components: Vec<Component>) -> ConeMetricSpace {
        ConeMetricSpace::new(
            ConeSpec::orthant(2),
            CarrierSpec::interval(0.0, 1.0, 101),
            MetricSpec::Componentwise { components },
        )
        .unwrap()
    }

    fn pts(xs: &[f64]) -> MetricSamplePlan {
        MetricSamplePlan::Points(xs.iter().map(|&x| Point::scalar(x)).collect())
    }

    #[test]
    fn instance_a_metric_passes_random_triples() {
        let space = ConeMetricSpace::new(
            ConeSpec::orthant(2),
            CarrierSpec::interval(0.0, 1.0, 101),
            MetricSpec::Direction {
                direction: vec![1.0, 2.0],
                base: BaseMetric::Euclidean,
            },
        )
        .unwrap();
        let r = verify_metric_axioms(&space, &MetricSamplePlan::default()).unwrap();
        assert!(r.passed, "{:?}", &r.violations[..r.violations.len().min(3)]);
        assert_eq!(r.sample_count, 10_000);
    }

    #[test]
    fn asymmetric_metric_fails_d2() {
        let space = line_space(vec![
            Component {
                form: ComponentForm::Signed,
                scale: 1.0,
                offset: 0.0,
            },
            Component {
                form: ComponentForm::Abs,
                scale: 2.0,
                offset: 0.0,
            },
        ]);
        let r = verify_metric_axioms(&space, &pts(&[0.0, 1.0])).unwrap();
        let d2: Vec<_> = r.violations_of(AxiomId::D2Symmetry).collect();
        assert_eq!(d2.len(), 1);
        assert_eq!(d2[0].witness, vec![vec![0.0], vec![1.0]]);
        assert_eq!(d2[0].residual, vec![-2.0, 0.0]);
    }

    #[test]
    fn shifted_metric_leaves_the_cone() {
        let space = line_space(vec![
            Component {
                form: ComponentForm::Abs,
                scale: 1.0,
                offset: -0.5,
            },
            Component {
                form: ComponentForm::Abs,
                scale: 1.0,
                offset: 0.0,
            },
        ]);
        let r = verify_metric_axioms(&space, &pts(&[0.0, 0.2])).unwrap();
        let hit = r
            .violations_of(AxiomId::D1Positivity)
            .find(|v| v.witness == vec![vec![0.0], vec![0.2]])
            .expect("d1 violation at (0, 0.2)");
        assert!((hit.residual[0] + 0.3).abs() < 1e-15);
        assert_eq!(hit.residual[1], 0.2);
    }

    #[test]
    fn empty_random_plan_is_rejected() {
        let space = line_space(vec![
            Component {
                form: ComponentForm::Abs,
                scale: 1.0,
                offset: 0.0,
            };
            2
        ]);
        assert!(
            verify_metric_axioms(&space, &MetricSamplePlan::Random { count: 0, seed: 1 }).is_err()
        );
    }
}
