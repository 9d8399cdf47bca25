//! Monitored Picard iteration, decay bounds and fixed-point certificates.

mod certify;
mod decay;
mod diagnose;
mod picard;

pub use certify::{
    certify_fixed_point, solve, uniqueness_probe, Certificate, FixedPointCheck, SolveOptions,
    SolveReport, Uniqueness,
};
pub use decay::{geometric_decay_check, step_bound, BoundFailure, DecayOptions, DecayReport};
pub use diagnose::{
    diagnose_t, DiagnoseProbes, Evidence, ProbeSequence, SequenceVerdict, TDiagnostics,
};
pub use picard::{picard_iterate, IterationTrace, StopReason, StoppingRule};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_space::{
        BaseMetric, CarrierSpec, ConeMetricSpace, ConeSpec, MetricSpec, Point,
    };
    use crate::contractions::{ClassSpec, MapFamily, MapPair};
    use crate::error::Error;
    use crate::instances::{instance_a, instance_b, instance_c, instance_d};

    fn capped(n: usize) -> StoppingRule {
        StoppingRule {
            max_iter: n,
            ..StoppingRule::default()
        }
    }

    fn coords(t: &IterationTrace) -> Vec<f64> {
        t.x_sequence.iter().map(|p| p.coords()[0]).collect()
    }

    #[test]
    fn halving_three_steps() {
        let a = instance_a();
        let t = picard_iterate(&a.space, &a.maps, &Point::scalar(1.0), &capped(3)).unwrap();
        assert_eq!(coords(&t), vec![1.0, 0.5, 0.25, 0.125]);
        assert_eq!(t.stop_reason, StopReason::MaxIter);
        assert_eq!(t.gap_norms, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn identity_stops_at_once() {
        let c = instance_c();
        let t = picard_iterate(
            &c.space,
            &c.maps,
            &Point::scalar(0.7),
            &StoppingRule::default(),
        )
        .unwrap();
        assert_eq!(t.stop_reason, StopReason::Converged);
        assert_eq!(t.iterations, 1);
        assert_eq!(t.gap_norms, vec![0.0]);
        assert_eq!(t.final_point(), &Point::scalar(0.7));
    }

    #[test]
    fn cube_map_closed_form() {
        let b = instance_b();
        let t = picard_iterate(
            &b.space,
            &b.maps,
            &Point::scalar(1.0),
            &StoppingRule::default(),
        )
        .unwrap();
        assert_eq!(t.stop_reason, StopReason::Converged);
        for (n, x) in coords(&t).into_iter().enumerate() {
            assert_eq!(x, 0.25f64.powi(n as i32));
        }
        for (n, g) in t.gap_norms.iter().enumerate().take(8) {
            let x = 0.25f64.powi(n as i32);
            let expect = 2.0 * (x.powi(3) - (x / 4.0).powi(3));
            assert!((g - expect).abs() <= 1e-15 * expect, "n={n}");
        }
        assert!(t
            .step_ratios()
            .iter()
            .all(|r| (r - 1.0 / 64.0).abs() < 1e-12));
    }

    #[test]
    fn halving_reaches_epsilon_near_forty() {
        let a = instance_a();
        let t = picard_iterate(
            &a.space,
            &a.maps,
            &Point::scalar(1.0),
            &StoppingRule::default(),
        )
        .unwrap();
        assert_eq!(t.stop_reason, StopReason::Converged);
        assert_eq!(t.len(), 41);
    }

    #[test]
    fn cycle_is_detected() {
        let d = instance_d();
        let maps = MapPair::new(
            MapFamily::Identity,
            MapFamily::Tabulated {
                table: vec![1, 0, 2, 3, 4, 5, 6, 7, 8, 9],
            },
        );
        let t =
            picard_iterate(&d.space, &maps, &Point::label(0), &StoppingRule::default()).unwrap();
        assert_eq!(t.stop_reason, StopReason::CycleDetected);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn leaving_the_carrier_names_the_iterate() {
        let a = instance_a();
        let maps = MapPair::new(
            MapFamily::Identity,
            MapFamily::Affine {
                alpha: 1.0,
                beta: 0.3,
            },
        );
        let err = picard_iterate(
            &a.space,
            &maps,
            &Point::scalar(0.2),
            &StoppingRule::default(),
        )
        .unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.starts_with("iterate 2:"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decay_examples() {
        let a = instance_a();
        let t = picard_iterate(
            &a.space,
            &a.maps,
            &Point::scalar(1.0),
            &StoppingRule::default(),
        )
        .unwrap();
        let opts = DecayOptions::default();
        let ok = geometric_decay_check(&a.space, &t, 0.5, 1.0, &opts).unwrap();
        assert!(ok.passed && ok.cauchy_ok);
        assert_eq!(ok.cauchy_pairs_checked, 41 * 40 / 2);
        let bad = geometric_decay_check(&a.space, &t, 0.4, 1.0, &opts).unwrap();
        assert!(!bad.passed);
        let f = bad.step_failure.unwrap();
        assert_eq!((f.n, f.observed), (1, 0.5));
        assert!((f.bound - 0.4).abs() < 1e-15);

        let c = instance_c();
        let z = picard_iterate(
            &c.space,
            &c.maps,
            &Point::scalar(0.3),
            &StoppingRule::default(),
        )
        .unwrap();
        for h in [0.0, 0.5, 0.99] {
            assert!(
                geometric_decay_check(&c.space, &z, h, 1.0, &opts)
                    .unwrap()
                    .passed
            );
        }
        assert!(geometric_decay_check(&a.space, &t, 1.0, 1.0, &opts).is_err());
        assert!(geometric_decay_check(&a.space, &t, 0.5, 0.5, &opts).is_err());
    }

    #[test]
    fn sampled_cauchy_pairs_are_deterministic() {
        let a = instance_a();
        let t = picard_iterate(
            &a.space,
            &a.maps,
            &Point::scalar(1.0),
            &StoppingRule::default(),
        )
        .unwrap();
        let opts = DecayOptions {
            max_pairs: 100,
            ..DecayOptions::default()
        };
        let r1 = geometric_decay_check(&a.space, &t, 0.5, 1.0, &opts).unwrap();
        let r2 = geometric_decay_check(&a.space, &t, 0.5, 1.0, &opts).unwrap();
        assert_eq!(r1, r2);
        assert!(r1.passed && r1.cauchy_pairs_checked <= 100);
    }

    #[test]
    fn certificates() {
        let a = instance_a();
        let z = certify_fixed_point(&a.space, &a.maps, &Point::scalar(0.0), 1e-12).unwrap();
        assert!(z.certified && z.residual_norm == 0.0);
        let off = certify_fixed_point(&a.space, &a.maps, &Point::scalar(0.01), 1e-12).unwrap();
        assert!(!off.certified);
        assert_eq!(off.residual_norm, 0.01);
        let c = instance_c();
        for p in c.space.carrier().grid_points() {
            assert!(
                certify_fixed_point(&c.space, &c.maps, &p, 1e-12)
                    .unwrap()
                    .certified
            );
        }
    }

    #[test]
    fn uniqueness_examples() {
        let rule = StoppingRule::default();
        let a = instance_a();
        let starts: Vec<Point> = [0.0, 0.3, 1.0].into_iter().map(Point::scalar).collect();
        assert_eq!(
            uniqueness_probe(&a.space, &a.maps, &starts, &rule).unwrap(),
            Uniqueness::Unique {
                fixed_point: Point::scalar(0.0)
            }
        );
        let c = instance_c();
        let starts = vec![Point::scalar(0.2), Point::scalar(0.8)];
        assert_eq!(
            uniqueness_probe(&c.space, &c.maps, &starts, &rule).unwrap(),
            Uniqueness::NonUnique {
                witnesses: starts.clone()
            }
        );
        assert!(uniqueness_probe(&c.space, &c.maps, &starts[..1], &rule)
            .unwrap()
            .is_unique());
        assert!(matches!(
            uniqueness_probe(&a.space, &a.maps, &starts, &capped(3)).unwrap(),
            Uniqueness::Unknown { .. }
        ));
        assert!(uniqueness_probe(&a.space, &a.maps, &[], &rule).is_err());
    }

    #[test]
    fn solve_reports_both_rates() {
        let a = instance_a();
        let opts = SolveOptions {
            class: Some(ClassSpec::Tb { a: 0.5 }),
            extra_starts: vec![Point::scalar(0.3)],
            ..SolveOptions::default()
        };
        let r = solve(
            &a.space,
            &a.maps,
            &Point::scalar(1.0),
            &StoppingRule::default(),
            &opts,
        )
        .unwrap();
        assert!(r.passed());
        let cert = &r.certificate;
        assert_eq!(cert.rate_h, Some(0.5));
        assert_eq!(cert.primary_form_rate, None);
        assert_eq!(cert.measured_rate, Some(0.5));
        assert_eq!(cert.cauchy_bound_ok, Some(true));
        assert!(cert.uniqueness.is_unique());
        assert!(cert.residual_norm <= 1e-12);
        assert_eq!(cert.fixed_point.as_ref(), Some(r.trace.final_point()));
    }

    fn squares() -> (ConeMetricSpace, MapPair) {
        let space = ConeMetricSpace::new(
            ConeSpec::orthant(2),
            CarrierSpec::interval(-1.0, 1.0, 1001),
            MetricSpec::Direction {
                direction: vec![1.0, 2.0],
                base: BaseMetric::Euclidean,
            },
        )
        .unwrap();
        (
            space,
            MapPair::new(MapFamily::Power { exponent: 2.0 }, MapFamily::Identity),
        )
    }

    #[test]
    fn cube_is_injective_on_grid() {
        let b = instance_b();
        let space = ConeMetricSpace::new(
            b.space.cone().clone(),
            CarrierSpec::interval(0.0, 1.0, 1000),
            b.space.metric().clone(),
        )
        .unwrap();
        let d = diagnose_t(&space, &b.maps, &DiagnoseProbes::default()).unwrap();
        assert_eq!(d.injectivity_points, 1000);
        assert!(d.injectivity_violations.is_empty());
        assert!(d.mismatches.is_empty());
    }

    #[test]
    fn square_collapses_symmetric_pairs() {
        let (space, maps) = squares();
        let d = diagnose_t(&space, &maps, &DiagnoseProbes::default()).unwrap();
        assert!(d.injectivity_violations.contains(&(vec![-0.5], vec![0.5])));
        assert_eq!(d.injectivity_violations.len(), 500);
        assert!(d.mismatches[0].contains("injective"));
        // x ↦ x² maps -1, 1, -1, … to a constant
        let alt = d
            .sequences
            .iter()
            .find(|v| v.name == "alternating")
            .unwrap();
        assert!(alt.t_image_convergent && !alt.sequence_convergent);
        assert_eq!(alt.sequential, Evidence::Inconsistent);
        assert_eq!(alt.subsequential, Evidence::Consistent);
    }

    #[test]
    fn identity_alternation_is_not_applicable() {
        let c = instance_c();
        let d = diagnose_t(&c.space, &c.maps, &DiagnoseProbes::default()).unwrap();
        let alt = d
            .sequences
            .iter()
            .find(|v| v.name == "alternating")
            .unwrap();
        assert!(!alt.t_image_convergent);
        assert_eq!(alt.sequential, Evidence::NotApplicable);
        for name in ["convergent", "toward_boundary"] {
            let v = d.sequences.iter().find(|v| v.name == name).unwrap();
            assert_eq!(v.sequential, Evidence::Consistent);
        }
        assert!(d.mismatches.is_empty());
    }
}
