//! The T-contraction classes: condition checks over pair sets, the
//! single-constant reduction of the Zamfirescu class, promotion to the weak
//! class and constant fitting.

mod check;
mod class;
mod fit;
mod maps;

pub use check::{
    check_condition, verify_zamfirescu_reduction, BranchStats, CheckStatus, ConditionReport,
    ConditionViolation, PairSet, ReductionReport,
};
pub use class::{
    dual_form_rate, primary_form_rate, promote_to_weak, zamfirescu_delta, ClassKind, ClassSpec,
};
pub use fit::{fit_constants, FitOptions, FitOutcome};
pub use maps::{MapFamily, MapPair, MapProperties};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_space::{
        BaseMetric, CarrierSpec, ConeMetricSpace, ConeSpec, MetricSpec, Point,
    };
    use crate::instances::{instance_a, instance_c, instance_d};

    fn pair(x: f64, y: f64) -> (Point, Point) {
        (Point::scalar(x), Point::scalar(y))
    }

    #[test]
    fn instance_a_is_banach_with_half() {
        let a = instance_a();
        let r =
            check_condition(&a.space, &a.maps, &ClassSpec::Tb { a: 0.5 }, &PairSet::Grid).unwrap();
        assert!(r.holds);
        assert_eq!(r.pairs_checked, 101 * 101);
    }

    #[test]
    fn instance_c_is_weak() {
        let c = instance_c();
        let r = check_condition(
            &c.space,
            &c.maps,
            &ClassSpec::Tw { delta: 0.5, l: 0.5 },
            &PairSet::Grid,
        )
        .unwrap();
        assert!(r.holds);
    }

    #[test]
    fn banach_violation_residual() {
        let a = instance_a();
        let r = check_condition(
            &a.space,
            &a.maps,
            &ClassSpec::Tb { a: 0.4 },
            &PairSet::Explicit(vec![pair(0.0, 1.0)]),
        )
        .unwrap();
        assert_eq!(r.status, CheckStatus::Violated);
        let v = &r.violations[0];
        assert_eq!(v.lhs, vec![0.5, 1.0]);
        assert_eq!(v.rhs, vec![0.4, 0.8]);
        assert!((v.residual[0] + 0.1).abs() < 1e-15 && (v.residual[1] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn empty_pair_set_is_inconclusive() {
        let a = instance_a();
        let r = check_condition(
            &a.space,
            &a.maps,
            &ClassSpec::Tb { a: 0.5 },
            &PairSet::Explicit(vec![]),
        )
        .unwrap();
        assert_eq!(r.status, CheckStatus::Inconclusive);
        assert!(!r.holds);
    }

    #[test]
    fn out_of_range_constants_are_rejected() {
        let a = instance_a();
        assert!(
            check_condition(&a.space, &a.maps, &ClassSpec::Tb { a: 1.0 }, &PairSet::Grid).is_err()
        );
    }

    #[test]
    fn reduction_on_instance_a() {
        let a = instance_a();
        let r = verify_zamfirescu_reduction(
            &a.space,
            &a.maps,
            0.5,
            0.0,
            0.0,
            &PairSet::Random {
                count: 10_000,
                seed: 3,
            },
        )
        .unwrap();
        assert!(r.holds());
        assert_eq!(r.delta, 0.5);
        let diag = verify_zamfirescu_reduction(
            &a.space,
            &a.maps,
            0.1,
            0.1,
            0.1,
            &PairSet::Explicit(vec![pair(0.3, 0.3)]),
        )
        .unwrap();
        assert!(diag.holds());
    }

    #[test]
    fn reduction_where_only_the_kannan_branch_holds() {
        let d = instance_d();
        let pairs = PairSet::Explicit(vec![(Point::label(9), Point::label(7))]);
        let r = verify_zamfirescu_reduction(&d.space, &d.maps, 0.2, 0.25, 0.0, &pairs).unwrap();
        assert_eq!(
            r.precondition.branch_stats.as_ref().unwrap().sole,
            [0, 1, 0]
        );
        assert!((r.delta - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.holds());
    }

    #[test]
    fn reduction_not_applicable_when_zamfirescu_fails() {
        let a = instance_a();
        let r = verify_zamfirescu_reduction(
            &a.space,
            &a.maps,
            0.4,
            0.0,
            0.0,
            &PairSet::Explicit(vec![pair(0.0, 1.0)]),
        )
        .unwrap();
        assert!(!r.applicable);
        assert_eq!(r.precondition.violations.len(), 1);
        assert!(r.primary.is_none());
    }

    #[test]
    fn fit_banach_on_instance_a() {
        let a = instance_a();
        let out = fit_constants(
            &a.space,
            &a.maps,
            ClassKind::Tb,
            &PairSet::Grid,
            &FitOptions::default(),
        )
        .unwrap();
        let Some(ClassSpec::Tb { a: fitted }) = out.spec() else {
            panic!("{out:?}")
        };
        assert!((fitted - 0.5).abs() <= 1e-6);
    }

    #[test]
    fn fit_weak_with_pinned_delta() {
        let c = instance_c();
        let opts = FitOptions {
            pinned: Some(0.9),
            ..FitOptions::default()
        };
        let out = fit_constants(&c.space, &c.maps, ClassKind::Tw, &PairSet::Grid, &opts).unwrap();
        let Some(ClassSpec::Tw { delta, l }) = out.spec() else {
            panic!("{out:?}")
        };
        assert_eq!(*delta, 0.9);
        assert!((l - 0.1).abs() <= 1e-6);
    }

    #[test]
    fn fit_expanding_map_is_infeasible() {
        let space = ConeMetricSpace::new(
            ConeSpec::orthant(2),
            CarrierSpec::interval(0.0, 0.5, 51),
            MetricSpec::Direction {
                direction: vec![1.0, 2.0],
                base: BaseMetric::Euclidean,
            },
        )
        .unwrap();
        let maps = MapPair::new(
            MapFamily::Identity,
            MapFamily::Affine {
                alpha: 2.0,
                beta: 0.0,
            },
        );
        let inner: Vec<f64> = (0..=25).map(|i| i as f64 / 100.0).collect();
        let pairs = inner
            .iter()
            .flat_map(|&x| inner.iter().map(move |&y| pair(x, y)))
            .collect();
        let out = fit_constants(
            &space,
            &maps,
            ClassKind::Tb,
            &PairSet::Explicit(pairs),
            &FitOptions::default(),
        )
        .unwrap();
        assert!(matches!(out, FitOutcome::Infeasible { .. }), "{out:?}");
    }

    #[test]
    fn fit_all_degenerate_is_inconclusive() {
        let a = instance_a();
        let pairs = PairSet::Explicit(vec![pair(0.2, 0.2), pair(0.7, 0.7)]);
        let out = fit_constants(
            &a.space,
            &a.maps,
            ClassKind::Tb,
            &pairs,
            &FitOptions::default(),
        )
        .unwrap();
        assert!(matches!(out, FitOutcome::Inconclusive { .. }));
        assert!(fit_constants(
            &a.space,
            &a.maps,
            ClassKind::Tz,
            &pairs,
            &FitOptions::default()
        )
        .is_err());
    }

    #[test]
    fn fit_reports_hard_witnesses() {
        // Two distinct fixed points: both Kannan terms vanish while d(TSx,TSy) does not.
        let d = crate::instances::instance_d_with(|k| k);
        let pairs = PairSet::Explicit(vec![(Point::label(0), Point::label(1))]);
        let out = fit_constants(
            &d.space,
            &d.maps,
            ClassKind::Tk,
            &pairs,
            &FitOptions::default(),
        )
        .unwrap();
        assert!(
            matches!(out, FitOutcome::Infeasible { ref witnesses, .. } if witnesses.len() == 1),
            "{out:?}"
        );
    }
}
