//! Exact brute-force checks on finite instances.
//!
//! Tables are held as rationals, so cone tests here carry no tolerance.

mod check;
mod cross;
mod exact;
mod generate;
mod instance;
mod tight;

pub use check::{
    exact_zamfirescu_delta, exhaustive_check_exact, exhaustive_condition_check,
    exhaustive_promotion_check, exhaustive_reduction_check, ExactClass, ExactReduction,
    OracleReport, PromotionCheck,
};
pub use cross::{cross_validate, enumerate_fixed_points, orbit, CrossValidation, Orbit};
pub use exact::{to_f64_up, Q};
pub use generate::{
    generate_twu, generate_tz, random_instance, Generated, MetricShape, MAX_ATTEMPTS,
};
pub use instance::{FiniteInstance, MAX_POINTS};
pub use tight::{tightest_constants, TightConstants};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_space::ConeSpec;
    use crate::contractions::{ClassKind, ClassSpec, MapFamily, MapPair};
    use crate::instances::{instance_c, instance_d, line_table};

    fn d_with(s: Vec<usize>) -> FiniteInstance {
        FiniteInstance::new(ConeSpec::orthant(2), &line_table(10), (0..10).collect(), s).unwrap()
    }

    fn halving() -> FiniteInstance {
        d_with((0..10).map(|k| k / 2).collect())
    }

    #[test]
    fn fixed_point_sets() {
        assert_eq!(enumerate_fixed_points(&halving()), vec![0]);
        assert_eq!(
            enumerate_fixed_points(&d_with((0..10).collect())),
            (0..10).collect::<Vec<_>>()
        );
        assert!(
            enumerate_fixed_points(&d_with((0..10).map(|k| (k + 1) % 10).collect())).is_empty()
        );
    }

    #[test]
    fn from_space_matches_table() {
        let d = instance_d();
        let fin = FiniteInstance::from_space(&d.space, &d.maps).unwrap();
        assert_eq!(fin.s_table(), halving().s_table());
        assert_eq!(fin.table_f64(), line_table(10));
    }

    #[test]
    fn grid_discretisation_is_exact() {
        let c = instance_c();
        let fin = FiniteInstance::from_space(&c.space, &c.maps).unwrap();
        assert_eq!(fin.len(), 101);
        assert_eq!(enumerate_fixed_points(&fin).len(), 101);
    }

    #[test]
    fn broken_tables_list_every_axiom() {
        let mut table = line_table(3);
        table[0][1] = vec![5.0, 10.0];
        table[1][1] = vec![1.0, 0.0];
        let err = FiniteInstance::new(ConeSpec::orthant(2), &table, vec![0, 1, 2], vec![0, 0, 0])
            .unwrap_err()
            .to_string();
        assert!(err.contains("d1 positivity (d(x,x) = 0)"), "{err}");
        assert!(err.contains("d2 symmetry"), "{err}");
        assert!(err.contains("d3 triangle"), "{err}");
    }

    #[test]
    fn halving_violates_banach_half_at_one_two() {
        let r = exhaustive_condition_check(&halving(), &ClassSpec::Tb { a: 0.5 }).unwrap();
        assert!(!r.holds);
        assert_eq!(r.pairs_checked, 100);
        assert_eq!(r.violations.first(), Some(&(1, 2)));
        assert!(r.violations.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn identity_is_weak_half_half() {
        let id = d_with((0..10).collect());
        assert!(
            exhaustive_condition_check(&id, &ClassSpec::Tw { delta: 0.5, l: 0.5 })
                .unwrap()
                .holds
        );
        let r = exhaustive_condition_check(&id, &ClassSpec::Tb { a: 0.999 }).unwrap();
        assert_eq!(r.violations.len(), 90);
    }

    #[test]
    fn tightest_examples() {
        match tightest_constants(&halving(), ClassKind::Tb, None).unwrap() {
            TightConstants::Infeasible {
                exact, witnesses, ..
            } => {
                assert_eq!(exact.as_deref(), Some("1"));
                assert_eq!(witnesses[0], (1, 2));
            }
            other => panic!("{other:?}"),
        }
        let constant = d_with(vec![3; 10]);
        let t = tightest_constants(&constant, ClassKind::Tb, None).unwrap();
        assert_eq!(t.spec(), Some(&ClassSpec::Tb { a: 0.0 }));

        let id = d_with((0..10).collect());
        assert!(tightest_constants(&id, ClassKind::Tb, None)
            .unwrap()
            .spec()
            .is_none());
        assert_eq!(
            tightest_constants(&id, ClassKind::Tw, None).unwrap().spec(),
            Some(&ClassSpec::Tw { delta: 0.0, l: 1.0 })
        );
        assert_eq!(
            tightest_constants(&id, ClassKind::Tw, Some(0.25))
                .unwrap()
                .spec(),
            Some(&ClassSpec::Tw {
                delta: 0.25,
                l: 0.75
            })
        );
        assert!(tightest_constants(&id, ClassKind::Tz, None).is_err());
    }

    #[test]
    fn tightest_is_minimal() {
        for i in 0..4 {
            let fin = generate_tz(5, i, 12).unwrap().fin;
            for kind in [
                ClassKind::Tb,
                ClassKind::Tk,
                ClassKind::Tc,
                ClassKind::Tw,
                ClassKind::TwDual,
                ClassKind::Twu,
            ] {
                let Some(spec) = tightest_constants(&fin, kind, None)
                    .unwrap()
                    .spec()
                    .copied()
                else {
                    continue;
                };
                let holds = |s: ClassSpec| exhaustive_condition_check(&fin, &s).unwrap().holds;
                assert!(holds(spec), "{spec:?}");
                let smaller = match spec {
                    ClassSpec::Tb { a } if a > 0.0 => vec![ClassSpec::Tb { a: a.next_down() }],
                    ClassSpec::Tk { b } if b > 0.0 => vec![ClassSpec::Tk { b: b.next_down() }],
                    ClassSpec::Tc { c } if c > 0.0 => vec![ClassSpec::Tc { c: c.next_down() }],
                    ClassSpec::Tw { delta, l } => {
                        let mut v = Vec::new();
                        if delta > 0.0 {
                            v.push(ClassSpec::Tw {
                                delta: delta.next_down(),
                                l: 1e6,
                            });
                        }
                        if l > 0.0 {
                            v.push(ClassSpec::Tw {
                                delta,
                                l: l.next_down(),
                            });
                        }
                        v
                    }
                    _ => Vec::new(),
                };
                for s in smaller {
                    assert!(!holds(s), "{s:?} should fail below {spec:?}");
                }
            }
        }
    }

    #[test]
    fn reduction_with_exact_delta() {
        // Kannan with b = 1/4 holds for the halving map; δ = 1/3 is not an f64
        let fin = halving();
        let r = exhaustive_reduction_check(&fin, 0.0, 0.25, 0.0).unwrap();
        if r.applicable {
            assert!(r.holds());
        }
        assert_eq!(r.delta_exact, "1/3");
        assert!(r.delta > 1.0 / 3.0);
        let z = exact_zamfirescu_delta(0.5, 0.25, 1.0 / 3.0).unwrap();
        assert_eq!(to_f64_up(&z), 0.5);
    }

    #[test]
    fn promotion_from_each_source() {
        let fin = d_with((0..10).map(|k| k / 4).collect());
        for spec in [
            ClassSpec::Tb { a: 0.5 },
            ClassSpec::Tk { b: 0.25 },
            ClassSpec::Tc { c: 0.4 },
            ClassSpec::Tz {
                a: 0.5,
                b: 0.3,
                c: 0.3,
            },
        ] {
            let p = exhaustive_promotion_check(&fin, &spec).unwrap().unwrap();
            assert!(p.sound(), "{spec:?}: {p:?}");
        }
        assert!(
            exhaustive_promotion_check(&fin, &ClassSpec::Tw { delta: 0.1, l: 1.0 })
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn cross_validation_examples() {
        let id = d_with((0..10).collect());
        let cv = cross_validate(&id, &ClassSpec::Tw { delta: 0.5, l: 0.5 }).unwrap();
        assert!(cv.passed && cv.applicable);
        assert_eq!(cv.fixed_points.len(), 10);
        assert!(cv.orbits.iter().all(|o| o.steps == 0));

        let constant = d_with(vec![0; 10]);
        let cv = cross_validate(&constant, &ClassSpec::Tb { a: 0.5 }).unwrap();
        assert!(cv.passed, "{cv:?}");
        assert_eq!(cv.fixed_points, vec![0]);

        let cv = cross_validate(&halving(), &ClassSpec::Tb { a: 0.5 }).unwrap();
        assert!(!cv.applicable && !cv.passed);
    }

    #[test]
    fn generated_instances_hold_their_class() {
        for i in 0..5 {
            let g = generate_tz(7, i, 20).unwrap();
            assert!(g.fin.len() <= 20);
            assert!(exhaustive_condition_check(&g.fin, &g.spec).unwrap().holds);
            let cv = cross_validate(&g.fin, &g.spec).unwrap();
            assert!(cv.passed, "{cv:?}");
            assert_eq!(cv.fixed_points.len(), 1);

            let w = generate_twu(7, i, 20).unwrap();
            let cv = cross_validate(&w.fin, &w.spec).unwrap();
            assert!(cv.passed, "{cv:?}");
        }
        let a = generate_tz(7, 3, 20).unwrap();
        let b = generate_tz(7, 3, 20).unwrap();
        assert_eq!(
            (a.spec, a.attempts, a.fin.s_table()),
            (b.spec, b.attempts, b.fin.s_table())
        );
    }

    #[test]
    fn round_trip_through_space() {
        let g = generate_tz(11, 0, 20).unwrap();
        let m = g.fin.to_mapped_space().unwrap();
        let back = FiniteInstance::from_space(&m.space, &m.maps).unwrap();
        assert_eq!(back.table_f64(), g.fin.table_f64());
        assert_eq!(back.s_table(), g.fin.s_table());
        assert_eq!(back.t_table(), g.fin.t_table());
        let _ = MapPair::new(MapFamily::Identity, MapFamily::Identity);
    }
}
