use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A contraction class with its constants.
///
/// Every class bounds `d(TSx, TSy)` from above in the cone order:
///
/// | class     | right-hand side                                   |
/// |-----------|---------------------------------------------------|
/// | `Tb`      | `a·d(Tx,Ty)`                                      |
/// | `Tk`      | `b·[d(Tx,TSx) + d(Ty,TSy)]`                       |
/// | `Tc`      | `c·[d(Tx,TSy) + d(Ty,TSx)]`                       |
/// | `Tz`      | any one of the three above                        |
/// | `Tw`      | `δ·d(Tx,Ty) + L·d(Ty,TSx)`                        |
/// | `TwDual`  | `δ·d(Tx,Ty) + L·d(Tx,TSy)`                        |
/// | `Twu`     | `θ·d(Tx,Ty) + L₁·d(Tx,TSx)`                       |
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassSpec {
    Tb { a: f64 },
    Tk { b: f64 },
    Tc { c: f64 },
    Tz { a: f64, b: f64, c: f64 },
    Tw { delta: f64, l: f64 },
    TwDual { delta: f64, l: f64 },
    Twu { theta: f64, l1: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Tb,
    Tk,
    Tc,
    Tz,
    Tw,
    TwDual,
    Twu,
}

impl ClassKind {
    pub const ALL: [ClassKind; 7] = [
        ClassKind::Tb,
        ClassKind::Tk,
        ClassKind::Tc,
        ClassKind::Tz,
        ClassKind::Tw,
        ClassKind::TwDual,
        ClassKind::Twu,
    ];

    /// Classes whose fixed point is unique when it exists.
    pub fn forces_uniqueness(self) -> bool {
        !matches!(self, ClassKind::Tw | ClassKind::TwDual)
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassKind::Tb => "tb",
            ClassKind::Tk => "tk",
            ClassKind::Tc => "tc",
            ClassKind::Tz => "tz",
            ClassKind::Tw => "tw",
            ClassKind::TwDual => "tw_dual",
            ClassKind::Twu => "twu",
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ClassKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ClassKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown class kind {s:?}")))
    }
}

fn in_unit(x: f64) -> bool {
    x.is_finite() && (0.0..1.0).contains(&x)
}

fn in_half(x: f64) -> bool {
    x.is_finite() && (0.0..0.5).contains(&x)
}

fn nonneg(x: f64) -> bool {
    x.is_finite() && x >= 0.0
}

impl ClassSpec {
    pub fn kind(&self) -> ClassKind {
        match self {
            ClassSpec::Tb { .. } => ClassKind::Tb,
            ClassSpec::Tk { .. } => ClassKind::Tk,
            ClassSpec::Tc { .. } => ClassKind::Tc,
            ClassSpec::Tz { .. } => ClassKind::Tz,
            ClassSpec::Tw { .. } => ClassKind::Tw,
            ClassSpec::TwDual { .. } => ClassKind::TwDual,
            ClassSpec::Twu { .. } => ClassKind::Twu,
        }
    }

    /// Every constant outside its admissible range, as a message.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                out.push(msg.to_string());
            }
        };
        match *self {
            ClassSpec::Tb { a } => need(in_unit(a), "a must be in [0,1)"),
            ClassSpec::Tk { b } => need(in_half(b), "b must be in [0,1/2)"),
            ClassSpec::Tc { c } => need(in_half(c), "c must be in [0,1/2)"),
            ClassSpec::Tz { a, b, c } => {
                need(in_unit(a), "a must be in [0,1)");
                need(in_half(b), "b must be in [0,1/2)");
                need(in_half(c), "c must be in [0,1/2)");
            }
            ClassSpec::Tw { delta, l } | ClassSpec::TwDual { delta, l } => {
                need(in_unit(delta), "delta must be in [0,1)");
                need(nonneg(l), "l must be finite and >= 0");
            }
            ClassSpec::Twu { theta, l1 } => {
                need(in_unit(theta), "theta must be in [0,1)");
                need(nonneg(l1), "l1 must be finite and >= 0");
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::config(p.join("; ")))
        }
    }

    /// Per-step contraction factor of the T-image gaps along a Picard orbit,
    /// when the class guarantees one: the `δ` of the promoted weak form.
    pub fn step_rate(&self) -> Option<f64> {
        match promote_to_weak(self) {
            Ok(ClassSpec::Tw { delta, .. } | ClassSpec::TwDual { delta, .. }) => Some(delta),
            _ => None,
        }
    }
}

/// `max{a, b/(1−b), c/(1−c)}`, the single constant that bounds every branch
/// of the Zamfirescu condition.
pub fn zamfirescu_delta(a: f64, b: f64, c: f64) -> Result<f64> {
    ClassSpec::Tz { a, b, c }.validate()?;
    Ok(a.max(b / (1.0 - b)).max(c / (1.0 - c)))
}

/// The weak-contraction constants implied by a Banach, Kannan, Chatterjea or
/// Zamfirescu class. Weak specs pass through unchanged.
///
/// Kannan and Chatterjea follow from two triangle inequalities that move every
/// term onto `d(Tx,Ty)` and `d(Ty,TSx)`, leaving `(1−k)·lhs` on the left.
pub fn promote_to_weak(spec: &ClassSpec) -> Result<ClassSpec> {
    spec.validate()?;
    Ok(match *spec {
        ClassSpec::Tb { a } => ClassSpec::Tw { delta: a, l: 0.0 },
        ClassSpec::Tk { b: k } | ClassSpec::Tc { c: k } => ClassSpec::Tw {
            delta: k / (1.0 - k),
            l: 2.0 * k / (1.0 - k),
        },
        ClassSpec::Tz { a, b, c } => {
            let delta = zamfirescu_delta(a, b, c)?;
            ClassSpec::Tw {
                delta,
                l: 2.0 * delta,
            }
        }
        ClassSpec::Tw { .. } | ClassSpec::TwDual { .. } => *spec,
        ClassSpec::Twu { .. } => {
            return Err(Error::Unsupported(
                "the uniqueness condition is not a source class for promotion".into(),
            ))
        }
    })
}

/// Step factor obtained by inserting the orbit into the primary reduced form
/// with `x = x_{n−1}`: `δ/(1−2δ)`. Meaningful only for `δ < 1/2`, and below 1
/// only for `δ < 1/3`.
pub fn primary_form_rate(delta: f64) -> Option<f64> {
    (delta < 0.5).then(|| delta / (1.0 - 2.0 * delta))
}

/// Step factor from the dual reduced form with `y = x_{n−1}`, where the
/// `d(Tx,TSy)` term vanishes: `δ` itself.
pub fn dual_form_rate(delta: f64) -> f64 {
    delta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_examples() {
        assert_eq!(zamfirescu_delta(0.5, 0.25, 1.0 / 3.0).unwrap(), 0.5);
        assert_eq!(zamfirescu_delta(0.0, 0.0, 0.0).unwrap(), 0.0);
        let d = zamfirescu_delta(0.2, 0.4, 0.1).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-15);
        assert!(zamfirescu_delta(1.0, 0.0, 0.0).is_err());
        assert!(zamfirescu_delta(0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn promotion_examples() {
        assert_eq!(
            promote_to_weak(&ClassSpec::Tb { a: 0.5 }).unwrap(),
            ClassSpec::Tw { delta: 0.5, l: 0.0 }
        );
        let ClassSpec::Tw { delta, l } = promote_to_weak(&ClassSpec::Tk { b: 0.25 }).unwrap()
        else {
            panic!()
        };
        assert!((delta - 1.0 / 3.0).abs() < 1e-15 && (l - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            promote_to_weak(&ClassSpec::Tz {
                a: 0.5,
                b: 0.25,
                c: 1.0 / 3.0
            })
            .unwrap(),
            ClassSpec::Tw { delta: 0.5, l: 1.0 }
        );
        let weak = ClassSpec::TwDual { delta: 0.3, l: 2.0 };
        assert_eq!(promote_to_weak(&weak).unwrap(), weak);
    }

    #[test]
    fn range_messages() {
        assert_eq!(
            ClassSpec::Tb { a: 1.0 }.problems(),
            vec!["a must be in [0,1)"]
        );
        assert_eq!(
            ClassSpec::Tk { b: 0.5 }.problems(),
            vec!["b must be in [0,1/2)"]
        );
        assert_eq!(
            ClassSpec::Tz {
                a: 1.0,
                b: 0.5,
                c: 0.7
            }
            .problems()
            .len(),
            3
        );
        assert!(ClassSpec::Tw {
            delta: 0.5,
            l: -1.0
        }
        .validate()
        .is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(primary_form_rate(0.25), Some(0.5));
        assert_eq!(primary_form_rate(0.5), None);
        assert!(primary_form_rate(0.4).unwrap() > 1.0);
        assert_eq!(dual_form_rate(0.4), 0.4);
    }

    #[test]
    fn kind_roundtrip() {
        for k in ClassKind::ALL {
            assert_eq!(k.name().parse::<ClassKind>().unwrap(), k);
        }
    }
}
