//! Exact rational helpers. Every finite `f64` is a dyadic rational, so
//! conversions into `Q` lose nothing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::cone_space::ConeSpec;
use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::config(format!("{x} is not a finite number")))
}

pub fn q_int(k: i64) -> Q {
    Q::from_integer(BigInt::from(k))
}

/// Nearest `f64`; exact whenever the value is representable.
pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Smallest `f64` not below `v`.
pub fn to_f64_up(v: &Q) -> f64 {
    let f = to_f64(v);
    match Q::from_float(f) {
        Some(back) if back < *v => f.next_up(),
        _ => f,
    }
}

/// The cone rows `A` in exact form; `v ∈ P` iff every entry of `A·v` is `≥ 0`.
#[derive(Clone, Debug)]
pub struct ExactCone {
    rows: Vec<Vec<Q>>,
}

impl ExactCone {
    pub fn new(cone: &ConeSpec) -> Result<Self> {
        let rows = cone
            .rows()
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(ExactCone { rows })
    }

    pub fn project(&self, v: &[Q]) -> Vec<Q> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }
}

pub fn all_nonneg(v: &[Q]) -> bool {
    v.iter().all(|x| !x.is_negative())
}

pub fn all_zero(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}
