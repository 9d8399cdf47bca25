use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which norm the ambient space E = ℝ^m carries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    Max,
    Euclidean,
}

impl NormKind {
    pub fn apply(self, coords: &[f64]) -> f64 {
        match self {
            NormKind::Max => coords.iter().fold(0.0_f64, |acc, c| acc.max(c.abs())),
            NormKind::Euclidean => coords.iter().map(|c| c * c).sum::<f64>().sqrt(),
        }
    }
}

/// A vector of the ambient ordered space E = ℝ^m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorE(Vec<f64>);

impl VectorE {
    /// Builds a vector, rejecting empty or non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::config("vectors of E need dimension >= 1"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::domain(format!("non-finite coordinate {bad}")));
        }
        Ok(VectorE(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        VectorE(vec![0.0; dim])
    }

    /// Wraps coordinates produced by arithmetic on already-validated vectors.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        VectorE(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn norm(&self, kind: NormKind) -> f64 {
        kind.apply(&self.0)
    }

    /// `self + k * other`, the workhorse for right-hand sides of class inequalities.
    pub fn add_scaled(&self, k: f64, other: &VectorE) -> VectorE {
        debug_assert_eq!(self.dim(), other.dim());
        VectorE(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + k * b)
                .collect(),
        )
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected,
                found: self.dim(),
            })
        }
    }
}

impl fmt::Display for VectorE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &VectorE {
    type Output = VectorE;
    fn add(self, rhs: &VectorE) -> VectorE {
        debug_assert_eq!(self.dim(), rhs.dim());
        VectorE(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &VectorE {
    type Output = VectorE;
    fn sub(self, rhs: &VectorE) -> VectorE {
        debug_assert_eq!(self.dim(), rhs.dim());
        VectorE(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&VectorE> for f64 {
    type Output = VectorE;
    fn mul(self, rhs: &VectorE) -> VectorE {
        VectorE(rhs.0.iter().map(|c| self * c).collect())
    }
}

impl Neg for &VectorE {
    type Output = VectorE;
    fn neg(self) -> VectorE {
        VectorE(self.0.iter().map(|c| -c).collect())
    }
}
