//! Polyhedral cones in ℝ^m and the partial order they induce.
//!
//! Every built-in family is described by an inequality matrix `A`, with
//! `P = {v : Av ≥ 0}`. The orthant uses the identity, the scaled orthant a
//! diagonal of weights, and the general polyhedral family an explicit matrix.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::vector::{NormKind, VectorE};
use crate::error::{Error, Result};

pub const DEFAULT_INTERIOR_MARGIN: f64 = 1e-9;
pub const DEFAULT_SLACK: f64 = 1e-12;

const MEMBER_SAMPLE_ATTEMPTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeFamily {
    Orthant,
    ScaledOrthant {
        weights: Vec<f64>,
    },
    /// `P = {v : matrix · v ≥ 0}`; one row per defining inequality.
    Polyhedral {
        matrix: Vec<Vec<f64>>,
    },
}

/// Closed or strict (interior) membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Closed,
    Interior,
}

/// Outcome of comparing two vectors in the cone order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Relation {
    Eq,
    /// `x ≤ y`, `x ≠ y`, and `y − x` is on the boundary of `P`.
    Lt,
    /// `y − x ∈ Int P`.
    Ll,
    Gt,
    Gg,
    Incomparable,
}

impl Relation {
    /// `x ≤ y` in the cone order (covers `Eq`, `Lt`, `Ll`).
    pub fn is_le(self) -> bool {
        matches!(self, Relation::Eq | Relation::Lt | Relation::Ll)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeSpec {
    dimension: usize,
    family: ConeFamily,
    rows: Vec<Vec<f64>>,
    row_weights: Vec<f64>,
    interior_margin: f64,
    slack: f64,
    norm: NormKind,
    declared_interior: Option<VectorE>,
}

impl ConeSpec {
    pub fn new(dimension: usize, family: ConeFamily) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::config("cone dimension must be >= 1"));
        }
        let rows = match &family {
            ConeFamily::Orthant => (0..dimension)
                .map(|i| {
                    let mut row = vec![0.0; dimension];
                    row[i] = 1.0;
                    row
                })
                .collect(),
            ConeFamily::ScaledOrthant { weights } => {
                if weights.len() != dimension {
                    return Err(Error::Dimension {
                        expected: dimension,
                        found: weights.len(),
                    });
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(Error::config(
                        "scaled-orthant weights must be finite and >= 0",
                    ));
                }
                weights
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| {
                        let mut row = vec![0.0; dimension];
                        row[i] = w;
                        row
                    })
                    .collect()
            }
            ConeFamily::Polyhedral { matrix } => {
                if matrix.is_empty() {
                    return Err(Error::config(
                        "polyhedral cone needs at least one inequality row",
                    ));
                }
                for row in matrix {
                    if row.len() != dimension {
                        return Err(Error::Dimension {
                            expected: dimension,
                            found: row.len(),
                        });
                    }
                    if row.iter().any(|c| !c.is_finite()) {
                        return Err(Error::config("polyhedral matrix entries must be finite"));
                    }
                }
                matrix.clone()
            }
        };
        let row_weights = rows
            .iter()
            .map(|r: &Vec<f64>| r.iter().map(|c| c.abs()).sum())
            .collect();
        Ok(ConeSpec {
            dimension,
            family,
            rows,
            row_weights,
            interior_margin: DEFAULT_INTERIOR_MARGIN,
            slack: DEFAULT_SLACK,
            norm: NormKind::default(),
            declared_interior: None,
        })
    }

    pub fn orthant(dimension: usize) -> Self {
        Self::new(dimension, ConeFamily::Orthant).expect("orthant of positive dimension")
    }

    pub fn with_norm(mut self, norm: NormKind) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_interior_margin(mut self, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::config("interior margin must be > 0"));
        }
        self.interior_margin = tau;
        Ok(self)
    }

    /// Relative slack used by [`ConeSpec::leq`]; zero makes it an exact test.
    pub fn with_slack(mut self, slack: f64) -> Result<Self> {
        if !(slack.is_finite() && slack >= 0.0) {
            return Err(Error::config("slack must be finite and >= 0"));
        }
        self.slack = slack;
        Ok(self)
    }

    pub fn with_interior_point(mut self, point: VectorE) -> Result<Self> {
        point.check_dim(self.dimension)?;
        self.declared_interior = Some(point);
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &ConeFamily {
        &self.family
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    pub fn interior_margin(&self) -> f64 {
        self.interior_margin
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    pub fn declared_interior(&self) -> Option<&VectorE> {
        self.declared_interior.as_ref()
    }

    /// Inequality rows `A` with `P = {v : Av ≥ 0}`.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn norm(&self, v: &VectorE) -> f64 {
        v.norm(self.norm)
    }

    fn row_values<'a>(&'a self, v: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.rows
            .iter()
            .map(move |row| row.iter().zip(v).map(|(a, x)| a * x).sum::<f64>())
    }

    /// Exact membership test. Closed mode accepts `Av ≥ 0` with no tolerance;
    /// interior mode needs `v ≠ 0` and every row value `≥ τ‖v‖`.
    pub fn contains(&self, v: &VectorE, mode: Membership) -> Result<bool> {
        v.check_dim(self.dimension)?;
        Ok(match mode {
            Membership::Closed => self.row_values(v.coords()).all(|r| r >= 0.0),
            Membership::Interior => {
                if v.is_zero() {
                    return Ok(false);
                }
                let margin = self.interior_margin * self.norm(v);
                self.row_values(v.coords()).all(|r| r >= margin)
            }
        })
    }

    /// Closed membership allowing each row value to dip to `-tol · ‖A_k‖₁`.
    pub fn contains_within(&self, v: &VectorE, tol: f64) -> bool {
        debug_assert_eq!(v.dim(), self.dimension);
        self.row_values(v.coords())
            .zip(&self.row_weights)
            .all(|(r, w)| r >= -tol * w)
    }

    /// Tolerant order test `x ≤ y`: `y − x ∈ P` up to the cone's relative slack,
    /// scaled by the larger of `‖x‖` and `‖y‖`.
    pub fn leq(&self, x: &VectorE, y: &VectorE) -> bool {
        let scale = self.norm(x).max(self.norm(y));
        self.contains_within(&(y - x), self.slack * scale)
    }

    /// Row values of `v`, used in reports to show how far a vector is from `P`.
    pub fn row_residuals(&self, v: &VectorE) -> Vec<f64> {
        self.row_values(v.coords()).collect()
    }

    /// Classifies the pair `(x, y)` in the cone order with exact membership tests.
    pub fn compare(&self, x: &VectorE, y: &VectorE) -> Result<Relation> {
        x.check_dim(self.dimension)?;
        y.check_dim(self.dimension)?;
        if x == y {
            return Ok(Relation::Eq);
        }
        let up = y - x;
        let down = -&up;
        Ok(if self.contains(&up, Membership::Interior)? {
            Relation::Ll
        } else if self.contains(&up, Membership::Closed)? {
            Relation::Lt
        } else if self.contains(&down, Membership::Interior)? {
            Relation::Gg
        } else if self.contains(&down, Membership::Closed)? {
            Relation::Gt
        } else {
            Relation::Incomparable
        })
    }

    /// A point of `Int P`: the declared one when present, else a deterministic
    /// search over natural candidates. `None` means no interior point was found.
    pub fn interior_point(&self) -> Option<VectorE> {
        if let Some(p) = &self.declared_interior {
            return self
                .contains(p, Membership::Interior)
                .ok()
                .and_then(|ok| ok.then(|| p.clone()));
        }
        let m = self.dimension;
        let mut candidates = vec![VectorE::from_raw(vec![1.0; m])];
        // Aᵀ·1 points into the cone for many well-conditioned matrices.
        let mut sum = vec![0.0; m];
        for row in &self.rows {
            for (s, a) in sum.iter_mut().zip(row) {
                *s += a;
            }
        }
        candidates.push(VectorE::from_raw(sum));
        for row in &self.rows {
            candidates.push(VectorE::from_raw(row.clone()));
        }
        if let Some(found) = candidates
            .into_iter()
            .find(|c| c.is_finite() && matches!(self.contains(c, Membership::Interior), Ok(true)))
        {
            return Some(found);
        }
        let mut rng = crate::sampling::rng(0x1f7e_0001);
        (0..MEMBER_SAMPLE_ATTEMPTS)
            .map(|_| VectorE::from_raw((0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect()))
            .find(|c| matches!(self.contains(c, Membership::Interior), Ok(true)))
    }

    /// Draws a point of `P` (rejection sampling from `[-1, 1]^m` for the
    /// polyhedral family). `None` when the acceptance budget is exhausted.
    pub fn sample_member<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<VectorE> {
        let m = self.dimension;
        match self.family {
            ConeFamily::Orthant | ConeFamily::ScaledOrthant { .. } => Some(VectorE::from_raw(
                (0..m).map(|_| rng.gen_range(0.0..=1.0)).collect(),
            )),
            ConeFamily::Polyhedral { .. } => (0..MEMBER_SAMPLE_ATTEMPTS).find_map(|_| {
                let v = VectorE::from_raw((0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect());
                self.contains_within(&v, 0.0).then_some(v)
            }),
        }
    }
}
