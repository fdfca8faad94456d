//! Metric-measure distances on finite instances.
//!
//! A [`FiniteMMSpace`] is a finite metric space with probability weights.
//! The module computes
//!
//! * exact Wasserstein-1 distances between weight vectors on a common
//!   ground set by min-cost flow, with a Kantorovich dual certificate
//!   ([`w1_exact`]);
//! * projection transport costs of order 1 and 2 for finite spaces and
//!   sampled sphere clouds ([`projection_transport_cost`],
//!   [`projection_transport_cost_cloud`]);
//! * box distances: exhaustive search over step parametrizations at small
//!   rational resolution ([`box_exact`]) and the certified tube upper bound
//!   max(complement, 2ε) ([`box_bound_via_tube`]);
//! * [`implication_audit`], a per-instance report checking that shrinking
//!   transport distances force shrinking box bounds.

mod audit;
mod boxdist;
mod flow;

pub use audit::{
    implication_audit, projection_transport_cost, projection_transport_cost_cloud, AuditInstance,
    AuditReport, AuditRow, CloudProjectionCost, CostOrder,
};
pub use boxdist::{box_bound_via_tube, box_exact, StepParametrization, BOX_RESOLUTION_CAP};
pub use flow::{w1_exact, w1_with_denominator, WEIGHT_DENOMINATOR};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for the triangle inequality and plan marginals.
const METRIC_TOL: f64 = 1e-9;

/// Tolerance for weight normalization.
const WEIGHT_TOL: f64 = 1e-12;

/// Errors reported by the metric-measure routines.
#[derive(Debug, Error)]
pub enum MMDistError {
    /// A constructor or operation was handed malformed input.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Transport weights do not carry equal total mass.
    #[error("infeasible transport: {0}")]
    Infeasible(String),
    /// Weights need a finer rational resolution than the configured cap.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// Serialization failure.
    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// A finite metric-measure space: a symmetric distance matrix with zero
/// diagonal satisfying the triangle inequality, and probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMMSpace {
    m: usize,
    d: Vec<f64>,
    w: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpaceDto {
    m: usize,
    #[serde(rename = "D")]
    d: Vec<f64>,
    w: Vec<f64>,
}

impl FiniteMMSpace {
    /// Builds a space from a row-major m×m distance matrix and m weights.
    pub fn new(d: Vec<f64>, w: Vec<f64>) -> Result<Self, MMDistError> {
        let m = w.len();
        if m == 0 {
            return Err(MMDistError::Invalid("space must have at least one point".into()));
        }
        if d.len() != m * m {
            return Err(MMDistError::Invalid(format!(
                "distance matrix has {} entries, expected {}",
                d.len(),
                m * m
            )));
        }
        for (i, &value) in d.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(MMDistError::Invalid(format!("distance entry {i} is {value}")));
            }
        }
        for i in 0..m {
            if d[i * m + i] != 0.0 {
                return Err(MMDistError::Invalid(format!(
                    "diagonal entry ({i},{i}) is {}, expected 0",
                    d[i * m + i]
                )));
            }
            for j in 0..i {
                if (d[i * m + j] - d[j * m + i]).abs() > WEIGHT_TOL {
                    return Err(MMDistError::Invalid(format!(
                        "distance matrix is asymmetric at ({i},{j})"
                    )));
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    if d[i * m + j] > d[i * m + k] + d[k * m + j] + METRIC_TOL {
                        return Err(MMDistError::Invalid(format!(
                            "triangle inequality fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        validate_weights(&w, "weights")?;
        Ok(Self { m, d, w })
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.m + j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.d.iter().fold(0.0, |acc, &v| acc.max(v))
    }

    /// JSON document {"m": …, "D": row-major, "w": …}.
    pub fn to_json(&self) -> Result<String, MMDistError> {
        let dto = SpaceDto { m: self.m, d: self.d.clone(), w: self.w.clone() };
        Ok(serde_json::to_string_pretty(&dto)?)
    }

    /// Parses and validates a document produced by [`Self::to_json`].
    pub fn from_json(text: &str) -> Result<Self, MMDistError> {
        let dto: SpaceDto = serde_json::from_str(text)?;
        if dto.m != dto.w.len() {
            return Err(MMDistError::Invalid(format!(
                "field m = {} disagrees with {} weights",
                dto.m,
                dto.w.len()
            )));
        }
        Self::new(dto.d, dto.w)
    }
}

fn validate_weights(w: &[f64], what: &str) -> Result<(), MMDistError> {
    if w.iter().any(|&x| !x.is_finite() || x < 0.0) {
        return Err(MMDistError::Invalid(format!("{what} must be nonnegative")));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(MMDistError::Infeasible(format!("{what} sum to {total}, expected 1")));
    }
    Ok(())
}

/// A coupling between two weight vectors on a common ground set, with its
/// transport cost, the Kantorovich potential certifying optimality, and the
/// duality gap achieved by that potential.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    m: usize,
    pi: Vec<f64>,
    cost: f64,
    potential: Vec<f64>,
    duality_gap: f64,
}

impl TransportPlan {
    fn new(
        space: &FiniteMMSpace,
        pi: Vec<f64>,
        potential: Vec<f64>,
        source: &[f64],
        target: &[f64],
    ) -> Result<Self, MMDistError> {
        let m = space.len();
        debug_assert_eq!(pi.len(), m * m);
        let cost: f64 =
            pi.iter().zip(&space.d).map(|(p, d)| p * d).sum();
        for i in 0..m {
            let row: f64 = pi[i * m..(i + 1) * m].iter().sum();
            if (row - source[i]).abs() > METRIC_TOL {
                return Err(MMDistError::Invalid(format!(
                    "plan row {i} sums to {row}, expected {}",
                    source[i]
                )));
            }
            let col: f64 = (0..m).map(|j| pi[j * m + i]).sum();
            if (col - target[i]).abs() > METRIC_TOL {
                return Err(MMDistError::Invalid(format!(
                    "plan column {i} sums to {col}, expected {}",
                    target[i]
                )));
            }
        }
        let dual_value: f64 =
            potential.iter().zip(source.iter().zip(target)).map(|(f, (s, t))| f * (s - t)).sum();
        let duality_gap = (cost - dual_value).abs();
        Ok(Self { m, pi, cost, potential, duality_gap })
    }

    /// Mass shipped from point i to point j.
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.pi[i * self.m + j]
    }

    /// Row-major coupling matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.pi
    }

    /// Transport cost Σ π_ij · D_ij; the Wasserstein-1 distance.
    pub fn cost(&self) -> f64 {
        self.cost
    }

    /// 1-Lipschitz Kantorovich potential f with Σ f·(μ−ν) ≈ cost.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// |cost − Σ f·(μ−ν)| for the stored potential.
    pub fn duality_gap(&self) -> f64 {
        self.duality_gap
    }
}
