//! Projection transport costs and the implication audit: on families of
//! finite instances, shrinking Wasserstein distances to the projected locus
//! must come with shrinking box bounds. The observable distance itself is
//! never computed; the report relies on it being dominated by the box
//! distance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{box_bound_via_tube, box_exact, w1_exact, FiniteMMSpace, MMDistError};
use crate::sphere_lab::{project_to_equator, SampleCloud};

/// Exponent of the transported distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostOrder {
    One,
    Two,
}

impl CostOrder {
    fn exponent(self) -> i32 {
        match self {
            CostOrder::One => 1,
            CostOrder::Two => 2,
        }
    }
}

/// Weighted transport cost Σ wᵢ·D(i, proj(i))^order of moving every point
/// to its projection. For order 1 this is the cost of a feasible coupling
/// between the weights and their pushforward, so it dominates the
/// Wasserstein-1 distance between them.
pub fn projection_transport_cost(
    space: &FiniteMMSpace,
    projection: &[usize],
    order: CostOrder,
) -> Result<f64, MMDistError> {
    if projection.len() != space.len() {
        return Err(MMDistError::Invalid(format!(
            "projection lists {} targets for {} points",
            projection.len(),
            space.len()
        )));
    }
    if let Some(&target) = projection.iter().find(|&&t| t >= space.len()) {
        return Err(MMDistError::Invalid(format!("projection target {target} out of range")));
    }
    Ok(space
        .weights()
        .iter()
        .enumerate()
        .map(|(i, &w)| w * space.dist(i, projection[i]).powi(order.exponent()))
        .sum())
}

/// Empirical projection transport cost of a sphere sample: the mean of
/// dist^order over the cloud, flagged (focal) points excluded from the sum
/// with their mass fraction reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudProjectionCost {
    pub cost: f64,
    pub excluded_mass: f64,
}

/// Mean equator-projection cost (1/N)·Σ dist^order over a sample cloud.
pub fn projection_transport_cost_cloud(
    cloud: &SampleCloud,
    order: CostOrder,
) -> Result<CloudProjectionCost, MMDistError> {
    let mut sum = 0.0;
    let mut excluded = 0usize;
    for point in cloud.iter_points() {
        let projection = project_to_equator(point)
            .map_err(|e| MMDistError::Invalid(format!("cloud point rejected: {e}")))?;
        if projection.focal {
            excluded += 1;
        } else {
            sum += projection.dist.powi(order.exponent());
        }
    }
    let total = cloud.len() as f64;
    Ok(CloudProjectionCost { cost: sum / total, excluded_mass: excluded as f64 / total })
}

/// One finite space with a designated locus and a tube radius, labeled for
/// reporting.
#[derive(Debug, Clone)]
pub struct AuditInstance {
    label: String,
    space: FiniteMMSpace,
    locus: Vec<usize>,
    eps: f64,
}

impl AuditInstance {
    pub fn new(
        label: impl Into<String>,
        space: FiniteMMSpace,
        locus: Vec<usize>,
        eps: f64,
    ) -> Result<Self, MMDistError> {
        let label = label.into();
        if label.is_empty() || label.contains(',') || label.contains('\n') {
            return Err(MMDistError::Invalid(format!("label {label:?} is not CSV-safe")));
        }
        if locus.is_empty() {
            return Err(MMDistError::Invalid("locus must be nonempty".into()));
        }
        if locus.windows(2).any(|w| w[1] <= w[0]) || *locus.last().unwrap() >= space.len() {
            return Err(MMDistError::Invalid(
                "locus must be strictly increasing indices into the space".into(),
            ));
        }
        if !eps.is_finite() || eps < 0.0 {
            return Err(MMDistError::Invalid(format!("eps must be nonnegative, got {eps}")));
        }
        Ok(Self { label, space, locus, eps })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> &FiniteMMSpace {
        &self.space
    }

    /// Nearest-locus-point projection, ties to the smallest index.
    pub fn projection(&self) -> Vec<usize> {
        (0..self.space.len())
            .map(|i| {
                self.locus
                    .iter()
                    .copied()
                    .min_by(|&a, &b| {
                        self.space
                            .dist(i, a)
                            .partial_cmp(&self.space.dist(i, b))
                            .unwrap()
                            .then(a.cmp(&b))
                    })
                    .unwrap()
            })
            .collect()
    }
}

/// Audit columns for one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub instance: String,
    pub w1: f64,
    pub box_bound: f64,
    pub box_exact: Option<f64>,
    pub complement: f64,
    pub eps: f64,
}

/// Per-instance audit rows plus the standing remark that the observable
/// distance is dominated by the box distance rather than computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub note: String,
    pub rows: Vec<AuditRow>,
}

impl AuditReport {
    /// CSV table with header `instance,w1,box_bound,box_exact,complement,eps`;
    /// the box_exact cell is empty when the weights need a resolution beyond
    /// the search cap.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,w1,box_bound,box_exact,complement,eps\n");
        for row in &self.rows {
            let box_cell = row.box_exact.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.instance, row.w1, row.box_bound, box_cell, row.complement, row.eps
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String, MMDistError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs the audit on a family of instances (concurrently; the report keeps
/// the input order). Per instance: the Wasserstein-1 distance to the
/// projected weights, the tube mass beyond eps, the certified box bound
/// max(complement, 2·eps), and, at resolutions within the search cap, the
/// exact step-class box distance to the quotient space on the locus.
pub fn implication_audit(instances: &[AuditInstance]) -> Result<AuditReport, MMDistError> {
    let rows = instances
        .par_iter()
        .map(audit_instance)
        .collect::<Result<Vec<_>, MMDistError>>()?;
    Ok(AuditReport {
        note: "observable distance not computed; it is bounded above by the box distance"
            .to_string(),
        rows,
    })
}

fn audit_instance(instance: &AuditInstance) -> Result<AuditRow, MMDistError> {
    let space = &instance.space;
    let m = space.len();
    let projection = instance.projection();

    let mut pushforward = vec![0.0; m];
    for (i, &target) in projection.iter().enumerate() {
        pushforward[target] += space.weights()[i];
    }
    let w1 = w1_exact(space, &pushforward)?.cost();

    let complement: f64 = (0..m)
        .filter(|&i| space.dist(i, projection[i]) > instance.eps)
        .map(|i| space.weights()[i])
        .sum();
    let box_bound = box_bound_via_tube(complement, instance.eps)?;

    let quotient = quotient_space(space, &instance.locus, &pushforward)?;
    let box_exact = match box_exact(space, &quotient) {
        Ok(value) => Some(value),
        Err(MMDistError::Resolution(_)) => None,
        Err(e) => return Err(e),
    };

    Ok(AuditRow {
        instance: instance.label.clone(),
        w1,
        box_bound,
        box_exact,
        complement,
        eps: instance.eps,
    })
}

/// The locus with the pushforward weights and the restricted distances.
fn quotient_space(
    space: &FiniteMMSpace,
    locus: &[usize],
    pushforward: &[f64],
) -> Result<FiniteMMSpace, MMDistError> {
    let q = locus.len();
    let mut d = vec![0.0; q * q];
    for (a, &i) in locus.iter().enumerate() {
        for (b, &j) in locus.iter().enumerate() {
            d[a * q + b] = space.dist(i, j);
        }
    }
    let w: Vec<f64> = locus.iter().map(|&i| pushforward[i]).collect();
    FiniteMMSpace::new(d, w)
}
