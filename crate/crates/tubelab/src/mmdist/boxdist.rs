//! Box distance between finite spaces over step parametrizations.
//!
//! A step parametrization splits [0, 1) into k equal intervals and assigns
//! each to a point so that interval mass pushes forward to the space's
//! weights; this requires weights that are rationals with denominator k.
//! The box score of a parametrization pair is the smallest ε such that
//! after discarding parameter mass ε the pulled-back distance matrices
//! differ by at most ε in sup norm; [`box_exact`] minimizes that score
//! exhaustively over parametrization pairs and discarded interval sets.
//!
//! The search is exact within the step class and an upper bound on the box
//! distance over all Borel parametrizations; whether the two coincide for
//! uniform finite spaces is left open here, so callers must treat the
//! result as an upper bound.

use super::{FiniteMMSpace, MMDistError};

/// Largest interval count searched; the arrangement space grows factorially.
pub const BOX_RESOLUTION_CAP: u32 = 8;

/// Tolerance for recognizing a weight as a multiple of 1/k.
const RATIONAL_TOL: f64 = 1e-9;

/// An assignment of k equal subintervals of [0, 1) to points of a space,
/// pushing interval mass forward onto the space's weights exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepParametrization {
    assignment: Vec<usize>,
}

impl StepParametrization {
    /// Validates that `assignment` maps interval mass onto the weights of
    /// `space`: point i must receive exactly weights[i]·k intervals.
    pub fn new(space: &FiniteMMSpace, assignment: Vec<usize>) -> Result<Self, MMDistError> {
        let k = assignment.len();
        if k == 0 {
            return Err(MMDistError::Invalid("parametrization needs at least one interval".into()));
        }
        let mut counts = vec![0usize; space.len()];
        for &point in &assignment {
            if point >= space.len() {
                return Err(MMDistError::Invalid(format!(
                    "interval assigned to point {point} outside the space"
                )));
            }
            counts[point] += 1;
        }
        for (i, (&count, &weight)) in counts.iter().zip(space.weights()).enumerate() {
            if (count as f64 / k as f64 - weight).abs() > RATIONAL_TOL {
                return Err(MMDistError::Invalid(format!(
                    "pushforward gives point {i} mass {}/{k}, expected {weight}",
                    count
                )));
            }
        }
        Ok(Self { assignment })
    }

    /// Canonical parametrization at resolution k: intervals sorted by point
    /// index. Requires every weight to be a multiple of 1/k.
    pub fn canonical(space: &FiniteMMSpace, k: u32) -> Result<Self, MMDistError> {
        let counts = interval_counts(space, k).ok_or_else(|| {
            MMDistError::Resolution(format!("weights are not multiples of 1/{k}"))
        })?;
        let mut assignment = Vec::with_capacity(k as usize);
        for (point, &count) in counts.iter().enumerate() {
            assignment.extend(std::iter::repeat(point).take(count));
        }
        Self::new(space, assignment)
    }

    /// Number of intervals.
    pub fn k(&self) -> usize {
        self.assignment.len()
    }

    /// Point index assigned to each interval.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Pulled-back k×k distance matrix, row-major.
    pub fn pullback(&self, space: &FiniteMMSpace) -> Vec<f64> {
        let k = self.k();
        let mut rho = vec![0.0; k * k];
        for s in 0..k {
            for t in 0..k {
                rho[s * k + t] = space.dist(self.assignment[s], self.assignment[t]);
            }
        }
        rho
    }
}

/// Interval counts weights[i]·k if every weight is such a multiple.
fn interval_counts(space: &FiniteMMSpace, k: u32) -> Option<Vec<usize>> {
    let mut counts = Vec::with_capacity(space.len());
    let mut total = 0u32;
    for &w in space.weights() {
        let scaled = w * k as f64;
        let count = scaled.round();
        if (scaled - count).abs() > RATIONAL_TOL * k as f64 || count < 0.0 {
            return None;
        }
        counts.push(count as usize);
        total += count as u32;
    }
    (total == k).then_some(counts)
}

/// Smallest resolution k ≤ [`BOX_RESOLUTION_CAP`] expressing both weight
/// vectors as multiples of 1/k.
fn common_resolution(x: &FiniteMMSpace, y: &FiniteMMSpace) -> Result<u32, MMDistError> {
    for k in 1..=BOX_RESOLUTION_CAP {
        if interval_counts(x, k).is_some() && interval_counts(y, k).is_some() {
            return Ok(k);
        }
    }
    Err(MMDistError::Resolution(format!(
        "no common weight denominator up to {BOX_RESOLUTION_CAP}"
    )))
}

/// Box distance between X and Y within the step-parametrization class:
/// the minimum over parametrization pairs and interval subsets I₀ of
/// max(sup over s,t in I₀ of |ρ_X − ρ_Y|, 1 − |I₀|), where ρ are the
/// pulled-back distance matrices. Exact within the class by exhaustive
/// search; an upper bound on the Borel box distance.
pub fn box_exact(x: &FiniteMMSpace, y: &FiniteMMSpace) -> Result<f64, MMDistError> {
    let k = common_resolution(x, y)? as usize;
    let phi = StepParametrization::canonical(x, k as u32)?;
    let rho_x = phi.pullback(x);

    // Relabeling intervals acts on both parametrizations at once, so one
    // side can be frozen to the canonical arrangement while the other
    // ranges over all distinct arrangements of its interval multiset.
    let counts = interval_counts(y, k as u32).expect("resolution was just verified");
    let mut best = f64::INFINITY;
    let mut psi = Vec::with_capacity(k);
    search_arrangements(y, &rho_x, k, &mut counts.clone(), &mut psi, &mut best);
    Ok(best)
}

fn search_arrangements(
    y: &FiniteMMSpace,
    rho_x: &[f64],
    k: usize,
    remaining: &mut [usize],
    psi: &mut Vec<usize>,
    best: &mut f64,
) {
    if *best == 0.0 {
        return;
    }
    if psi.len() == k {
        *best = best.min(best_subset_score(y, rho_x, k, psi));
        return;
    }
    for point in 0..remaining.len() {
        if remaining[point] == 0 {
            continue;
        }
        remaining[point] -= 1;
        psi.push(point);
        search_arrangements(y, rho_x, k, remaining, psi, best);
        psi.pop();
        remaining[point] += 1;
    }
}

/// Best score over interval subsets for a fixed parametrization pair:
/// subset deviations come from a subset dynamic program over the k×k
/// deviation matrix, max(dev(S), 1 − |S|/k) minimized over all S.
fn best_subset_score(y: &FiniteMMSpace, rho_x: &[f64], k: usize, psi: &[usize]) -> f64 {
    let mut diff = vec![0.0; k * k];
    for s in 0..k {
        for t in 0..k {
            diff[s * k + t] = (rho_x[s * k + t] - y.dist(psi[s], psi[t])).abs();
        }
    }
    let mut deviation = vec![0.0f64; 1 << k];
    let mut score = 1.0f64;
    for mask in 1usize..(1 << k) {
        let u = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut row_max = 0.0f64;
        let mut probe = mask;
        while probe != 0 {
            let v = probe.trailing_zeros() as usize;
            row_max = row_max.max(diff[u * k + v]);
            probe &= probe - 1;
        }
        deviation[mask] = deviation[rest].max(row_max);
        let shortfall = 1.0 - mask.count_ones() as f64 / k as f64;
        score = score.min(deviation[mask].max(shortfall));
    }
    score
}

/// Certified upper bound max(complement_mass, 2·eps) on the box distance
/// between a space and the projected image of its ε-tube around a totally
/// geodesic locus carrying the restricted ambient distance: inside the tube
/// projected distances move by at most 2ε, and the discarded parameter set
/// has mass at most the tube complement.
pub fn box_bound_via_tube(complement_mass: f64, eps: f64) -> Result<f64, MMDistError> {
    if !(0.0..=1.0).contains(&complement_mass) || !complement_mass.is_finite() {
        return Err(MMDistError::Invalid(format!(
            "complement mass must lie in [0, 1], got {complement_mass}"
        )));
    }
    if !eps.is_finite() || eps < 0.0 {
        return Err(MMDistError::Invalid(format!("eps must be nonnegative, got {eps}")));
    }
    Ok(complement_mass.max(2.0 * eps))
}
