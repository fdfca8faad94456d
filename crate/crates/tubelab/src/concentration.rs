//! Concentration of measure around codimension-one loci.
//!
//! A family of spaces indexed by dimension concentrates around a locus when
//! the normalized measure outside the ε-tube vanishes as the dimension grows
//! along a shrinking radius schedule. This module provides
//!
//! * analytic complement measures for sphere equators
//!   ([`equator_complement_measure`]) and quadrature-based ones for general
//!   codimension-one spectra ([`symmetric_complement_measure`]);
//! * a Gaussian-type upper bound on the complement driven by a linear Ricci
//!   model Ric = (a·n + b)·g ([`complement_upper_bound`]);
//! * [`scan_concentration`], which walks a dimension range with a radius
//!   schedule, classifies the family as `locus` / `not_locus` /
//!   `inconclusive`, and fits the decay rate of the schedule.
//!
//! A finite scan cannot certify a limit; the locus verdict means the tail of
//! the scan sits below the tolerance and keeps decreasing, and the not-locus
//! verdict means the tail has stabilized at a positive level for the given
//! schedule. Everything else is reported as inconclusive.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad::{integrate, QuadError};
use crate::specfun::{reg_inc_beta, SpecFunError};
use crate::tube::SpectralData;

/// Absolute tolerance for each quadrature behind the complement measures;
/// the ratio of two integrals then lands within the documented 1e-10.
const QUAD_TOL: f64 = 1e-11;

/// Slack for floating-point comparisons against domain edges.
const EDGE_SLACK: f64 = 1e-12;

/// Errors reported by the concentration routines.
#[derive(Debug, Error)]
pub enum ConcentrationError {
    /// A scalar argument fell outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A constructor was handed data violating a type invariant.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Quadrature failure inside a complement measure.
    #[error(transparent)]
    Quad(#[from] QuadError),
    /// Special-function failure inside a complement measure.
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    /// Result serialization failed.
    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// Linear Ricci model Ric = (a·n + b)·g with a > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicciModel {
    a: f64,
    b: f64,
}

impl RicciModel {
    pub fn new(a: f64, b: f64) -> Result<Self, ConcentrationError> {
        if !(a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(ConcentrationError::Invalid(format!(
                "ricci model needs a > 0 and finite b, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Curvature scale a·n + b at dimension n.
    pub fn scale(&self, n: u32) -> f64 {
        self.a * n as f64 + self.b
    }
}

/// Normalized measure of the part of the unit sphere Sⁿ at distance more
/// than `eps` from its equator S^{n−1}:
///
/// ∫_ε^{π/2} cos^{n−1}t dt / ∫_0^{π/2} cos^{n−1}t dt
///   = 1 − I_{sin²ε}(1/2, n/2),
///
/// evaluated through the regularized incomplete beta function.
pub fn equator_complement_measure(n: u32, eps: f64) -> Result<f64, ConcentrationError> {
    if n < 2 {
        return Err(ConcentrationError::Domain(format!(
            "equator complement needs ambient dimension n >= 2, got {n}"
        )));
    }
    if !eps.is_finite() || eps < 0.0 || eps > FRAC_PI_2 {
        return Err(ConcentrationError::Domain(format!(
            "equator complement needs eps in [0, pi/2], got {eps}"
        )));
    }
    if eps == 0.0 {
        return Ok(1.0);
    }
    let z = eps.sin() * eps.sin();
    Ok(1.0 - reg_inc_beta(0.5, n as f64 / 2.0, z)?)
}

/// Normalized complement mass of the ε-tube around a codimension-one locus
/// with normal curvature spectrum dₐ:
///
/// ∫_ε^{t_max} ∏cos(dₐ t) dt / ∫_0^{t_max} ∏cos(dₐ t) dt,
///
/// by adaptive quadrature with absolute tolerance 1e-10 on the ratio. The
/// window must satisfy 0 ≤ eps ≤ t_max ≤ π/(2·max dₐ), where the density is
/// nonnegative.
pub fn symmetric_complement_measure(
    spectrum: &SpectralData,
    eps: f64,
    t_max: f64,
) -> Result<f64, ConcentrationError> {
    let max_d = spectrum.max_eigenvalue();
    let window = if max_d > 0.0 { FRAC_PI_2 / max_d } else { f64::INFINITY };
    if !(t_max > 0.0) || t_max > window * (1.0 + EDGE_SLACK) {
        return Err(ConcentrationError::Domain(format!(
            "t_max must lie in (0, {window}], got {t_max}"
        )));
    }
    if !eps.is_finite() || eps < 0.0 || eps > t_max {
        return Err(ConcentrationError::Domain(format!(
            "eps must lie in [0, t_max={t_max}], got {eps}"
        )));
    }
    let density = |t: f64| {
        spectrum
            .eigenvalues()
            .iter()
            .map(|&d| (d * t).cos())
            .product::<f64>()
    };
    let total = integrate(density, 0.0, t_max, QUAD_TOL)?.value;
    let outside = integrate(density, eps, t_max, QUAD_TOL)?.value;
    Ok(outside / total)
}

/// Upper bound on the complement mass at tube radius `eps` in dimension `n`
/// under the Ricci model: with s = a·n + b and the model spectrum
/// dₐ ≡ √(s/n) on the window T = π/(2√(s/n)),
///
/// min(1, (T − eps) · exp(−eps²·s/2) / ∫₀^T cosⁿ(√(s/n)·t) dt).
///
/// The numerator dominates ∫_ε^T of the density pointwise via
/// cos x ≤ e^(−x²/2), so the value dominates
/// [`symmetric_complement_measure`] for spectra with Σdₐ² = s.
pub fn complement_upper_bound(
    n: u32,
    eps: f64,
    model: RicciModel,
) -> Result<f64, ConcentrationError> {
    if n == 0 {
        return Err(ConcentrationError::Domain("dimension must be positive".into()));
    }
    let s = model.scale(n);
    if s <= 0.0 {
        return Err(ConcentrationError::Domain(format!(
            "ricci scale a*n + b must be positive, got {s} at n={n}"
        )));
    }
    if !eps.is_finite() || eps < 0.0 {
        return Err(ConcentrationError::Domain(format!("eps must be >= 0, got {eps}")));
    }
    let d = (s / n as f64).sqrt();
    let t_total = FRAC_PI_2 / d;
    if eps >= t_total {
        return Ok(0.0);
    }
    let normalizer = integrate(|t| (d * t).cos().powi(n as i32), 0.0, t_total, QUAD_TOL)?.value;
    let bound = (t_total - eps) * (-eps * eps * s / 2.0).exp() / normalizer;
    Ok(bound.min(1.0))
}

type ComplementFn = Box<dyn Fn(u32, f64) -> Result<f64, ConcentrationError> + Send + Sync>;

/// A dimension-indexed family of spaces, each carrying a distinguished
/// locus, described by its complement-measure function, a linear Ricci
/// model, and the largest distance to the locus.
pub struct ConcentrationFamily {
    label: String,
    complement: ComplementFn,
    ricci_model: RicciModel,
    diameter: f64,
}

impl ConcentrationFamily {
    /// Dimensions probed by the constructor to spot-check the invariants.
    const PROBE_DIMS: [u32; 2] = [2, 7];

    /// Builds a family after spot-checking the complement function: at the
    /// probe dimensions it must be nonincreasing in eps on a grid, at most
    /// one at eps = 0, and vanish at the diameter. The function must accept
    /// every dimension n ≥ 2.
    pub fn new(
        label: impl Into<String>,
        complement: ComplementFn,
        ricci_model: RicciModel,
        diameter: f64,
    ) -> Result<Self, ConcentrationError> {
        if !(diameter > 0.0) || !diameter.is_finite() {
            return Err(ConcentrationError::Invalid(format!(
                "diameter must be positive, got {diameter}"
            )));
        }
        for &n in &Self::PROBE_DIMS {
            let mut prev = f64::INFINITY;
            for i in 0..=4 {
                let eps = diameter * i as f64 / 4.0;
                let value = complement(n, eps)?;
                if !(0.0..=1.0 + EDGE_SLACK).contains(&value) {
                    return Err(ConcentrationError::Invalid(format!(
                        "complement({n}, {eps}) = {value} is not a probability mass"
                    )));
                }
                if value > prev + 1e-9 {
                    return Err(ConcentrationError::Invalid(format!(
                        "complement({n}, ·) increases at eps = {eps}"
                    )));
                }
                prev = value;
            }
            let at_diameter = complement(n, diameter)?;
            if at_diameter > 1e-9 {
                return Err(ConcentrationError::Invalid(format!(
                    "complement({n}, diameter) = {at_diameter}, expected 0"
                )));
            }
        }
        Ok(Self { label: label.into(), complement, ricci_model, diameter })
    }

    /// Unit spheres Sⁿ with their equators S^{n−1} as loci: analytic
    /// complement, Ricci scale n − 1, and covering radius π/2.
    pub fn equators() -> Self {
        let complement: ComplementFn =
            Box::new(|n, eps| equator_complement_measure(n, eps.clamp(0.0, FRAC_PI_2)));
        Self::new(
            "sphere-equators",
            complement,
            RicciModel::new(1.0, -1.0).expect("static model"),
            FRAC_PI_2,
        )
        .expect("the equator family satisfies the invariants")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn ricci_model(&self) -> RicciModel {
        self.ricci_model
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Complement mass at dimension n and tube radius eps.
    pub fn complement(&self, n: u32, eps: f64) -> Result<f64, ConcentrationError> {
        (self.complement)(n, eps)
    }
}

impl std::fmt::Debug for ConcentrationFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConcentrationFamily")
            .field("label", &self.label)
            .field("ricci_model", &self.ricci_model)
            .field("diameter", &self.diameter)
            .finish_non_exhaustive()
    }
}

type ScheduleFn = Box<dyn Fn(u32) -> f64 + Send + Sync>;

/// Tube-radius schedule n ↦ εₙ, optionally carrying the rate the caller
/// claims for it (εₙ ≈ c·n^(−k)).
pub struct EpsSchedule {
    values: ScheduleFn,
    claimed_rate: Option<f64>,
}

impl EpsSchedule {
    pub fn new(values: ScheduleFn, claimed_rate: Option<f64>) -> Self {
        Self { values, claimed_rate }
    }

    /// Power schedule εₙ = c·n^(−k) with c > 0 and k ≥ 0.
    pub fn power(c: f64, k: f64) -> Result<Self, ConcentrationError> {
        if !(c > 0.0) || !c.is_finite() || !(k >= 0.0) || !k.is_finite() {
            return Err(ConcentrationError::Invalid(format!(
                "power schedule needs c > 0 and k >= 0, got c={c}, k={k}"
            )));
        }
        Ok(Self::new(Box::new(move |n| c * (n as f64).powf(-k)), Some(k)))
    }

    /// Constant schedule εₙ = eps0 > 0 (rate 0).
    pub fn constant(eps0: f64) -> Result<Self, ConcentrationError> {
        if !(eps0 > 0.0) || !eps0.is_finite() {
            return Err(ConcentrationError::Invalid(format!(
                "constant schedule needs eps0 > 0, got {eps0}"
            )));
        }
        Ok(Self::new(Box::new(move |_| eps0), Some(0.0)))
    }

    pub fn value(&self, n: u32) -> f64 {
        (self.values)(n)
    }

    pub fn claimed_rate(&self) -> Option<f64> {
        self.claimed_rate
    }
}

impl std::fmt::Debug for EpsSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EpsSchedule")
            .field("claimed_rate", &self.claimed_rate)
            .finish_non_exhaustive()
    }
}

/// Scan classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Locus,
    NotLocus,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Locus => "locus",
            Verdict::NotLocus => "not_locus",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// One scan row: dimension, tube radius, complement mass, and the Ricci
/// upper bound at those parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: u32,
    pub eps: f64,
    pub complement: f64,
    pub bound: f64,
}

/// Least-squares fit of log εₙ = −k·log n + log c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub k: f64,
    pub c: f64,
    pub r2: f64,
}

/// Outcome of a concentration scan: rows ordered by dimension, the verdict,
/// and the fitted schedule rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub label: String,
    pub rows: Vec<ScanRow>,
    pub verdict: Verdict,
    pub rate: Option<RateEstimate>,
}

impl ScanResult {
    /// JSON document with fields label, rows[{n, eps, complement, bound}],
    /// verdict, rate{k, c, r2}.
    pub fn to_json(&self) -> Result<String, ConcentrationError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ConcentrationError> {
        Ok(serde_json::from_str(text)?)
    }

    /// CSV table with header `n,eps,complement,bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,eps,complement,bound\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", row.n, row.eps, row.complement, row.bound));
        }
        out
    }
}

/// Walks the dimension range with the schedule, evaluating the family's
/// complement mass and the Ricci upper bound at each row (rows are
/// independent and evaluated in parallel, output ordered by n).
///
/// Verdict rules over the tail (latter half) of the scan:
/// * `locus` when every tail complement sits below `tol` and the tail is
///   nonincreasing;
/// * `not_locus` when the tail mean exceeds `tol` and the tail has
///   stabilized (spread within 10% of the mean), i.e. the masses are
///   bounded below by a positive constant for this schedule;
/// * `inconclusive` otherwise.
///
/// The rate estimate is a least-squares fit of log εₙ against log n; an
/// exactly constant schedule reports r² = 1 by convention.
pub fn scan_concentration(
    family: &ConcentrationFamily,
    schedule: &EpsSchedule,
    n_range: &[u32],
    tol: f64,
) -> Result<ScanResult, ConcentrationError> {
    if n_range.is_empty() {
        return Err(ConcentrationError::Invalid("scan range must be nonempty".into()));
    }
    if n_range.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConcentrationError::Invalid("scan range must be strictly increasing".into()));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(ConcentrationError::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let radii: Vec<f64> = n_range.iter().map(|&n| schedule.value(n)).collect();
    if radii.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
        return Err(ConcentrationError::Invalid("schedule must produce positive radii".into()));
    }
    if radii.windows(2).any(|w| w[1] > w[0] * (1.0 + EDGE_SLACK)) {
        return Err(ConcentrationError::Invalid(
            "schedule must be nonincreasing over the scan range".into(),
        ));
    }

    let rows: Vec<ScanRow> = n_range
        .par_iter()
        .zip(radii.par_iter())
        .map(|(&n, &eps)| {
            let complement = family.complement(n, eps)?;
            let bound = complement_upper_bound(n, eps, family.ricci_model())?;
            Ok(ScanRow { n, eps, complement, bound })
        })
        .collect::<Result<_, ConcentrationError>>()?;

    let complements: Vec<f64> = rows.iter().map(|r| r.complement).collect();
    let tail = &complements[complements.len() / 2..];
    let below_tol = tail.iter().all(|&c| c < tol);
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0] + EDGE_SLACK);
    let verdict = if below_tol && nonincreasing {
        Verdict::Locus
    } else {
        let mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let min = tail.iter().fold(f64::INFINITY, |m, &c| m.min(c));
        let max = tail.iter().fold(f64::NEG_INFINITY, |m, &c| m.max(c));
        if mean > tol && max - min <= 0.1 * mean {
            Verdict::NotLocus
        } else {
            Verdict::Inconclusive
        }
    };

    let rate = fit_rate(n_range, &radii);
    Ok(ScanResult { label: family.label().to_string(), rows, verdict, rate })
}

/// Least-squares fit of log εₙ = −k log n + log c, with r².
fn fit_rate(n_range: &[u32], radii: &[f64]) -> Option<RateEstimate> {
    if n_range.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = n_range.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = radii.iter().map(|&e| e.ln()).collect();
    let len = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / len;
    let y_mean = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    let r2 = if ss_tot < 1e-30 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(RateEstimate { k: -slope, c: intercept.exp(), r2 })
}
