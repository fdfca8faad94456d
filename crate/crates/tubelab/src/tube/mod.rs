//! Tube-volume formulas and the curvature data feeding them.
//!
//! The module covers three regimes:
//!
//! * flat ambient space, where the volume of the radius-ε neighborhood of a
//!   closed n-manifold is a polynomial in ε whose coefficients are the mean
//!   Lipschitz–Killing curvatures ([`weyl_flat_volume`], [`lk_density`]);
//! * round spheres, where the same data enters through sine-deformed radii
//!   and a hypergeometric factor ([`weyl_sphere_volume`]);
//! * codimension-one orbits in symmetric ambients, described pointwise by a
//!   spectrum of normal curvatures ([`symmetric_tube_density`],
//!   [`totally_geodesic_density`], [`gaussian_bound`]) and, behind those
//!   closed forms, a matrix Jacobi-field series ([`jacobi_series_eval`]).
//!
//! All operations are pure functions over validated value types; everything
//! here is safe to call from concurrent threads.

use thiserror::Error;

mod curvature;
mod density;
mod jacobi;
mod weyl;

pub use curvature::{lk_density, CurvatureTensor};
pub use density::{
    gaussian_bound, symmetric_tube_density, totally_geodesic_density, SecondFundamentalForm,
    SpectralData,
};
pub use jacobi::{jacobi_series_eval, JacobiSeriesState};
pub use weyl::{
    constant_curvature_kappa, flat_vs_sphere_relative_error, stirling_kappa_estimate,
    weyl_flat_volume, weyl_sphere_volume,
};

use crate::specfun::SpecFunError;

/// Errors reported by the tube-volume routines.
#[derive(Debug, Error)]
pub enum TubeError {
    /// A constructor was handed data violating a type invariant.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Mismatched or unsupported dimensions.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A scalar argument fell outside the supported domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A special-function evaluation failed.
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// The ambient space a tube lives in.
#[derive(Debug, Clone, PartialEq)]
pub enum Ambient {
    /// Euclidean space of dimension n + q.
    Flat,
    /// Round sphere of the given radius.
    Sphere { radius: f64 },
    /// Codimension-one orbit in a symmetric space, described by the
    /// spectrum of its normal curvature matrix and the largest parameter
    /// the normal exponential map is trusted up to.
    SymmetricCodim1 { spectrum: SpectralData, t_max: f64 },
}

/// A tube around a closed submanifold: ambient geometry, dimensions, radius,
/// total volume, and the mean Lipschitz–Killing curvatures κ₂ⱼ for
/// j = 1..⌊n/2⌋.
///
/// For a sphere ambient the κ₂ⱼ are understood relative to the ambient
/// sphere (they vanish for totally geodesic equators); in the flat case they
/// are the intrinsic curvature integrals divided by the volume.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpec {
    ambient: Ambient,
    n: u32,
    q: u32,
    eps: f64,
    vol_m: f64,
    kappas: Vec<f64>,
}

impl TubeSpec {
    /// Validates and builds a tube description.
    ///
    /// Requires n, q ≥ 1, a positive finite radius and volume, exactly
    /// ⌊n/2⌋ curvature entries, and for a sphere ambient ε < (π/2)·R.
    /// A symmetric ambient must carry a spectrum of length n, codimension
    /// one, and ε ≤ t_max.
    pub fn new(
        ambient: Ambient,
        n: u32,
        q: u32,
        eps: f64,
        vol_m: f64,
        kappas: Vec<f64>,
    ) -> Result<Self, TubeError> {
        if n == 0 || q == 0 {
            return Err(TubeError::Invalid(format!(
                "dimensions must be positive, got n={n}, q={q}"
            )));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(TubeError::Invalid(format!("tube radius must be positive, got {eps}")));
        }
        if !(vol_m > 0.0) || !vol_m.is_finite() {
            return Err(TubeError::Invalid(format!("volume must be positive, got {vol_m}")));
        }
        let want = (n / 2) as usize;
        if kappas.len() != want {
            return Err(TubeError::Invalid(format!(
                "expected {want} curvature coefficients for n={n}, got {}",
                kappas.len()
            )));
        }
        if kappas.iter().any(|k| !k.is_finite()) {
            return Err(TubeError::Invalid("curvature coefficients must be finite".into()));
        }
        match &ambient {
            Ambient::Flat => {}
            Ambient::Sphere { radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(TubeError::Invalid(format!(
                        "sphere radius must be positive, got {radius}"
                    )));
                }
                if eps >= std::f64::consts::FRAC_PI_2 * radius {
                    return Err(TubeError::Invalid(format!(
                        "tube radius {eps} must stay below (pi/2) * {radius}"
                    )));
                }
            }
            Ambient::SymmetricCodim1 { spectrum, t_max } => {
                if spectrum.dim() != n as usize {
                    return Err(TubeError::Dimension(format!(
                        "spectrum has length {}, expected n={n}",
                        spectrum.dim()
                    )));
                }
                if q != 1 {
                    return Err(TubeError::Invalid(format!(
                        "symmetric ambient is codimension one, got q={q}"
                    )));
                }
                if !(*t_max > 0.0) || eps > *t_max {
                    return Err(TubeError::Invalid(format!(
                        "radius {eps} exceeds the trusted range t_max={t_max}"
                    )));
                }
            }
        }
        Ok(Self { ambient, n, q, eps, vol_m, kappas })
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    /// Submanifold dimension.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Codimension.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Tube radius.
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Total volume of the submanifold.
    pub fn vol_m(&self) -> f64 {
        self.vol_m
    }

    /// Mean Lipschitz–Killing curvatures κ₂, κ₄, …, κ_{2⌊n/2⌋}.
    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    /// Same tube data with the ambient replaced by flat space.
    pub fn flattened(&self) -> Self {
        Self { ambient: Ambient::Flat, ..self.clone() }
    }
}
