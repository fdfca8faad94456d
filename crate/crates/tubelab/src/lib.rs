//! Tube volumes around submanifolds, concentration-of-measure scans, and
//! metric-measure distances on finite spaces.
//!
//! The crate is organized around five building blocks:
//!
//! * [`specfun`] — scalar special functions (`ln Γ`, regularized incomplete
//!   beta, Gauss hypergeometric series, disc volumes) with explicit error
//!   reporting.
//! * [`tube`] — exact tube-volume formulas in flat and spherical ambients,
//!   Lipschitz–Killing curvature densities, and normal-Jacobi-field tube
//!   densities for codimension-one symmetric instances.
//! * [`concentration`] — complement measures of tubular neighborhoods,
//!   Gaussian-type upper bounds, and scans that classify a family of spaces
//!   as concentrating (or not) along a shrinking-radius schedule.
//! * [`sphere_lab`] — reproducible Monte Carlo sampling on high-dimensional
//!   spheres with nearest-point projection to the equator.
//! * [`mmdist`] — exact 1-Wasserstein transport with a dual certificate,
//!   a box-type parametrization distance on finite metric-measure spaces,
//!   and an audit tying the two to tube complements.
//!
//! Shared adaptive quadrature lives in [`quad`].

pub use nalgebra;

pub mod concentration;
pub mod mmdist;
pub mod quad;
pub mod specfun;
pub mod sphere_lab;
pub mod tube;
