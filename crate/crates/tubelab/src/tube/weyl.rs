//! Closed-form tube volumes in flat and spherical ambients.

use super::{Ambient, TubeError, TubeSpec};
use crate::specfun::{disc_volume, gauss_2f1};

/// Accuracy requested from each hypergeometric factor; the factors are O(1),
/// so the volume inherits roughly this absolute error per curvature term.
const HYP_TOL: f64 = 1e-12;

/// Volume of the tube of radius ε in flat ambient space:
///
/// Vol_M · disc_volume(q, ε) · (1 + Σⱼ κ₂ⱼ ε²ʲ / [(q+2)(q+4)···(q+2j)]).
pub fn weyl_flat_volume(spec: &TubeSpec) -> Result<f64, TubeError> {
    if !matches!(spec.ambient(), Ambient::Flat) {
        return Err(TubeError::Domain("weyl_flat_volume requires a flat ambient".into()));
    }
    let eps_sq = spec.eps() * spec.eps();
    let mut denom = 1.0;
    let mut eps_pow = 1.0;
    let mut correction = 1.0;
    for (i, kappa) in spec.kappas().iter().enumerate() {
        denom *= spec.q() as f64 + 2.0 * (i + 1) as f64;
        eps_pow *= eps_sq;
        correction += kappa * eps_pow / denom;
    }
    Ok(spec.vol_m() * disc_volume(spec.q(), spec.eps())? * correction)
}

/// Mean Lipschitz–Killing curvature κ₂ⱼ of a space form of constant
/// sectional curvature 1/r²:
///
/// n! / (2ʲ j! (n−2j)!) · r^(−2j).
///
/// Evaluated as a running product of the paired factors
/// (n−2i+2)(n−2i+1) / (2 i r²), which keeps intermediates in range for all
/// n ≤ 170-ish rather than forming the factorials.
pub fn constant_curvature_kappa(n: u32, j: u32, r: f64) -> Result<f64, TubeError> {
    if j == 0 || 2 * j > n {
        return Err(TubeError::Domain(format!(
            "constant_curvature_kappa requires 1 <= j <= n/2, got n={n}, j={j}"
        )));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(TubeError::Domain(format!("radius must be positive, got {r}")));
    }
    let mut value = 1.0;
    for i in 1..=j {
        let pair = (n - 2 * i + 2) as f64 * (n - 2 * i + 1) as f64;
        value *= pair / (2.0 * i as f64 * r * r);
    }
    Ok(value)
}

/// Large-n estimate of κ₂ⱼ ε²ʲ for a space form: (1/(2ʲ j!)) (n·ε/r)²ʲ.
///
/// For fixed j the relative deviation from
/// `constant_curvature_kappa(n, j, r) · ε²ʲ` vanishes as n grows.
pub fn stirling_kappa_estimate(n: u32, j: u32, eps_over_r: f64) -> f64 {
    let base = (n as f64 * eps_over_r) * (n as f64 * eps_over_r);
    (1..=j).map(|i| base / (2.0 * i as f64)).product()
}

/// Volume of the tube of radius ε around a submanifold of the round sphere
/// of radius R:
///
/// q·V_q(1) Σ_{j=0}^{⌊n/2⌋} K₂ⱼ R^{2j+q} sin^{q+2j}(ε/R) / [q(q+2)···(q+2j)]
///   · ₂F₁(j−(n−1)/2, j+q/2; j+q/2+1; sin²(ε/R)),
///
/// where V_q(1) is the unit q-disc volume (so q·V_q(1) = 2π^{q/2}/Γ(q/2)),
/// K₀ = Vol_M and K₂ⱼ = κ₂ⱼ·Vol_M with the κ₂ⱼ measured relative to the
/// ambient sphere. As ε/R → 0 this reduces to [`weyl_flat_volume`] with the
/// same coefficients.
pub fn weyl_sphere_volume(spec: &TubeSpec) -> Result<f64, TubeError> {
    let Ambient::Sphere { radius } = *spec.ambient() else {
        return Err(TubeError::Domain("weyl_sphere_volume requires a sphere ambient".into()));
    };
    let qf = spec.q() as f64;
    let nf = spec.n() as f64;
    let s = (spec.eps() / radius).sin();
    let z = s * s;
    let prefactor = qf * disc_volume(spec.q(), 1.0)?;
    let mut denom = qf;
    let mut geom = (radius * s).powi(spec.q() as i32);
    let mut sum = 0.0;
    for j in 0..=(spec.n() / 2) {
        let jf = j as f64;
        let k2j = if j == 0 {
            spec.vol_m()
        } else {
            spec.kappas()[(j - 1) as usize] * spec.vol_m()
        };
        if k2j != 0.0 {
            let hyp = gauss_2f1(jf - (nf - 1.0) / 2.0, jf + qf / 2.0, jf + qf / 2.0 + 1.0, z, HYP_TOL)?;
            sum += k2j * geom / denom * hyp.value;
        }
        geom *= radius * radius * z;
        denom *= qf + 2.0 * (jf + 1.0);
    }
    Ok(prefactor * sum)
}

/// |Vol_sphere / Vol_flat − 1| for a sphere-ambient tube, holding the
/// curvature coefficients fixed across the comparison.
///
/// For a fixed spec shape the value tends to 0 as ε/R does.
pub fn flat_vs_sphere_relative_error(spec: &TubeSpec) -> Result<f64, TubeError> {
    if !matches!(spec.ambient(), Ambient::Sphere { .. }) {
        return Err(TubeError::Domain(
            "flat_vs_sphere_relative_error requires a sphere ambient".into(),
        ));
    }
    let sphere = weyl_sphere_volume(spec)?;
    let flat = weyl_flat_volume(&spec.flattened())?;
    Ok((sphere / flat - 1.0).abs())
}
