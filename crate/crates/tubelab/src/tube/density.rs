//! Radial tube densities for codimension-one orbits: the exact determinant
//! form, the totally geodesic product of cosines, and its Gaussian majorant.

use nalgebra::DMatrix;

use super::TubeError;

const SYMMETRY_TOL: f64 = 1e-12;

/// Slack applied to the π/2 domain edge of [`gaussian_bound`] so that
/// parameters computed as π/(2·max dₐ) survive rounding.
const DOMAIN_SLACK: f64 = 1e-12;

/// Eigenvalues dₐ ≥ 0 of the normal curvature matrix of an orbit, one per
/// tangent direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    d: Vec<f64>,
}

impl SpectralData {
    /// Validates nonnegative finite eigenvalues; the list length is the
    /// orbit dimension and must be positive.
    pub fn new(d: Vec<f64>) -> Result<Self, TubeError> {
        if d.is_empty() {
            return Err(TubeError::Dimension("spectrum must have positive length".into()));
        }
        if d.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(TubeError::Invalid(format!("eigenvalues must be >= 0, got {d:?}")));
        }
        Ok(Self { d })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.d.iter().fold(0.0, |m, &x| m.max(x))
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.d.iter().map(|x| x * x).sum()
    }
}

/// Second fundamental form data of an embedding of codimension q: the q
/// symmetric shape matrices Kˢ in the spectral frame together with director
/// cosines ωˢ of unit norm selecting a normal direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondFundamentalForm {
    k: Vec<DMatrix<f64>>,
    omega: Vec<f64>,
}

impl SecondFundamentalForm {
    /// Validates one square symmetric matrix per codirection (to 1e-12),
    /// all of one size, and Σ(ωˢ)² = 1 to 1e-12.
    pub fn new(k: Vec<DMatrix<f64>>, omega: Vec<f64>) -> Result<Self, TubeError> {
        if k.is_empty() || k.len() != omega.len() {
            return Err(TubeError::Dimension(format!(
                "need one shape matrix per director cosine, got {} and {}",
                k.len(),
                omega.len()
            )));
        }
        let n = k[0].nrows();
        for m in &k {
            if m.nrows() != n || m.ncols() != n {
                return Err(TubeError::Dimension("shape matrices must be square of one size".into()));
            }
            for a in 0..n {
                for b in 0..a {
                    if (m[(a, b)] - m[(b, a)]).abs() > SYMMETRY_TOL {
                        return Err(TubeError::Invalid(format!(
                            "shape matrix asymmetric at ({a},{b})"
                        )));
                    }
                }
            }
        }
        let norm_sq: f64 = omega.iter().map(|w| w * w).sum();
        if (norm_sq - 1.0).abs() > SYMMETRY_TOL {
            return Err(TubeError::Invalid(format!(
                "director cosines must have unit norm, got |omega|^2 = {norm_sq}"
            )));
        }
        Ok(Self { k, omega })
    }

    /// The zero form in codimension q and dimension n, with the director
    /// pointing along the first normal axis.
    pub fn zero(q: usize, n: usize) -> Self {
        let mut omega = vec![0.0; q.max(1)];
        omega[0] = 1.0;
        Self { k: vec![DMatrix::zeros(n, n); q.max(1)], omega }
    }

    pub fn codimension(&self) -> usize {
        self.k.len()
    }

    pub fn dim(&self) -> usize {
        self.k[0].nrows()
    }

    /// Direction-weighted shape operator Σₛ ωˢ Kˢ.
    pub fn weighted_sum(&self) -> DMatrix<f64> {
        let n = self.dim();
        self.k
            .iter()
            .zip(&self.omega)
            .fold(DMatrix::zeros(n, n), |acc, (m, &w)| acc + m * w)
    }
}

/// Exact radial density of the tube at parameter t:
///
/// det( cos(√A t) + sin(√A t)/√A · Σₛ ωˢ Kˢ ),
///
/// with A diagonal in the supplied frame (entries dₐ²) and sin(dt)/d read as
/// its limit t at d = 0. A vanishing form reduces this to the plain product
/// of cosines of [`totally_geodesic_density`].
pub fn symmetric_tube_density(
    spectrum: &SpectralData,
    sff: &SecondFundamentalForm,
    t: f64,
) -> Result<f64, TubeError> {
    let n = spectrum.dim();
    if sff.dim() != n {
        return Err(TubeError::Dimension(format!(
            "spectrum has dimension {n} but shape matrices are {}x{}",
            sff.dim(),
            sff.dim()
        )));
    }
    let weighted = sff.weighted_sum();
    if weighted.iter().all(|&x| x == 0.0) {
        return Ok(totally_geodesic_density(spectrum, t));
    }
    let mut m = DMatrix::zeros(n, n);
    for (a, &d) in spectrum.eigenvalues().iter().enumerate() {
        let (cos_a, sinc_a) = if d == 0.0 { (1.0, t) } else { ((d * t).cos(), (d * t).sin() / d) };
        for b in 0..n {
            m[(a, b)] = sinc_a * weighted[(a, b)];
        }
        m[(a, a)] += cos_a;
    }
    Ok(m.determinant())
}

/// Density of the tube around a totally geodesic orbit: ∏ₐ cos(dₐ t).
pub fn totally_geodesic_density(spectrum: &SpectralData, t: f64) -> f64 {
    spectrum.eigenvalues().iter().map(|&d| (d * t).cos()).product()
}

/// Gaussian majorant exp(−t²·Σₐ dₐ²/2) of the totally geodesic density,
/// valid while every dₐ·t stays in [0, π/2] (where the cosines are
/// nonnegative and each factor obeys cos x ≤ e^(−x²/2)).
pub fn gaussian_bound(spectrum: &SpectralData, t: f64) -> Result<f64, TubeError> {
    for &d in spectrum.eigenvalues() {
        let x = d * t;
        if x < -DOMAIN_SLACK || x > std::f64::consts::FRAC_PI_2 + DOMAIN_SLACK {
            return Err(TubeError::Domain(format!(
                "gaussian_bound needs d*t in [0, pi/2], got {x}"
            )));
        }
    }
    Ok((-t * t * spectrum.sum_of_squares() / 2.0).exp())
}
