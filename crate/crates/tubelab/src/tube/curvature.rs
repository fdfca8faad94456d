//! Pointwise curvature tensors and their Lipschitz–Killing densities.

use itertools::Itertools;

use super::TubeError;

const SYMMETRY_TOL: f64 = 1e-12;

/// Largest dimension accepted by [`lk_density`]; the sum over index
/// matchings grows combinatorially and this module is a verification
/// surface, not a production path.
pub const LK_MAX_DIM: usize = 8;

/// Riemann curvature components R_{abcd} at a point, in an orthonormal
/// frame, stored densely with all four indices.
///
/// Sign convention: a space form of sectional curvature κ has
/// R_{abab} = κ for a ≠ b, so the scalar curvature is Σ_{a,b} R_{abab}.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    components: Vec<f64>,
}

impl CurvatureTensor {
    /// Validates the algebraic curvature identities (antisymmetry in each
    /// index pair, symmetry under pair exchange, first Bianchi identity)
    /// to 1e-12 and builds the tensor. `components` is indexed by
    /// ((a·n + b)·n + c)·n + d.
    pub fn new(dim: usize, components: Vec<f64>) -> Result<Self, TubeError> {
        if dim == 0 {
            return Err(TubeError::Dimension("curvature tensor needs dimension >= 1".into()));
        }
        if components.len() != dim.pow(4) {
            return Err(TubeError::Dimension(format!(
                "expected {} components for dimension {dim}, got {}",
                dim.pow(4),
                components.len()
            )));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(TubeError::Invalid("curvature components must be finite".into()));
        }
        let tensor = Self { dim, components };
        let scale = 1.0 + tensor.components.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for (a, b, c, d) in (0..dim).cartesian_product(0..dim).cartesian_product(0..dim).cartesian_product(0..dim).map(|(((a, b), c), d)| (a, b, c, d)) {
            let r = tensor.get(a, b, c, d);
            if (r + tensor.get(b, a, c, d)).abs() > SYMMETRY_TOL * scale {
                return Err(TubeError::Invalid(format!(
                    "antisymmetry in the first pair fails at ({a},{b},{c},{d})"
                )));
            }
            if (r + tensor.get(a, b, d, c)).abs() > SYMMETRY_TOL * scale {
                return Err(TubeError::Invalid(format!(
                    "antisymmetry in the second pair fails at ({a},{b},{c},{d})"
                )));
            }
            if (r - tensor.get(c, d, a, b)).abs() > SYMMETRY_TOL * scale {
                return Err(TubeError::Invalid(format!(
                    "pair-exchange symmetry fails at ({a},{b},{c},{d})"
                )));
            }
            let bianchi = r + tensor.get(a, c, d, b) + tensor.get(a, d, b, c);
            if bianchi.abs() > SYMMETRY_TOL * scale {
                return Err(TubeError::Invalid(format!(
                    "first Bianchi identity fails at ({a},{b},{c},{d})"
                )));
            }
        }
        Ok(tensor)
    }

    /// Curvature tensor of a space form: R_{abcd} = κ(δ_ac δ_bd − δ_ad δ_bc).
    pub fn constant_curvature(dim: usize, kappa: f64) -> Self {
        let mut components = vec![0.0; dim.pow(4)];
        for a in 0..dim {
            for b in 0..dim {
                components[((a * dim + b) * dim + a) * dim + b] = kappa;
                components[((a * dim + b) * dim + b) * dim + a] = -kappa;
            }
        }
        for a in 0..dim {
            components[((a * dim + a) * dim + a) * dim + a] = 0.0;
        }
        Self { dim, components }
    }

    /// Curvature of Gauss type induced by a symmetric matrix h (row-major):
    /// R_{abcd} = h_ac h_bd − h_ad h_bc. Satisfies all algebraic identities,
    /// so it doubles as a generator of valid random tensors.
    pub fn from_gauss_form(dim: usize, h: &[f64]) -> Result<Self, TubeError> {
        if h.len() != dim * dim {
            return Err(TubeError::Dimension(format!(
                "expected a {dim}x{dim} matrix, got {} entries",
                h.len()
            )));
        }
        for a in 0..dim {
            for b in 0..dim {
                if (h[a * dim + b] - h[b * dim + a]).abs() > SYMMETRY_TOL {
                    return Err(TubeError::Invalid("generating matrix must be symmetric".into()));
                }
            }
        }
        let mut components = vec![0.0; dim.pow(4)];
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    for d in 0..dim {
                        components[((a * dim + b) * dim + c) * dim + d] =
                            h[a * dim + c] * h[b * dim + d] - h[a * dim + d] * h[b * dim + c];
                    }
                }
            }
        }
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.components[((a * self.dim + b) * self.dim + c) * self.dim + d]
    }

    /// Scalar curvature Σ_{a,b} R_{abab}.
    pub fn scalar_curvature(&self) -> f64 {
        let n = self.dim;
        (0..n).cartesian_product(0..n).map(|(a, b)| self.get(a, b, a, b)).sum()
    }
}

/// Density of the 2j-th Lipschitz–Killing curvature against the volume form:
///
/// k₂ⱼ = (1/(2²ʲ j!)) Σ_{|S|=2j} Σ_{hσ,hρ} ε(hσ) ε(hρ)
///         ∏ᵢ R_{hσ(2i−1) hσ(2i) hρ(2i−1) hρ(2i)},
///
/// the two inner sums running over ordered arrangements of the index set S.
/// Using the antisymmetries, each arrangement sum collapses onto perfect
/// matchings of S, leaving a permanent over pair–pair curvatures; that is
/// what is evaluated here. k₀ = 1, k₂ is half the scalar curvature, and for
/// 2j = n the sum is the Pfaffian-type top density.
pub fn lk_density(omega: &CurvatureTensor, j: u32) -> Result<f64, TubeError> {
    let n = omega.dim();
    if n > LK_MAX_DIM {
        return Err(TubeError::Dimension(format!(
            "lk_density enumerates matchings, supported up to dimension {LK_MAX_DIM}, got {n}"
        )));
    }
    let j = j as usize;
    if 2 * j > n {
        return Err(TubeError::Dimension(format!("2j = {} exceeds dimension {n}", 2 * j)));
    }
    if j == 0 {
        return Ok(1.0);
    }
    let mut total = 0.0;
    let mut slots = vec![false; 2 * j];
    for subset in (0..n).combinations(2 * j) {
        let matchings = signed_matchings(&subset);
        for (pairs_l, sign_l) in &matchings {
            for (pairs_r, sign_r) in &matchings {
                total += sign_l * sign_r * matching_permanent(omega, pairs_l, pairs_r, &mut slots);
            }
        }
    }
    Ok(total)
}

/// All perfect matchings of the (sorted) index set, each with the sign of
/// the flattened arrangement (p₁ q₁ p₂ q₂ …) relative to sorted order.
fn signed_matchings(indices: &[usize]) -> Vec<(Vec<(usize, usize)>, f64)> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(indices.len() / 2);
    matchings_rec(indices, &mut current, &mut out);
    out
}

fn matchings_rec(
    rest: &[usize],
    current: &mut Vec<(usize, usize)>,
    out: &mut Vec<(Vec<(usize, usize)>, f64)>,
) {
    if rest.is_empty() {
        let flat: Vec<usize> = current.iter().flat_map(|&(p, q)| [p, q]).collect();
        out.push((current.clone(), arrangement_sign(&flat)));
        return;
    }
    let first = rest[0];
    for k in 1..rest.len() {
        let mut remaining = Vec::with_capacity(rest.len() - 2);
        remaining.extend_from_slice(&rest[1..k]);
        remaining.extend_from_slice(&rest[k + 1..]);
        current.push((first, rest[k]));
        matchings_rec(&remaining, current, out);
        current.pop();
    }
}

/// Sign of the permutation carrying the sorted order of `flat` onto `flat`.
fn arrangement_sign(flat: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..flat.len() {
        for k in i + 1..flat.len() {
            if flat[i] > flat[k] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Permanent of the j×j matrix M_{ik} = R_{pᵢ qₖ} over assignments of
/// right pairs to left pairs, expanded by rows with a used-column mask.
fn matching_permanent(
    omega: &CurvatureTensor,
    left: &[(usize, usize)],
    right: &[(usize, usize)],
    used: &mut [bool],
) -> f64 {
    fn expand(
        omega: &CurvatureTensor,
        left: &[(usize, usize)],
        right: &[(usize, usize)],
        used: &mut [bool],
        row: usize,
    ) -> f64 {
        if row == left.len() {
            return 1.0;
        }
        let (a, b) = left[row];
        let mut acc = 0.0;
        for (k, &(c, d)) in right.iter().enumerate() {
            if used[k] {
                continue;
            }
            let r = omega.get(a, b, c, d);
            if r != 0.0 {
                used[k] = true;
                acc += r * expand(omega, left, right, used, row + 1);
                used[k] = false;
            }
        }
        acc
    }
    used[..left.len()].fill(false);
    expand(omega, left, right, used, 0)
}
