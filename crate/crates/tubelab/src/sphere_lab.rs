//! Monte Carlo laboratory on the unit sphere Sⁿ.
//!
//! Provides seeded uniform sampling, geodesic distances, geodesic projection
//! onto the equator (the hyperplane section x_last = 0), and empirical
//! complement-of-tube measures that cross-validate the analytic
//! concentration routines.
//!
//! Sampling is deterministic for a fixed `(n, count, seed)` triple and
//! independent of the number of worker threads: points are generated in
//! fixed blocks of [`STREAM_BLOCK`] draws, each block on its own counter
//! stream of a seeded ChaCha generator.

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

/// Points per RNG stream; the block partition fixes the sample layout
/// regardless of thread count.
pub const STREAM_BLOCK: usize = 4096;

/// Cap on the total number of stored floats, count·(n+2); keeps a single
/// cloud under roughly half a gigabyte.
pub const SAMPLE_VALUE_CAP: usize = 1 << 26;

/// Unit-norm tolerance accepted by distance and projection routines.
const NORM_TOL: f64 = 1e-9;

/// Head norm below which a point counts as a pole (focal point of the
/// equator projection).
const FOCAL_TOL: f64 = 1e-12;

/// Errors reported by the sphere laboratory.
#[derive(Debug, Error)]
pub enum SphereLabError {
    /// A constructor or operation was handed malformed input.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A vector argument was not on the unit sphere.
    #[error("vector norm {norm} is not 1 within 1e-9")]
    NormViolation { norm: f64 },
    /// The requested sample would exceed the configured memory cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// CSV import failure.
    #[error("csv parse error: {0}")]
    Parse(String),
}

/// A seeded uniform sample on Sⁿ with per-point signed colatitudes
/// (arcsin of the last coordinate, the signed distance to the equator).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCloud {
    n: u32,
    seed: u64,
    points: Vec<f64>,
    colatitudes: Vec<f64>,
}

impl SampleCloud {
    /// Sphere dimension n (points live in n+1 coordinates).
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of sample points.
    pub fn len(&self) -> usize {
        self.colatitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colatitudes.is_empty()
    }

    /// Seed the cloud was generated from (0 for imported clouds).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let dim = self.n as usize + 1;
        &self.points[i * dim..(i + 1) * dim]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.n as usize + 1)
    }

    /// Signed colatitudes in [−π/2, π/2], one per point.
    pub fn colatitudes(&self) -> &[f64] {
        &self.colatitudes
    }

    /// CSV table with header `x0,...,xn,colatitude`, one row per point.
    pub fn to_csv(&self) -> String {
        let dim = self.n as usize + 1;
        let mut out = String::new();
        for i in 0..dim {
            out.push_str(&format!("x{i},"));
        }
        out.push_str("colatitude\n");
        for (point, col) in self.iter_points().zip(&self.colatitudes) {
            for v in point {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{col}\n"));
        }
        out
    }

    /// Parses a table produced by [`Self::to_csv`]. The seed is generation
    /// metadata, not part of the table; imported clouds carry seed 0.
    pub fn from_csv(text: &str) -> Result<Self, SphereLabError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| SphereLabError::Parse("empty input".into()))?;
        let columns: Vec<&str> = header.split(',').collect();
        if columns.len() < 3 || columns[columns.len() - 1] != "colatitude" {
            return Err(SphereLabError::Parse(format!("unexpected header {header:?}")));
        }
        let dim = columns.len() - 1;
        for (i, name) in columns[..dim].iter().enumerate() {
            if *name != format!("x{i}") {
                return Err(SphereLabError::Parse(format!("unexpected column {name:?}")));
            }
        }
        let mut points = Vec::new();
        let mut colatitudes = Vec::new();
        for (row, line) in lines.enumerate() {
            let values: Vec<f64> = line
                .split(',')
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| SphereLabError::Parse(format!("row {row}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            if values.len() != dim + 1 {
                return Err(SphereLabError::Parse(format!(
                    "row {row} has {} values, expected {}",
                    values.len(),
                    dim + 1
                )));
            }
            let norm = norm(&values[..dim]);
            if (norm - 1.0).abs() > 1e-12 {
                return Err(SphereLabError::Parse(format!("row {row} has norm {norm}")));
            }
            let colatitude = values[dim];
            if (colatitude - values[dim - 1].clamp(-1.0, 1.0).asin()).abs() > NORM_TOL {
                return Err(SphereLabError::Parse(format!(
                    "row {row} colatitude {colatitude} does not match the last coordinate"
                )));
            }
            points.extend_from_slice(&values[..dim]);
            colatitudes.push(colatitude);
        }
        if colatitudes.is_empty() {
            return Err(SphereLabError::Parse("no data rows".into()));
        }
        Ok(Self { n: dim as u32 - 1, seed: 0, points, colatitudes })
    }
}

/// Draws `count` i.i.d. uniform points on Sⁿ (normalized isotropic
/// Gaussians) with a fixed stream layout: block b of [`STREAM_BLOCK`]
/// points uses stream b of a ChaCha generator seeded by `seed`, so results
/// are bit-identical across thread counts.
pub fn sample_sphere(n: u32, count: usize, seed: u64) -> Result<SampleCloud, SphereLabError> {
    if n < 1 {
        return Err(SphereLabError::Invalid("sphere dimension must be at least 1".into()));
    }
    if count < 1 {
        return Err(SphereLabError::Invalid("sample count must be at least 1".into()));
    }
    let dim = n as usize + 1;
    let total = count
        .checked_mul(dim + 1)
        .ok_or_else(|| SphereLabError::Resource("sample size overflows".into()))?;
    if total > SAMPLE_VALUE_CAP {
        return Err(SphereLabError::Resource(format!(
            "count*(n+2) = {total} exceeds the cap {SAMPLE_VALUE_CAP}"
        )));
    }

    let mut points: Vec<f64> = vec![0.0; count * dim];
    let mut colatitudes: Vec<f64> = vec![0.0; count];
    points
        .par_chunks_mut(STREAM_BLOCK * dim)
        .zip(colatitudes.par_chunks_mut(STREAM_BLOCK))
        .enumerate()
        .for_each(|(block, (rows, cols))| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(block as u64);
            for (row, col) in rows.chunks_mut(dim).zip(cols.iter_mut()) {
                loop {
                    let mut norm_sq = 0.0;
                    for v in row.iter_mut() {
                        *v = StandardNormal.sample(&mut rng);
                        norm_sq += *v * *v;
                    }
                    let norm = norm_sq.sqrt();
                    if norm > 1e-6 {
                        for v in row.iter_mut() {
                            *v /= norm;
                        }
                        break;
                    }
                }
                *col = row[dim - 1].clamp(-1.0, 1.0).asin();
            }
        });
    Ok(SampleCloud { n, seed, points, colatitudes })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn require_unit(x: &[f64]) -> Result<(), SphereLabError> {
    let norm = norm(x);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(SphereLabError::NormViolation { norm });
    }
    Ok(())
}

/// Geodesic distance on the unit sphere, arccos of the clamped inner
/// product, in [0, π]. Both arguments must be unit vectors of equal length.
pub fn geodesic_distance(x: &[f64], y: &[f64]) -> Result<f64, SphereLabError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(SphereLabError::Invalid(format!(
            "points must share a dimension >= 2, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    require_unit(x)?;
    require_unit(y)?;
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(dot.clamp(-1.0, 1.0).acos())
}

/// Result of projecting a point onto the equator: the nearest equator
/// point, the geodesic distance to it, and whether the input was a pole
/// (focal point), in which case the equator point is the canonical first
/// basis vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EquatorProjection {
    pub point: Vec<f64>,
    pub dist: f64,
    pub focal: bool,
}

/// Nearest-point projection onto the equator x_last = 0: zero the last
/// coordinate and renormalize. The distance |arcsin(x_last)| is attained
/// at the returned point. Poles have no unique nearest point and are
/// mapped to a canonical one with the `focal` flag set.
pub fn project_to_equator(x: &[f64]) -> Result<EquatorProjection, SphereLabError> {
    if x.len() < 2 {
        return Err(SphereLabError::Invalid("point must have at least 2 coordinates".into()));
    }
    require_unit(x)?;
    let dim = x.len();
    let head_norm = norm(&x[..dim - 1]);
    if head_norm < FOCAL_TOL {
        let mut point = vec![0.0; dim];
        point[0] = 1.0;
        return Ok(EquatorProjection { point, dist: std::f64::consts::FRAC_PI_2, focal: true });
    }
    let mut point: Vec<f64> = x[..dim - 1].iter().map(|v| v / head_norm).collect();
    point.push(0.0);
    let dist = x[dim - 1].clamp(-1.0, 1.0).asin().abs();
    Ok(EquatorProjection { point, dist, focal: false })
}

/// Fraction of the cloud at distance more than `eps` from the equator,
/// with the binomial standard error √(p̂(1−p̂)/N).
pub fn empirical_complement(
    cloud: &SampleCloud,
    eps: f64,
) -> Result<(f64, f64), SphereLabError> {
    check_radius(eps)?;
    let hits = cloud.colatitudes().par_iter().filter(|c| c.abs() > eps).count();
    Ok(estimate(hits, cloud.len()))
}

/// Generalization of [`empirical_complement`] to an arbitrary
/// distance-to-locus function evaluated on each sample point.
pub fn empirical_complement_by<F>(
    cloud: &SampleCloud,
    distance_to_locus: F,
    eps: f64,
) -> Result<(f64, f64), SphereLabError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    check_radius(eps)?;
    let dim = cloud.n() as usize + 1;
    let hits = cloud
        .points
        .par_chunks_exact(dim)
        .filter(|point| distance_to_locus(point) > eps)
        .count();
    Ok(estimate(hits, cloud.len()))
}

fn check_radius(eps: f64) -> Result<(), SphereLabError> {
    if !eps.is_finite() || eps < 0.0 || eps > std::f64::consts::FRAC_PI_2 {
        return Err(SphereLabError::Invalid(format!("eps must lie in [0, pi/2], got {eps}")));
    }
    Ok(())
}

fn estimate(hits: usize, total: usize) -> (f64, f64) {
    let p_hat = hits as f64 / total as f64;
    (p_hat, (p_hat * (1.0 - p_hat) / total as f64).sqrt())
}
