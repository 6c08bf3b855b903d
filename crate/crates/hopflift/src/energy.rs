//! Discrete logarithmic energy of point configurations and the fibre lift
//! that turns a configuration on the 2-sphere into one on the 3-sphere.
//!
//! The energy of points `x_1, …, x_N` is `Σ_{i≠j} log(1/‖x_i − x_j‖)`,
//! accumulated as `−Σ_{i<j} log ‖x_i − x_j‖²` so no square roots are taken.
//! Summation is chunked: each chunk of rows is reduced sequentially and the
//! per-chunk partials are added in chunk order, so results are bit-identical
//! regardless of thread count.

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{fiber_point, GeometryError, SurfacePoint2, SurfacePoint3};

/// Squared-distance threshold below which two points are reported as
/// coincident instead of contributing an unbounded energy term.
pub const COINCIDENT_DIST_SQ: f64 = 1e-24;

/// Errors from energy evaluation and fibre lifting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    /// Two points are (numerically) coincident, making the energy +∞.
    #[error("points {i} and {j} are coincident (squared distance below {COINCIDENT_DIST_SQ:e})")]
    CoincidentPoints {
        /// Index of the first point.
        i: usize,
        /// Index of the second point.
        j: usize,
    },
    /// A fibre lift was requested with zero points per fibre.
    #[error("fibre lift requires at least one point per fibre")]
    ZeroFibreCount,
    /// Underlying geometry failure (e.g. a fibre over the singular base
    /// point).
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Rows per parallel chunk in the pairwise sum.
const ROW_CHUNK: usize = 256;

/// Shared pairwise kernel: `−Σ_{i<j} log d²(p_i, p_j)` with deterministic
/// chunked reduction.
fn pair_log_energy<P, D>(points: &[P], dist_sq: D) -> Result<f64, EnergyError>
where
    P: Sync,
    D: Fn(&P, &P) -> f64 + Sync,
{
    let n = points.len();
    if n < 2 {
        return Ok(0.0);
    }
    let chunk_starts: Vec<usize> = (0..n).step_by(ROW_CHUNK).collect();
    let partials: Result<Vec<f64>, EnergyError> = chunk_starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + ROW_CHUNK).min(n);
            let mut acc = 0.0;
            for i in lo..hi {
                let pi = &points[i];
                for (off, pj) in points[i + 1..].iter().enumerate() {
                    let d2 = dist_sq(pi, pj);
                    if d2 < COINCIDENT_DIST_SQ {
                        return Err(EnergyError::CoincidentPoints { i, j: i + 1 + off });
                    }
                    acc += d2.ln();
                }
            }
            Ok(acc)
        })
        .collect();
    Ok(-partials?.iter().sum::<f64>())
}

/// Logarithmic energy of a configuration on the 3-sphere.
///
/// Fewer than two points have zero energy. Two antipodal points have energy
/// `−log 4`.
///
/// ```
/// use hopflift::energy::log_energy;
/// use hopflift::geometry::SurfacePoint3;
/// let p = SurfacePoint3::new(1.0, 0.0, 0.0, 0.0).unwrap();
/// let e = log_energy(&[p, p.antipode()]).unwrap();
/// assert!((e + 4.0f64.ln()).abs() < 1e-15);
/// ```
pub fn log_energy(points: &[SurfacePoint3]) -> Result<f64, EnergyError> {
    pair_log_energy(points, SurfacePoint3::distance_squared)
}

/// Logarithmic energy of a configuration on the 2-sphere.
pub fn log_energy_s2(points: &[SurfacePoint2]) -> Result<f64, EnergyError> {
    pair_log_energy(points, SurfacePoint2::distance_squared)
}

/// The `k` points of the fibre over `base`, phased at angles
/// `phase + 2πl/k` for `l = 0, …, k−1`.
pub fn fiber_circle(
    base: &SurfacePoint2,
    k: u32,
    phase: f64,
) -> Result<Vec<SurfacePoint3>, EnergyError> {
    if k == 0 {
        return Err(EnergyError::ZeroFibreCount);
    }
    let step = std::f64::consts::TAU / f64::from(k);
    (0..k)
        .map(|l| fiber_point(base, phase + f64::from(l) * step).map_err(EnergyError::from))
        .collect()
}

/// The `k`-th roots of unity on the great circle spanned by the first two
/// coordinate axes: `(cos(2πl/k), sin(2πl/k), 0, 0)`.
pub fn roots_of_unity_circle(k: u32) -> Result<Vec<SurfacePoint3>, EnergyError> {
    let base = SurfacePoint2::new(1.0, 0.0, 0.0).expect("unit vector");
    fiber_circle(&base, k, 0.0)
}

/// Closed-form energy of `k` evenly spaced points on a great circle:
/// `−k · log k` (from `Π_{l<k} 2 sin(πl/k) = k`).
#[must_use]
pub fn fiber_energy(k: u32) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = f64::from(k);
    -k * k.ln()
}

/// Lift a configuration on the 2-sphere to the 3-sphere: each base point
/// receives one uniformly random fibre phase and contributes `k` evenly
/// spaced points on its fibre. The output holds the `k` fibre points of
/// `base[0]` first, then those of `base[1]`, and so on.
pub fn hopf_lift<R: Rng + ?Sized>(
    base: &[SurfacePoint2],
    k: u32,
    rng: &mut R,
) -> Result<Vec<SurfacePoint3>, EnergyError> {
    if k == 0 {
        return Err(EnergyError::ZeroFibreCount);
    }
    let mut out = Vec::with_capacity(base.len() * k as usize);
    for p in base {
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        out.extend(fiber_circle(p, k, phase)?);
    }
    Ok(out)
}
