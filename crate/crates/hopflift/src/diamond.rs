//! The diamond family on the 2-sphere: points arranged on parallels at
//! optimized heights with independently phased roots of unity per parallel,
//! plus the two poles. Includes the exact closed-form expected logarithmic
//! energy over the random phases and the preparation step (pole removal +
//! fixed rotation) that makes the configuration liftable to the 3-sphere.

use rand::Rng;
use thiserror::Error;

use crate::geometry::SurfacePoint2;

/// Errors from building diamond configurations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiamondError {
    /// The per-parallel point counts were empty.
    #[error("a diamond needs at least one parallel")]
    NoParallels,
    /// A parallel was assigned zero points.
    #[error("parallel {index} has zero points; every parallel needs at least one")]
    EmptyParallel {
        /// Zero-based index of the offending parallel.
        index: usize,
    },
}

/// A diamond configuration plan: how many points sit on each parallel and at
/// which heights, with the two poles always included.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondSpec {
    points_per_parallel: Vec<u32>,
    heights: Vec<f64>,
}

impl DiamondSpec {
    /// Plan a diamond from explicit per-parallel point counts; heights are
    /// derived by the energy-minimizing rule (see [`diamond_heights`]).
    pub fn from_rj(points_per_parallel: Vec<u32>) -> Result<Self, DiamondError> {
        if points_per_parallel.is_empty() {
            return Err(DiamondError::NoParallels);
        }
        if let Some(index) = points_per_parallel.iter().position(|&r| r == 0) {
            return Err(DiamondError::EmptyParallel { index });
        }
        let heights = diamond_heights(&points_per_parallel);
        Ok(Self { points_per_parallel, heights })
    }

    /// Plan a diamond with `p` parallels using the sine-profile count rule
    /// (see [`diamond_rj_ansatz`]).
    ///
    /// # Panics
    /// If `p < 1`.
    #[must_use]
    pub fn ansatz(p: u32) -> Self {
        assert!(p >= 1, "a diamond needs at least one parallel");
        Self::from_rj(diamond_rj_ansatz(p)).expect("ansatz counts are positive")
    }

    /// Number of parallels.
    #[must_use]
    pub fn parallels(&self) -> usize {
        self.points_per_parallel.len()
    }

    /// Points on each parallel, north to south.
    #[must_use]
    pub fn points_per_parallel(&self) -> &[u32] {
        &self.points_per_parallel
    }

    /// Heights of the parallels, strictly decreasing, all in `(−1, 1)`.
    #[must_use]
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Total number of points including both poles:
    /// `N = 2 + Σ_j r_j`.
    #[must_use]
    pub fn total_points(&self) -> usize {
        2 + self.points_per_parallel.iter().map(|&r| r as usize).sum::<usize>()
    }
}

/// Per-parallel point counts from the sine-profile rule
/// `r_j = max(1, round(3 · sin(jπ/(p+1)) / sin(π/(2(p+1)))))`,
/// rounding half away from zero. Symmetric: `r_j = r_{p+1−j}`.
///
/// # Panics
/// If `p < 1`.
#[must_use]
pub fn diamond_rj_ansatz(p: u32) -> Vec<u32> {
    assert!(p >= 1, "a diamond needs at least one parallel");
    let denom = (std::f64::consts::PI / (2.0 * f64::from(p + 1))).sin();
    (1..=p)
        .map(|j| {
            let raw = 3.0 * (f64::from(j) * std::f64::consts::PI / f64::from(p + 1)).sin()
                / denom;
            // f64::round rounds half away from zero, which is the
            // deterministic rule adopted here.
            (raw.round() as u32).max(1)
        })
        .collect()
}

/// Heights minimizing the expected energy given per-parallel counts:
/// `z_l = 1 − (1 + r_l + 2 Σ_{j<l} r_j)/(N−1)` with `N = 2 + Σ_j r_j`.
///
/// # Panics
/// If any count is zero.
#[must_use]
pub fn diamond_heights(points_per_parallel: &[u32]) -> Vec<f64> {
    assert!(
        points_per_parallel.iter().all(|&r| r >= 1),
        "every parallel needs at least one point"
    );
    let total: u64 = points_per_parallel.iter().map(|&r| u64::from(r)).sum();
    let n_minus_1 = (total + 1) as f64; // N − 1 with N = 2 + Σ r_j
    let mut cumulative = 0u64;
    points_per_parallel
        .iter()
        .map(|&r| {
            let z = 1.0 - (1.0 + f64::from(r) + 2.0 * cumulative as f64) / n_minus_1;
            cumulative += u64::from(r);
            z
        })
        .collect()
}

/// Build one random diamond configuration: the north pole, then each
/// parallel's points in longitude order (parallel `j` gets `r_j` points at
/// longitudes `θ_j + 2πi/r_j` with `θ_j` uniform on `[0, 2π)` drawn
/// independently per parallel), then the south pole.
pub fn build_diamond<R: Rng + ?Sized>(
    spec: &DiamondSpec,
    rng: &mut R,
) -> Vec<SurfacePoint2> {
    let mut out = Vec::with_capacity(spec.total_points());
    out.push(SurfacePoint2::new(0.0, 0.0, 1.0).expect("north pole"));
    for (&r, &z) in spec.points_per_parallel.iter().zip(&spec.heights) {
        let radius = (1.0 - z * z).max(0.0).sqrt();
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        for i in 0..r {
            let alpha = theta + std::f64::consts::TAU * f64::from(i) / f64::from(r);
            out.push(
                SurfacePoint2::new(radius * alpha.cos(), radius * alpha.sin(), z)
                    .expect("parallel points are unit norm"),
            );
        }
    }
    out.push(SurfacePoint2::new(0.0, 0.0, -1.0).expect("south pole"));
    out
}

/// Exact expected logarithmic energy of the diamond over its random parallel
/// phases:
///
/// `E = −2 log 2 − Σ_j r_j (log 4 + ½ log(1−z_j²) + log r_j)
///      − ½ Σ_{j,k} r_j r_k log(1 − z_j z_k + |z_j − z_k|)`
///
/// where the double sum runs over all parallel pairs including `j = k`.
/// The expectation is over the phases only; the value is phase-free.
#[must_use]
pub fn diamond_expected_energy_s2(spec: &DiamondSpec) -> f64 {
    let log2 = std::f64::consts::LN_2;
    let mut e = -2.0 * log2;
    for (&r, &z) in spec.points_per_parallel.iter().zip(&spec.heights) {
        let r = f64::from(r);
        e -= r * (2.0 * log2 + 0.5 * (1.0 - z * z).ln() + r.ln());
    }
    for (&rj, &zj) in spec.points_per_parallel.iter().zip(&spec.heights) {
        for (&rk, &zk) in spec.points_per_parallel.iter().zip(&spec.heights) {
            let cross = 1.0 - zj * zk + (zj - zk).abs();
            e -= 0.5 * f64::from(rj) * f64::from(rk) * cross.ln();
        }
    }
    e
}

/// The fixed rotation `(x, y, z) ↦ (z, x, y)` (a coordinate cycle,
/// determinant +1). It moves the south pole `(0,0,−1)` to `(−1,0,0)`, so
/// after the poles are removed no remaining point has first coordinate
/// `−1` and every point sits on a nonsingular fibre.
#[must_use]
pub fn rotate_south_pole_to_minus_x(cfg: &[SurfacePoint2]) -> Vec<SurfacePoint2> {
    cfg.iter()
        .map(|p| {
            let [x, y, z] = p.coords();
            SurfacePoint2::new(z, x, y).expect("coordinate permutation preserves norm")
        })
        .collect()
}

/// Build a random diamond, drop both poles, and rotate so all remaining
/// points lie on nonsingular fibres: the standard base configuration for
/// lifting. Output size is `total_points() − 2`, ordered by parallel.
pub fn build_lift_base<R: Rng + ?Sized>(
    spec: &DiamondSpec,
    rng: &mut R,
) -> Vec<SurfacePoint2> {
    let full = build_diamond(spec, rng);
    rotate_south_pole_to_minus_x(&full[1..full.len() - 1])
}
