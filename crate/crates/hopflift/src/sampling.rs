//! Random point generation: reproducible seeded substreams, uniform samplers
//! on the 2- and 3-sphere, and antipodal augmentation.
//!
//! The default sampler normalizes Gaussian vectors, which is uniform on the
//! sphere by rotational symmetry of the Gaussian. An alternative S³ sampler
//! draws angular coordinates directly (one coordinate by inverse-CDF Newton
//! iteration) and exists to cross-validate the default; the two agree in
//! distribution.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{SurfacePoint2, SurfacePoint3};

/// A reproducible random stream: one master seed fans out into independent
/// substreams indexed by `stream_index`, so Monte Carlo runs can be assigned
/// disjoint streams while remaining bit-reproducible.
///
/// ```
/// use hopflift::sampling::SeededStream;
/// use rand::RngCore;
/// let mut a = SeededStream::new(7, 0);
/// let mut b = SeededStream::new(7, 0);
/// assert_eq!(a.next_u64(), b.next_u64());
/// ```
#[derive(Debug, Clone)]
pub struct SeededStream {
    inner: ChaCha8Rng,
}

impl SeededStream {
    /// Stream `stream_index` of the family derived from `master_seed`.
    #[must_use]
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(stream_index);
        Self { inner }
    }
}

impl RngCore for SeededStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest);
    }
}

/// Norm-squared threshold below which a Gaussian draw is rejected and
/// resampled (avoids dividing by a denormal norm).
const RESAMPLE_NORM_SQ: f64 = 1e-24;

/// One uniform point on the 2-sphere (normalized Gaussian triple).
pub fn uniform_s2_point<R: Rng + ?Sized>(rng: &mut R) -> SurfacePoint2 {
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        let z: f64 = rng.sample(StandardNormal);
        if x * x + y * y + z * z > RESAMPLE_NORM_SQ {
            return SurfacePoint2::from_unnormalized(x, y, z)
                .expect("norm checked above");
        }
    }
}

/// One uniform point on the 3-sphere (normalized Gaussian quadruple).
pub fn uniform_s3_point<R: Rng + ?Sized>(rng: &mut R) -> SurfacePoint3 {
    loop {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let c: f64 = rng.sample(StandardNormal);
        let d: f64 = rng.sample(StandardNormal);
        if a * a + b * b + c * c + d * d > RESAMPLE_NORM_SQ {
            return SurfacePoint3::from_unnormalized(a, b, c, d)
                .expect("norm checked above");
        }
    }
}

/// `n` independent uniform points on the 2-sphere.
pub fn sample_uniform_s2<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<SurfacePoint2> {
    (0..n).map(|_| uniform_s2_point(rng)).collect()
}

/// `n` independent uniform points on the 3-sphere.
pub fn sample_uniform_s3<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<SurfacePoint3> {
    (0..n).map(|_| uniform_s3_point(rng)).collect()
}

/// CDF of the marginal density `(2/π)·√(1−v²)` of a single coordinate of a
/// uniform point on the 3-sphere.
#[must_use]
pub fn semicircle_cdf(v: f64) -> f64 {
    let v = v.clamp(-1.0, 1.0);
    0.5 + (v * (1.0 - v * v).max(0.0).sqrt() + v.asin()) / std::f64::consts::PI
}

/// Inverse of [`semicircle_cdf`] by safeguarded Newton iteration (bisection
/// fallback keeps the iterate bracketed; the derivative vanishes at ±1).
#[must_use]
pub fn semicircle_inverse_cdf(target: f64) -> f64 {
    let target = target.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    // Semicircle is symmetric around 0; a linear initial guess is adequate.
    let mut v = 2.0 * target - 1.0;
    for _ in 0..200 {
        let f = semicircle_cdf(v) - target;
        if f.abs() <= 1e-14 {
            return v;
        }
        if f > 0.0 {
            hi = v;
        } else {
            lo = v;
        }
        let density = (2.0 / std::f64::consts::PI) * (1.0 - v * v).max(0.0).sqrt();
        let newton = v - f / density;
        v = if density > 1e-12 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON {
            break;
        }
    }
    v
}

/// `n` uniform points on the 3-sphere drawn in angular coordinates:
/// longitude uniform on `[0, 2π)`, one coordinate uniform on `[−1, 1]`, and
/// the last coordinate from the semicircle marginal by inverse CDF.
///
/// Distributionally identical to [`sample_uniform_s3`]; kept as an
/// independent implementation for cross-validation.
pub fn sample_uniform_s3_parametric<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Vec<SurfacePoint3> {
    (0..n)
        .map(|_| {
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let u: f64 = rng.random_range(-1.0..=1.0);
            let v = semicircle_inverse_cdf(rng.random::<f64>());
            let rv = (1.0 - v * v).max(0.0).sqrt();
            let ru = (1.0 - u * u).max(0.0).sqrt();
            SurfacePoint3::from_unnormalized(
                rv * ru * phi.cos(),
                rv * ru * phi.sin(),
                rv * u,
                v,
            )
            .expect("coordinates lie on the unit sphere by construction")
        })
        .collect()
}

/// Types with a well-defined antipodal point.
pub trait HasAntipode {
    /// The antipodal (negated) point.
    #[must_use]
    fn antipode(&self) -> Self;
}

impl HasAntipode for SurfacePoint2 {
    fn antipode(&self) -> Self {
        SurfacePoint2::antipode(self)
    }
}

impl HasAntipode for SurfacePoint3 {
    fn antipode(&self) -> Self {
        SurfacePoint3::antipode(self)
    }
}

/// The antipodal augmentation of a configuration: the original points
/// followed by their antipodes, in matching order.
pub fn antipodal_augment<P: HasAntipode + Clone>(points: &[P]) -> Vec<P> {
    let mut out = Vec::with_capacity(2 * points.len());
    out.extend_from_slice(points);
    out.extend(points.iter().map(HasAntipode::antipode));
    out
}
