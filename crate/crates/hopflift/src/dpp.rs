//! Homogeneous determinantal point processes on the 2-sphere: the spherical
//! (monomial-chart) and harmonic (spherical-harmonic) projection ensembles,
//! their radial profiles and rotationally invariant kernels, and an exact
//! sequential sampler.
//!
//! Both ensembles are projection processes of some rank `n`: every sample
//! has exactly `n` points, the one-point intensity is uniform, and the
//! two-point structure is governed by a radial profile `f` through
//! `|K(x,y)|² = K_diag² · f(s)` with `s = |⟨p,q⟩| = √((1+⟨x,y⟩)/2)`.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::geometry::{s2_to_cp1, SurfacePoint2};
use crate::sampling::uniform_s2_point;
use crate::specfun::jacobi_p10;

/// Errors from determinantal sampling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DppError {
    /// The rejection sampler's empirical acceptance rate fell below 10⁻⁶,
    /// which signals a kernel or envelope bug rather than bad luck.
    #[error(
        "rejection sampler stalled at step {step}: {attempts} consecutive \
         rejections (acceptance rate below 1e-6)"
    )]
    RejectionStall {
        /// Index of the point being drawn when the sampler stalled.
        step: usize,
        /// Number of consecutive rejected proposals.
        attempts: u64,
    },
}

/// Consecutive-rejection budget for one step of the sequential sampler;
/// exceeding it means the empirical acceptance rate dropped below 10⁻⁶.
pub const STALL_LIMIT: u64 = 1_000_000;

/// The two point-process families (plus the trivial rank-one constant
/// kernel, useful as a degenerate reference).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleFamily {
    /// Spherical ensemble with parameter `r ≥ 1` (rank `r`).
    Spherical {
        /// Number of points per sample.
        r: u32,
    },
    /// Harmonic ensemble of maximal degree `L` (rank `(L+1)²`).
    Harmonic {
        /// Maximal spherical-harmonic degree.
        degree: u32,
    },
    /// Constant kernel of rank one: a single uniform point.
    ConstantOne,
}

impl EnsembleFamily {
    /// Number of points in every sample of the process.
    #[must_use]
    pub fn rank(&self) -> u32 {
        match *self {
            EnsembleFamily::Spherical { r } => r,
            EnsembleFamily::Harmonic { degree } => (degree + 1) * (degree + 1),
            EnsembleFamily::ConstantOne => 1,
        }
    }
}

/// The radial profile `f: [0,1] → [0,1]` of a homogeneous kernel,
/// normalized so `f(1) = 1`; the pair intensity is
/// `K_diag² (1 − f(|⟨p,q⟩|))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadialProfile {
    family: EnsembleFamily,
}

impl RadialProfile {
    /// The family this profile belongs to.
    #[must_use]
    pub fn family(&self) -> EnsembleFamily {
        self.family
    }

    /// Rank of the associated projection kernel.
    #[must_use]
    pub fn rank(&self) -> u32 {
        self.family.rank()
    }

    /// Evaluate `f(s)` for `s ∈ [0, 1]`.
    #[must_use]
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        match self.family {
            EnsembleFamily::Spherical { r } => s.powi(2 * (r as i32 - 1)),
            EnsembleFamily::Harmonic { degree } => {
                let v = jacobi_p10(degree, 2.0 * s * s - 1.0) / f64::from(degree + 1);
                v * v
            }
            EnsembleFamily::ConstantOne => 1.0,
        }
    }

    /// The pair-structure integral `Q = ∫₀^∞ log(1 + √(1 − 1/(1+t²)))
    /// · f(1/√(1+t²)) · t/(1+t²)² dt`, the quantity through which the
    /// profile enters expected lifted energies.
    pub fn q_integral(
        &self,
        spec: &crate::specfun::QuadratureSpec,
    ) -> Result<f64, crate::specfun::SpecFunError> {
        crate::specfun::integrate_semi_infinite(
            |t| {
                let s2 = 1.0 / (1.0 + t * t);
                let s = s2.sqrt();
                (1.0 + (1.0 - s2).max(0.0).sqrt()).ln() * self.eval(s) * t * s2 * s2
            },
            0.0,
            spec,
        )
    }
}

/// Profile of the spherical ensemble: `f(s) = s^{2(r−1)}`.
///
/// # Panics
/// If `r < 1`.
#[must_use]
pub fn spherical_profile(r: u32) -> RadialProfile {
    assert!(r >= 1, "spherical ensemble requires r >= 1");
    RadialProfile { family: EnsembleFamily::Spherical { r } }
}

/// Profile of the harmonic ensemble:
/// `f(s) = (P_L^{(1,0)}(2s²−1) / (L+1))²`.
#[must_use]
pub fn harmonic_profile(degree: u32) -> RadialProfile {
    RadialProfile { family: EnsembleFamily::Harmonic { degree } }
}

/// The constant profile `f ≡ 1` (rank one).
#[must_use]
pub fn constant_profile() -> RadialProfile {
    RadialProfile { family: EnsembleFamily::ConstantOne }
}

/// Pair intensity of the spherical ensemble against `u = ⟨x,y⟩`:
/// `(r/4π)² (1 − ((1+u)/2)^{r−1})`.
///
/// # Panics
/// If `r < 1`.
#[must_use]
pub fn spherical_pair_intensity(r: u32, u: f64) -> f64 {
    assert!(r >= 1, "spherical ensemble requires r >= 1");
    let diag = f64::from(r) / (4.0 * std::f64::consts::PI);
    let s2 = ((1.0 + u.clamp(-1.0, 1.0)) / 2.0).clamp(0.0, 1.0);
    diag * diag * (1.0 - s2.powi(r as i32 - 1))
}

/// Rotationally invariant kernel of the harmonic ensemble against
/// `u = ⟨x,y⟩`: `((L+1)/4π) · P_L^{(1,0)}(u)`, with diagonal
/// `(L+1)²/4π` at `u = 1`.
#[must_use]
pub fn harmonic_kernel(degree: u32, u: f64) -> f64 {
    f64::from(degree + 1) / (4.0 * std::f64::consts::PI) * jacobi_p10(degree, u)
}

/// A rank-`n` projection kernel presented through an orthonormal basis
/// evaluator.
///
/// The spherical family uses the monomial basis in the stereographic chart,
/// `φ_j(z) = √(r·C(r−1,j)/π) · z^j (1+|z|²)^{−(r+1)/2}`, orthonormal for
/// Lebesgue measure on the chart; evaluation is carried out in homogeneous
/// coordinates so no chart overflow can occur near the pole. The harmonic
/// family uses real spherical harmonics of degree ≤ L, orthonormal for
/// surface measure. In both cases the diagonal `Σ_j |φ_j(x)|²` equals
/// `rank × (proposal density)` when proposals are uniform on the sphere,
/// which is exactly the envelope property the sequential sampler needs.
#[derive(Debug, Clone)]
pub struct ProjectionKernel {
    family: EnsembleFamily,
    /// Spherical normalization constants `√(r·C(r−1,j)/π)`; empty for the
    /// other families.
    coeffs: Vec<f64>,
}

/// Build the projection kernel of a family.
#[must_use]
pub fn build_projection_kernel(family: EnsembleFamily) -> ProjectionKernel {
    let coeffs = match family {
        EnsembleFamily::Spherical { r } => {
            assert!(r >= 1, "spherical ensemble requires r >= 1");
            let rf = f64::from(r);
            let mut binom = 1.0f64; // C(r−1, 0)
            let mut coeffs = Vec::with_capacity(r as usize);
            for j in 0..r {
                coeffs.push((rf * binom / std::f64::consts::PI).sqrt());
                // C(r−1, j+1) = C(r−1, j) · (r−1−j)/(j+1)
                binom *= f64::from(r - 1 - j) / f64::from(j + 1);
            }
            coeffs
        }
        _ => Vec::new(),
    };
    ProjectionKernel { family, coeffs }
}

impl ProjectionKernel {
    /// The family of this kernel.
    #[must_use]
    pub fn family(&self) -> EnsembleFamily {
        self.family
    }

    /// Number of basis functions = number of points per sample.
    #[must_use]
    pub fn rank(&self) -> usize {
        self.family.rank() as usize
    }

    /// Evaluate the orthonormal basis at `p` into `out` (length must equal
    /// [`ProjectionKernel::rank`]).
    pub fn basis_at(&self, p: &SurfacePoint2, out: &mut [Complex64]) {
        assert_eq!(out.len(), self.rank(), "basis buffer length must equal the rank");
        match self.family {
            EnsembleFamily::Spherical { r } => self.spherical_basis(r, p, out),
            EnsembleFamily::Harmonic { degree } => harmonic_basis(degree, p, out),
            EnsembleFamily::ConstantOne => {
                out[0] = Complex64::new(1.0 / (4.0 * std::f64::consts::PI).sqrt(), 0.0);
            }
        }
    }

    /// Chart monomials in homogeneous coordinates: with `(q₁, q₂)` the
    /// projective representative of `p` and `z = q₁/q₂`,
    /// `φ_j = c_j · z^j (1+|z|²)^{−(r+1)/2} = c_j · û^j · |q₂|^{r+1−j}`
    /// where `û = q₁ · conj(q₂)/|q₂|` has `|û| = |q₁| ≤ 1`.
    fn spherical_basis(&self, r: u32, p: &SurfacePoint2, out: &mut [Complex64]) {
        let cp = s2_to_cp1(p);
        let (q1, q2) = cp.pair();
        let m2 = q2.norm();
        let unit = if m2 > 0.0 { q2.conj() / m2 } else { Complex64::new(1.0, 0.0) };
        let u = q1 * unit;
        let mut upow = Complex64::new(1.0, 0.0);
        for (j, slot) in out.iter_mut().enumerate() {
            let decay = m2.powi((r + 1) as i32 - j as i32);
            *slot = upow * (self.coeffs[j] * decay);
            upow *= u;
        }
    }

    /// Kernel value `K(x, y) = Σ_j φ_j(x) · conj(φ_j(y))`.
    #[must_use]
    pub fn kernel_value(&self, x: &SurfacePoint2, y: &SurfacePoint2) -> Complex64 {
        let mut fx = vec![Complex64::new(0.0, 0.0); self.rank()];
        let mut fy = vec![Complex64::new(0.0, 0.0); self.rank()];
        self.basis_at(x, &mut fx);
        self.basis_at(y, &mut fy);
        fx.iter().zip(&fy).map(|(a, b)| a * b.conj()).sum()
    }

    /// Diagonal `K(x, x) = Σ_j |φ_j(x)|²`.
    #[must_use]
    pub fn diagonal_at(&self, x: &SurfacePoint2) -> f64 {
        let mut fx = vec![Complex64::new(0.0, 0.0); self.rank()];
        self.basis_at(x, &mut fx);
        fx.iter().map(num_complex::Complex::norm_sqr).sum()
    }
}

/// Real spherical harmonics of degree ≤ L, fully normalized (orthonormal
/// for surface measure), evaluated by associated-Legendre recurrences.
/// Layout: degree blocks of size `2ℓ+1` starting at `ℓ²`, ordered
/// `m = 0, (1, cos), (1, sin), (2, cos), (2, sin), …`.
fn harmonic_basis(degree: u32, p: &SurfacePoint2, out: &mut [Complex64]) {
    let l_max = degree as usize;
    let [px, py, pz] = p.coords();
    let ct = pz; // cos θ
    let st = px.hypot(py); // sin θ ≥ 0
    let phi = if st > 0.0 { py.atan2(px) } else { 0.0 };

    // pmm = fully normalized diagonal term P̄_m^m, updated as m grows.
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    let (sin_phi, cos_phi) = phi.sin_cos();
    // e^{imφ} tracked incrementally.
    let mut cos_m = 1.0f64;
    let mut sin_m = 0.0f64;

    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st;
            let (c, s) = (cos_m, sin_m);
            cos_m = c * cos_phi - s * sin_phi;
            sin_m = s * cos_phi + c * sin_phi;
        }
        // Upward recurrence in ℓ at fixed m.
        let mut prev2 = 0.0f64;
        let mut prev = pmm;
        for l in m..=l_max {
            let value = if l == m {
                pmm
            } else if l == m + 1 {
                (2.0 * m as f64 + 3.0).sqrt() * ct * pmm
            } else {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf)
                    / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                    .sqrt();
                a * (ct * prev - b * prev2)
            };
            if l > m {
                prev2 = prev;
                prev = value;
            }
            let base = l * l;
            if m == 0 {
                out[base] = Complex64::new(value, 0.0);
            } else {
                let amp = std::f64::consts::SQRT_2 * value;
                out[base + 2 * m - 1] = Complex64::new(amp * cos_m, 0.0);
                out[base + 2 * m] = Complex64::new(amp * sin_m, 0.0);
            }
        }
    }
}

/// Draw one exact sample of the projection process: `rank` points on the
/// 2-sphere.
///
/// Sequential conditional sampling: point `m+1` is drawn from the density
/// proportional to the diagonal of the kernel with the span of the already
/// selected feature vectors projected out. Proposals are uniform on the
/// sphere; a proposal at `x` is accepted with probability
/// `‖residual(x)‖² / K(x,x)`, which is a valid envelope because the diagonal
/// equals `rank ×` the proposal density in both families. The projector is
/// maintained by Gram–Schmidt, re-orthogonalizing when cancellation eats
/// more than eight digits of the residual.
pub fn hkpv_sample<R: Rng + ?Sized>(
    kernel: &ProjectionKernel,
    rng: &mut R,
) -> Result<Vec<SurfacePoint2>, DppError> {
    hkpv_sample_with_stall_limit(kernel, rng, STALL_LIMIT)
}

fn project_out(basis: &[Vec<Complex64>], v: &mut [Complex64]) {
    for g in basis {
        let overlap: Complex64 = g.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
        for (slot, a) in v.iter_mut().zip(g.iter()) {
            *slot -= overlap * a;
        }
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(num_complex::Complex::norm_sqr).sum()
}

fn hkpv_sample_with_stall_limit<R: Rng + ?Sized>(
    kernel: &ProjectionKernel,
    rng: &mut R,
    stall_limit: u64,
) -> Result<Vec<SurfacePoint2>, DppError> {
    let rank = kernel.rank();
    let mut selected: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    let mut points = Vec::with_capacity(rank);
    let mut phi = vec![Complex64::new(0.0, 0.0); rank];
    for step in 0..rank {
        let mut attempts = 0u64;
        loop {
            let x = uniform_s2_point(rng);
            kernel.basis_at(&x, &mut phi);
            let diag = norm_sqr(&phi);
            let mut resid = phi.clone();
            project_out(&selected, &mut resid);
            let mut rn = norm_sqr(&resid);
            // Accept with probability rn/diag (diag > 0 almost surely; a
            // zero diagonal can only occur at the chart's point at infinity).
            if diag > 0.0 && rng.random::<f64>() * diag < rn {
                if rn < 1e-16 * diag {
                    // Residual lost more than eight digits to cancellation:
                    // re-orthogonalize before normalizing.
                    project_out(&selected, &mut resid);
                    rn = norm_sqr(&resid);
                }
                let scale = 1.0 / rn.sqrt();
                for c in &mut resid {
                    *c *= scale;
                }
                selected.push(resid);
                points.push(x);
                break;
            }
            attempts += 1;
            if attempts >= stall_limit {
                return Err(DppError::RejectionStall { step, attempts });
            }
        }
    }
    Ok(points)
}
