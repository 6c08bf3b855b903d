//! Closed-form and quadrature-based expected logarithmic energies for every
//! point family in this crate, the asymptotic linear-term coefficients and
//! reference constants, optimal points-per-fibre selectors, and the
//! normalized series used to compare families at finite sizes.

use thiserror::Error;

use crate::diamond::DiamondSpec;
use crate::dpp::{EnsembleFamily, RadialProfile};
use crate::specfun::{
    digamma, gamma_ratio, integrate, jacobi_p10, QuadratureSpec, SpecFunError,
};

/// Errors from expectation formulas and selectors.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpectError {
    /// Antipodal families need an even number of points.
    #[error("antipodal family needs an even point count, got {0}")]
    OddN(u64),
    /// The antipodal lift needs an even number of base points.
    #[error("antipodal lift needs an even base-point count, got {0}")]
    OddM(u64),
    /// The points-per-fibre rule produced a value below one.
    #[error("points-per-fibre rule needs rank >= 2, got {0}")]
    KTooSmall(u64),
    /// The rational approximation sequence overflows 64-bit integers past
    /// index 6.
    #[error("sequence index must be in 1..=6, got {0}")]
    IndexOutOfRange(u8),
    /// Two distinct parallels share a height, so fibres would coincide.
    #[error("two parallels share height {z}; their fibres would coincide")]
    SingularPair {
        /// The shared height.
        z: f64,
    },
    /// Quadrature failure.
    #[error(transparent)]
    Quadrature(#[from] SpecFunError),
}

/// Expected energy of `n` independent uniform points on the 3-sphere:
/// `−n²/4 + n/4`.
#[must_use]
pub fn expected_uniform_s3(n: u64) -> f64 {
    let n = n as f64;
    -n * n / 4.0 + n / 4.0
}

/// Expected energy of `n/2` uniform points on the 3-sphere together with
/// their antipodes: `−n²/4 + (1/2 − log 2)·n`. `n` must be even.
pub fn expected_uniform_s3_antipodal(n: u64) -> Result<f64, ExpectError> {
    if n % 2 != 0 {
        return Err(ExpectError::OddN(n));
    }
    let nf = n as f64;
    Ok(-nf * nf / 4.0 + (0.5 - std::f64::consts::LN_2) * nf)
}

/// Expected energy of the lift of `m` uniform base points with `k` points
/// per fibre (`n = m·k` total): `−n²/4 + nk/4 − n log k`.
#[must_use]
pub fn expected_lifted_uniform(m: u64, k: u32) -> f64 {
    let n = (m * u64::from(k)) as f64;
    let kf = f64::from(k);
    -n * n / 4.0 + n * kf / 4.0 - n * kf.ln()
}

/// Expected energy of the lift of `m` base points forming `m/2` antipodal
/// pairs, `k` points per fibre: `−n²/4 + (nk/2)(1 − log 2) − n log k`.
/// `m` must be even.
pub fn expected_lifted_antipodal(m: u64, k: u32) -> Result<f64, ExpectError> {
    if m % 2 != 0 {
        return Err(ExpectError::OddM(m));
    }
    let n = (m * u64::from(k)) as f64;
    let kf = f64::from(k);
    Ok(-n * n / 4.0 + n * kf / 2.0 * (1.0 - std::f64::consts::LN_2) - n * kf.ln())
}

/// The finite-interval form of the harmonic pair integral
/// `I_L = (1/(4(L+1)²)) ∫₀^π log(1 + sin(θ/2)) · P_L^{(1,0)}(cos θ)² · sin θ dθ`,
/// which equals the harmonic profile's [`RadialProfile::q_integral`]
/// (semi-infinite form) exactly; the θ-form is preferred for robustness.
pub fn harmonic_pair_integral(
    degree: u32,
    quad: &QuadratureSpec,
) -> Result<f64, SpecFunError> {
    let lp1 = f64::from(degree + 1);
    let v = integrate(
        |theta| {
            let p = jacobi_p10(degree, theta.cos());
            (1.0 + (theta / 2.0).sin()).ln() * p * p * theta.sin()
        },
        0.0,
        std::f64::consts::PI,
        quad,
    )?;
    Ok(v / (4.0 * lp1 * lp1))
}

/// Expected energy of the lift of one sample of a determinantal ensemble
/// with `k` points per fibre: `E = −rk log k − k²r²/4 + k²r²·Q` where `r` is
/// the kernel rank and `Q` the profile's pair integral.
///
/// The harmonic family evaluates `Q` through the finite θ-form
/// ([`harmonic_pair_integral`]); other families use the semi-infinite form.
pub fn expected_lifted_dpp(
    profile: &RadialProfile,
    k: u32,
    quad: &QuadratureSpec,
) -> Result<f64, ExpectError> {
    let q = match profile.family() {
        EnsembleFamily::Harmonic { degree } => harmonic_pair_integral(degree, quad)?,
        _ => profile.q_integral(quad)?,
    };
    let r = f64::from(profile.rank());
    let kf = f64::from(k);
    Ok(-r * kf * kf.ln() - kf * kf * r * r / 4.0 + kf * kf * r * r * q)
}

/// Exact expected energy of the lifted spherical ensemble:
/// `−k²r²/4 − rk log k + k²·(√π·Γ(r+1)/Γ(r+1/2))/4 − k²/4`.
#[must_use]
pub fn expected_lifted_spherical_closed(r: u32, k: u32) -> f64 {
    let ratio = gamma_ratio(r).expect("r >= 1");
    let rf = f64::from(r);
    let kf = f64::from(k);
    -kf * kf * rf * rf / 4.0 - rf * kf * kf.ln() + kf * kf * ratio / 4.0 - kf * kf / 4.0
}

/// The linear-term coefficient of the lifted spherical family at the
/// rational ratio `a/b ≤ 1`: `(√π/4)·√(b/a) − log((b/a)^{1/3})`.
///
/// # Panics
/// If `a` or `b` is zero or `a > b`.
#[must_use]
pub fn spherical_linear_coefficient(a: u64, b: u64) -> f64 {
    assert!(a >= 1 && b >= 1 && a <= b, "need 1 <= a <= b");
    let ratio = b as f64 / a as f64; // b/a ≥ 1
    std::f64::consts::PI.sqrt() / 4.0 * ratio.sqrt() - ratio.ln() / 3.0
}

/// Reference constants for the asymptotic comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Linear-term constant of the lifted spherical family at its optimal
    /// density ratio: `(1/3)(2 + log(9π/64)) = 0.394357…`.
    pub c_s: f64,
    /// Linear-term constant of the lifted harmonic family:
    /// `(1/3)log(1/3) + log 2 + ψ₀(3/2) + 1/3 = 0.696766…`.
    pub c_h: f64,
    /// The optimal density ratio `9π/64 = 0.441786…` itself.
    pub k_s: f64,
    /// Reference linear coefficient of the diamond family on the 2-sphere
    /// (cited, not derived here): `−0.049222`.
    pub c_diamond_s2: f64,
}

/// Evaluate the reference constants from their defining expressions.
#[must_use]
pub fn constants() -> Constants {
    let k_s = 9.0 * std::f64::consts::PI / 64.0;
    let c_s = (2.0 + k_s.ln()) / 3.0;
    let c_h = (1.0f64 / 3.0).ln() / 3.0
        + std::f64::consts::LN_2
        + digamma(1.5).expect("1.5 > 0")
        + 1.0 / 3.0;
    Constants { c_s, c_h, k_s, c_diamond_s2: -0.049_222 }
}

/// One term of the rational approximation sequence driving the
/// asymptotically optimal lifted spherical family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalApproxTerm {
    /// Numerator `A_i = ⌊K_S · 10^i⌋`.
    pub a: u64,
    /// Denominator `B_i = 10^i`.
    pub b: u64,
    /// Points per fibre `k_i = 10^i`.
    pub k: u64,
    /// Ensemble rank `r_i = A_i · 10^i`.
    pub r: u64,
    /// Total points `n_i = r_i · k_i = A_i · 10^{2i}`.
    pub n: u64,
}

/// The `i`-th term of the rational approximation sequence
/// `(A_i, B_i, k_i, r_i, n_i)`; valid for `1 ≤ i ≤ 6` (beyond that the
/// point counts overflow 64 bits).
pub fn rational_approx_sequence(i: u8) -> Result<RationalApproxTerm, ExpectError> {
    if !(1..=6).contains(&i) {
        return Err(ExpectError::IndexOutOfRange(i));
    }
    let b = 10u64.pow(u32::from(i));
    let k_s = 9.0 * std::f64::consts::PI / 64.0;
    let a = (k_s * b as f64).floor() as u64;
    Ok(RationalApproxTerm { a, b, k: b, r: a * b, n: a * b * b })
}

/// The real-valued optimal points-per-fibre for the lifted spherical family
/// at `n` total points: `(4 / (3^{2/3} π^{1/3})) · n^{1/3}`.
#[must_use]
pub fn optimal_k_spherical(n: u64) -> f64 {
    let c = 4.0 / (3.0f64.powf(2.0 / 3.0) * std::f64::consts::PI.powf(1.0 / 3.0));
    c * (n as f64).powf(1.0 / 3.0)
}

/// Points-per-fibre rule for the lifted harmonic family: `⌊√r / log r⌋`
/// for kernel rank `r ≥ 2` (the rule stays ≥ 1 there; `r < 2` has no
/// usable value).
pub fn harmonic_k_rule(r: u64) -> Result<u64, ExpectError> {
    if r < 2 {
        return Err(ExpectError::KTooSmall(r));
    }
    let rf = r as f64;
    Ok((rf.sqrt() / rf.ln()).floor() as u64)
}

/// Expected pair term between two fibres on distinct parallels at heights
/// `z1`, `z2`, averaged over both parallel phases and both fibre phases:
/// `−(1/2π) ∫₀^π log((c + √(c² − b²))/2) dψ` with `c = 2 − a·cos ψ`,
/// `a = √((1+z1)(1+z2))`, `b = √((1−z1)(1−z2))`.
pub fn cross_parallel_pair_term(
    z1: f64,
    z2: f64,
    quad: &QuadratureSpec,
) -> Result<f64, ExpectError> {
    let a = ((1.0 + z1) * (1.0 + z2)).max(0.0).sqrt();
    let b2 = (1.0 - z1) * (1.0 - z2);
    let v = integrate(
        |psi| {
            let c = 2.0 - a * psi.cos();
            ((c + (c * c - b2).max(0.0).sqrt()) / 2.0).ln()
        },
        0.0,
        std::f64::consts::PI,
        quad,
    )?;
    Ok(-v / (2.0 * std::f64::consts::PI))
}

/// Expected pair term between two distinct fibres on the same parallel at
/// height `z` whose longitudes differ by `delta_theta`, averaged over the
/// shared fibre phase: `−(1/2)·log((2 + √(4 − R²))/2)` with
/// `R² = (1+z)² + (1−z)² + 2(1−z²)·cos Δθ`.
///
/// Errors with [`ExpectError::SingularPair`] when `R² → 4`, which happens
/// exactly when the fibres coincide (`Δθ → 0`).
pub fn same_parallel_pair_term(z: f64, delta_theta: f64) -> Result<f64, ExpectError> {
    let r2 = (1.0 + z) * (1.0 + z)
        + (1.0 - z) * (1.0 - z)
        + 2.0 * (1.0 - z * z) * delta_theta.cos();
    if r2 >= 4.0 - 1e-12 {
        return Err(ExpectError::SingularPair { z });
    }
    Ok(-0.5 * ((2.0 + (4.0 - r2).max(0.0).sqrt()) / 2.0).ln())
}

/// Semianalytic expected energy of the lifted diamond (poles removed):
/// `E = −n log k + k² Σ (pair terms)` with `n = k·Σ_j r_j`, where the sum
/// runs over ordered fibre pairs — cross-parallel pairs contribute
/// [`cross_parallel_pair_term`] by quadrature and same-parallel pairs the
/// closed form [`same_parallel_pair_term`].
pub fn expected_lifted_diamond_semianalytic(
    spec: &DiamondSpec,
    k: u32,
    quad: &QuadratureSpec,
) -> Result<f64, ExpectError> {
    let counts = spec.points_per_parallel();
    let heights = spec.heights();
    let base: u64 = counts.iter().map(|&r| u64::from(r)).sum();
    let n = base * u64::from(k);
    let kf = f64::from(k);
    let mut e = -(n as f64) * kf.ln();
    let k2 = kf * kf;

    // Cross-parallel: the term is symmetric in (z1, z2); evaluate each
    // unordered parallel pair once and count both orders.
    for j1 in 0..counts.len() {
        for j2 in (j1 + 1)..counts.len() {
            let (z1, z2) = (heights[j1], heights[j2]);
            if (z1 - z2).abs() < 1e-12 {
                return Err(ExpectError::SingularPair { z: z1 });
            }
            let term = cross_parallel_pair_term(z1, z2, quad)?;
            e += 2.0 * k2 * f64::from(counts[j1]) * f64::from(counts[j2]) * term;
        }
    }

    // Same parallel: r_j ordered pairs at each longitude offset 2πm/r_j.
    for (&r, &z) in counts.iter().zip(heights) {
        for m in 1..r {
            let delta = std::f64::consts::TAU * f64::from(m) / f64::from(r);
            e += k2 * f64::from(r) * same_parallel_pair_term(z, delta)?;
        }
    }
    Ok(e)
}

/// The two normalized series used to read off asymptotic coefficients:
/// `n₁ = (E + N²/4)/(N log N)` and `n₂ = (E + N²/4 + (N log N)/3)/N`.
///
/// # Panics
/// If `n < 2` (the normalizations need `log N > 0`).
#[must_use]
pub fn normalized_series(e: f64, n: u64) -> (f64, f64) {
    assert!(n >= 2, "normalized series needs at least two points");
    let nf = n as f64;
    let nlogn = nf * nf.ln();
    let n1 = (e + nf * nf / 4.0) / nlogn;
    let n2 = (e + nf * nf / 4.0 + nlogn / 3.0) / nf;
    (n1, n2)
}

/// Which family a set of expansion coefficients describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientFamily {
    /// Independent uniform points on the 3-sphere.
    UniformS3,
    /// Uniform antipodal pairs on the 3-sphere.
    AntipodalS3,
    /// Lifted uniform base with `k` points per fibre.
    LiftedUniform {
        /// Points per fibre.
        k: u32,
    },
    /// Lifted antipodal base with `k` points per fibre.
    LiftedAntipodal {
        /// Points per fibre.
        k: u32,
    },
}

/// Coefficients of the energy expansion `E = c₂·N² + c_{NlogN}·N log N +
/// c_linear·N + o(N)` for a specific family. All implemented families share
/// `c₂ = −1/4`; instances of different families are not comparable, so no
/// ordering is defined on the type — compare [`ExpansionCoefficients::linear`]
/// values explicitly when the families match the same table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    /// The family these coefficients describe.
    pub family: CoefficientFamily,
    /// Coefficient of `N²` (always `−1/4` here).
    pub quadratic: f64,
    /// Coefficient of `N log N` (zero for the fixed-`k` families).
    pub n_log_n: f64,
    /// Coefficient of `N`.
    pub linear: f64,
}

impl ExpansionCoefficients {
    /// Coefficients for independent uniform points on the 3-sphere.
    #[must_use]
    pub fn uniform_s3() -> Self {
        Self {
            family: CoefficientFamily::UniformS3,
            quadratic: -0.25,
            n_log_n: 0.0,
            linear: 0.25,
        }
    }

    /// Coefficients for uniform antipodal pairs on the 3-sphere.
    #[must_use]
    pub fn antipodal_s3() -> Self {
        Self {
            family: CoefficientFamily::AntipodalS3,
            quadratic: -0.25,
            n_log_n: 0.0,
            linear: 0.5 - std::f64::consts::LN_2,
        }
    }

    /// Coefficients for the lifted uniform family at `k` points per fibre.
    ///
    /// # Panics
    /// If `k < 1`.
    #[must_use]
    pub fn lifted_uniform(k: u32) -> Self {
        assert!(k >= 1);
        let kf = f64::from(k);
        Self {
            family: CoefficientFamily::LiftedUniform { k },
            quadratic: -0.25,
            n_log_n: 0.0,
            linear: kf / 4.0 - kf.ln(),
        }
    }

    /// Coefficients for the lifted antipodal family at `k` points per fibre.
    ///
    /// # Panics
    /// If `k < 1`.
    #[must_use]
    pub fn lifted_antipodal(k: u32) -> Self {
        assert!(k >= 1);
        let kf = f64::from(k);
        Self {
            family: CoefficientFamily::LiftedAntipodal { k },
            quadratic: -0.25,
            n_log_n: 0.0,
            linear: kf / 2.0 * (1.0 - std::f64::consts::LN_2) - kf.ln(),
        }
    }
}

/// The four uniform-family rows of the linear-coefficient comparison, in
/// decreasing order of linear term: plain uniform, antipodal, lifted uniform
/// at its optimal `k = 4`, lifted antipodal at its optimal `k = 7`.
#[must_use]
pub fn linear_term_table() -> [ExpansionCoefficients; 4] {
    [
        ExpansionCoefficients::uniform_s3(),
        ExpansionCoefficients::antipodal_s3(),
        ExpansionCoefficients::lifted_uniform(4),
        ExpansionCoefficients::lifted_antipodal(7),
    ]
}
