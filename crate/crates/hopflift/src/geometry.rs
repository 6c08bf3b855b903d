//! Points on the unit 2- and 3-spheres, the complex projective line, the Hopf
//! map with its fibre parametrization, and Haar-random rotations.
//!
//! # Conventions
//!
//! A point of S³ is stored as a real 4-vector `(a, b, c, d)`; its complex form
//! is the pair `(a + ib, c + id)`, see [`SurfacePoint3::complex_pair`]. In
//! these coordinates the Hopf map is
//!
//! ```text
//! h(a, b, c, d) = (a² + b² − c² − d²,  2(ad + bc),  2(bd − ac)),
//! ```
//!
//! and the circle action that moves a point along its fibre rotates `(a, b)`
//! by `+t` and `(c, d)` by `−t`. Fibres are parametrized by
//! [`fiber_point`]; the parametrization is singular over `(−1, 0, 0)`, whose
//! fibre callers must avoid by rotating their configuration first.
//!
//! A fibre is also a point of CP¹, stored as a unit homogeneous complex pair
//! ([`Cp1Point`]). The pair returned by [`s2_to_cp1`] is exactly the complex
//! form of `fiber_point(x, 0)` with the second coordinate conjugated, so that
//! the absolute inner product of two fibres obeys
//! `cp1_abs_inner(p, q)² = (1 + ⟨x, y⟩) / 2`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Tolerance accepted when validating unit-norm invariants at construction.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Errors from geometric constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// A coordinate vector expected to lie on the unit sphere does not.
    #[error("coordinates are not unit length: |v|^2 = {norm_squared}")]
    NotUnit {
        /// Squared Euclidean norm of the offending vector.
        norm_squared: f64,
    },
    /// The fibre parametrization was evaluated over its singular base point.
    #[error("fibre parametrization is singular over (-1,0,0): 1 + x = {one_plus_x}")]
    SingularBase {
        /// Value of `1 + x₁` at the offending base point.
        one_plus_x: f64,
    },
}

/// A point on the unit sphere S² ⊂ ℝ³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint2 {
    /// First coordinate.
    pub x: f64,
    /// Second coordinate.
    pub y: f64,
    /// Third coordinate.
    pub z: f64,
}

impl SurfacePoint2 {
    /// Builds a point, checking the unit-norm invariant to [`UNIT_NORM_TOL`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let n2 = x * x + y * y + z * z;
        if (n2 - 1.0).abs() > 3.0 * UNIT_NORM_TOL {
            return Err(GeometryError::NotUnit { norm_squared: n2 });
        }
        Ok(Self { x, y, z })
    }

    /// Builds a point from arbitrary non-zero coordinates by normalizing them.
    pub fn from_unnormalized(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let n2 = x * x + y * y + z * z;
        if n2 < 1e-300 {
            return Err(GeometryError::NotUnit { norm_squared: n2 });
        }
        let inv = n2.sqrt().recip();
        Ok(Self { x: x * inv, y: y * inv, z: z * inv })
    }

    /// Coordinates as an array.
    #[must_use]
    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Euclidean inner product with another point.
    #[must_use]
    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Squared chordal distance to another point.
    #[must_use]
    pub fn distance_squared(&self, other: &Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    /// The antipodal point `−x`.
    #[must_use]
    pub fn antipode(&self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }
}

/// A point on the unit sphere S³ ⊂ ℝ⁴.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint3 {
    /// First coordinate.
    pub a: f64,
    /// Second coordinate.
    pub b: f64,
    /// Third coordinate.
    pub c: f64,
    /// Fourth coordinate.
    pub d: f64,
}

impl SurfacePoint3 {
    /// Builds a point, checking the unit-norm invariant to [`UNIT_NORM_TOL`].
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeometryError> {
        let n2 = a * a + b * b + c * c + d * d;
        if (n2 - 1.0).abs() > 3.0 * UNIT_NORM_TOL {
            return Err(GeometryError::NotUnit { norm_squared: n2 });
        }
        Ok(Self { a, b, c, d })
    }

    /// Builds a point from arbitrary non-zero coordinates by normalizing them.
    pub fn from_unnormalized(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeometryError> {
        let n2 = a * a + b * b + c * c + d * d;
        if n2 < 1e-300 {
            return Err(GeometryError::NotUnit { norm_squared: n2 });
        }
        let inv = n2.sqrt().recip();
        Ok(Self { a: a * inv, b: b * inv, c: c * inv, d: d * inv })
    }

    /// The complex form `(a + ib, c + id)` of this point.
    #[must_use]
    pub fn complex_pair(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.a, self.b), Complex64::new(self.c, self.d))
    }

    /// Rebuilds a point from its complex form `(a + ib, c + id)`.
    pub fn from_complex_pair(z1: Complex64, z2: Complex64) -> Result<Self, GeometryError> {
        Self::new(z1.re, z1.im, z2.re, z2.im)
    }

    /// Coordinates as an array.
    #[must_use]
    pub fn coords(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Euclidean inner product with another point.
    #[must_use]
    pub fn dot(&self, other: &Self) -> f64 {
        self.a * other.a + self.b * other.b + self.c * other.c + self.d * other.d
    }

    /// Squared chordal distance to another point.
    #[must_use]
    pub fn distance_squared(&self, other: &Self) -> f64 {
        let da = self.a - other.a;
        let db = self.b - other.b;
        let dc = self.c - other.c;
        let dd = self.d - other.d;
        da * da + db * db + dc * dc + dd * dd
    }

    /// The antipodal point `−x`.
    #[must_use]
    pub fn antipode(&self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }
}

/// A point of CP¹: a homogeneous complex pair stored with unit norm.
///
/// Two values represent the same projective point exactly when they differ by
/// a unit-modulus complex scalar; all exported operations are invariant under
/// that rescaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cp1Point {
    q1: Complex64,
    q2: Complex64,
}

impl Cp1Point {
    /// Builds a projective point from any non-zero homogeneous pair,
    /// normalizing it to unit norm.
    pub fn new(q1: Complex64, q2: Complex64) -> Result<Self, GeometryError> {
        let n2 = q1.norm_sqr() + q2.norm_sqr();
        if n2 < 1e-300 {
            return Err(GeometryError::NotUnit { norm_squared: n2 });
        }
        let inv = n2.sqrt().recip();
        Ok(Self { q1: q1 * inv, q2: q2 * inv })
    }

    /// The stored unit-norm representative.
    #[must_use]
    pub fn pair(&self) -> (Complex64, Complex64) {
        (self.q1, self.q2)
    }
}

/// The Hopf map from S³ onto S².
///
/// In real coordinates: `h(a,b,c,d) = (a²+b²−c²−d², 2(ad+bc), 2(bd−ac))`.
/// The output is exactly unit norm in exact arithmetic; no renormalization is
/// applied.
///
/// ```
/// use hopflift::geometry::{hopf_map, SurfacePoint3};
/// let s = 0.5f64.sqrt();
/// let x = SurfacePoint3::new(s, 0.0, s, 0.0).unwrap();
/// let p = hopf_map(&x);
/// assert!((p.x - 0.0).abs() < 1e-15 && (p.z + 1.0).abs() < 1e-15);
/// ```
#[must_use]
pub fn hopf_map(x: &SurfacePoint3) -> SurfacePoint2 {
    let (a, b, c, d) = (x.a, x.b, x.c, x.d);
    SurfacePoint2 {
        x: a * a + b * b - c * c - d * d,
        y: 2.0 * (a * d + b * c),
        z: 2.0 * (b * d - a * c),
    }
}

/// Threshold on `1 + x₁` below which the fibre parametrization is rejected.
pub const SINGULAR_BASE_TOL: f64 = 1e-12;

/// A point of the fibre over `p` at angle `t`.
///
/// The fibre over `p = (p₁, p₂, p₃)` with `p₁ ≠ −1` is the circle
///
/// ```text
/// t ↦ ((1+p₁)·cos t, (1+p₁)·sin t, p₂·sin t − p₃·cos t, p₂·cos t + p₃·sin t)
///       / sqrt(2(1+p₁)),
/// ```
///
/// which satisfies `hopf_map(fiber_point(p, t)) = p` for every `t`. Over the
/// singular base `(−1, 0, 0)` the formula divides by zero and the call fails
/// with [`GeometryError::SingularBase`].
pub fn fiber_point(p: &SurfacePoint2, t: f64) -> Result<SurfacePoint3, GeometryError> {
    let one_plus = 1.0 + p.x;
    if one_plus < SINGULAR_BASE_TOL {
        return Err(GeometryError::SingularBase { one_plus_x: one_plus });
    }
    let inv = (2.0 * one_plus).sqrt().recip();
    let (sin_t, cos_t) = t.sin_cos();
    Ok(SurfacePoint3 {
        a: one_plus * cos_t * inv,
        b: one_plus * sin_t * inv,
        c: (p.y * sin_t - p.z * cos_t) * inv,
        d: (p.y * cos_t + p.z * sin_t) * inv,
    })
}

/// Absolute inner product `|p₁ q̄₁ + p₂ q̄₂|` of two projective points,
/// clamped to `[0, 1]`.
///
/// For fibres over base points `x, y` on S² it satisfies
/// `cp1_abs_inner(p, q)² = (1 + ⟨x, y⟩)/2`.
#[must_use]
pub fn cp1_abs_inner(p: &Cp1Point, q: &Cp1Point) -> f64 {
    let inner = p.q1 * q.q1.conj() + p.q2 * q.q2.conj();
    inner.norm().clamp(0.0, 1.0)
}

/// The projective point of the fibre over `x`.
///
/// The representative with the larger-modulus coordinate chosen real and
/// non-negative is returned, so the map is total (no stereographic
/// singularity): the point `(1, 0, 0)` maps to `[1 : 0]` — the chart point at
/// infinity of the affine chart `z = q₁/q₂` — and `(−1, 0, 0)` maps to
/// `[0 : 1]`.
#[must_use]
pub fn s2_to_cp1(x: &SurfacePoint2) -> Cp1Point {
    if x.x >= 0.0 {
        // |q1|² = (1+x)/2 ≥ 1/2 dominates.
        let q1 = ((1.0 + x.x) / 2.0).sqrt();
        let denom = (2.0 * (1.0 + x.x)).sqrt().recip();
        Cp1Point {
            q1: Complex64::new(q1, 0.0),
            q2: Complex64::new(-x.z * denom, -x.y * denom),
        }
    } else {
        // |q2|² = (1−x)/2 > 1/2 dominates.
        let q2 = ((1.0 - x.x) / 2.0).sqrt();
        let denom = (2.0 * (1.0 - x.x)).sqrt().recip();
        Cp1Point {
            q1: Complex64::new(-x.z * denom, x.y * denom),
            q2: Complex64::new(q2, 0.0),
        }
    }
}

/// The S² point under a projective point: the inverse of [`s2_to_cp1`] up to
/// fibre phase.
///
/// `(q₁, q₂) ↦ (|q₁|² − |q₂|², 2 Im(q₁ q̄₂), −2 Re(q₁ q̄₂))`.
#[must_use]
pub fn cp1_to_s2(p: &Cp1Point) -> SurfacePoint2 {
    let cross = p.q1 * p.q2.conj();
    SurfacePoint2 {
        x: p.q1.norm_sqr() - p.q2.norm_sqr(),
        y: 2.0 * cross.im,
        z: -2.0 * cross.re,
    }
}

/// A proper rotation of ℝ³ (orthogonal, determinant +1).
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation3 {
    m: [[f64; 3]; 3],
}

/// A proper rotation of ℝ⁴ (orthogonal, determinant +1).
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation4 {
    m: [[f64; 4]; 4],
}

/// Gram–Schmidt orthonormalization of a square matrix given by rows; rows that
/// collapse are redrawn by the caller. Returns false when the input was
/// numerically dependent.
fn orthonormalize<const N: usize>(m: &mut [[f64; N]; N]) -> bool {
    for i in 0..N {
        for j in 0..i {
            let dot: f64 = (0..N).map(|k| m[i][k] * m[j][k]).sum();
            for k in 0..N {
                m[i][k] -= dot * m[j][k];
            }
        }
        let norm: f64 = (0..N).map(|k| m[i][k] * m[i][k]).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return false;
        }
        for k in 0..N {
            m[i][k] /= norm;
        }
    }
    true
}

fn det_sign<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    // LU with partial pivoting on a copy; only the sign is needed.
    let mut a = *m;
    let mut sign = 1.0f64;
    for col in 0..N {
        let mut piv = col;
        for row in col + 1..N {
            if a[row][col].abs() > a[piv][col].abs() {
                piv = row;
            }
        }
        if piv != col {
            a.swap(piv, col);
            sign = -sign;
        }
        if a[col][col] == 0.0 {
            return 0.0;
        }
        if a[col][col] < 0.0 {
            sign = -sign;
        }
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            for k in col..N {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    sign
}

fn haar_rotation<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> [[f64; N]; N] {
    loop {
        let mut m = [[0.0f64; N]; N];
        for row in &mut m {
            for v in row.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
        }
        if !orthonormalize(&mut m) {
            continue;
        }
        if det_sign(&m) < 0.0 {
            // Flipping one row restores determinant +1 and preserves the
            // Haar distribution on the rotation group.
            for v in &mut m[N - 1] {
                *v = -*v;
            }
        }
        return m;
    }
}

impl Rotation3 {
    /// The identity rotation.
    #[must_use]
    pub fn identity() -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { m }
    }

    /// Builds a rotation from a row-major matrix; validates orthogonality and
    /// determinant +1 to `1e-12`.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        validate_rotation(&m)?;
        Ok(Self { m })
    }

    /// Applies the rotation to one point.
    #[must_use]
    pub fn apply(&self, p: &SurfacePoint2) -> SurfacePoint2 {
        let v = [p.x, p.y, p.z];
        let mut out = [0.0; 3];
        for (o, row) in out.iter_mut().zip(&self.m) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
        }
        SurfacePoint2 { x: out[0], y: out[1], z: out[2] }
    }

    /// Applies the rotation to every point of a configuration.
    #[must_use]
    pub fn apply_all(&self, cfg: &[SurfacePoint2]) -> Vec<SurfacePoint2> {
        cfg.iter().map(|p| self.apply(p)).collect()
    }

    /// Row-major matrix entries.
    #[must_use]
    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.m
    }
}

impl Rotation4 {
    /// The identity rotation.
    #[must_use]
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { m }
    }

    /// Builds a rotation from a row-major matrix; validates orthogonality and
    /// determinant +1 to `1e-12`.
    pub fn from_matrix(m: [[f64; 4]; 4]) -> Result<Self, GeometryError> {
        validate_rotation(&m)?;
        Ok(Self { m })
    }

    /// Applies the rotation to one point.
    #[must_use]
    pub fn apply(&self, p: &SurfacePoint3) -> SurfacePoint3 {
        let v = [p.a, p.b, p.c, p.d];
        let mut out = [0.0; 4];
        for (o, row) in out.iter_mut().zip(&self.m) {
            *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
        SurfacePoint3 { a: out[0], b: out[1], c: out[2], d: out[3] }
    }

    /// Applies the rotation to every point of a configuration.
    #[must_use]
    pub fn apply_all(&self, cfg: &[SurfacePoint3]) -> Vec<SurfacePoint3> {
        cfg.iter().map(|p| self.apply(p)).collect()
    }

    /// Row-major matrix entries.
    #[must_use]
    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.m
    }
}

fn validate_rotation<const N: usize>(m: &[[f64; N]; N]) -> Result<(), GeometryError> {
    for i in 0..N {
        for j in 0..N {
            let dot: f64 = (0..N).map(|k| m[i][k] * m[j][k]).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            if (dot - expect).abs() > 1e-12 {
                return Err(GeometryError::NotUnit { norm_squared: dot });
            }
        }
    }
    if det_sign(m) < 0.0 {
        return Err(GeometryError::NotUnit { norm_squared: -1.0 });
    }
    Ok(())
}

/// Draws a Haar-distributed random rotation of ℝ³.
pub fn random_rotation3<R: Rng + ?Sized>(rng: &mut R) -> Rotation3 {
    Rotation3 { m: haar_rotation(rng) }
}

/// Draws a Haar-distributed random rotation of ℝ⁴.
pub fn random_rotation4<R: Rng + ?Sized>(rng: &mut R) -> Rotation4 {
    Rotation4 { m: haar_rotation(rng) }
}
