//! Random point families on the 2- and 3-sphere with small logarithmic
//! energy.
//!
//! The crate builds point configurations on the unit 3-sphere by lifting
//! structured families from the 2-sphere through the Hopf fibration —
//! replacing each base point with `k` equally spaced, randomly phased
//! points on its fibre — and evaluates their discrete logarithmic energy
//! exactly. Implemented base families: independent uniform points,
//! antipodal pairs, two projection determinantal ensembles (spherical and
//! harmonic), and the quasi-deterministic diamond configuration of phased
//! roots of unity on parallels.
//!
//! Every family comes with a closed-form or semianalytic expected energy in
//! [`expectations`], a seeded Monte Carlo harness in [`harness`], and the
//! special functions and adaptive quadrature backing them in [`specfun`].
//!
//! # Quick start
//!
//! ```
//! use hopflift::energy::{fiber_energy, log_energy, roots_of_unity_circle};
//!
//! // k equally spaced points on one fibre have energy exactly −k·log k.
//! let circle = roots_of_unity_circle(12).unwrap();
//! let e = log_energy(&circle).unwrap();
//! assert!((e - fiber_energy(12)).abs() < 1e-9);
//! ```

#![forbid(unsafe_code)]
#![warn(missing_docs)]

pub mod diamond;
pub mod dpp;
pub mod energy;
pub mod expectations;
pub mod geometry;
pub mod harness;
pub mod sampling;
pub mod specfun;
pub mod stats;

pub use diamond::{DiamondError, DiamondSpec};
pub use dpp::{DppError, EnsembleFamily, ProjectionKernel, RadialProfile};
pub use energy::{fiber_energy, hopf_lift, log_energy, log_energy_s2, EnergyError};
pub use expectations::{constants, normalized_series, ExpectError};
pub use geometry::{GeometryError, SurfacePoint2, SurfacePoint3};
pub use harness::{
    mc_estimate, mc_estimate_at, ExperimentConfig, Family, HarnessError, KRule,
    OutputFormat, ResultRow,
};
pub use sampling::SeededStream;
pub use specfun::{QuadratureSpec, SpecFunError};

// The guide's runnable snippets double as doc-tests so the book and the
// crate can never drift apart.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/expectations.md")]
    mod expectations {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
