//! Nonlinear coherent states and the Borel measures that resolve the identity.
//!
//! The crate covers five coherent-state families (Glauber, SU(1,1) discrete
//! series, Barut–Girardello, and two oscillators on a noncommutative space with
//! a generalised uncertainty principle). For each family it provides
//!
//! - the eigenvalue sequence `e_n` and the log-domain moments `ln ρ_n`,
//! - the closed-form weight function `Ω(t)` with `∫ tⁿ Ω(t) dt = ρ_n`,
//! - a singularity-aware quadrature that checks that identity numerically,
//! - truncated coherent-state vectors in the Fock basis.
//!
//! All magnitudes that can leave the double-precision range are carried as
//! logarithms.

pub mod cli;
pub mod error;
pub mod families;
pub mod logspace;
pub mod measures;
pub mod quadrature;
pub mod specfun;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use families::{FamilyId, FamilyParams, FamilySpec, MomentSequence};
pub use measures::{
    BesselKernel, BorelMeasure, DensityForm, MellinFactorPair, RightBehavior, Support,
};
pub use quadrature::{integrate_density, integrate_moment, QuadResult, Transform};
pub use specfun::{bessel_k, ln_gamma, BesselEval};
pub use states::{build_state, overlap, CoherentState};
pub use verify::{verify_moments, verify_positivity, PositivityCheck, VerificationReport};
