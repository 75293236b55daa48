//! Coherence quantum speed limits for open qubit dynamics.
//!
//! The skew-information coherence `C(ρ) = 1 − Σ_k ⟨k|√ρ|k⟩²` changes no
//! faster than the Wigner–Yanase speed `√Tr(d√ρ/dt)²` allows. For an
//! evolution of duration `τ`,
//!
//! ```text
//! τ ≥ τ_CSL = |Δ_C| / ⟨√(¼ I_F + 2 I_WY)⟩_τ,
//! Δ_C = arccos√(1 − C(ρ_τ)) − arccos√(1 − C(ρ_0)).
//! ```
//!
//! Modules, bottom up:
//!
//! - [`densmat`]: validated states, square roots, affinity and angle.
//! - [`coherence`]: the coherence measure, its brute-force oracle and `Δ_C`.
//! - [`dynamics`]: decay rates, closed-form channels and an RK4 integrator.
//! - [`metric`]: speed along a trajectory and its Fisher/skew split.
//! - [`qsl`]: `τ_CSL`, geodesics and attainability checks.
//! - [`figures`], [`verify`]: figure data sweeps and the invariant suites
//!   driven by the command-line tool.

#![forbid(unsafe_code)]

pub mod coherence;
pub mod densmat;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod figures;
pub mod metric;
pub mod qsl;
mod quad;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
