//! Optimal information-disturbance tradeoff for minimum-error discrimination
//! of two equiprobable pure qubit states.
//!
//! The crate is organised bottom-up:
//!
//! * [`qubit`] holds the dense 2×2 / 4×4 complex kernel and the symmetric
//!   two-state geometry `ψ₁ = (cos α, sin α)`, `ψ₂ = (sin α, cos α)`.
//! * [`instruments`] implements Kraus-level instruments, their POVMs and the
//!   success-probability and disturbance functionals.
//! * [`choi`] is the Choi–Jamiołkowski view of the same maps.
//! * [`tradeoff`] contains every closed-form result: the Helstrom endpoint,
//!   the feedback tilt, the optimal instrument family and the normalized
//!   tradeoff identity.
//! * [`oracle`] independently maximizes the Choi-level objective and checks
//!   it against the closed form.
//! * [`simulate`] estimates success probability and disturbance by seeded
//!   Monte Carlo sampling.
//!
//! Basis kets `|1⟩`, `|2⟩` map to indices 0 and 1 throughout.

pub mod choi;
pub mod error;
pub mod instruments;
pub mod oracle;
pub mod qubit;
pub mod simulate;
pub mod tradeoff;

pub use error::{Error, Result};

/// Tolerance for identities that follow directly from the algebra.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for derived equalities (closed forms evaluated through several steps).
pub const DERIVED_TOL: f64 = 1e-9;
