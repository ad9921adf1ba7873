//! Which of `ax + by = (a−1)(b−1)/2` and `ax + by + 1 = (a−1)(b−1)/2` a pair
//! of naturals uses, and how that choice behaves along integer sequences.
//!
//! - [`arith`]: arbitrary-precision naturals, gcd, pair reduction, modular
//!   inverse and Θ.
//! - [`gamma`]: the classifier Γ by parity criterion, with a brute-force
//!   solving oracle and verification sweeps.
//! - [`sequences`]: sequence families, the Δ operator, consecutive gcds.
//! - [`pattern`]: run-length encoding, alternation onset, g(x) and M_k,
//!   period detection for Γ(k, n).
//! - [`density`]: the Γ = 1 density scan with CSV and SVG output.

pub mod arith;
pub mod density;
pub mod error;
pub mod gamma;
pub mod pattern;
pub mod sequences;

pub use arith::{gcd, mod_inverse, reduce, theta, Natural, ReducedPair};
pub use error::{Error, Result};
pub use gamma::{
    gamma_criterion, gamma_oracle, solve_brute, verify_criterion, verify_exactly_one,
    EquationSolution, EquationTag, VerificationReport,
};
pub use sequences::{delta, gcd_consecutive, term, DeltaSequence, SequenceSpec};
