//! Conditional-probability analysis of Bell/EPR and GHZ experiments.
//!
//! The crate builds tables `P(outcomes | settings, λ)` from quantum states and
//! from local hidden-variable models, then checks them against three conditions:
//!
//! * **elementary locality** (EL): a party's marginal does not depend on remote settings;
//! * **predictive completeness** (PC): conditioning on remote outcomes does not
//!   sharpen a party's prediction;
//! * **factorization**: `P(ab|xyλ) = P(a|xλ)P(b|yλ)`, which is EL and PC together.
//!
//! Quantum tables satisfy EL and violate PC; local models satisfy all three and
//! therefore obey the CHSH bound. A 1+1D light-cone model tracks when each
//! conditional becomes available to Alice, Bob, and a verifier.

pub mod distribution;
pub mod error;
pub mod inference;
pub mod quantum;
pub mod spacetime;
pub mod theories;
pub mod tolerance;

pub use distribution::OutcomeDistribution;
pub use error::{Error, Result};
pub use inference::{ConditionKind, ConditionReport, ConditionalTable, ScenarioSpec};
pub use quantum::{MeasurementContext, Observable, StateVector};
