//! Small-dimensional quantum mechanics: Pauli words, commutation, joint eigenbases, Born rule.

mod context;
mod matrix;
mod observable;
mod state;
mod wire;

pub use context::{
    expectation, ghz_parity_state, joint_eigenbasis, measure, measure_commuting, MeasurementContext,
};
pub use matrix::{inner, Matrix};
pub use observable::{commutator_norm, commute, Observable};
pub use state::StateVector;
