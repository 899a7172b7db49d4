//! Numerical tolerances shared across the crate.

/// Commutation and orthonormality checks on products of up to 8x8 matrices.
pub const COMMUTATION: f64 = 1e-10;

/// Scalar identities: normalization, Hermiticity, involution.
pub const SCALAR: f64 = 1e-12;

/// Negative probabilities down to this magnitude are rounding noise and get clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-14;

/// Conditioning events at or below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Default threshold separating a genuine violation from floating-point noise.
pub const CONDITION_DEFAULT: f64 = 1e-9;
