use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// JSON form shared by states and observables: `{label, dim, entries: [[re, im], ...]}`.
/// Matrix entries are row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub(crate) struct Wire {
    pub label: String,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

pub(crate) fn to_pairs(z: &[Complex64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

pub(crate) fn from_pairs(p: &[[f64; 2]]) -> Vec<Complex64> {
    p.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}
