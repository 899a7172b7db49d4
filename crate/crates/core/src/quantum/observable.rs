use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::wire::{from_pairs, to_pairs, Wire};
use crate::error::{Error, Result};
use crate::tolerance;

/// A labeled Hermitian matrix on one to three qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Wire", into = "Wire")]
pub struct Observable {
    label: String,
    matrix: Matrix,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn single_qubit_pauli(c: char) -> Option<Matrix> {
    let entries = match c {
        'I' => [ONE, ZERO, ZERO, ONE],
        'X' => [ZERO, ONE, ONE, ZERO],
        'Y' => [ZERO, -I, I, ZERO],
        'Z' => [ONE, ZERO, ZERO, -ONE],
        _ => return None,
    };
    Some(Matrix::from_row_major(2, entries.to_vec()))
}

impl Observable {
    /// Rejects matrices that are not Hermitian within `1e-12`.
    pub fn new(label: impl Into<String>, matrix: Matrix) -> Result<Self> {
        let label = label.into();
        if !matches!(matrix.dim(), 2 | 4 | 8) {
            return Err(Error::InvalidObservable {
                label,
                reason: format!("dimension {} is not 2, 4 or 8", matrix.dim()),
            });
        }
        let skew = matrix.distance(&matrix.adjoint());
        if skew > tolerance::SCALAR {
            return Err(Error::InvalidObservable {
                label,
                reason: format!("not Hermitian (|A - A†| = {skew:e})"),
            });
        }
        Ok(Self { label, matrix })
    }

    /// Tensor product of single-qubit Paulis, first character acting on the first qubit.
    pub fn pauli_word(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidPauliLabel {
                label: label.into(),
                reason: format!("length {n} outside 1..=3"),
            });
        }
        let mut matrix = Matrix::identity(1);
        for c in label.chars() {
            let p = single_qubit_pauli(c).ok_or_else(|| Error::InvalidPauliLabel {
                label: label.into(),
                reason: format!("character {c:?} is not one of I, X, Y, Z"),
            })?;
            matrix = matrix.kron(&p);
        }
        Ok(Self {
            label: label.into(),
            matrix,
        })
    }

    /// `cos θ·X + sin θ·Y` on a single qubit: θ = 0 is X, θ = π/2 is Y.
    pub fn spin(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let off = Complex64::new(c, -s);
        Self {
            label: format!("S({angle})"),
            matrix: Matrix::from_row_major(2, vec![ZERO, off, off.conj(), ZERO]),
        }
    }

    /// Embeds a single-qubit observable on qubit `qubit` of a `qubits`-qubit register.
    pub fn embed(&self, qubit: usize, qubits: usize) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                context: "embedding a single-qubit observable",
                left: self.dim(),
                right: 2,
            });
        }
        if qubit >= qubits || qubits > 3 {
            return Err(Error::InvalidObservable {
                label: self.label.clone(),
                reason: format!("cannot place on qubit {qubit} of {qubits}"),
            });
        }
        let mut matrix = Matrix::identity(1);
        let mut parts = Vec::with_capacity(qubits);
        for k in 0..qubits {
            if k == qubit {
                matrix = matrix.kron(&self.matrix);
                parts.push(self.label.clone());
            } else {
                matrix = matrix.kron(&Matrix::identity(2));
                parts.push("I".into());
            }
        }
        Ok(Self {
            label: parts.join("⊗"),
            matrix,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Largest entry magnitude of `A² − I`; zero for involutions such as Pauli words.
    pub fn involution_defect(&self) -> f64 {
        (&self.matrix * &self.matrix).distance(&Matrix::identity(self.dim()))
    }
}

/// Largest entry magnitude of `AB − BA`.
pub fn commutator_norm(a: &Observable, b: &Observable) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "commutator",
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok((&a.matrix * &b.matrix).distance(&(&b.matrix * &a.matrix)))
}

pub fn commute(a: &Observable, b: &Observable) -> Result<bool> {
    Ok(commutator_norm(a, b)? < tolerance::COMMUTATION)
}

impl From<Observable> for Wire {
    fn from(o: Observable) -> Self {
        Wire {
            label: o.label,
            dim: o.matrix.dim(),
            entries: to_pairs(o.matrix.entries()),
        }
    }
}

impl TryFrom<Wire> for Observable {
    type Error = Error;
    fn try_from(w: Wire) -> Result<Self> {
        if w.entries.len() != w.dim * w.dim {
            return Err(Error::InvalidObservable {
                label: w.label,
                reason: format!("dim {} needs {} entries", w.dim, w.dim * w.dim),
            });
        }
        let matrix = Matrix::from_row_major(w.dim, from_pairs(&w.entries));
        Observable::new(w.label, matrix)
    }
}
