use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::{inner, norm_sqr};
use super::wire::{from_pairs, to_pairs, Wire};
use crate::error::{Error, Result};
use crate::tolerance;

/// A normalized pure state of one to three qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Wire", into = "Wire")]
pub struct StateVector {
    label: String,
    amplitudes: Vec<Complex64>,
}

fn qubit_count(dim: usize) -> Option<usize> {
    match dim {
        2 => Some(1),
        4 => Some(2),
        8 => Some(3),
        _ => None,
    }
}

impl StateVector {
    /// Accepts amplitudes whose squared norm is 1 within `1e-12`.
    pub fn new(label: impl Into<String>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let label = label.into();
        if qubit_count(amplitudes.len()).is_none() {
            return Err(Error::InvalidState(format!(
                "{label}: dimension {} is not 2, 4 or 8",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidState(format!(
                "{label}: non-finite amplitude"
            )));
        }
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > tolerance::SCALAR {
            return Err(Error::InvalidState(format!("{label}: squared norm {n}")));
        }
        Ok(Self { label, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm first.
    pub fn normalized(label: impl Into<String>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Self::new(label, amplitudes.into_iter().map(|z| z / n).collect())
    }

    /// Computational basis state `|index⟩` on `qubits` qubits.
    pub fn basis(qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(format!("|{index:0qubits$b}>"), amps)
    }

    /// `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self {
            label: "singlet".into(),
            amplitudes: vec![z, s, -s, z],
        }
    }

    /// `(|000⟩ + |111⟩)/√2`.
    pub fn ghz() -> Self {
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 8];
        amplitudes[0] = s;
        amplitudes[7] = s;
        Self {
            label: "ghz".into(),
            amplitudes,
        }
    }

    /// Haar-random state: normalized complex Gaussian vector.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        if !(1..=3).contains(&qubits) {
            return Err(Error::InvalidState(format!(
                "{qubits} qubits not supported"
            )));
        }
        let amps = (0..1usize << qubits)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized("random", amps)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> usize {
        qubit_count(self.dim()).expect("validated at construction")
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|`, which is 1 exactly when the states differ by a global phase.
    pub fn overlap(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return 0.0;
        }
        self.inner(other).norm()
    }

    /// Rotates the global phase so the first amplitude above `1e-12` in magnitude is real and positive.
    pub fn canonical_phase(mut self) -> Self {
        if let Some(first) = self
            .amplitudes
            .iter()
            .find(|z| z.norm() > tolerance::SCALAR)
        {
            let phase = first.conj() / first.norm();
            for z in &mut self.amplitudes {
                *z *= phase;
            }
        }
        self
    }
}

impl From<StateVector> for Wire {
    fn from(s: StateVector) -> Self {
        Wire {
            label: s.label,
            dim: s.amplitudes.len(),
            entries: to_pairs(&s.amplitudes),
        }
    }
}

impl TryFrom<Wire> for StateVector {
    type Error = Error;
    fn try_from(w: Wire) -> Result<Self> {
        if w.entries.len() != w.dim {
            return Err(Error::InvalidState(format!(
                "{}: dim {} but {} entries",
                w.label,
                w.dim,
                w.entries.len()
            )));
        }
        StateVector::new(w.label, from_pairs(&w.entries))
    }
}
