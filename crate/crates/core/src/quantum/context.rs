//! Joint eigenbases of commuting involutions and Born-rule measurement.
//!
//! For observables `O₁..O_m` with `O_k² = I`, the joint eigenspace labelled by
//! signs `(s₁..s_m)` has projector `Π = ∏ (I + s_k O_k)/2`. No eigensolver is
//! needed: a label is present iff `tr Π ≥ 1`, and a rank-one `Π` yields its
//! eigenvector as any nonzero column.

use num_complex::Complex64;

use super::matrix::{inner, norm_sqr, Matrix};
use super::observable::{commutator_norm, Observable};
use super::state::StateVector;
use crate::distribution::{all_outcomes, outcome_index, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::tolerance;

/// A CSCO together with its labelled orthonormal eigenbasis.
#[derive(Debug, Clone)]
pub struct MeasurementContext {
    observables: Vec<Observable>,
    eigenbasis: Vec<(Vec<i8>, StateVector)>,
}

impl MeasurementContext {
    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    /// `(eigenvalue tuple, unit eigenvector)` pairs in outcome-index order.
    pub fn eigenbasis(&self) -> &[(Vec<i8>, StateVector)] {
        &self.eigenbasis
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn eigenvector(&self, label: &[i8]) -> Option<&StateVector> {
        self.eigenbasis
            .iter()
            .find(|(l, _)| l.as_slice() == label)
            .map(|(_, v)| v)
    }
}

fn validate_commuting_involutions(observables: &[Observable]) -> Result<()> {
    let first = observables
        .first()
        .ok_or_else(|| Error::InvalidScenario("empty observable list".into()))?;
    for o in observables {
        if o.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                context: "measurement context",
                left: first.dim(),
                right: o.dim(),
            });
        }
        let defect = o.involution_defect();
        if defect > tolerance::SCALAR {
            return Err(Error::InvalidObservable {
                label: o.label().into(),
                reason: format!("does not square to identity (defect {defect:e})"),
            });
        }
    }
    for (i, a) in observables.iter().enumerate() {
        for b in &observables[i + 1..] {
            let norm = commutator_norm(a, b)?;
            if norm >= tolerance::COMMUTATION {
                return Err(Error::NonCommuting {
                    first: a.label().into(),
                    second: b.label().into(),
                    norm,
                });
            }
        }
    }
    Ok(())
}

fn spectral_projector(observables: &[Observable], signs: &[i8]) -> Matrix {
    let dim = observables[0].dim();
    let id = Matrix::identity(dim);
    observables
        .iter()
        .zip(signs)
        .fold(id.clone(), |acc, (o, &s)| {
            let half = Complex64::new(0.5 * f64::from(s), 0.0);
            let factor = &id.scale(Complex64::new(0.5, 0.0)) + &o.matrix().scale(half);
            &acc * &factor
        })
}

/// Simultaneous eigenbasis of mutually commuting involutions.
///
/// Fails with [`Error::NonCommuting`] if any pair fails to commute, and with
/// [`Error::Degenerate`] if some eigenvalue tuple labels more than one vector,
/// i.e. the set is not complete.
pub fn joint_eigenbasis(observables: &[Observable]) -> Result<MeasurementContext> {
    validate_commuting_involutions(observables)?;
    let mut eigenbasis = Vec::new();
    for signs in all_outcomes(observables.len()) {
        let proj = spectral_projector(observables, &signs);
        let rank = proj.trace().re;
        let multiplicity = rank.round() as usize;
        if (rank - multiplicity as f64).abs() > tolerance::COMMUTATION {
            return Err(Error::InvalidScenario(format!(
                "projector trace {rank} for label {signs:?} is not an integer"
            )));
        }
        match multiplicity {
            0 => continue,
            1 => {
                let column = (0..proj.dim())
                    .map(|j| proj.column(j))
                    .max_by(|u, v| norm_sqr(u).total_cmp(&norm_sqr(v)))
                    .expect("nonempty matrix");
                let v = StateVector::normalized(format!("{signs:?}"), column)?.canonical_phase();
                eigenbasis.push((signs, v));
            }
            m => {
                return Err(Error::Degenerate {
                    label: signs,
                    multiplicity: m,
                })
            }
        }
    }
    let dim = observables[0].dim();
    if eigenbasis.len() != dim {
        return Err(Error::InvalidScenario(format!(
            "found {} eigenvectors in dimension {dim}",
            eigenbasis.len()
        )));
    }
    for (i, (_, u)) in eigenbasis.iter().enumerate() {
        for (_, v) in &eigenbasis[i + 1..] {
            let overlap = u.inner(v).norm();
            if overlap > tolerance::COMMUTATION {
                return Err(Error::InvalidScenario(format!(
                    "eigenvectors not orthogonal (overlap {overlap:e})"
                )));
            }
        }
    }
    Ok(MeasurementContext {
        observables: observables.to_vec(),
        eigenbasis,
    })
}

/// Born rule over a CSCO: `P(label) = |⟨e_label|ψ⟩|²`.
pub fn measure(state: &StateVector, context: &MeasurementContext) -> Result<OutcomeDistribution> {
    if state.dim() != context.dim() {
        return Err(Error::DimensionMismatch {
            context: "measurement",
            left: state.dim(),
            right: context.dim(),
        });
    }
    let arity = context.observables.len();
    let mut probs = vec![0.0; 1 << arity];
    for (label, v) in &context.eigenbasis {
        probs[outcome_index(label)] = inner(v.amplitudes(), state.amplitudes()).norm_sqr();
    }
    OutcomeDistribution::new(arity, probs)
}

/// Born rule through spectral projectors, `P(s) = ‖Π_s ψ‖²`. Works for any commuting
/// set of involutions, complete or not (a single `XXY` on three qubits, say).
pub fn measure_commuting(
    state: &StateVector,
    observables: &[Observable],
) -> Result<OutcomeDistribution> {
    validate_commuting_involutions(observables)?;
    if state.dim() != observables[0].dim() {
        return Err(Error::DimensionMismatch {
            context: "measurement",
            left: state.dim(),
            right: observables[0].dim(),
        });
    }
    OutcomeDistribution::from_fn(observables.len(), |signs| {
        norm_sqr(&spectral_projector(observables, signs).apply(state.amplitudes()))
    })
}

/// `⟨ψ|O|ψ⟩`.
pub fn expectation(state: &StateVector, observable: &Observable) -> Result<f64> {
    if state.dim() != observable.dim() {
        return Err(Error::DimensionMismatch {
            context: "expectation",
            left: state.dim(),
            right: observable.dim(),
        });
    }
    Ok(inner(
        state.amplitudes(),
        &observable.matrix().apply(state.amplitudes()),
    )
    .re)
}

/// The simultaneous (+1,+1,+1) eigenvector of `XYY`, `YXY`, `YYX`.
pub fn ghz_parity_state() -> StateVector {
    let ops: Vec<Observable> = ["XYY", "YXY", "YYX"]
        .iter()
        .map(|w| Observable::pauli_word(w).expect("valid word"))
        .collect();
    joint_eigenbasis(&ops)
        .expect("XYY, YXY, YYX form a CSCO")
        .eigenvector(&[1, 1, 1])
        .expect("label present")
        .clone()
        .with_label("psi_in")
}
