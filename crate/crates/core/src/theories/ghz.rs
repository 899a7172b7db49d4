//! Three-party GHZ analysis: the parity contradiction and the ladder of conditionals.
//!
//! With settings X (θ = 0) and Y (θ = π/2) for each party, a GHZ-type state gives
//! `P(abc|uvw) = (1 + s·abc·cos(u+v+w))/8`, where `s = ⟨XXX⟩ = ±1`. The standard
//! `(|000⟩ + |111⟩)/√2` has `s = +1`; the (+1,+1,+1) eigenvector of
//! `XYY, YXY, YYX` has `s = −1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::models::{table_from_quantum, DeterministicStrategy, QuantumModel};
use crate::distribution::{all_outcomes, outcome_key};
use crate::error::{Error, Result};
use crate::inference::ConditionalTable;
use crate::quantum::{expectation, ghz_parity_state, Observable, StateVector};
use crate::tolerance;

/// `(1 + s·abc·cos(u+v+w))/8`.
pub fn ghz_closed_form(parity_sign: f64, outcome: [i8; 3], angles: [f64; 3]) -> f64 {
    let abc = f64::from(outcome[0] * outcome[1] * outcome[2]);
    (1.0 + parity_sign * abc * (angles[0] + angles[1] + angles[2]).cos()) / 8.0
}

/// `⟨XXX⟩` rounded to ±1, or an error if the state is not a GHZ-type eigenstate of XXX.
pub fn parity_sign(state: &StateVector) -> Result<f64> {
    let xxx = Observable::pauli_word("XXX")?;
    let e = expectation(state, &xxx)?;
    if (e.abs() - 1.0).abs() > tolerance::SCALAR {
        return Err(Error::InvalidState(format!(
            "{} is not an XXX eigenstate (<XXX> = {e})",
            state.label()
        )));
    }
    Ok(e.signum())
}

const WORDS: [&str; 4] = ["XYY", "YXY", "YYX", "XXX"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityRow {
    pub word: String,
    /// Probability that the product of the three outcomes is +1.
    pub product_plus: f64,
    pub product_minus: f64,
}

impl ParityRow {
    /// `Some(±1)` when the product is certain within `1e-12`.
    pub fn certain(&self) -> Option<i8> {
        if (self.product_plus - 1.0).abs() <= tolerance::SCALAR {
            Some(1)
        } else if (self.product_minus - 1.0).abs() <= tolerance::SCALAR {
            Some(-1)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzParityReport {
    pub rows: Vec<ParityRow>,
    /// Measured products are certain: +1 for XYY, YXY, YYX and −1 for XXX.
    pub quantum_certainties: bool,
    pub assignments_scanned: usize,
    /// Assignments with `x_A y_B y_C = y_A x_B y_C = y_A y_B x_C = +1`.
    pub assignments_consistent: usize,
    /// Every consistent assignment has `x_A x_B x_C = +1`.
    pub consistent_force_xxx_plus: bool,
    pub contradiction: bool,
}

impl fmt::Display for GhzParityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<6} {:>14} {:>14} {:>8}",
            "word", "P(abc=+1)", "P(abc=-1)", "certain"
        )?;
        for r in &self.rows {
            let certain = match r.certain() {
                Some(v) => outcome_key(&[v]),
                None => "no".into(),
            };
            writeln!(
                f,
                "{:<6} {:>14.12} {:>14.12} {:>8}",
                r.word, r.product_plus, r.product_minus, certain
            )?;
        }
        writeln!(
            f,
            "deterministic assignments: {} scanned, {} consistent with xyy=yxy=yyx=+1, all force xxx=+1: {}",
            self.assignments_scanned,
            self.assignments_consistent,
            if self.consistent_force_xxx_plus { "TRUE" } else { "FALSE" }
        )?;
        write!(
            f,
            "contradiction: {}",
            if self.contradiction { "TRUE" } else { "FALSE" }
        )
    }
}

fn xy_indices(table: &ConditionalTable) -> Result<Vec<[usize; 2]>> {
    let sc = table.scenario();
    if sc.parties() != 3 {
        return Err(Error::InvalidScenario(
            "GHZ analysis needs three parties".into(),
        ));
    }
    (0..3)
        .map(
            |p| match (sc.setting_index(p, "X"), sc.setting_index(p, "Y")) {
                (Some(x), Some(y)) => Ok([x, y]),
                _ => Err(Error::InvalidScenario(format!(
                    "party {p} lacks settings labelled X and Y"
                ))),
            },
        )
        .collect()
}

/// Parity analysis for any three-party table whose settings are labelled `X` and `Y`.
pub fn ghz_parity_table(table: &ConditionalTable) -> Result<GhzParityReport> {
    let idx = xy_indices(table)?;
    let rows = WORDS
        .iter()
        .map(|word| {
            let settings: Vec<usize> = word
                .chars()
                .enumerate()
                .map(|(p, c)| idx[p][usize::from(c == 'Y')])
                .collect();
            let d = table.averaged(&settings)?;
            let plus: f64 = d
                .iter()
                .filter(|(o, _)| o.iter().product::<i8>() > 0)
                .map(|(_, p)| p)
                .sum();
            Ok(ParityRow {
                word: (*word).into(),
                product_plus: plus,
                product_minus: 1.0 - plus,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let expected = [1, 1, 1, -1];
    let quantum_certainties = rows
        .iter()
        .zip(expected)
        .all(|(r, e)| r.certain() == Some(e));

    let strategies = DeterministicStrategy::enumerate(&[2, 2, 2]);
    let value = |s: &DeterministicStrategy, word: &str| -> i8 {
        word.chars()
            .enumerate()
            .map(|(p, c)| s.outcome(p, usize::from(c == 'Y')))
            .product()
    };
    let consistent: Vec<&DeterministicStrategy> = strategies
        .iter()
        .filter(|s| WORDS[..3].iter().all(|w| value(s, w) == 1))
        .collect();
    let consistent_force_xxx_plus = consistent.iter().all(|s| value(s, "XXX") == 1);
    Ok(GhzParityReport {
        rows,
        quantum_certainties,
        assignments_scanned: strategies.len(),
        assignments_consistent: consistent.len(),
        consistent_force_xxx_plus,
        contradiction: quantum_certainties && !consistent.is_empty() && consistent_force_xxx_plus,
    })
}

/// Parity contradiction for a model whose state is the (+1,+1,+1) eigenvector of
/// `XYY, YXY, YYX` (any global phase).
pub fn ghz_parity_check(model: &QuantumModel) -> Result<GhzParityReport> {
    let psi_in = ghz_parity_state();
    if model.state().dim() != 8
        || (model.state().overlap(&psi_in) - 1.0).abs() > tolerance::CONDITION_DEFAULT
    {
        return Err(Error::InvalidState(format!(
            "{} is not the +1 eigenvector of XYY, YXY, YYX",
            model.state().label()
        )));
    }
    let table = table_from_quantum(&QuantumModel::xy_settings(model.state().clone())?)?;
    ghz_parity_table(&table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRow {
    pub settings: [String; 3],
    /// Conditional in the reduced notation, e.g. `P(b|uvλa)`.
    pub descriptor: String,
    pub outcome: [i8; 3],
    pub value: f64,
    pub expected: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzLadderReport {
    pub parity_sign: f64,
    pub rows: Vec<LadderRow>,
    pub max_residual: f64,
    /// Every conditional matches its expected value within `1e-12`.
    pub holds: bool,
    /// Per setting tuple: how far the doubly-conditioned predictions move from 1/2.
    pub pc_violation: Vec<([String; 3], f64)>,
}

impl fmt::Display for GhzLadderReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "parity sign <XXX> = {:+}", self.parity_sign)?;
        writeln!(f, "{:<10} {:>16}", "settings", "PC violation")?;
        for (s, v) in &self.pc_violation {
            writeln!(f, "{:<10} {:>16.12}", s.concat(), v)?;
        }
        writeln!(f, "doubly-conditioned (first outcome of each tuple shown):")?;
        for r in self
            .rows
            .iter()
            .filter(|r| r.descriptor.len() > 10 && r.descriptor.starts_with("P(c"))
        {
            writeln!(
                f,
                "  {:<4} abc={:<7} {:<16} {:.12} (expected {:.12})",
                r.settings.concat(),
                outcome_key(&r.outcome),
                r.descriptor,
                r.value,
                r.expected
            )?;
        }
        write!(
            f,
            "ladder max residual {:.3e}: {}",
            self.max_residual,
            if self.holds { "PASS" } else { "FAIL" }
        )
    }
}

const SETTING_LETTERS: [char; 3] = ['u', 'v', 'w'];
const OUTCOME_LETTERS: [char; 3] = ['a', 'b', 'c'];

fn descriptor(target: usize, given: &[usize]) -> String {
    let mut involved: Vec<usize> = given.to_vec();
    involved.push(target);
    involved.sort_unstable();
    let settings: String = involved.iter().map(|&p| SETTING_LETTERS[p]).collect();
    let outcomes: String = given.iter().map(|&p| OUTCOME_LETTERS[p]).collect();
    format!("P({}|{settings}λ{outcomes})", OUTCOME_LETTERS[target])
}

/// Tabulates every conditional in the six chain decompositions of `P(abc|uvwλ)` and
/// compares with 1/2 (unconditioned, singly conditioned) or
/// `(1 + s·abc·cos(u+v+w))/2` (doubly conditioned).
pub fn ghz_conditional_ladder(model: &QuantumModel) -> Result<GhzLadderReport> {
    let sign = parity_sign(model.state())?;
    for party in model.settings() {
        for s in party {
            let a = s.angle.expect("quantum settings carry angles");
            if a.abs() > tolerance::SCALAR
                && (a - std::f64::consts::FRAC_PI_2).abs() > tolerance::SCALAR
            {
                return Err(Error::InvalidModel(format!(
                    "setting {} at angle {a}: the ladder is defined for angles 0 and π/2",
                    s.label
                )));
            }
        }
    }
    let table = table_from_quantum(model)?;
    let sc = table.scenario();
    let mut rows = Vec::new();
    let mut pc_violation = Vec::new();
    for settings in sc.setting_tuples() {
        let labels = sc.setting_labels(&settings);
        let labels: [String; 3] = [labels[0].clone(), labels[1].clone(), labels[2].clone()];
        let angles: Vec<f64> = settings
            .iter()
            .enumerate()
            .map(|(p, &s)| sc.settings(p)[s].angle.expect("quantum"))
            .collect();
        let cos = (angles[0] + angles[1] + angles[2]).cos();
        let cell = table.cell(0, &settings)?;
        let mut worst_pc: f64 = 0.0;
        for outcome in all_outcomes(3) {
            let abc = f64::from(outcome[0] * outcome[1] * outcome[2]);
            for target in 0..3 {
                let others: Vec<usize> = (0..3).filter(|&p| p != target).collect();
                let conditioner_sets = [vec![], vec![others[0]], vec![others[1]], others.clone()];
                for given in conditioner_sets {
                    let assignment: Vec<(usize, i8)> =
                        given.iter().map(|&p| (p, outcome[p])).collect();
                    let value = if assignment.is_empty() {
                        cell.marginal(&[target])?.prob(&[outcome[target]])
                    } else {
                        match cell.condition(&assignment) {
                            Ok(d) => {
                                let free: Vec<usize> =
                                    (0..3).filter(|p| !given.contains(p)).collect();
                                let pos = free.iter().position(|&p| p == target).expect("free");
                                d.marginal(&[pos])?.prob(&[outcome[target]])
                            }
                            Err(Error::ZeroProbability { .. }) => continue,
                            Err(e) => return Err(e),
                        }
                    };
                    let expected = if given.len() == 2 {
                        (1.0 + sign * abc * cos) / 2.0
                    } else {
                        0.5
                    };
                    if given.len() == 2 {
                        worst_pc = worst_pc.max((value - 0.5).abs());
                    }
                    rows.push(LadderRow {
                        settings: labels.clone(),
                        descriptor: descriptor(target, &given),
                        outcome: [outcome[0], outcome[1], outcome[2]],
                        value,
                        expected,
                        residual: (value - expected).abs(),
                    });
                }
            }
        }
        pc_violation.push((labels, worst_pc));
    }
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(GhzLadderReport {
        parity_sign: sign,
        rows,
        max_residual,
        holds: max_residual <= tolerance::SCALAR,
        pc_violation,
    })
}

/// Largest deviation between the Born-rule table and the closed form at arbitrary
/// angle triples. The closed form is only asserted at angles 0 and π/2; other
/// angles are an extrapolation.
pub fn ghz_extrapolation_residual(state: &StateVector, angle_triples: &[[f64; 3]]) -> Result<f64> {
    let sign = parity_sign(state)?;
    let mut worst: f64 = 0.0;
    for &angles in angle_triples {
        let settings = angles
            .iter()
            .map(|&a| vec![crate::inference::Setting::angle("t", a)])
            .collect();
        let table = table_from_quantum(&QuantumModel::new(state.clone(), settings)?)?;
        let cell = table.cell(0, &[0, 0, 0])?;
        for (o, p) in cell.iter() {
            worst = worst.max((p - ghz_closed_form(sign, [o[0], o[1], o[2]], angles)).abs());
        }
    }
    Ok(worst)
}
