//! CHSH correlations, the deterministic-strategy bound, and the singlet's optimum.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::models::{
    table_from_lhv, table_from_quantum, DeterministicStrategy, LocalHvModel, QuantumModel,
};
use super::optimize::grid_then_golden;
use crate::error::Result;
use crate::inference::{check_pc, ConditionalTable};
use crate::quantum::StateVector;
use crate::tolerance;

pub const CLASSICAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;

/// `(x₁, x₂, y₁, y₂)` attaining `|S| = 2√2` on the singlet.
pub const SINGLET_OPTIMAL_ANGLES: [f64; 4] = [0.0, FRAC_PI_2, FRAC_PI_4, -FRAC_PI_4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub x: String,
    pub y: String,
    pub e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BellResult {
    /// `E(x₁,y₁), E(x₁,y₂), E(x₂,y₁), E(x₂,y₂)`.
    pub correlations: Vec<Correlation>,
    /// `E₁₁ + E₁₂ + E₂₁ − E₂₂`.
    pub s: f64,
    /// Largest `|S|` over the four placements of the minus sign.
    pub s_max_abs: f64,
    pub bound_classical: f64,
    pub bound_quantum: f64,
}

impl BellResult {
    pub fn exceeds_classical(&self) -> bool {
        self.s_max_abs > CLASSICAL_BOUND + tolerance::SCALAR
    }

    pub fn within_quantum(&self) -> bool {
        self.s_max_abs <= TSIRELSON_BOUND + tolerance::CONDITION_DEFAULT
    }
}

impl fmt::Display for BellResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8} {:<8} {:>12}", "x", "y", "E(x,y)")?;
        for c in &self.correlations {
            writeln!(f, "{:<8} {:<8} {:>12.9}", c.x, c.y, c.e)?;
        }
        writeln!(f, "S = E11 + E12 + E21 - E22 = {:.9}", self.s)?;
        writeln!(f, "max |S| over sign placements = {:.9}", self.s_max_abs)?;
        writeln!(
            f,
            "classical bound {:.9}: {}",
            self.bound_classical,
            if self.exceeds_classical() {
                "FAIL (exceeds classical bound 2)"
            } else {
                "PASS"
            }
        )?;
        write!(
            f,
            "quantum bound   {:.9}: {}",
            self.bound_quantum,
            if self.within_quantum() {
                "PASS"
            } else {
                "FAIL (exceeds Tsirelson bound)"
            }
        )
    }
}

/// `E(x,y) = Σ ab·P(ab|xy)` with λ averaged out.
pub fn correlation(table: &ConditionalTable, x: usize, y: usize) -> Result<f64> {
    Ok(table.averaged(&[x, y])?.parity_expectation())
}

/// CHSH combination over Alice's settings `x₁, x₂` and Bob's `y₁, y₂` (indices into the scenario).
pub fn chsh(
    table: &ConditionalTable,
    x1: usize,
    x2: usize,
    y1: usize,
    y2: usize,
) -> Result<BellResult> {
    let sc = table.scenario();
    let pairs = [(x1, y1), (x1, y2), (x2, y1), (x2, y2)];
    let correlations = pairs
        .iter()
        .map(|&(x, y)| {
            let e = correlation(table, x, y)?;
            let labels = sc.setting_labels(&[x, y]);
            Ok(Correlation {
                e,
                x: labels[0].clone(),
                y: labels[1].clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let e: Vec<f64> = correlations.iter().map(|c| c.e).collect();
    let s = e[0] + e[1] + e[2] - e[3];
    let total: f64 = e.iter().sum();
    let s_max_abs = e
        .iter()
        .map(|ek| (total - 2.0 * ek).abs())
        .fold(0.0, f64::max);
    Ok(BellResult {
        correlations,
        s,
        s_max_abs,
        bound_classical: CLASSICAL_BOUND,
        bound_quantum: TSIRELSON_BOUND,
    })
}

/// CHSH value of the singlet at `(x₁, x₂, y₁, y₂)`.
pub fn singlet_chsh(angles: [f64; 4]) -> Result<BellResult> {
    let model = QuantumModel::two_party(StateVector::singlet(), &angles[..2], &angles[2..])?;
    chsh(&table_from_quantum(&model)?, 0, 1, 0, 1)
}

/// All sixteen deterministic two-setting strategies with their `S`.
pub fn enumerate_deterministic_chsh() -> Result<Vec<(DeterministicStrategy, f64)>> {
    DeterministicStrategy::enumerate(&[2, 2])
        .into_iter()
        .map(|s| {
            let table = table_from_lhv(&LocalHvModel::from_strategy(&s))?;
            let r = chsh(&table, 0, 1, 0, 1)?;
            Ok((s, r.s))
        })
        .collect()
}

/// Random mixture of one to three of the sixteen deterministic strategies. Sparse
/// mixtures land near the classical bound far more often than dense ones.
pub fn random_deterministic_mixture<R: Rng + ?Sized>(rng: &mut R) -> Result<LocalHvModel> {
    let all = DeterministicStrategy::enumerate(&[2, 2]);
    let k = rng.gen_range(1..=3);
    let strategies: Vec<DeterministicStrategy> = (0..k)
        .map(|_| all[rng.gen_range(0..all.len())].clone())
        .collect();
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    LocalHvModel::mixture(&strategies, &weights)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsirelsonSearch {
    /// Optimal member of the family `(0, 2θ, θ, −θ)`.
    pub theta: f64,
    pub angles: [f64; 4],
    pub s_max_abs: f64,
}

fn family(theta: f64) -> [f64; 4] {
    [0.0, 2.0 * theta, theta, -theta]
}

/// Maximizes `|S|` for the singlet over the one-parameter family `(0, 2θ, θ, −θ)`,
/// θ ∈ [0, π]: grid of step π/180, then golden-section refinement to `1e-10`.
pub fn tsirelson_search() -> Result<TsirelsonSearch> {
    // Probe once so a construction error surfaces as Err rather than a panic below.
    singlet_chsh(family(0.0))?;
    let f = |t: f64| {
        singlet_chsh(family(t))
            .map(|r| r.s_max_abs)
            .unwrap_or(f64::NAN)
    };
    let (theta, s_max_abs) = grid_then_golden(f, 0.0, PI, PI / 180.0, 1e-10);
    Ok(TsirelsonSearch {
        theta,
        angles: family(theta),
        s_max_abs,
    })
}

/// Largest `|S|` over `points` uniformly random angle quadruples.
pub fn random_angle_sweep<R: Rng + ?Sized>(rng: &mut R, points: usize) -> Result<f64> {
    let mut best: f64 = 0.0;
    for _ in 0..points {
        let angles = [(); 4].map(|_| rng.gen_range(-PI..PI));
        best = best.max(singlet_chsh(angles)?.s_max_abs);
    }
    Ok(best)
}

/// One row of the frozen sweep layout `x,y,E,S_running`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    pub y: f64,
    pub e: f64,
    /// Largest `|S|` of the family `(0, 2θ, θ, −θ)` for θ up to this row's `y`.
    pub s_running: f64,
}

pub const SWEEP_CSV_HEADER: &str = "x,y,E,S_running";
pub const PC_SWEEP_CSV_HEADER: &str = "x,y,PC_max_violation";

/// Singlet correlations `E(0, θ)` for θ on `steps + 1` evenly spaced points of `[0, π]`.
pub fn chsh_sweep(steps: usize) -> Result<Vec<SweepRow>> {
    let mut running: f64 = 0.0;
    (0..=steps)
        .map(|i| {
            let theta = PI * i as f64 / steps.max(1) as f64;
            let family = singlet_chsh(family(theta))?;
            running = running.max(family.s_max_abs);
            let model = QuantumModel::two_party(StateVector::singlet(), &[0.0], &[theta])?;
            Ok(SweepRow {
                x: 0.0,
                y: theta,
                e: correlation(&table_from_quantum(&model)?, 0, 0)?,
                s_running: running,
            })
        })
        .collect()
}

/// PC violation of the singlet at settings `(0, θ)` over the same grid as [`chsh_sweep`].
pub fn pc_sweep(steps: usize) -> Result<Vec<(f64, f64, f64)>> {
    (0..=steps)
        .map(|i| {
            let theta = PI * i as f64 / steps.max(1) as f64;
            let model = QuantumModel::two_party(StateVector::singlet(), &[0.0], &[theta])?;
            let r = check_pc(&table_from_quantum(&model)?, tolerance::CONDITION_DEFAULT)?;
            Ok((0.0, theta, r.max_violation))
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.x, r.y, r.e, r.s_running));
    }
    out
}

pub fn pc_sweep_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut out = String::from(PC_SWEEP_CSV_HEADER);
    out.push('\n');
    for (x, y, v) in rows {
        out.push_str(&format!("{x},{y},{v}\n"));
    }
    out
}
