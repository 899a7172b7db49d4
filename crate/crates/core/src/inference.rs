//! Conditional tables `P(outcomes | settings, λ)` and the locality checkers.
//!
//! A table holds one [`OutcomeDistribution`] for every pair of hidden-variable
//! value λ and setting tuple. Marginals, conditionals and the chain rule are all
//! evaluated cell by cell; the checkers compare cells with each other (EL) or a
//! cell's conditionals with its marginals (PC, factorization).

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::distribution::{all_outcomes, outcome_key, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::tolerance;

/// A measurement setting: a label and, for quantum models, the analyser angle in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Setting {
    pub label: String,
    pub angle: Option<f64>,
}

impl Setting {
    pub fn angle(label: impl Into<String>, angle: f64) -> Self {
        Self {
            label: label.into(),
            angle: Some(angle),
        }
    }

    pub fn labeled(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            angle: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lambda {
    pub label: String,
    pub weight: f64,
}

/// Parties, their settings, and the weighted hidden-variable space.
///
/// λ is drawn independently of the settings (`P(λ|xy) = P(λ)`); a setting-dependent
/// λ distribution is not representable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioWire")]
pub struct ScenarioSpec {
    settings: Vec<Vec<Setting>>,
    lambdas: Vec<Lambda>,
}

#[derive(Deserialize)]
struct ScenarioWire {
    settings: Vec<Vec<Setting>>,
    lambdas: Vec<Lambda>,
}

impl TryFrom<ScenarioWire> for ScenarioSpec {
    type Error = Error;
    fn try_from(w: ScenarioWire) -> Result<Self> {
        ScenarioSpec::new(w.settings, w.lambdas)
    }
}

impl ScenarioSpec {
    pub fn new(settings: Vec<Vec<Setting>>, lambdas: Vec<Lambda>) -> Result<Self> {
        if !(2..=3).contains(&settings.len()) {
            return Err(Error::InvalidScenario(format!(
                "{} parties; only 2 or 3 are supported",
                settings.len()
            )));
        }
        if let Some(p) = settings.iter().position(Vec::is_empty) {
            return Err(Error::InvalidScenario(format!("party {p} has no settings")));
        }
        if lambdas.is_empty() {
            return Err(Error::InvalidWeights {
                what: "lambda space".into(),
                reason: "empty".into(),
            });
        }
        if let Some(l) = lambdas
            .iter()
            .find(|l| !l.weight.is_finite() || l.weight < 0.0)
        {
            return Err(Error::InvalidWeights {
                what: "lambda space".into(),
                reason: format!("weight of {} is {}", l.label, l.weight),
            });
        }
        let total: f64 = lambdas.iter().map(|l| l.weight).sum();
        if (total - 1.0).abs() > tolerance::SCALAR {
            return Err(Error::InvalidWeights {
                what: "lambda space".into(),
                reason: format!("weights sum to {total}"),
            });
        }
        Ok(Self { settings, lambdas })
    }

    /// Single λ with weight one.
    pub fn single_lambda(settings: Vec<Vec<Setting>>, label: &str) -> Result<Self> {
        Self::new(
            settings,
            vec![Lambda {
                label: label.into(),
                weight: 1.0,
            }],
        )
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    pub fn settings(&self, party: usize) -> &[Setting] {
        &self.settings[party]
    }

    pub fn all_settings(&self) -> &[Vec<Setting>] {
        &self.settings
    }

    pub fn lambdas(&self) -> &[Lambda] {
        &self.lambdas
    }

    pub fn setting_tuple_count(&self) -> usize {
        self.settings.iter().map(Vec::len).product()
    }

    /// All setting tuples, last party varying fastest.
    pub fn setting_tuples(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for party in &self.settings {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..party.len()).map(move |s| {
                        let mut t = prefix.clone();
                        t.push(s);
                        t
                    })
                })
                .collect();
        }
        out
    }

    fn flat_settings(&self, settings: &[usize]) -> Option<usize> {
        if settings.len() != self.parties() {
            return None;
        }
        settings
            .iter()
            .zip(&self.settings)
            .try_fold(0, |acc, (&s, party)| {
                (s < party.len()).then(|| acc * party.len() + s)
            })
    }

    pub fn setting_labels(&self, settings: &[usize]) -> Vec<String> {
        settings
            .iter()
            .zip(&self.settings)
            .map(|(&s, p)| p[s].label.clone())
            .collect()
    }

    pub fn setting_index(&self, party: usize, label: &str) -> Option<usize> {
        self.settings
            .get(party)?
            .iter()
            .position(|s| s.label == label)
    }
}

/// `P(outcomes | settings, λ)` for every λ and every setting tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    scenario: ScenarioSpec,
    cells: Vec<OutcomeDistribution>,
}

impl ConditionalTable {
    /// Fills every cell from `cell(λ index, setting tuple)`.
    pub fn from_fn(
        scenario: ScenarioSpec,
        mut cell: impl FnMut(usize, &[usize]) -> Result<OutcomeDistribution>,
    ) -> Result<Self> {
        let parties = scenario.parties();
        let tuples = scenario.setting_tuples();
        let mut cells = Vec::with_capacity(scenario.lambdas.len() * tuples.len());
        for lambda in 0..scenario.lambdas.len() {
            for t in &tuples {
                let d = cell(lambda, t)?;
                if d.arity() != parties {
                    return Err(Error::InvalidScenario(format!(
                        "cell for lambda {lambda}, settings {t:?} has arity {}, expected {parties}",
                        d.arity()
                    )));
                }
                cells.push(d);
            }
        }
        Ok(Self { scenario, cells })
    }

    pub fn scenario(&self) -> &ScenarioSpec {
        &self.scenario
    }

    pub fn parties(&self) -> usize {
        self.scenario.parties()
    }

    /// `P(· | settings, λ)`.
    pub fn cell(&self, lambda: usize, settings: &[usize]) -> Result<&OutcomeDistribution> {
        let missing = || Error::MissingEntry {
            lambda,
            settings: settings.to_vec(),
        };
        if lambda >= self.scenario.lambdas.len() {
            return Err(missing());
        }
        let flat = self.scenario.flat_settings(settings).ok_or_else(missing)?;
        Ok(&self.cells[lambda * self.scenario.setting_tuple_count() + flat])
    }

    /// `P(· | settings) = Σ_λ P(· | settings, λ) P(λ)`.
    pub fn averaged(&self, settings: &[usize]) -> Result<OutcomeDistribution> {
        let parties = self.parties();
        let mut probs = vec![0.0; 1 << parties];
        for (lambda, l) in self.scenario.lambdas.iter().enumerate() {
            for (p, q) in probs.iter_mut().zip(self.cell(lambda, settings)?.probs()) {
                *p += l.weight * q;
            }
        }
        OutcomeDistribution::new(parties, probs)
    }

    /// The same conditional table with all hidden variables averaged into one λ.
    pub fn coarse_grained(&self, label: &str) -> Result<Self> {
        let scenario = ScenarioSpec::single_lambda(self.scenario.settings.clone(), label)?;
        Self::from_fn(scenario, |_, s| self.averaged(s))
    }

    /// Outcome distribution of the parties in `keep`, in that order.
    pub fn marginal(
        &self,
        lambda: usize,
        settings: &[usize],
        keep: &[usize],
    ) -> Result<OutcomeDistribution> {
        self.cell(lambda, settings)?.marginal(keep)
    }

    /// Distribution of the parties not fixed by `given`, in increasing party order.
    pub fn condition_on(
        &self,
        lambda: usize,
        settings: &[usize],
        given: &[(usize, i8)],
    ) -> Result<OutcomeDistribution> {
        self.cell(lambda, settings)?.condition(given)
    }

    /// Maximum residual of the chain rule `P(o) = ∏ P(o_πk | o_π<k)` over every
    /// ordering π of the parties and every outcome tuple, all factors taken at the
    /// full setting tuple.
    ///
    /// A factor conditioned on a zero-probability prefix is not evaluated: the
    /// product is zero there, and so is the joint probability it must match.
    pub fn verify_chain_rule(&self, lambda: usize, settings: &[usize]) -> Result<f64> {
        let cell = self.cell(lambda, settings)?;
        let mut worst: f64 = 0.0;
        for order in permutations(self.parties()) {
            for outcome in all_outcomes(self.parties()) {
                let rhs = chain_product(&order, &outcome, |_| cell)?;
                worst = worst.max((cell.prob(&outcome) - rhs).abs());
            }
        }
        Ok(worst)
    }

    /// Chain rule with elementary locality applied: each factor is evaluated with
    /// the settings of parties not yet involved replaced by every alternative
    /// value. The residual is zero only for tables that are both chain-rule
    /// consistent and no-signaling.
    pub fn verify_local_chain_rule(&self, lambda: usize, settings: &[usize]) -> Result<f64> {
        let cell = self.cell(lambda, settings)?;
        let parties = self.parties();
        let mut worst: f64 = 0.0;
        for order in permutations(parties) {
            for outcome in all_outcomes(parties) {
                for alt in self.scenario.setting_tuples() {
                    let rhs = chain_product(&order, &outcome, |involved| {
                        let mixed: Vec<usize> = (0..parties)
                            .map(|p| {
                                if involved.contains(&p) {
                                    settings[p]
                                } else {
                                    alt[p]
                                }
                            })
                            .collect();
                        self.cell(lambda, &mixed).expect("tuple from scenario")
                    })?;
                    worst = worst.max((cell.prob(&outcome) - rhs).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Random table: every cell drawn uniformly from the probability simplex.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        settings_per_party: &[usize],
        lambdas: usize,
    ) -> Result<Self> {
        let settings = settings_per_party
            .iter()
            .enumerate()
            .map(|(p, &n)| {
                (0..n)
                    .map(|s| Setting::labeled(format!("p{p}s{s}")))
                    .collect()
            })
            .collect();
        let raw: Vec<f64> = (0..lambdas).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        let lambdas = raw
            .iter()
            .enumerate()
            .map(|(i, w)| Lambda {
                label: format!("l{i}"),
                weight: w / total,
            })
            .collect();
        let scenario = ScenarioSpec::new(settings, lambdas)?;
        let arity = scenario.parties();
        Self::from_fn(scenario, |_, _| random_distribution(rng, arity))
    }
}

pub(crate) fn random_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    arity: usize,
) -> Result<OutcomeDistribution> {
    let raw: Vec<f64> = (0..1 << arity)
        .map(|_| rng.sample::<f64, _>(Exp1))
        .collect();
    let total: f64 = raw.iter().sum();
    OutcomeDistribution::new(arity, raw.iter().map(|w| w / total).collect())
}

/// `∏_k P(o_πk | o_π<k)` where `cell_for(involved)` supplies the cell used for the
/// factor whose parties so far are `involved`.
fn chain_product<'a>(
    order: &[usize],
    outcome: &[i8],
    mut cell_for: impl FnMut(&[usize]) -> &'a OutcomeDistribution,
) -> Result<f64> {
    let mut product = 1.0;
    for k in 0..order.len() {
        let involved = &order[..=k];
        let cell = cell_for(involved);
        let target = order[k];
        let factor = if k == 0 {
            cell.marginal(&[target])?.prob(&[outcome[target]])
        } else {
            let given: Vec<(usize, i8)> = order[..k].iter().map(|&p| (p, outcome[p])).collect();
            match cell.condition(&given) {
                Ok(rest) => {
                    let others: Vec<usize> = (0..outcome.len())
                        .filter(|p| !order[..k].contains(p))
                        .collect();
                    let pos = others
                        .iter()
                        .position(|&p| p == target)
                        .expect("target free");
                    rest.marginal(&[pos])?.prob(&[outcome[target]])
                }
                Err(Error::ZeroProbability { .. }) => return Ok(0.0),
                Err(e) => return Err(e),
            }
        };
        product *= factor;
    }
    Ok(product)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|r| if r >= first { r + 1 } else { r }));
            out.push(p);
        }
    }
    out
}

fn subsets_nonempty(items: &[usize]) -> Vec<Vec<usize>> {
    (1..1usize << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConditionKind {
    #[serde(rename = "EL")]
    ElementaryLocality,
    #[serde(rename = "PC")]
    PredictiveCompleteness,
    Factorization,
    FreedomOfChoice,
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ElementaryLocality => "EL",
            Self::PredictiveCompleteness => "PC",
            Self::Factorization => "FACTORIZATION",
            Self::FreedomOfChoice => "FREEDOM_OF_CHOICE",
        })
    }
}

/// Where a condition is violated most.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub lambda: String,
    pub settings: Vec<String>,
    /// The party whose prediction is compared.
    pub party: usize,
    /// Per party: the outcome involved, or `None` when that party is summed out.
    pub outcomes: Vec<Option<i8>>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionKind,
    pub holds: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
}

impl ConditionReport {
    fn from_worst(condition: ConditionKind, tolerance: f64, worst: Option<(f64, Witness)>) -> Self {
        let (max_violation, witness) = match worst {
            Some((v, w)) if v > 0.0 => (v, Some(w)),
            _ => (0.0, None),
        };
        Self {
            condition,
            holds: max_violation < tolerance,
            max_violation,
            tolerance,
            witness,
        }
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<18} {}  max_violation={:.6e}",
            self.condition.to_string(),
            if self.holds { "PASS" } else { "FAIL" },
            self.max_violation
        )?;
        if let Some(w) = &self.witness {
            let outs: Vec<String> = w
                .outcomes
                .iter()
                .map(|o| match o {
                    Some(v) if *v > 0 => "+1".into(),
                    Some(_) => "-1".into(),
                    None => "*".into(),
                })
                .collect();
            write!(
                f,
                "  witness: lambda={} settings=[{}] party={} outcomes=[{}] ({})",
                w.lambda,
                w.settings.join(","),
                w.party,
                outs.join(","),
                w.detail
            )?;
        }
        Ok(())
    }
}

fn keep_worst(worst: &mut Option<(f64, Witness)>, v: f64, make: impl FnOnce() -> Witness) {
    if worst.as_ref().is_none_or(|(w, _)| v > *w) {
        *worst = Some((v, make()));
    }
}

fn witness_outcomes(parties: usize, assigned: &[(usize, i8)]) -> Vec<Option<i8>> {
    (0..parties)
        .map(|p| assigned.iter().find(|(q, _)| *q == p).map(|&(_, v)| v))
        .collect()
}

/// Elementary locality: each party's marginal is the same for every choice of the
/// other parties' settings, for each λ and own setting. The violation is the
/// largest L∞ distance between two such marginals.
pub fn check_el(table: &ConditionalTable, tolerance: f64) -> Result<ConditionReport> {
    let sc = table.scenario();
    let parties = sc.parties();
    let tuples = sc.setting_tuples();
    let mut worst = None;
    for (lambda, l) in sc.lambdas().iter().enumerate() {
        for party in 0..parties {
            for own in 0..sc.settings(party).len() {
                let group: Vec<&Vec<usize>> = tuples.iter().filter(|t| t[party] == own).collect();
                let marginals = group
                    .iter()
                    .map(|t| table.marginal(lambda, t, &[party]))
                    .collect::<Result<Vec<_>>>()?;
                for i in 0..marginals.len() {
                    for j in i + 1..marginals.len() {
                        let (d, at) = marginals[i].linf_distance(&marginals[j]);
                        keep_worst(&mut worst, d, || Witness {
                            lambda: l.label.clone(),
                            settings: sc.setting_labels(group[i]),
                            party,
                            outcomes: witness_outcomes(parties, &[(party, at[0])]),
                            detail: format!(
                                "marginal differs from settings [{}]",
                                sc.setting_labels(group[j]).join(",")
                            ),
                        });
                    }
                }
            }
        }
    }
    Ok(ConditionReport::from_worst(
        ConditionKind::ElementaryLocality,
        tolerance,
        worst,
    ))
}

/// Predictive completeness: conditioning a party's distribution on any non-empty
/// set of other parties' outcomes (with positive probability) leaves it unchanged.
pub fn check_pc(table: &ConditionalTable, tolerance: f64) -> Result<ConditionReport> {
    let sc = table.scenario();
    let parties = sc.parties();
    let mut worst = None;
    for (lambda, l) in sc.lambdas().iter().enumerate() {
        for settings in sc.setting_tuples() {
            let cell = table.cell(lambda, &settings)?;
            for party in 0..parties {
                let own = cell.marginal(&[party])?;
                let others: Vec<usize> = (0..parties).filter(|&p| p != party).collect();
                for conditioners in subsets_nonempty(&others) {
                    for values in all_outcomes(conditioners.len()) {
                        let given: Vec<(usize, i8)> =
                            conditioners.iter().copied().zip(values).collect();
                        let conditioned = match cell.condition(&given) {
                            Ok(d) => d,
                            Err(Error::ZeroProbability { .. }) => continue,
                            Err(e) => return Err(e),
                        };
                        let free: Vec<usize> =
                            (0..parties).filter(|p| !conditioners.contains(p)).collect();
                        let pos = free.iter().position(|&p| p == party).expect("party free");
                        let conditioned = conditioned.marginal(&[pos])?;
                        let (d, at) = conditioned.linf_distance(&own);
                        keep_worst(&mut worst, d, || {
                            let mut assigned = given.clone();
                            assigned.push((party, at[0]));
                            Witness {
                                lambda: l.label.clone(),
                                settings: sc.setting_labels(&settings),
                                party,
                                outcomes: witness_outcomes(parties, &assigned),
                                detail: format!(
                                    "conditioned {:.6} vs unconditioned {:.6}",
                                    conditioned.prob(&at),
                                    own.prob(&at)
                                ),
                            }
                        });
                    }
                }
            }
        }
    }
    Ok(ConditionReport::from_worst(
        ConditionKind::PredictiveCompleteness,
        tolerance,
        worst,
    ))
}

/// Factorization: each cell equals the product of its one-party marginals.
pub fn check_factorization(table: &ConditionalTable, tolerance: f64) -> Result<ConditionReport> {
    let sc = table.scenario();
    let parties = sc.parties();
    let mut worst = None;
    for (lambda, l) in sc.lambdas().iter().enumerate() {
        for settings in sc.setting_tuples() {
            let cell = table.cell(lambda, &settings)?;
            let marginals = (0..parties)
                .map(|p| cell.marginal(&[p]))
                .collect::<Result<Vec<_>>>()?;
            let (d, at) = cell.linf_distance(&OutcomeDistribution::product(&marginals));
            keep_worst(&mut worst, d, || Witness {
                lambda: l.label.clone(),
                settings: sc.setting_labels(&settings),
                party: 0,
                outcomes: at.iter().copied().map(Some).collect(),
                detail: format!(
                    "joint {:.6} vs product of marginals {:.6}",
                    cell.prob(&at),
                    marginals
                        .iter()
                        .zip(&at)
                        .map(|(m, &v)| m.prob(&[v]))
                        .product::<f64>()
                ),
            });
        }
    }
    Ok(ConditionReport::from_worst(
        ConditionKind::Factorization,
        tolerance,
        worst,
    ))
}

/// λ independent of the settings. Structural in this representation: the scenario
/// carries one weight list shared by all setting tuples, so the check always holds.
pub fn check_freedom_of_choice(table: &ConditionalTable, tolerance: f64) -> ConditionReport {
    debug_assert!(!table.scenario().lambdas().is_empty());
    ConditionReport::from_worst(ConditionKind::FreedomOfChoice, tolerance, None)
}

/// The three condition reports plus the implication check
/// `EL ∧ PC ⇒ factorization`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub el: ConditionReport,
    pub pc: ConditionReport,
    pub factorization: ConditionReport,
    /// Bound on the factorization residual implied by a PC residual below tolerance:
    /// `(parties − 1) · tolerance`.
    pub implied_factorization_bound: f64,
    pub implication_consistent: bool,
}

pub fn check_all(table: &ConditionalTable, tolerance: f64) -> Result<ConditionSummary> {
    let el = check_el(table, tolerance)?;
    let pc = check_pc(table, tolerance)?;
    let factorization = check_factorization(table, tolerance)?;
    let bound = (table.parties() - 1) as f64 * tolerance;
    let implication_consistent = !(el.holds && pc.holds) || factorization.max_violation <= bound;
    Ok(ConditionSummary {
        el,
        pc,
        factorization,
        implied_factorization_bound: bound,
        implication_consistent,
    })
}

/// One point of the joint space of settings and outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingOutcome {
    pub x: usize,
    pub a: i8,
    pub y: usize,
    pub b: i8,
    pub probability: f64,
}

/// `P(xa, yb) = Σ_λ P(ab|xyλ) P(λ) P(x) P(y)` over two settings per side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SixteenOutcomeSpace {
    pub entries: Vec<SettingOutcome>,
}

impl SixteenOutcomeSpace {
    pub fn prob(&self, x: usize, a: i8, y: usize, b: i8) -> f64 {
        self.entries
            .iter()
            .find(|e| e.x == x && e.a == a && e.y == y && e.b == b)
            .map_or(0.0, |e| e.probability)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    pub fn entropy_bits(&self) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.probability > 0.0)
            .map(|e| -e.probability * e.probability.log2())
            .sum()
    }

    /// `P(ab | xy)` recovered by conditioning on the settings.
    pub fn outcomes_given(&self, x: usize, y: usize) -> Result<OutcomeDistribution> {
        let norm: f64 = self
            .entries
            .iter()
            .filter(|e| e.x == x && e.y == y)
            .map(|e| e.probability)
            .sum();
        if norm <= tolerance::ZERO_PROBABILITY {
            return Err(Error::ZeroProbability { probability: norm });
        }
        OutcomeDistribution::from_fn(2, |o| self.prob(x, o[0], y, o[1]) / norm)
    }
}

fn validate_setting_weights(what: &str, w: &[f64]) -> Result<()> {
    if w.len() != 2 {
        return Err(Error::InvalidWeights {
            what: what.into(),
            reason: format!("expected 2 weights, got {}", w.len()),
        });
    }
    if w.iter().any(|p| p.is_nan() || *p < 0.0) {
        return Err(Error::InvalidWeights {
            what: what.into(),
            reason: format!("negative or NaN weight in {w:?}"),
        });
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > tolerance::SCALAR {
        return Err(Error::InvalidWeights {
            what: what.into(),
            reason: format!("weights sum to {total}"),
        });
    }
    Ok(())
}

/// Treats the settings themselves as random, with weights `P(x)` and `P(y)`.
pub fn sixteen_outcome_space(
    table: &ConditionalTable,
    alice_weights: &[f64],
    bob_weights: &[f64],
) -> Result<SixteenOutcomeSpace> {
    let sc = table.scenario();
    if sc.parties() != 2 || sc.settings(0).len() != 2 || sc.settings(1).len() != 2 {
        return Err(Error::InvalidScenario(
            "the sixteen-outcome space needs two parties with two settings each".into(),
        ));
    }
    validate_setting_weights("P(x)", alice_weights)?;
    validate_setting_weights("P(y)", bob_weights)?;
    let mut entries = Vec::with_capacity(16);
    for (x, &px) in alice_weights.iter().enumerate() {
        for a in [1i8, -1] {
            for (y, &py) in bob_weights.iter().enumerate() {
                for b in [1i8, -1] {
                    let joint = table.averaged(&[x, y])?.prob(&[a, b]);
                    entries.push(SettingOutcome {
                        x,
                        a,
                        y,
                        b,
                        probability: joint * px * py,
                    });
                }
            }
        }
    }
    Ok(SixteenOutcomeSpace { entries })
}

#[derive(Serialize, Deserialize)]
struct TableWire {
    scenario: ScenarioSpec,
    rows: Vec<RowWire>,
}

#[derive(Serialize, Deserialize)]
struct RowWire {
    lambda: String,
    settings: Vec<Option<f64>>,
    setting_labels: Vec<String>,
    outcomes: OutcomeDistribution,
}

impl Serialize for ConditionalTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let sc = &self.scenario;
        let mut rows = Vec::with_capacity(self.cells.len());
        for (lambda, l) in sc.lambdas.iter().enumerate() {
            for t in sc.setting_tuples() {
                rows.push(RowWire {
                    lambda: l.label.clone(),
                    settings: t
                        .iter()
                        .zip(&sc.settings)
                        .map(|(&i, p)| p[i].angle)
                        .collect(),
                    setting_labels: sc.setting_labels(&t),
                    outcomes: self.cell(lambda, &t).expect("complete").clone(),
                });
            }
        }
        TableWire {
            scenario: sc.clone(),
            rows,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConditionalTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = TableWire::deserialize(d)?;
        let sc = &wire.scenario;
        let mut by_key: BTreeMap<(usize, Vec<usize>), OutcomeDistribution> = BTreeMap::new();
        for (i, row) in wire.rows.into_iter().enumerate() {
            let lambda = sc
                .lambdas
                .iter()
                .position(|l| l.label == row.lambda)
                .ok_or_else(|| {
                    D::Error::custom(format!("rows[{i}]: unknown lambda {:?}", row.lambda))
                })?;
            let settings = row
                .setting_labels
                .iter()
                .enumerate()
                .map(|(p, label)| sc.setting_index(p, label))
                .collect::<Option<Vec<_>>>()
                .filter(|s| s.len() == sc.parties())
                .ok_or_else(|| {
                    D::Error::custom(format!(
                        "rows[{i}]: unknown settings {:?}",
                        row.setting_labels
                    ))
                })?;
            if by_key.insert((lambda, settings), row.outcomes).is_some() {
                return Err(D::Error::custom(format!("rows[{i}]: duplicate row")));
            }
        }
        ConditionalTable::from_fn(wire.scenario.clone(), |lambda, t| {
            by_key
                .remove(&(lambda, t.to_vec()))
                .ok_or(Error::MissingEntry {
                    lambda,
                    settings: t.to_vec(),
                })
        })
        .map_err(D::Error::custom)
    }
}

/// Formats a partial outcome assignment like `a=+1,c=-1`.
pub fn describe_assignment(given: &[(usize, i8)]) -> String {
    const NAMES: [char; 3] = ['a', 'b', 'c'];
    given
        .iter()
        .map(|&(p, v)| format!("{}={}", NAMES[p], outcome_key(&[v])))
        .collect::<Vec<_>>()
        .join(",")
}
