//! Physical models that generate conditional tables.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::OutcomeDistribution;
use crate::error::{Error, Result};
use crate::inference::{check_all, ConditionalTable, Lambda, ScenarioSpec, Setting};
use crate::quantum::{joint_eigenbasis, measure, Observable, StateVector};
use crate::tolerance;

const PARTY_NAMES: [&str; 3] = ["A", "B", "C"];

/// A pure state shared by one qubit per party; each setting measures
/// `cos θ·X + sin θ·Y` on that party's qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumModel {
    state: StateVector,
    settings: Vec<Vec<Setting>>,
}

impl QuantumModel {
    pub fn new(state: StateVector, settings: Vec<Vec<Setting>>) -> Result<Self> {
        if settings.len() != state.qubits() {
            return Err(Error::InvalidModel(format!(
                "{} parties but the state has {} qubits",
                settings.len(),
                state.qubits()
            )));
        }
        for (p, party) in settings.iter().enumerate() {
            if party.is_empty() {
                return Err(Error::InvalidModel(format!("party {p} has no settings")));
            }
            if let Some(s) = party.iter().find(|s| !s.angle.is_some_and(f64::is_finite)) {
                return Err(Error::InvalidModel(format!(
                    "setting {} of party {p} has no finite angle",
                    s.label
                )));
            }
        }
        Ok(Self { state, settings })
    }

    /// Two-party model from Alice's and Bob's angle lists (labels `x1, x2, …`, `y1, …`).
    pub fn two_party(state: StateVector, alice: &[f64], bob: &[f64]) -> Result<Self> {
        let side = |name: &str, angles: &[f64]| -> Vec<Setting> {
            angles
                .iter()
                .enumerate()
                .map(|(i, &a)| Setting::angle(format!("{name}{}", i + 1), a))
                .collect()
        };
        Self::new(state, vec![side("x", alice), side("y", bob)])
    }

    /// Three-party model with settings `X` (θ = 0) and `Y` (θ = π/2) for everyone.
    pub fn xy_settings(state: StateVector) -> Result<Self> {
        let xy = vec![
            Setting::angle("X", 0.0),
            Setting::angle("Y", std::f64::consts::FRAC_PI_2),
        ];
        Self::new(state, vec![xy.clone(), xy.clone(), xy])
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn settings(&self) -> &[Vec<Setting>] {
        &self.settings
    }

    /// Local observables for one setting tuple, each embedded on its party's qubit.
    pub fn local_observables(&self, settings: &[usize]) -> Result<Vec<Observable>> {
        let n = self.settings.len();
        settings
            .iter()
            .enumerate()
            .map(|(p, &s)| {
                let angle = self.settings[p][s].angle.expect("validated");
                Observable::spin(angle).embed(p, n)
            })
            .collect()
    }
}

/// Builds `P(outcomes | settings, ψ)` by measuring the joint eigenbasis of the
/// parties' local observables. Λ holds the state alone.
pub fn table_from_quantum(model: &QuantumModel) -> Result<ConditionalTable> {
    let scenario = ScenarioSpec::single_lambda(model.settings.clone(), model.state.label())?;
    ConditionalTable::from_fn(scenario, |_, settings| {
        let context = joint_eigenbasis(&model.local_observables(settings)?)?;
        measure(&model.state, &context)
    })
}

/// Outcome ±1 for every party and setting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    outcomes: Vec<Vec<i8>>,
}

impl DeterministicStrategy {
    pub fn new(outcomes: Vec<Vec<i8>>) -> Result<Self> {
        if outcomes.iter().flatten().any(|v| v.abs() != 1) {
            return Err(Error::InvalidModel(
                "deterministic outcomes must be ±1".into(),
            ));
        }
        if outcomes.is_empty() || outcomes.iter().any(Vec::is_empty) {
            return Err(Error::InvalidModel(
                "every party needs at least one setting".into(),
            ));
        }
        Ok(Self { outcomes })
    }

    /// Every strategy for the given number of settings per party, in a fixed order.
    pub fn enumerate(settings_per_party: &[usize]) -> Vec<Self> {
        let total: usize = settings_per_party.iter().sum();
        (0..1usize << total)
            .map(|mask| {
                let mut bit = 0;
                let outcomes = settings_per_party
                    .iter()
                    .map(|&n| {
                        (0..n)
                            .map(|_| {
                                let v = if mask >> bit & 1 == 1 { -1 } else { 1 };
                                bit += 1;
                                v
                            })
                            .collect()
                    })
                    .collect();
                Self { outcomes }
            })
            .collect()
    }

    /// Parses `a=+1,b=-1` (same outcome for every setting) or `a=+1-1,b=-1+1`
    /// (one outcome per setting). Parties are `a`, `b`, `c`.
    pub fn parse(spec: &str, settings_per_party: &[usize]) -> Result<Self> {
        let mut outcomes: Vec<Option<Vec<i8>>> = vec![None; settings_per_party.len()];
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (party, values) = part.split_once('=').ok_or_else(|| {
                Error::InvalidModel(format!(
                    "deterministic spec {spec:?}: expected party=values in {part:?}"
                ))
            })?;
            let p = match party.trim() {
                "a" | "A" => 0,
                "b" | "B" => 1,
                "c" | "C" => 2,
                other => {
                    return Err(Error::InvalidModel(format!(
                        "deterministic spec {spec:?}: unknown party {other:?}"
                    )))
                }
            };
            if p >= settings_per_party.len() {
                return Err(Error::InvalidModel(format!(
                    "deterministic spec {spec:?}: party {party} not in a {}-party scenario",
                    settings_per_party.len()
                )));
            }
            let signs = crate::distribution::parse_outcome_key(values.trim()).ok_or_else(|| {
                Error::InvalidModel(format!(
                    "deterministic spec {spec:?}: bad outcomes {values:?}"
                ))
            })?;
            let n = settings_per_party[p];
            let per_setting = match signs.len() {
                1 => vec![signs[0]; n],
                len if len == n => signs,
                len => {
                    return Err(Error::InvalidModel(format!(
                        "deterministic spec {spec:?}: party {party} has {n} settings but {len} outcomes"
                    )))
                }
            };
            outcomes[p] = Some(per_setting);
        }
        let outcomes = outcomes
            .into_iter()
            .enumerate()
            .map(|(p, o)| {
                o.ok_or_else(|| {
                    Error::InvalidModel(format!(
                        "deterministic spec {spec:?}: no outcome for party {}",
                        ["a", "b", "c"][p]
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes)
    }

    pub fn outcome(&self, party: usize, setting: usize) -> i8 {
        self.outcomes[party][setting]
    }

    pub fn outcomes(&self) -> &[Vec<i8>] {
        &self.outcomes
    }

    pub fn settings_per_party(&self) -> Vec<usize> {
        self.outcomes.iter().map(Vec::len).collect()
    }
}

/// One hidden-variable value: its weight and `P(+1 | setting, λ)` per party and setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvEntry {
    pub weight: f64,
    pub plus_probability: Vec<Vec<f64>>,
}

/// A local hidden-variable model: each λ fixes independent response
/// distributions for every party.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalHvModel {
    settings: Vec<Vec<Setting>>,
    entries: Vec<LhvEntry>,
}

impl LocalHvModel {
    pub fn new(settings: Vec<Vec<Setting>>, entries: Vec<LhvEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidModel("no hidden-variable entries".into()));
        }
        let total: f64 = entries.iter().map(|e| e.weight).sum();
        for (i, e) in entries.iter().enumerate() {
            if !e.weight.is_finite() || e.weight < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "entry[{i}].weight = {}",
                    e.weight
                )));
            }
            if e.plus_probability.len() != settings.len() {
                return Err(Error::InvalidModel(format!(
                    "entry[{i}]: {} parties, expected {}",
                    e.plus_probability.len(),
                    settings.len()
                )));
            }
            for (p, (probs, party)) in e.plus_probability.iter().zip(&settings).enumerate() {
                if probs.len() != party.len() {
                    return Err(Error::InvalidModel(format!(
                        "entry[{i}].responses.{}: {} settings, expected {}",
                        PARTY_NAMES[p],
                        probs.len(),
                        party.len()
                    )));
                }
                if let Some((s, q)) = probs
                    .iter()
                    .enumerate()
                    .find(|(_, q)| !(0.0..=1.0).contains(*q))
                {
                    return Err(Error::InvalidModel(format!(
                        "entry[{i}].responses.{}.{}: P(+1) = {q}",
                        PARTY_NAMES[p], party[s].label
                    )));
                }
            }
        }
        if (total - 1.0).abs() > tolerance::SCALAR {
            return Err(Error::InvalidModel(format!("weights sum to {total}")));
        }
        Ok(Self { settings, entries })
    }

    pub fn from_strategy(strategy: &DeterministicStrategy) -> Self {
        Self::mixture(std::slice::from_ref(strategy), &[1.0])
            .expect("single strategy with unit weight")
    }

    /// Convex mixture of deterministic strategies.
    pub fn mixture(strategies: &[DeterministicStrategy], weights: &[f64]) -> Result<Self> {
        let first = strategies
            .first()
            .ok_or_else(|| Error::InvalidModel("empty mixture".into()))?;
        if strategies.len() != weights.len() {
            return Err(Error::InvalidModel(
                "one weight per strategy required".into(),
            ));
        }
        let shape = first.settings_per_party();
        if strategies.iter().any(|s| s.settings_per_party() != shape) {
            return Err(Error::InvalidModel(
                "strategies disagree on settings".into(),
            ));
        }
        let entries = strategies
            .iter()
            .zip(weights)
            .map(|(s, &weight)| LhvEntry {
                weight,
                plus_probability: s
                    .outcomes
                    .iter()
                    .map(|o| o.iter().map(|&v| if v > 0 { 1.0 } else { 0.0 }).collect())
                    .collect(),
            })
            .collect();
        Self::new(default_settings(&shape), entries)
    }

    /// Random stochastic model with `lambdas` entries.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        settings_per_party: &[usize],
        lambdas: usize,
    ) -> Result<Self> {
        let raw: Vec<f64> = (0..lambdas).map(|_| rng.gen_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let entries = raw
            .iter()
            .map(|w| LhvEntry {
                weight: w / total,
                plus_probability: settings_per_party
                    .iter()
                    .map(|&n| (0..n).map(|_| rng.gen::<f64>()).collect())
                    .collect(),
            })
            .collect();
        Self::new(default_settings(settings_per_party), entries)
    }

    pub fn settings(&self) -> &[Vec<Setting>] {
        &self.settings
    }

    pub fn entries(&self) -> &[LhvEntry] {
        &self.entries
    }

    /// Reads the JSON model format: a list of
    /// `{"weight": w, "responses": {"A": {"x1": {"+1": p}, ...}, "B": {...}}}`.
    ///
    /// Party keys are `A`, `B`, `C`; settings are ordered by label. A `"-1"` key
    /// may accompany `"+1"` and must complement it.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<RawEntry> = serde_json::from_str(text)
            .map_err(|e| Error::InvalidModel(format!("parse error: {e}")))?;
        let first = raw
            .first()
            .ok_or_else(|| Error::InvalidModel("model file holds no entries".into()))?;
        let party_keys: Vec<&String> = first.responses.keys().collect();
        let parties = party_keys.len();
        if !(2..=3).contains(&parties)
            || party_keys
                .iter()
                .zip(PARTY_NAMES)
                .any(|(k, n)| k.as_str() != n)
        {
            return Err(Error::InvalidModel(format!(
                "entry[0].responses: parties must be A, B (and C), found {party_keys:?}"
            )));
        }
        let settings: Vec<Vec<Setting>> = first
            .responses
            .values()
            .map(|m| m.keys().map(|k| Setting::labeled(k.clone())).collect())
            .collect();
        let mut entries = Vec::with_capacity(raw.len());
        for (i, e) in raw.iter().enumerate() {
            let mut plus_probability = Vec::with_capacity(parties);
            for (p, party) in settings.iter().enumerate() {
                let name = PARTY_NAMES[p];
                let resp = e.responses.get(name).ok_or_else(|| {
                    Error::InvalidModel(format!("entry[{i}].responses: missing party {name}"))
                })?;
                if resp.len() != party.len() {
                    return Err(Error::InvalidModel(format!(
                        "entry[{i}].responses.{name}: settings {:?} differ from entry[0]",
                        resp.keys().collect::<Vec<_>>()
                    )));
                }
                let mut probs = Vec::with_capacity(party.len());
                for s in party {
                    let path = format!("entry[{i}].responses.{name}.{}", s.label);
                    let out = resp
                        .get(&s.label)
                        .ok_or_else(|| Error::InvalidModel(format!("{path}: missing")))?;
                    let plus = *out
                        .get("+1")
                        .ok_or_else(|| Error::InvalidModel(format!("{path}: missing \"+1\"")))?;
                    if let Some(key) = out.keys().find(|k| *k != "+1" && *k != "-1") {
                        return Err(Error::InvalidModel(format!(
                            "{path}: unexpected key {key:?}"
                        )));
                    }
                    if let Some(minus) = out.get("-1") {
                        if (plus + minus - 1.0).abs() > tolerance::SCALAR {
                            return Err(Error::InvalidModel(format!(
                                "{path}: P(+1) + P(-1) = {}",
                                plus + minus
                            )));
                        }
                    }
                    probs.push(plus);
                }
                plus_probability.push(probs);
            }
            if e.responses.len() != parties {
                return Err(Error::InvalidModel(format!(
                    "entry[{i}].responses: {} parties, expected {parties}",
                    e.responses.len()
                )));
            }
            entries.push(LhvEntry {
                weight: e.weight,
                plus_probability,
            });
        }
        Self::new(settings, entries)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<RawEntry> = self
            .entries
            .iter()
            .map(|e| RawEntry {
                weight: e.weight,
                responses: e
                    .plus_probability
                    .iter()
                    .zip(&self.settings)
                    .enumerate()
                    .map(|(p, (probs, party))| {
                        let m = party
                            .iter()
                            .zip(probs)
                            .map(|(s, &q)| {
                                (s.label.clone(), BTreeMap::from([("+1".to_string(), q)]))
                            })
                            .collect();
                        (PARTY_NAMES[p].to_string(), m)
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_string_pretty(&raw).expect("plain data")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    weight: f64,
    responses: BTreeMap<String, BTreeMap<String, BTreeMap<String, f64>>>,
}

fn default_settings(settings_per_party: &[usize]) -> Vec<Vec<Setting>> {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    settings_per_party
        .iter()
        .enumerate()
        .map(|(p, &n)| {
            (0..n)
                .map(|s| Setting::labeled(format!("{}{}", NAMES[p], s + 1)))
                .collect()
        })
        .collect()
}

/// Per-λ product of the response distributions. The resulting table is checked
/// against EL, PC and factorization; a failure is an internal invariant breach.
pub fn table_from_lhv(model: &LocalHvModel) -> Result<ConditionalTable> {
    let lambdas = model
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| Lambda {
            label: format!("lambda{i}"),
            weight: e.weight,
        })
        .collect();
    let scenario = ScenarioSpec::new(model.settings.clone(), lambdas)?;
    let table = ConditionalTable::from_fn(scenario, |lambda, settings| {
        let factors = settings
            .iter()
            .enumerate()
            .map(|(p, &s)| {
                let q = model.entries[lambda].plus_probability[p][s];
                OutcomeDistribution::new(1, vec![q, 1.0 - q])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OutcomeDistribution::product(&factors))
    })?;
    let summary = check_all(&table, tolerance::SCALAR)?;
    for r in [&summary.el, &summary.pc, &summary.factorization] {
        if !r.holds {
            return Err(Error::InvalidModel(format!(
                "local model table breaks {} (max violation {:e})",
                r.condition, r.max_violation
            )));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_constant_strategy() {
        let s = DeterministicStrategy::parse("a=+1,b=+1", &[2, 2]).unwrap();
        assert_eq!(s.outcomes(), &[vec![1, 1], vec![1, 1]]);
        let s = DeterministicStrategy::parse("a=+1-1, b=-1+1", &[2, 2]).unwrap();
        assert_eq!(s.outcomes(), &[vec![1, -1], vec![-1, 1]]);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(DeterministicStrategy::parse("a=+1", &[2, 2]).is_err());
        assert!(DeterministicStrategy::parse("a=+1,b=+2", &[2, 2]).is_err());
        assert!(DeterministicStrategy::parse("a=+1,d=+1", &[2, 2]).is_err());
        assert!(DeterministicStrategy::parse("a=+1+1+1,b=+1", &[2, 2]).is_err());
        assert!(DeterministicStrategy::parse("c=+1,a=+1,b=+1", &[2, 2]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(DeterministicStrategy::enumerate(&[2, 2]).len(), 16);
        assert_eq!(DeterministicStrategy::enumerate(&[2, 2, 2]).len(), 64);
    }

    #[test]
    fn single_strategy_gives_point_masses() {
        let s = DeterministicStrategy::parse("a=+1-1,b=-1", &[2, 2]).unwrap();
        let t = table_from_lhv(&LocalHvModel::from_strategy(&s)).unwrap();
        assert_eq!(
            t.cell(0, &[1, 0]).unwrap(),
            &OutcomeDistribution::point(&[-1, -1])
        );
        assert_eq!(
            t.cell(0, &[0, 1]).unwrap(),
            &OutcomeDistribution::point(&[1, -1])
        );
    }

    #[test]
    fn quantum_model_needs_matching_parties() {
        assert!(QuantumModel::two_party(StateVector::ghz(), &[0.0], &[0.0]).is_err());
        let no_angle = vec![vec![Setting::labeled("x")], vec![Setting::labeled("y")]];
        assert!(QuantumModel::new(StateVector::singlet(), no_angle).is_err());
    }

    #[test]
    fn product_state_factorizes() {
        let zero = StateVector::basis(2, 0).unwrap();
        let m = QuantumModel::two_party(zero, &[0.0, 1.0], &[0.3, 2.0]).unwrap();
        let t = table_from_quantum(&m).unwrap();
        let s = check_all(&t, tolerance::CONDITION_DEFAULT).unwrap();
        assert!(s.pc.holds && s.factorization.holds && s.el.holds);
        assert!(s.factorization.max_violation < 1e-12);
    }

    #[test]
    fn lhv_file_round_trip_and_errors() {
        let text = r#"[
            {"weight": 0.25, "responses": {"A": {"x1": {"+1": 1.0}, "x2": {"+1": 0.5, "-1": 0.5}},
                                           "B": {"y1": {"+1": 0.0}, "y2": {"+1": 0.3}}}},
            {"weight": 0.75, "responses": {"A": {"x1": {"+1": 0.2}, "x2": {"+1": 0.9}},
                                           "B": {"y1": {"+1": 1.0}, "y2": {"+1": 0.6}}}}
        ]"#;
        let m = LocalHvModel::from_json(text).unwrap();
        assert_eq!(m.entries().len(), 2);
        assert_eq!(m.entries()[0].plus_probability[0], vec![1.0, 0.5]);
        let back = LocalHvModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);

        let err = LocalHvModel::from_json("[{\"weight\": 1.0, \"responses\": ").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
        let bad = text.replace("\"+1\": 0.3", "\"+1\": 1.3");
        let err = LocalHvModel::from_json(&bad).unwrap_err().to_string();
        assert!(err.contains("entry[0].responses.B.y2"), "{err}");
        let bad = text.replace("0.75", "0.7");
        assert!(LocalHvModel::from_json(&bad)
            .unwrap_err()
            .to_string()
            .contains("sum"));
        let bad = text.replace("\"-1\": 0.5", "\"-1\": 0.4");
        assert!(LocalHvModel::from_json(&bad)
            .unwrap_err()
            .to_string()
            .contains("entry[0].responses.A.x2"));
    }
}
