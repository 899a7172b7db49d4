//! Light-cone bookkeeping in 1+1D Minkowski space (c = 1).
//!
//! The default geometry places the pair source at the origin, the two setting
//! choices at `t = 0` a distance `d` to either side, the results where the source
//! and setting light cones first meet, and the verification event at the
//! earliest point in the common future of everything else.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for lightlike classification.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Symbol {
    #[serde(rename = "λ")]
    Lambda,
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
}

impl Symbol {
    pub const ALL: [Symbol; 5] = [Symbol::Lambda, Symbol::X, Symbol::Y, Symbol::A, Symbol::B];

    /// The setting that an outcome symbol is measured under.
    pub fn setting_of(self) -> Option<Symbol> {
        match self {
            Symbol::A => Some(Symbol::X),
            Symbol::B => Some(Symbol::Y),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Lambda => "λ",
            Symbol::X => "x",
            Symbol::Y => "y",
            Symbol::A => "a",
            Symbol::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventLabel {
    Source,
    SettingA,
    SettingB,
    ResultA,
    ResultB,
    Verify,
}

impl EventLabel {
    pub fn payload(self) -> BTreeSet<Symbol> {
        let s: &[Symbol] = match self {
            EventLabel::Source => &[Symbol::Lambda],
            EventLabel::SettingA => &[Symbol::X],
            EventLabel::SettingB => &[Symbol::Y],
            EventLabel::ResultA => &[Symbol::A],
            EventLabel::ResultB => &[Symbol::B],
            EventLabel::Verify => &[],
        };
        s.iter().copied().collect()
    }
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventLabel::Source => "SOURCE",
            EventLabel::SettingA => "SETTING_A",
            EventLabel::SettingB => "SETTING_B",
            EventLabel::ResultA => "RESULT_A",
            EventLabel::ResultB => "RESULT_B",
            EventLabel::Verify => "VERIFY",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub pos: f64,
    pub label: EventLabel,
    pub payload: BTreeSet<Symbol>,
}

impl SpacetimeEvent {
    /// The payload is implied by the label.
    pub fn new(label: EventLabel, t: f64, pos: f64) -> Self {
        Self {
            t,
            pos,
            label,
            payload: label.payload(),
        }
    }

    /// Lorentz boost with velocity `v`, `|v| < 1`.
    pub fn boosted(&self, v: f64) -> Self {
        let gamma = 1.0 / (1.0 - v * v).sqrt();
        Self {
            t: gamma * (self.t - v * self.pos),
            pos: gamma * (self.pos - v * self.t),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Separation {
    Spacelike,
    Timelike,
    Lightlike,
}

/// Sign of `Δt² − Δpos²`. Coincident events count as lightlike.
pub fn interval(e1: &SpacetimeEvent, e2: &SpacetimeEvent) -> Separation {
    let dt = e2.t - e1.t;
    let dx = e2.pos - e1.pos;
    let s = dt * dt - dx * dx;
    let scale = (dt * dt + dx * dx).max(1.0);
    if s.abs() <= LIGHTLIKE_TOLERANCE * scale {
        Separation::Lightlike
    } else if s > 0.0 {
        Separation::Timelike
    } else {
        Separation::Spacelike
    }
}

/// `earlier` lies in the closed past light cone of `later`.
pub fn in_closed_past(earlier: &SpacetimeEvent, later: &SpacetimeEvent) -> bool {
    let dt = later.t - earlier.t;
    let dx = (later.pos - earlier.pos).abs();
    dt >= dx - LIGHTLIKE_TOLERANCE * dt.abs().max(dx).max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub events: Vec<SpacetimeEvent>,
}

impl Geometry {
    pub fn event(&self, label: EventLabel) -> Option<&SpacetimeEvent> {
        self.events.iter().find(|e| e.label == label)
    }

    pub fn boosted(&self, v: f64) -> Self {
        Self {
            events: self.events.iter().map(|e| e.boosted(v)).collect(),
        }
    }

    /// `label,t,pos` lines for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,t,pos\n");
        for e in &self.events {
            out.push_str(&format!("{},{},{}\n", e.label, e.t, e.pos));
        }
        out
    }
}

/// Earliest event whose closed past light cone contains every event given.
pub fn earliest_common_future(events: &[SpacetimeEvent]) -> (f64, f64) {
    // t ≥ tᵢ + |p − pᵢ| for all i  ⇔  t ≥ A + p and t ≥ B − p.
    let a = events
        .iter()
        .map(|e| e.t - e.pos)
        .fold(f64::NEG_INFINITY, f64::max);
    let b = events
        .iter()
        .map(|e| e.t + e.pos)
        .fold(f64::NEG_INFINITY, f64::max);
    ((a + b) / 2.0, (b - a) / 2.0)
}

/// Source at the origin, settings at `(0, ∓d)`, results at `(d/2, ∓d/2)`, and the
/// verification event in the common future of all five.
pub fn default_epr_geometry(separation: f64) -> Result<Geometry> {
    if !separation.is_finite() || separation <= 0.0 {
        return Err(Error::InvalidGeometry(format!(
            "separation must be positive, got {separation}"
        )));
    }
    let d = separation;
    let mut events = vec![
        SpacetimeEvent::new(EventLabel::Source, 0.0, 0.0),
        SpacetimeEvent::new(EventLabel::SettingA, 0.0, -d),
        SpacetimeEvent::new(EventLabel::SettingB, 0.0, d),
        SpacetimeEvent::new(EventLabel::ResultA, d / 2.0, -d / 2.0),
        SpacetimeEvent::new(EventLabel::ResultB, d / 2.0, d / 2.0),
    ];
    let (t, pos) = earliest_common_future(&events);
    events.push(SpacetimeEvent::new(EventLabel::Verify, t, pos));
    Ok(Geometry { events })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Agent {
    Alice,
    Bob,
    Verifier,
}

impl FromStr for Agent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alice" => Ok(Agent::Alice),
            "bob" => Ok(Agent::Bob),
            "verifier" => Ok(Agent::Verifier),
            _ => Err(Error::UnknownAgent(s.into())),
        }
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agent::Alice => "ALICE",
            Agent::Bob => "BOB",
            Agent::Verifier => "VERIFIER",
        })
    }
}

impl Agent {
    /// Events the agent passes through, in time order.
    pub fn worldline(self) -> &'static [EventLabel] {
        match self {
            Agent::Alice => &[
                EventLabel::SettingA,
                EventLabel::ResultA,
                EventLabel::Verify,
            ],
            Agent::Bob => &[
                EventLabel::SettingB,
                EventLabel::ResultB,
                EventLabel::Verify,
            ],
            Agent::Verifier => &[EventLabel::Verify],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeSet {
    pub agent: Agent,
    pub at: SpacetimeEvent,
    pub known: BTreeSet<Symbol>,
}

/// Symbols carried by events in the closed past light cone of `at`. Every event
/// broadcasts its payload at light speed, so the set does not depend on the agent.
pub fn knowledge_at(agent: Agent, at: &SpacetimeEvent, geometry: &Geometry) -> KnowledgeSet {
    let known = geometry
        .events
        .iter()
        .filter(|e| in_closed_past(e, at))
        .flat_map(|e| e.payload.iter().copied())
        .collect();
    KnowledgeSet {
        agent,
        at: at.clone(),
        known,
    }
}

/// A conditional such as `P(b | y λ x a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceDescriptor {
    pub target: Symbol,
    pub given: BTreeSet<Symbol>,
}

impl InferenceDescriptor {
    pub fn new(target: Symbol, given: impl IntoIterator<Item = Symbol>) -> Self {
        Self {
            target,
            given: given.into_iter().collect(),
        }
    }
}

impl FromStr for InferenceDescriptor {
    type Err = Error;

    /// Accepts `P(b|y λ, x a)`; `lambda` may stand for `λ`.
    fn from_str(s: &str) -> Result<Self> {
        let malformed = || Error::MalformedDescriptor(s.into());
        let inner = s
            .trim()
            .strip_prefix("P(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(malformed)?;
        let (target, given) = inner.split_once('|').ok_or_else(malformed)?;
        let symbols = |part: &str| -> Result<Vec<Symbol>> {
            let cleaned = part.replace("lambda", "λ");
            cleaned
                .chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| match c {
                    'λ' => Ok(Symbol::Lambda),
                    'x' => Ok(Symbol::X),
                    'y' => Ok(Symbol::Y),
                    'a' => Ok(Symbol::A),
                    'b' => Ok(Symbol::B),
                    other => Err(Error::UnknownSymbol {
                        symbol: other.to_string(),
                        descriptor: s.into(),
                    }),
                })
                .collect()
        };
        let target = match symbols(target)?.as_slice() {
            [t @ (Symbol::A | Symbol::B)] => *t,
            _ => return Err(malformed()),
        };
        let given: BTreeSet<Symbol> = symbols(given)?.into_iter().collect();
        if given.contains(&target) {
            return Err(malformed());
        }
        Ok(Self { target, given })
    }
}

impl fmt::Display for InferenceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let given: Vec<String> = self.given.iter().map(Symbol::to_string).collect();
        write!(f, "P({}|{})", self.target, given.join(""))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailabilityReport {
    pub descriptor: String,
    pub agent: Agent,
    /// The conditional as a function of the target's own setting (e.g. of `y` for
    /// `P(b|yλxa)`): needs every conditioning symbol except that setting.
    pub family: Option<EventLabel>,
    /// The conditional for one specific value of every conditioning symbol.
    pub specific: Option<EventLabel>,
    /// Comparing the prediction with the actual outcome.
    pub verification: Option<EventLabel>,
}

fn earliest_on_worldline(
    agent: Agent,
    geometry: &Geometry,
    needed: &BTreeSet<Symbol>,
) -> Option<EventLabel> {
    agent.worldline().iter().copied().find(|&label| {
        geometry
            .event(label)
            .is_some_and(|e| needed.is_subset(&knowledge_at(agent, e, geometry).known))
    })
}

/// Earliest events on the agent's worldline at which the conditional can be
/// evaluated, in the family and specific readings, and checked against the outcome.
pub fn inference_availability(
    geometry: &Geometry,
    agent: Agent,
    descriptor: &InferenceDescriptor,
) -> AvailabilityReport {
    let mut family = descriptor.given.clone();
    if let Some(setting) = descriptor.target.setting_of() {
        family.remove(&setting);
    }
    let mut verification = descriptor.given.clone();
    verification.insert(descriptor.target);
    AvailabilityReport {
        descriptor: descriptor.to_string(),
        agent,
        family: earliest_on_worldline(agent, geometry, &family),
        specific: earliest_on_worldline(agent, geometry, &descriptor.given),
        verification: earliest_on_worldline(agent, geometry, &verification),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalityAudit {
    pub pairs_checked: usize,
    /// `(event, symbol)` pairs where the symbol is known although every carrier is
    /// spacelike to, or later than, the event.
    pub violations: Vec<(EventLabel, Symbol)>,
}

/// Cross-checks every knowledge set against [`interval`]: a known symbol must
/// have a carrier that is timelike or lightlike and not later.
pub fn causality_audit(geometry: &Geometry) -> CausalityAudit {
    let mut pairs_checked = 0;
    let mut violations = Vec::new();
    for at in &geometry.events {
        for agent in [Agent::Alice, Agent::Bob, Agent::Verifier] {
            for symbol in knowledge_at(agent, at, geometry).known {
                pairs_checked += 1;
                let reachable = geometry.events.iter().any(|e| {
                    e.payload.contains(&symbol)
                        && e.t <= at.t + LIGHTLIKE_TOLERANCE
                        && interval(e, at) != Separation::Spacelike
                });
                if !reachable {
                    violations.push((at.label, symbol));
                }
            }
        }
    }
    CausalityAudit {
        pairs_checked,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: f64, pos: f64) -> SpacetimeEvent {
        SpacetimeEvent::new(EventLabel::Verify, t, pos)
    }

    #[test]
    fn interval_examples() {
        assert_eq!(
            interval(&ev(0.0, 0.0), &ev(0.0, 0.0)),
            Separation::Lightlike
        );
        assert_eq!(
            interval(&ev(0.0, -1.0), &ev(0.0, 1.0)),
            Separation::Spacelike
        );
        assert_eq!(
            interval(&ev(0.0, 0.0), &ev(2.0, -1.0)),
            Separation::Timelike
        );
    }

    #[test]
    fn geometry_rejects_nonpositive_separation() {
        assert!(default_epr_geometry(0.0).is_err());
        assert!(default_epr_geometry(-1.0).is_err());
        assert!(default_epr_geometry(f64::NAN).is_err());
    }

    #[test]
    fn d_two_places_result_a() {
        let g = default_epr_geometry(2.0).unwrap();
        let r = g.event(EventLabel::ResultA).unwrap();
        assert_eq!((r.t, r.pos), (1.0, -1.0));
        let v = g.event(EventLabel::Verify).unwrap();
        assert_eq!((v.t, v.pos), (2.0, 0.0));
    }

    #[test]
    fn descriptor_parsing() {
        let d: InferenceDescriptor = "P(b|y λ, x a)".parse().unwrap();
        assert_eq!(d.target, Symbol::B);
        assert_eq!(d.given.len(), 4);
        let d: InferenceDescriptor = "P(a|x lambda y b)".parse().unwrap();
        assert!(d.given.contains(&Symbol::Lambda));
        assert!(matches!(
            "P(b|y q)".parse::<InferenceDescriptor>(),
            Err(Error::UnknownSymbol { .. })
        ));
        assert!("b|y".parse::<InferenceDescriptor>().is_err());
        assert!("P(b|b)".parse::<InferenceDescriptor>().is_err());
    }

    #[test]
    fn agent_parsing() {
        assert_eq!("Alice".parse::<Agent>().unwrap(), Agent::Alice);
        assert!(matches!(
            "charlie".parse::<Agent>(),
            Err(Error::UnknownAgent(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let g = default_epr_geometry(2.0).unwrap();
        let csv = g.to_csv();
        assert!(csv.starts_with("label,t,pos\nSOURCE,0,0\n"));
        assert_eq!(csv.lines().count(), 7);
    }
}
