use std::fmt::Write as _;

use bellctx::inference::{check_all, ConditionSummary, ConditionalTable, Setting};
use bellctx::quantum::ghz_parity_state;
use bellctx::spacetime::{
    causality_audit, default_epr_geometry, inference_availability, knowledge_at, Agent,
    InferenceDescriptor,
};
use bellctx::theories::{
    chsh, chsh_sweep, ghz_conditional_ladder, ghz_parity_table, pc_sweep, pc_sweep_csv,
    sample_table, sweep_csv, table_from_lhv, table_from_quantum, DeterministicStrategy,
    LocalHvModel, QuantumModel, CLASSICAL_BOUND, SINGLET_OPTIMAL_ANGLES, TSIRELSON_BOUND,
};
use bellctx::StateVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig, ModelSpec, OutputFormat, SweepQuantity};
use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_DESCRIPTOR: &str = "P(b|y λ, x a)";
pub const DEFAULT_SEPARATION: f64 = 2.0;
pub const DEFAULT_STEPS: usize = 180;

/// One run's output in every format, plus the invariant verdict.
#[derive(Debug, Clone)]
pub struct Report {
    pub config: ExperimentConfig,
    text: String,
    result: Value,
    csv: String,
    /// Set when an internal invariant failed; the report is still rendered.
    pub breach: Option<String>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a ExperimentConfig,
    result: &'a Value,
    invariant_breach: &'a Option<String>,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let c = &self.config;
                let mut out = format!(
                    "bellctx {VERSION}  command={} model={} seed={} shots={} tolerance={:e}\n",
                    c.command, c.model, c.seed, c.shots, c.tolerance
                );
                if !c.angles.is_empty() {
                    let a: Vec<String> = c.angles.iter().map(|a| format!("{a}")).collect();
                    let _ = writeln!(out, "angles (rad): {}", a.join(" "));
                }
                out.push('\n');
                out.push_str(&self.text);
                if let Some(b) = &self.breach {
                    let _ = writeln!(out, "INVARIANT BREACH: {b}");
                }
                out
            }
            OutputFormat::Json => {
                let env = Envelope {
                    tool: "bellctx",
                    version: VERSION,
                    config: &self.config,
                    result: &self.result,
                    invariant_breach: &self.breach,
                };
                let mut s = serde_json::to_string_pretty(&env).expect("report values are finite");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.csv.clone(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn run(config: &ExperimentConfig) -> CliResult<Report> {
    config.validate()?;
    let mut report = match config.command {
        Command::Chsh => run_chsh(config)?,
        Command::Ghz => run_ghz(config)?,
        Command::Conditions => run_conditions(config)?,
        Command::Spacetime => run_spacetime(config)?,
        Command::Sweep => run_sweep(config)?,
    };
    report.config = config.clone();
    Ok(report)
}

fn report(text: String, result: Value, csv: String, breach: Option<String>) -> Report {
    Report {
        config: ExperimentConfig::new(Command::Chsh, ModelSpec::QuantumSinglet),
        text,
        result,
        csv,
        breach,
    }
}

fn load_lhv(path: &std::path::Path) -> CliResult<LocalHvModel> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    LocalHvModel::from_json(&text)
        .map_err(|e| CliError::Validation(format!("model file {}: {e}", path.display())))
}

fn deterministic(spec: &str, parties: usize) -> CliResult<LocalHvModel> {
    let strategy = DeterministicStrategy::parse(spec, &vec![2; parties])?;
    Ok(LocalHvModel::from_strategy(&strategy))
}

fn deterministic_parties(spec: &str) -> usize {
    let mentions_c = spec
        .split(',')
        .any(|p| matches!(p.trim().split('=').next().map(str::trim), Some("c" | "C")));
    if mentions_c {
        3
    } else {
        2
    }
}

fn xy_relabelled(model: LocalHvModel) -> CliResult<LocalHvModel> {
    let xy = || vec![Setting::labeled("X"), Setting::labeled("Y")];
    let settings = vec![xy(); model.settings().len()];
    Ok(LocalHvModel::new(settings, model.entries().to_vec())?)
}

fn wrong_model(config: &ExperimentConfig, needs: &str) -> CliError {
    CliError::Validation(format!(
        "{} needs {needs}; model {} does not fit",
        config.command, config.model
    ))
}

fn maybe_sample(table: ConditionalTable, config: &ExperimentConfig) -> CliResult<ConditionalTable> {
    if config.shots == 0 {
        Ok(table)
    } else {
        Ok(sample_table(&table, config.shots, config.seed)?)
    }
}

fn two_party_angles(angles: &[f64]) -> (Vec<f64>, Vec<f64>) {
    match angles {
        [] => (
            SINGLET_OPTIMAL_ANGLES[..2].to_vec(),
            SINGLET_OPTIMAL_ANGLES[2..].to_vec(),
        ),
        [x, y] => (vec![*x], vec![*y]),
        [x1, x2, y1, y2] => (vec![*x1, *x2], vec![*y1, *y2]),
        _ => unreachable!("angle count validated"),
    }
}

fn run_chsh(config: &ExperimentConfig) -> CliResult<Report> {
    let (table, quantum) = match &config.model {
        ModelSpec::QuantumSinglet => {
            let (a, b) = two_party_angles(&config.angles);
            (
                table_from_quantum(&QuantumModel::two_party(StateVector::singlet(), &a, &b)?)?,
                true,
            )
        }
        ModelSpec::Lhv(path) => (table_from_lhv(&load_lhv(path)?)?, false),
        ModelSpec::Deterministic(spec) => (table_from_lhv(&deterministic(spec, 2)?)?, false),
        ModelSpec::QuantumGhz => return Err(wrong_model(config, "a two-party model")),
    };
    let sc = table.scenario();
    if sc.parties() != 2 || sc.settings(0).len() != 2 || sc.settings(1).len() != 2 {
        return Err(wrong_model(config, "two parties with two settings each"));
    }
    let table = maybe_sample(table, config)?;
    let r = chsh(&table, 0, 1, 0, 1)?;
    let mut text = format!("{r}\n");
    let _ = writeln!(
        text,
        "|S| = {:.9} {}",
        r.s_max_abs,
        if r.exceeds_classical() {
            "exceeds classical bound 2"
        } else {
            "within classical bound 2"
        }
    );
    let mut csv = String::from("x,y,E\n");
    for c in &r.correlations {
        let _ = writeln!(csv, "{},{},{}", c.x, c.y, c.e);
    }
    let breach = if config.shots > 0 {
        None
    } else if quantum && !r.within_quantum() {
        Some(format!("|S| = {} above {TSIRELSON_BOUND}", r.s_max_abs))
    } else if !quantum && r.s_max_abs > CLASSICAL_BOUND + 1e-12 {
        Some(format!("local model gives |S| = {} above 2", r.s_max_abs))
    } else {
        None
    };
    Ok(report(text, to_value(&r), csv, breach))
}

fn run_ghz(config: &ExperimentConfig) -> CliResult<Report> {
    let (table, model) = match &config.model {
        ModelSpec::QuantumGhz => {
            let model = QuantumModel::xy_settings(ghz_parity_state())?;
            (table_from_quantum(&model)?, Some(model))
        }
        ModelSpec::Lhv(path) => (table_from_lhv(&load_lhv(path)?)?, None),
        ModelSpec::Deterministic(spec) => (
            table_from_lhv(&xy_relabelled(deterministic(spec, 3)?)?)?,
            None,
        ),
        ModelSpec::QuantumSinglet => return Err(wrong_model(config, "a three-party model")),
    };
    let table = maybe_sample(table, config)?;
    let parity = ghz_parity_table(&table)?;
    let ladder = match &model {
        Some(m) if config.shots == 0 => Some(ghz_conditional_ladder(m)?),
        _ => None,
    };
    let xxx = parity
        .rows
        .iter()
        .find(|r| r.word == "XXX")
        .and_then(|r| r.certain());
    let mut text = format!("{parity}\n");
    let _ = writeln!(
        text,
        "XXX product: {}",
        match xxx {
            Some(v) => format!("{v:+}"),
            None => "uncertain".into(),
        }
    );
    match &ladder {
        Some(l) => {
            let _ = writeln!(text, "\nconditional ladder\n{l}");
        }
        None if model.is_some() => {
            text.push_str("\nconditional ladder: exact mode only (shots = 0)\n")
        }
        None => {}
    }
    let mut csv = String::from("word,product_plus,product_minus\n");
    for r in &parity.rows {
        let _ = writeln!(csv, "{},{},{}", r.word, r.product_plus, r.product_minus);
    }
    let breach = if config.shots > 0 {
        None
    } else if model.is_some() && !parity.contradiction {
        Some("quantum GHZ table shows no parity contradiction".into())
    } else if model.is_none() && parity.contradiction {
        Some("local model shows the GHZ parity contradiction".into())
    } else if ladder.as_ref().is_some_and(|l| !l.holds) {
        Some("conditional ladder departs from the closed form".into())
    } else {
        None
    };
    let result = json!({ "parity": to_value(&parity), "ladder": ladder.as_ref().map(to_value) });
    Ok(report(text, result, csv, breach))
}

fn condition_table(config: &ExperimentConfig) -> CliResult<(ConditionalTable, bool)> {
    Ok(match &config.model {
        ModelSpec::QuantumSinglet => {
            let (a, b) = two_party_angles(&config.angles);
            (
                table_from_quantum(&QuantumModel::two_party(StateVector::singlet(), &a, &b)?)?,
                true,
            )
        }
        ModelSpec::QuantumGhz => {
            let model = match config.angles.as_slice() {
                [] => QuantumModel::xy_settings(ghz_parity_state())?,
                angles => {
                    let per_party = angles.len() / 3;
                    let settings = (0..3)
                        .map(|p| {
                            (0..per_party)
                                .map(|k| {
                                    let letter = ['u', 'v', 'w'][p];
                                    Setting::angle(
                                        format!("{letter}{}", k + 1),
                                        angles[p * per_party + k],
                                    )
                                })
                                .collect()
                        })
                        .collect();
                    QuantumModel::new(ghz_parity_state(), settings)?
                }
            };
            (table_from_quantum(&model)?, true)
        }
        ModelSpec::Lhv(path) => (table_from_lhv(&load_lhv(path)?)?, false),
        ModelSpec::Deterministic(spec) => (
            table_from_lhv(&deterministic(spec, deterministic_parties(spec))?)?,
            false,
        ),
    })
}

fn run_conditions(config: &ExperimentConfig) -> CliResult<Report> {
    let (table, quantum) = condition_table(config)?;
    let table = maybe_sample(table, config)?;
    let s: ConditionSummary = check_all(&table, config.tolerance)?;
    let mut text = String::new();
    for r in [&s.el, &s.pc, &s.factorization] {
        let _ = writeln!(text, "{r}");
    }
    let _ = writeln!(
        text,
        "EL and PC imply factorization (bound {:.3e}): {}",
        s.implied_factorization_bound,
        if s.implication_consistent {
            "consistent"
        } else {
            "INCONSISTENT"
        }
    );
    let mut csv = String::from("condition,holds,max_violation,tolerance\n");
    for r in [&s.el, &s.pc, &s.factorization] {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.condition, r.holds, r.max_violation, r.tolerance
        );
    }
    let exact = config.shots == 0;
    let breach = if !s.implication_consistent {
        Some("factorization fails although EL and PC hold".into())
    } else if exact && quantum && !s.el.holds {
        Some("quantum table violates EL".into())
    } else if exact && !quantum && !(s.el.holds && s.pc.holds && s.factorization.holds) {
        Some("local model fails a locality condition".into())
    } else {
        None
    };
    Ok(report(text, to_value(&s), csv, breach))
}

fn run_spacetime(config: &ExperimentConfig) -> CliResult<Report> {
    let g = default_epr_geometry(config.separation.unwrap_or(DEFAULT_SEPARATION))?;
    let descriptor: InferenceDescriptor = config
        .descriptor
        .as_deref()
        .unwrap_or(DEFAULT_DESCRIPTOR)
        .parse()?;
    let audit = causality_audit(&g);
    let agents = [Agent::Alice, Agent::Bob, Agent::Verifier];
    let availability: Vec<_> = agents
        .iter()
        .map(|&a| inference_availability(&g, a, &descriptor))
        .collect();

    let mut text = format!(
        "{:<10} {:>10} {:>10}  payload  known there\n",
        "event", "t", "pos"
    );
    for e in &g.events {
        let payload: String = e.payload.iter().map(|s| s.to_string()).collect();
        let known: String = knowledge_at(Agent::Verifier, e, &g)
            .known
            .iter()
            .map(|s| s.to_string())
            .collect();
        let _ = writeln!(
            text,
            "{:<10} {:>10.6} {:>10.6}  {:<7}  {{{known}}}",
            e.label.to_string(),
            e.t,
            e.pos,
            payload
        );
    }
    let _ = writeln!(
        text,
        "\ncausality audit: {} pairs checked, {} violations",
        audit.pairs_checked,
        audit.violations.len()
    );
    let _ = writeln!(text, "\navailability of {descriptor}");
    let _ = writeln!(
        text,
        "{:<10} {:<10} {:<10} {:<12}",
        "agent", "family", "specific", "verification"
    );
    let show = |l: Option<bellctx::spacetime::EventLabel>| {
        l.map_or("never".to_string(), |l| l.to_string())
    };
    for r in &availability {
        let _ = writeln!(
            text,
            "{:<10} {:<10} {:<10} {:<12}",
            r.agent.to_string(),
            show(r.family),
            show(r.specific),
            show(r.verification)
        );
    }
    let breach =
        (!audit.violations.is_empty()).then(|| format!("causality audit: {:?}", audit.violations));
    let result = json!({
        "geometry": to_value(&g),
        "causality_audit": to_value(&audit),
        "availability": to_value(&availability),
    });
    Ok(report(text, result, g.to_csv(), breach))
}

fn run_sweep(config: &ExperimentConfig) -> CliResult<Report> {
    if config.model != ModelSpec::QuantumSinglet {
        return Err(wrong_model(config, "quantum-singlet"));
    }
    let steps = config.steps.unwrap_or(DEFAULT_STEPS);
    let (csv, result, breach) = match config.quantity.unwrap_or_default() {
        SweepQuantity::S => {
            let rows = chsh_sweep(steps)?;
            let worst = rows.iter().map(|r| r.s_running).fold(0.0, f64::max);
            let breach =
                (worst > TSIRELSON_BOUND + 1e-9).then(|| format!("|S| = {worst} above Tsirelson"));
            (sweep_csv(&rows), to_value(&rows), breach)
        }
        SweepQuantity::Pc => {
            let rows = pc_sweep(steps)?;
            let breach = rows
                .iter()
                .find(|(x, y, v)| (v - (x - y).cos().abs() / 2.0).abs() > 1e-9)
                .map(|(x, y, v)| format!("PC violation {v} at x={x}, y={y} off |cos(x−y)|/2"));
            let objs: Vec<Value> = rows
                .iter()
                .map(|(x, y, v)| json!({ "x": x, "y": y, "pc_max_violation": v }))
                .collect();
            (pc_sweep_csv(&rows), Value::Array(objs), breach)
        }
    };
    Ok(report(csv.clone(), result, csv, breach))
}
