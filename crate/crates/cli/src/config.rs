use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Chsh,
    Ghz,
    Conditions,
    Spacetime,
    Sweep,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Chsh => "chsh",
            Command::Ghz => "ghz",
            Command::Conditions => "conditions",
            Command::Spacetime => "spacetime",
            Command::Sweep => "sweep",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Text => "txt",
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepQuantity {
    /// Running max of |S| along the family (0, 2θ, θ, −θ).
    #[default]
    S,
    /// PC max violation of the singlet at x = 0, y = θ.
    Pc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelSpec {
    QuantumSinglet,
    /// The +1 eigenvector of XYY, YXY, YYX.
    QuantumGhz,
    Lhv(PathBuf),
    Deterministic(String),
}

impl FromStr for ModelSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quantum-singlet" => Ok(ModelSpec::QuantumSinglet),
            "quantum-ghz" => Ok(ModelSpec::QuantumGhz),
            _ => {
                if let Some(path) = s.strip_prefix("lhv:").filter(|p| !p.is_empty()) {
                    Ok(ModelSpec::Lhv(path.into()))
                } else if let Some(spec) =
                    s.strip_prefix("deterministic:").filter(|p| !p.is_empty())
                {
                    Ok(ModelSpec::Deterministic(spec.into()))
                } else {
                    Err(format!(
                        "unknown model {s:?}; expected quantum-singlet, quantum-ghz, lhv:<file> or deterministic:<spec>"
                    ))
                }
            }
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::QuantumSinglet => f.write_str("quantum-singlet"),
            ModelSpec::QuantumGhz => f.write_str("quantum-ghz"),
            ModelSpec::Lhv(p) => write!(f, "lhv:{}", p.display()),
            ModelSpec::Deterministic(s) => write!(f, "deterministic:{s}"),
        }
    }
}

impl Serialize for ModelSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Fully resolved run configuration; embedded verbatim in every report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub model: ModelSpec,
    /// Radians, after any `--degrees` conversion.
    pub angles: Vec<f64>,
    pub seed: u64,
    /// 0 selects exact probabilities.
    pub shots: u64,
    pub output: OutputFormat,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantity: Option<SweepQuantity>,
}

impl ExperimentConfig {
    pub fn new(command: Command, model: ModelSpec) -> Self {
        Self {
            command,
            model,
            angles: Vec::new(),
            seed: 0,
            shots: 0,
            output: OutputFormat::Text,
            tolerance: bellctx::tolerance::CONDITION_DEFAULT,
            separation: None,
            descriptor: None,
            steps: None,
            quantity: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(CliError::Validation(format!(
                "--tolerance must be a positive number, got {}",
                self.tolerance
            )));
        }
        if let Some((i, a)) = self.angles.iter().enumerate().find(|(_, a)| !a.is_finite()) {
            return Err(CliError::Validation(format!(
                "--angles[{i}] is not finite: {a}"
            )));
        }
        let allowed = self.allowed_angle_counts();
        if !allowed.contains(&self.angles.len()) {
            let counts: Vec<String> = allowed.iter().map(usize::to_string).collect();
            return Err(CliError::Validation(format!(
                "{} with model {} takes {} angle(s), got {}",
                self.command,
                self.model,
                counts.join(" or "),
                self.angles.len()
            )));
        }
        if let Some(d) = self.separation {
            if !d.is_finite() || d <= 0.0 {
                return Err(CliError::Validation(format!(
                    "--separation must be positive, got {d}"
                )));
            }
        }
        if self.steps == Some(0) {
            return Err(CliError::Validation("--steps must be at least 1".into()));
        }
        Ok(())
    }

    fn allowed_angle_counts(&self) -> &'static [usize] {
        match (self.command, &self.model) {
            (Command::Chsh, ModelSpec::QuantumSinglet) => &[0, 4],
            (Command::Conditions, ModelSpec::QuantumSinglet) => &[0, 2, 4],
            (Command::Conditions, ModelSpec::QuantumGhz) => &[0, 3, 6],
            _ => &[0],
        }
    }
}
