//! JSON run reports.
//!
//! Field order is fixed by the struct definitions and maps are sorted, so two
//! runs with the same inputs differ only in `wall_time_s`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::solvers::{SolveReport, StopReason};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub objective_trace: Vec<f64>,
    pub residual_trace: Vec<f64>,
    pub initial_objective: Option<f64>,
    pub iterations_run: usize,
    pub stop_reason: Option<StopReason>,
    pub wall_time_s: f64,
    pub metrics: Metrics,
    pub config: BTreeMap<String, serde_json::Value>,
    pub seeds: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), ..Default::default() }
    }

    pub fn with_solve(mut self, solve: &SolveReport) -> Self {
        self.objective_trace = solve.objective_trace.clone();
        self.residual_trace = solve.residual_trace.clone();
        self.initial_objective = Some(solve.initial_objective);
        self.iterations_run = solve.iterations_run;
        self.stop_reason = Some(solve.stop_reason);
        self.wall_time_s = solve.wall_time_s;
        self
    }

    pub fn config(mut self, key: &str, value: impl Serialize) -> Self {
        self.config.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
        self
    }

    pub fn seed(mut self, key: &str, seed: u64) -> Self {
        self.seeds.insert(key.to_string(), seed);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `"inf"` in JSON when reconstruction and truth match exactly.
    #[serde(serialize_with = "ser_db", deserialize_with = "de_db", default)]
    pub psnr_db: Option<f64>,
    pub correlations: Vec<PointCorrelation>,
}

/// Correlation at one probe point, or why it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCorrelation {
    pub x: usize,
    pub y: usize,
    pub r: Option<f64>,
    pub error: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Db {
    Finite(f64),
    Text(String),
}

fn ser_db<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(x) if x.is_infinite() && *x > 0.0 => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
    }
}

fn de_db<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<f64>, D::Error> {
    match Option::<Db>::deserialize(d)? {
        None => Ok(None),
        Some(Db::Finite(x)) => Ok(Some(x)),
        Some(Db::Text(t)) if t == "inf" => Ok(Some(f64::INFINITY)),
        Some(Db::Text(t)) => Err(serde::de::Error::custom(format!("bad psnr value {t:?}"))),
    }
}

pub fn write_report(report: &RunReport, path: impl AsRef<Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<RunReport> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
