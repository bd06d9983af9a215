//! File writers. Floats go out in shortest round-trip form.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;

use super::CliError;
use crate::trajectory::{GameTrajectory, Tabular};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// Output directory plus the list of files written so far.
pub struct Sink {
    dir: PathBuf,
    pub artifacts: Vec<String>,
}

impl Sink {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `<stem>.csv` or `<stem>.json`.
    pub fn trajectory<S: Tabular>(
        &mut self,
        stem: &str,
        traj: &GameTrajectory<S>,
        format: Format,
    ) -> Result<(), CliError> {
        let name = format!("{stem}.{}", format.extension());
        match format {
            Format::Csv => {
                let bytes = trajectory_csv(traj).map_err(|e| CliError::Config(e.to_string()))?;
                self.write(&name, &bytes)
            }
            Format::Json => self.json(&name, &TrajectoryJson::from(traj)),
        }
    }
}

pub fn trajectory_csv<S: Tabular>(traj: &GameTrajectory<S>) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(traj.header())?;
    for r in &traj.records {
        let mut fields = vec![r.step.to_string()];
        fields.extend(r.state.row().iter().map(|v| format_float(*v)));
        w.write_record(&fields)?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

/// Shortest decimal string that parses back to the same f64.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:?}")
    } else {
        v.to_string()
    }
}

#[derive(Serialize)]
pub struct TrajectoryJson<'a> {
    pub metadata: &'a crate::trajectory::TrajectoryMeta,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl<'a, S: Tabular> From<&'a GameTrajectory<S>> for TrajectoryJson<'a> {
    fn from(t: &'a GameTrajectory<S>) -> Self {
        Self {
            metadata: &t.metadata,
            columns: t.header(),
            rows: t
                .records
                .iter()
                .map(|r| {
                    let mut row = vec![r.step as f64];
                    row.extend(r.state.row());
                    row
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckSummary {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Written for every run, including failed verifications.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub config: serde_json::Value,
    pub duration_seconds: f64,
    pub artifacts: Vec<String>,
    pub checks: Vec<CheckSummary>,
    pub all_passed: bool,
    pub results: serde_json::Value,
}

pub fn all_finite<S: Tabular>(traj: &GameTrajectory<S>) -> bool {
    traj.states().all(|s| s.row().iter().all(|v| v.is_finite()))
}
