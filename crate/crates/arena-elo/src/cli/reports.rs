//! Report and manifest writers.
//!
//! Every command writes machine-readable artifacts into its output
//! directory plus a `manifest.json` recording the tool version, the
//! resolved configuration, and SHA-256 digests of the inputs: enough to
//! reproduce the outputs byte for byte.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::core::{AbilityVector, Dataset, RatingVector};

use super::io::file_digest;
use super::CliError;

/// One leaderboard row. Ratings appear in natural units, on the familiar
/// 1000-centered display scale, and min-max normalized to [0, 1].
#[derive(Debug, Clone, Serialize)]
pub struct LeaderboardRow {
    pub rank: usize,
    pub model: String,
    pub rating_natural: f64,
    pub rating_display: f64,
    pub rating_normalized: f64,
    pub games: usize,
}

/// Builds leaderboard rows sorted best first.
pub fn leaderboard_rows(ratings: &RatingVector, data: &Dataset) -> Vec<LeaderboardRow> {
    let display = ratings.to_display();
    let normalized = ratings.to_normalized();
    let counts = data.model_record_counts();
    let mut order: Vec<usize> = (0..ratings.len()).collect();
    order.sort_by(|&a, &b| {
        ratings.values()[b]
            .total_cmp(&ratings.values()[a])
            .then_with(|| ratings.models()[a].cmp(&ratings.models()[b]))
    });
    order
        .into_iter()
        .enumerate()
        .map(|(rank, idx)| LeaderboardRow {
            rank: rank + 1,
            model: ratings.models()[idx].to_string(),
            rating_natural: ratings.values()[idx],
            rating_display: display[idx],
            rating_normalized: normalized[idx],
            games: data
                .model_index(&ratings.models()[idx])
                .map(|i| counts[i])
                .unwrap_or(0),
        })
        .collect()
}

pub fn write_leaderboard(dir: &Path, rows: &[LeaderboardRow]) -> Result<Vec<PathBuf>, CliError> {
    let csv_path = dir.join("leaderboard.csv");
    let mut writer = csv::Writer::from_path(&csv_path)
        .map_err(|e| CliError::Report { path: csv_path.display().to_string(), source: e })?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Report { path: csv_path.display().to_string(), source: e })?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Output { path: csv_path.display().to_string(), source: e })?;
    let json_path = dir.join("leaderboard.json");
    write_json(&json_path, rows)?;
    Ok(vec![csv_path, json_path])
}

/// One ability-report row.
#[derive(Debug, Clone, Serialize)]
pub struct AbilityRow {
    pub annotator: String,
    pub theta: f64,
    pub records: usize,
    pub flagged: bool,
}

/// Builds ability rows in registry order, flagging `theta < epsilon`.
pub fn ability_rows(abilities: &AbilityVector, data: &Dataset, epsilon: f64) -> Vec<AbilityRow> {
    let counts = data.annotator_record_counts();
    abilities
        .iter()
        .map(|(annotator, theta)| AbilityRow {
            annotator: annotator.to_string(),
            theta,
            records: data
                .annotator_index(annotator)
                .map(|i| counts[i])
                .unwrap_or(0),
            flagged: theta < epsilon,
        })
        .collect()
}

pub fn write_abilities(dir: &Path, rows: &[AbilityRow]) -> Result<PathBuf, CliError> {
    let path = dir.join("abilities.csv");
    write_csv(&path, rows)?;
    Ok(path)
}

/// Writes a per-epoch loss trace as `epoch,loss`.
pub fn write_trace(dir: &Path, trace: &[f64]) -> Result<PathBuf, CliError> {
    let path = dir.join("trace.csv");
    let mut out = String::from("epoch,loss\n");
    for (epoch, loss) in trace.iter().enumerate() {
        out.push_str(&format!("{},{}\n", epoch + 1, loss));
    }
    fs::write(&path, out).map_err(|e| CliError::Output { path: path.display().to_string(), source: e })?;
    Ok(path)
}

/// Writes the win and tie count matrices as square CSV tables with model
/// names on both axes.
pub fn write_win_matrix(dir: &Path, data: &Dataset) -> Result<Vec<PathBuf>, CliError> {
    let wm = data.win_matrix();
    let names: Vec<&str> = wm.models().iter().map(|m| m.as_str()).collect();
    let render = |cell: &dyn Fn(usize, usize) -> u64| {
        let mut out = String::from("model");
        for name in &names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, name) in names.iter().enumerate() {
            out.push_str(name);
            for j in 0..names.len() {
                out.push(',');
                out.push_str(&cell(i, j).to_string());
            }
            out.push('\n');
        }
        out
    };
    let wins_path = dir.join("wins.csv");
    fs::write(&wins_path, render(&|i, j| wm.wins(i, j)))
        .map_err(|e| CliError::Output { path: wins_path.display().to_string(), source: e })?;
    let ties_path = dir.join("ties.csv");
    fs::write(&ties_path, render(&|i, j| wm.ties(i, j)))
        .map_err(|e| CliError::Output { path: ties_path.display().to_string(), source: e })?;
    Ok(vec![wins_path, ties_path])
}

/// Serializes any row iterator to CSV with serde headers.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Report { path: path.display().to_string(), source: e })?;
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Report { path: path.display().to_string(), source: e })?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Output { path: path.display().to_string(), source: e })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).map_err(|e| CliError::Output { path: path.display().to_string(), source: e })
}

/// Reproducibility record written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub command: String,
    /// Resolved configuration after defaults, exactly as used.
    pub config: serde_json::Value,
    pub inputs: Vec<ManifestInput>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ManifestInput {
    pub path: String,
    pub sha256: String,
}

impl Manifest {
    pub fn new(command: &str, config: serde_json::Value) -> Manifest {
        Manifest {
            tool: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path) -> Result<(), CliError> {
        self.inputs.push(ManifestInput {
            path: path.display().to_string(),
            sha256: file_digest(path)?,
        });
        Ok(())
    }

    pub fn record_outputs(&mut self, paths: &[PathBuf]) {
        for path in paths {
            self.outputs.push(
                path.file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string()),
            );
        }
        self.outputs.sort();
        let unique: BTreeSet<String> = self.outputs.drain(..).collect();
        self.outputs = unique.into_iter().collect();
    }

    /// Writes `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join("manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }
}

/// Creates the output directory if needed.
pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output { path: dir.display().to_string(), source: e })
}
