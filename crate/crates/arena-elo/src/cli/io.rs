//! Vote-log ingestion and serialization.
//!
//! The input format is JSON Lines, one comparison per line:
//!
//! ```text
//! {"model_a": "gpt-4", "model_b": "claude-v1", "winner": "model_a", "judge": "arena_user_42"}
//! ```
//!
//! Field aliases cover the common export variants: `model_a`/`first`,
//! `model_b`/`second`, `winner`/`outcome`, `judge`/`annotator`/`judge_id`.
//! Winner values are `model_a`, `model_b`, or anything starting with
//! `tie` (so `tie (bothbad)` counts as a tie). Extra fields such as
//! `question_id` are ignored. Bad lines are skipped and reported with
//! their line numbers; they never abort the parse.

use std::fs;
use std::path::Path;

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::core::{ComparisonRecord, Dataset, Outcome};

use super::CliError;

/// What the parser did with each line of a vote log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    /// Total lines in the file, including blanks.
    pub lines: usize,
    /// Lines that became records.
    pub parsed: usize,
    /// 1-based line numbers and reasons for lines that did not.
    pub skipped: Vec<(usize, String)>,
}

const FIRST_KEYS: [&str; 2] = ["model_a", "first"];
const SECOND_KEYS: [&str; 2] = ["model_b", "second"];
const WINNER_KEYS: [&str; 2] = ["winner", "outcome"];
const JUDGE_KEYS: [&str; 3] = ["judge", "annotator", "judge_id"];

/// Parses a JSONL vote log from disk.
pub fn parse_records(path: impl AsRef<Path>) -> Result<(Dataset, ParseReport), CliError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input { path: path.display().to_string(), source: e })?;
    Ok(parse_records_str(&text))
}

/// Parses a JSONL vote log already in memory.
pub fn parse_records_str(text: &str) -> (Dataset, ParseReport) {
    let mut records = Vec::new();
    let mut report = ParseReport::default();
    for (offset, line) in text.lines().enumerate() {
        report.lines += 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(record) => {
                records.push(record);
                report.parsed += 1;
            }
            Err(reason) => report.skipped.push((offset + 1, reason)),
        }
    }
    (Dataset::from_records(records), report)
}

fn parse_line(line: &str) -> Result<ComparisonRecord, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let object = value.as_object().ok_or("line is not a JSON object")?;
    let field = |keys: &[&str]| -> Result<String, String> {
        for key in keys {
            if let Some(v) = object.get(*key) {
                return match v.as_str() {
                    Some(s) if !s.is_empty() => Ok(s.to_string()),
                    Some(_) => Err(format!("field `{key}` is empty")),
                    None => Err(format!("field `{key}` is not a string")),
                };
            }
        }
        Err(format!("missing field `{}`", keys[0]))
    };
    let first = field(&FIRST_KEYS)?;
    let second = field(&SECOND_KEYS)?;
    let judge = field(&JUDGE_KEYS)?;
    let winner = field(&WINNER_KEYS)?;
    if first == second {
        return Err(format!("model `{first}` cannot battle itself"));
    }
    let outcome = if winner == "model_a" {
        Outcome::FirstWins
    } else if winner == "model_b" {
        Outcome::SecondWins
    } else if winner.starts_with("tie") {
        Outcome::Tie
    } else {
        return Err(format!("unknown winner value `{winner}`"));
    };
    Ok(ComparisonRecord::new(first, second, judge, outcome))
}

/// Writes a dataset back out as canonical JSONL (`model_a`, `model_b`,
/// `winner`, `judge`), one record per line in insertion order.
pub fn write_records(path: impl AsRef<Path>, data: &Dataset) -> Result<(), CliError> {
    let path = path.as_ref();
    let mut out = String::new();
    for record in data.records() {
        let line = serde_json::json!({
            "model_a": record.first.as_str(),
            "model_b": record.second.as_str(),
            "winner": match record.outcome {
                Outcome::FirstWins => "model_a",
                Outcome::SecondWins => "model_b",
                Outcome::Tie => "tie",
            },
            "judge": record.annotator.as_str(),
        });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::Output { path: path.display().to_string(), source: e })
}

/// SHA-256 of a file, hex encoded, for run manifests.
pub fn file_digest(path: impl AsRef<Path>) -> Result<String, CliError> {
    let path = path.as_ref();
    let bytes = fs::read(path)
        .map_err(|e| CliError::Input { path: path.display().to_string(), source: e })?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_documented_shape() {
        let text = r#"{"model_a":"A","model_b":"B","winner":"model_a","judge":"j1"}
{"model_a":"A","model_b":"B","winner":"tie","judge":"j2","question_id":"q9"}
{"model_a":"C","model_b":"A","winner":"tie (bothbad)","judge":"j1"}
{"model_a":"B","model_b":"C","winner":"model_b","judge":"j2"}"#;
        let (data, report) = parse_records_str(text);
        assert_eq!(report.parsed, 4);
        assert!(report.skipped.is_empty());
        let recs = data.records();
        assert_eq!(recs[0].outcome, Outcome::FirstWins);
        assert_eq!(recs[1].outcome, Outcome::Tie);
        assert_eq!(recs[2].outcome, Outcome::Tie);
        assert_eq!(recs[3].outcome, Outcome::SecondWins);
        assert_eq!(recs[3].annotator.as_str(), "j2");
    }

    #[test]
    fn accepts_field_aliases() {
        let text = r#"{"first":"A","second":"B","outcome":"model_a","judge_id":"j"}
{"model_a":"A","model_b":"B","winner":"model_b","annotator":"k"}"#;
        let (data, report) = parse_records_str(text);
        assert_eq!(report.parsed, 2);
        assert_eq!(data.records()[0].first.as_str(), "A");
        assert_eq!(data.records()[1].annotator.as_str(), "k");
    }

    #[test]
    fn rejects_bad_lines_with_numbers() {
        let text = r#"{"model_a":"A","model_b":"B","winner":"model_a","judge":"j"}
{"model_a":"A","model_b":"B","winner":"model_c","judge":"j"}
not json at all
{"model_a":"A","winner":"model_a","judge":"j"}
{"model_a":"A","model_b":"A","winner":"tie","judge":"j"}
[1,2,3]
{"model_a":"A","model_b":"B","winner":"model_a","judge":""}"#;
        let (data, report) = parse_records_str(text);
        assert_eq!(report.parsed, 1);
        assert_eq!(data.n_records(), 1);
        assert_eq!(report.skipped.len(), 6);
        assert_eq!(report.skipped[0].0, 2);
        assert!(report.skipped[0].1.contains("model_c"));
        assert!(report.skipped[1].1.contains("invalid JSON"));
        assert!(report.skipped[2].1.contains("missing field `model_b`"));
        assert!(report.skipped[3].1.contains("battle itself"));
        assert!(report.skipped[4].1.contains("not a JSON object"));
        assert!(report.skipped[5].1.contains("is empty"));
    }

    #[test]
    fn blank_lines_are_ignored() {
        let text = "\n{\"model_a\":\"A\",\"model_b\":\"B\",\"winner\":\"tie\",\"judge\":\"j\"}\n\n";
        let (_, report) = parse_records_str(text);
        assert_eq!(report.lines, 3);
        assert_eq!(report.parsed, 1);
        assert!(report.skipped.is_empty());
    }

    #[test]
    fn round_trips_through_the_writer() {
        let text = r#"{"model_a":"A","model_b":"B","winner":"model_a","judge":"j1"}
{"model_a":"B","model_b":"C","winner":"tie","judge":"j2"}
{"model_a":"C","model_b":"A","winner":"model_b","judge":"j1"}"#;
        let (data, _) = parse_records_str(text);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("votes.jsonl");
        write_records(&path, &data).unwrap();
        let (back, report) = parse_records(&path).unwrap();
        assert_eq!(back, data);
        assert_eq!(report.parsed, 3);
    }

    #[test]
    fn digest_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x");
        fs::write(&path, b"abc").unwrap();
        assert_eq!(
            file_digest(&path).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
