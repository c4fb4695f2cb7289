use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use euclid_core::io::{parse_profile, write_embedding};
use serde::Serialize;

use crate::config::Settings;
use crate::query::{run, verdict_word, Query, Route};

const EXTENSIONS: &[&str] = &["soc", "soi", "toc", "toi", "cat"];

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Record {
    pub path: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub query: Query,
    pub route: Option<Route>,
    /// `yes`, `no`, `unknown` or `error`.
    pub verdict: String,
    pub detail: String,
    pub seconds: f64,
    pub certificate: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub files: usize,
    pub yes: usize,
    pub no: usize,
    pub unknown: usize,
    pub error: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CorpusReport {
    pub records: Vec<Record>,
    pub summary: Summary,
}

pub struct CorpusOptions {
    pub query: Query,
    pub jobs: usize,
    /// Shared wall-clock budget for the whole run.
    pub budget: Option<Duration>,
    pub certificates: Option<PathBuf>,
}

/// Profile files directly inside `dir`, sorted by name.
pub fn profile_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().and_then(|e| e.to_str()).is_some_and(|e| EXTENSIONS.contains(&e)))
        .collect();
    files.sort();
    Ok(files)
}

fn process(path: &Path, options: &CorpusOptions, settings: &Settings, deadline: Option<Instant>) -> Record {
    let start = Instant::now();
    let mut record = Record {
        path: path.display().to_string(),
        n: None,
        m: None,
        query: options.query,
        route: None,
        verdict: "error".into(),
        detail: String::new(),
        seconds: 0.0,
        certificate: None,
    };
    let remaining = deadline.map(|d| d.saturating_duration_since(start));
    if remaining == Some(Duration::ZERO) {
        record.verdict = "unknown".into();
        record.detail = "wall-clock budget exhausted before start".into();
        return record;
    }
    let timeout = Duration::from_secs(settings.timeout).min(remaining.unwrap_or(Duration::MAX));
    let outcome = std::fs::read_to_string(path)
        .map_err(anyhow::Error::from)
        .and_then(|text| Ok(parse_profile(&text)?))
        .and_then(|profile| {
            record.n = Some(profile.num_voters());
            record.m = Some(profile.num_alternatives());
            run(&profile, &options.query, settings, timeout)
        });
    match outcome {
        Ok(answer) => {
            record.verdict = verdict_word(&answer.result).into();
            record.route = Some(answer.route);
            record.detail = answer.result.to_string();
            if let (Some(e), Some(dir)) = (answer.result.embedding(), &options.certificates) {
                let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                let target = dir.join(format!("{name}.emb"));
                match std::fs::write(&target, write_embedding(e)) {
                    Ok(()) => record.certificate = Some(target.display().to_string()),
                    Err(err) => record.detail.push_str(&format!("; certificate not written: {err}")),
                }
            }
        }
        Err(err) => record.detail = format!("{err:#}"),
    }
    record.seconds = start.elapsed().as_secs_f64();
    record
}

/// Runs the query on every profile in `dir` with a pool of `jobs` workers.
/// Files that fail to parse are recorded as errors; records come back in
/// file-name order whatever the scheduling.
pub fn run_corpus(dir: &Path, options: &CorpusOptions, settings: &Settings) -> Result<CorpusReport> {
    let files = profile_files(dir)?;
    let deadline = options.budget.map(|b| Instant::now() + b);
    let queue = Mutex::new(files.iter().enumerate());
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| {
        for _ in 0..options.jobs.max(1).min(files.len().max(1)) {
            let tx = tx.clone();
            let queue = &queue;
            scope.spawn(move || loop {
                let next = queue.lock().expect("queue lock").next();
                let Some((i, path)) = next else { break };
                let _ = tx.send((i, process(path, options, settings, deadline)));
            });
        }
    });
    drop(tx);
    let mut records: Vec<(usize, Record)> = rx.into_iter().collect();
    records.sort_by_key(|(i, _)| *i);
    let records: Vec<Record> = records.into_iter().map(|(_, r)| r).collect();
    let mut summary = Summary { files: records.len(), ..Summary::default() };
    for r in &records {
        match r.verdict.as_str() {
            "yes" => summary.yes += 1,
            "no" => summary.no += 1,
            "unknown" => summary.unknown += 1,
            _ => summary.error += 1,
        }
    }
    Ok(CorpusReport { records, summary })
}

impl CorpusReport {
    /// One JSON object per file.
    pub fn to_jsonl(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("records serialize") + "\n").collect()
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let width = self.records.iter().map(|r| r.path.len()).max().unwrap_or(4).max(4);
        let _ = writeln!(out, "{:<width$}  {:>4}  {:>4}  {:<7}  {:>8}  detail", "file", "n", "m", "verdict", "seconds");
        for r in &self.records {
            let dash = |x: Option<usize>| x.map_or("-".to_string(), |v| v.to_string());
            let _ = writeln!(
                out,
                "{:<width$}  {:>4}  {:>4}  {:<7}  {:>8.3}  {}",
                r.path,
                dash(r.n),
                dash(r.m),
                r.verdict,
                r.seconds,
                r.detail.lines().next().unwrap_or("")
            );
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} files: {} yes, {} no, {} unknown, {} errors", s.files, s.yes, s.no, s.unknown, s.error);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::Mode;
    use euclid_core::Metric;

    fn options() -> CorpusOptions {
        CorpusOptions { query: Query { d: 1, metric: Metric::L2, mode: Mode::Auto }, jobs: 2, budget: None, certificates: None }
    }

    fn settings() -> Settings {
        Settings { solver: None, timeout: 5, lp_budget: 100 }
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        let report = run_corpus(dir.path(), &options(), &settings()).unwrap();
        assert!(report.records.is_empty());
        assert_eq!(report.to_jsonl(), "");
        assert!(report.table().contains("0 files"));
    }

    #[test]
    fn malformed_files_are_isolated() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.soc"), "# NUMBER ALTERNATIVES: 2\n1: 1,2\n1: 2,1\n").unwrap();
        std::fs::write(dir.path().join("b.soc"), "this is not a profile\n").unwrap();
        std::fs::write(dir.path().join("c.soc"), "1: 1,2,3\n1: 2,3,1\n1: 3,1,2\n").unwrap();
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let report = run_corpus(dir.path(), &options(), &settings()).unwrap();
        let verdicts: Vec<&str> = report.records.iter().map(|r| r.verdict.as_str()).collect();
        assert_eq!(verdicts, ["yes", "error", "no"]);
        assert_eq!(report.summary, Summary { files: 3, yes: 1, no: 1, unknown: 0, error: 1 });
        for line in report.to_jsonl().lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["query"]["d"] == 1 && v["query"]["metric"] == "l2");
        }
    }

    #[test]
    fn exhausted_budget_is_recorded_not_dropped() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["a.soc", "b.soc"] {
            std::fs::write(dir.path().join(name), "1: 1,2\n").unwrap();
        }
        let mut opts = options();
        opts.budget = Some(Duration::ZERO);
        let report = run_corpus(dir.path(), &opts, &settings()).unwrap();
        assert_eq!(report.summary.unknown, 2);
    }
}
