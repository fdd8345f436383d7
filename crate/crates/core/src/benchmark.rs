//! Strategy comparison over several datasets, with JSON and text reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::Strategy;
use crate::dataset::Dataset;
use crate::ensemble::{evaluate_repeat, EvaluationSettings, PerfReport, Timings};
use crate::error::{EcocError, Result};
use crate::util::{mean_std, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub strategies: Vec<Strategy>,
    /// Random matrices drawn per random strategy. Fixed strategies run once.
    pub repeats: usize,
    pub outer_k: usize,
    pub seed: u64,
    pub settings: EvaluationSettings,
}

impl BenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.strategies.is_empty() {
            return Err(EcocError::invalid("at least one strategy is required"));
        }
        if self.repeats == 0 {
            return Err(EcocError::invalid("repeats must be at least 1"));
        }
        if self.outer_k < 2 {
            return Err(EcocError::invalid("outer k must be at least 2"));
        }
        self.settings.svm.validate()
    }
}

/// One (dataset, strategy) result. `error` is set when any step failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub dataset: String,
    pub strategy: Strategy,
    pub n_classes: usize,
    pub n_classifiers: Option<usize>,
    /// Pooled over every fold of every repeat.
    pub accuracy_mean: Option<f64>,
    pub accuracy_std: Option<f64>,
    pub runs: Vec<PerfReport>,
    pub error: Option<String>,
}

impl Cell {
    pub fn timings(&self) -> Timings {
        let mut t = Timings::default();
        for r in &self.runs {
            t.code_seconds += r.timings.code_seconds;
            t.train_seconds += r.timings.train_seconds;
            t.predict_seconds += r.timings.predict_seconds;
            t.predict_seconds_per_instance += r.timings.predict_seconds_per_instance / self.runs.len() as f64;
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub cells: Vec<Cell>,
}

fn run_cell(data: &Dataset, strategy: Strategy, config: &BenchmarkConfig) -> Cell {
    let repeats = if strategy.is_random() { config.repeats } else { 1 };
    let runs: Result<Vec<PerfReport>> = (0..repeats as u64)
        .map(|r| evaluate_repeat(data, strategy, &config.settings, config.outer_k, config.seed, r))
        .collect();
    let mut cell = Cell {
        dataset: data.name().to_string(),
        strategy,
        n_classes: data.n_classes(),
        n_classifiers: None,
        accuracy_mean: None,
        accuracy_std: None,
        runs: Vec::new(),
        error: None,
    };
    match runs {
        Ok(runs) => {
            let pooled: Vec<f64> = runs.iter().flat_map(|r| r.fold_accuracies.iter().copied()).collect();
            let (m, s) = mean_std(&pooled);
            cell.n_classifiers = runs.first().map(|r| r.n_classifiers);
            cell.accuracy_mean = Some(m);
            cell.accuracy_std = Some(s);
            cell.runs = runs;
        }
        Err(e) => cell.error = Some(e.to_string()),
    }
    cell
}

/// Evaluates every strategy on every dataset. Cells run in parallel; a
/// failing cell records its error and the others continue.
pub fn run_benchmark(datasets: &[Dataset], config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.validate()?;
    let jobs: Vec<(&Dataset, Strategy)> = datasets
        .iter()
        .flat_map(|d| config.strategies.iter().map(move |&s| (d, s)))
        .collect();
    let cells = jobs.par_iter().map(|&(d, s)| run_cell(d, s, config)).collect();
    Ok(BenchmarkReport {
        config: config.clone(),
        cells,
    })
}

impl BenchmarkReport {
    /// Deterministic JSON; wall times are left out.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn timings_json(&self) -> String {
        let map: BTreeMap<String, Timings> = self
            .cells
            .iter()
            .map(|c| (format!("{}/{}", c.dataset, c.strategy), c.timings()))
            .collect();
        serde_json::to_string_pretty(&map).expect("timings serialize")
    }

    fn table(&self, title: &str, cell_text: impl Fn(&Cell) -> String) -> String {
        let mut datasets: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !datasets.contains(&c.dataset.as_str()) {
                datasets.push(&c.dataset);
            }
        }
        let strategies = &self.config.strategies;
        let mut rows = vec![std::iter::once("dataset".to_string())
            .chain(strategies.iter().map(|s| s.to_string()))
            .collect::<Vec<_>>()];
        for d in &datasets {
            let mut row = vec![d.to_string()];
            for s in strategies {
                let text = self
                    .cells
                    .iter()
                    .find(|c| c.dataset == *d && c.strategy == *s)
                    .map_or_else(|| "-".to_string(), &cell_text);
                row.push(text);
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = format!("{title}\n");
        for row in rows {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(j, (t, &w))| {
                    let pad = w - t.chars().count();
                    if j == 0 {
                        format!("{t}{}", " ".repeat(pad))
                    } else {
                        format!("{}{t}", " ".repeat(pad))
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }

    /// Accuracy, classifier-count and prediction-time tables.
    pub fn to_text(&self) -> String {
        let accuracy = self.table("Accuracy % (mean±std over outer folds)", |c| {
            match (c.accuracy_mean, c.accuracy_std) {
                (Some(m), Some(s)) => format!("{:.2}±{:.2}", 100.0 * m, 100.0 * s),
                _ => "error".to_string(),
            }
        });
        let counts = self.table("Number of binary classifiers", |c| match c.n_classifiers {
            Some(n) => n.to_string(),
            None => c.strategy.column_count(c.n_classes).to_string(),
        });
        let times = self.table("Prediction time per instance (µs)", |c| {
            if c.error.is_some() {
                "-".to_string()
            } else {
                format!("{:.1}", 1e6 * c.timings().predict_seconds_per_instance)
            }
        });
        let mut out = format!("{accuracy}\n{counts}\n{times}");
        if self.config.strategies.contains(&Strategy::Matching) {
            out.push_str("\nThe matching code is rebuilt inside each outer fold from its training part.\n");
        }
        let failed: Vec<&Cell> = self.cells.iter().filter(|c| c.error.is_some()).collect();
        if !failed.is_empty() {
            out.push_str("\nFailed cells\n");
            for c in failed {
                let _ = writeln!(out, "{}/{}: {}", c.dataset, c.strategy, c.error.as_deref().unwrap_or(""));
            }
        }
        out
    }

    /// Writes `report.json`, `report.txt` and `timings.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| EcocError::io(dir, e))?;
        write_atomic(&dir.join("report.json"), self.to_json().as_bytes())?;
        write_atomic(&dir.join("report.txt"), self.to_text().as_bytes())?;
        write_atomic(&dir.join("timings.json"), self.timings_json().as_bytes())
    }
}
