use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentResult, RunResult};
use crate::nn::Task;
use crate::train::ConfusionMatrix;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    subject: String,
    task: String,
    fraction: f64,
    validated_fraction: Option<f64>,
    run: usize,
    seed: u64,
    accuracy: f64,
    train_counts: String,
    test_count: usize,
    /// Row-major (truth, predicted) counts.
    confusion: String,
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn split_numbers<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|t| {
            t.parse().map_err(|_| Error::RowFormat {
                line,
                message: format!("bad {what} entry {t:?}"),
            })
        })
        .collect()
}

/// One CSV row per run, with a header line.
pub fn write_results_csv<W: Write>(results: &[ExperimentResult], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for cell in results {
        for r in &cell.runs {
            w.serialize(Row {
                subject: cell.subject_id.clone(),
                task: cell.task.to_string(),
                fraction: cell.train_fraction,
                validated_fraction: cell.validated_fraction,
                run: r.run,
                seed: r.seed,
                accuracy: r.accuracy(),
                train_counts: join(&r.train_counts),
                test_count: r.test_count,
                confusion: join(r.confusion.counts()),
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_results_csv`], regrouping consecutive runs
/// of the same cell.
pub fn read_results_csv<R: Read>(source: R) -> Result<Vec<ExperimentResult>> {
    let mut reader = csv::Reader::from_reader(source);
    type Cell = (String, Task, f64, Option<f64>, Vec<RunResult>);
    let mut cells: Vec<Cell> = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let line = i + 2;
        let row = row?;
        let task: Task = row.task.parse().map_err(|_| Error::RowFormat {
            line,
            message: format!("unknown task {:?}", row.task),
        })?;
        let counts = split_numbers(&row.confusion, line, "confusion")?;
        let confusion = ConfusionMatrix::from_counts(task.class_names(), counts).map_err(|e| Error::RowFormat {
            line,
            message: e.to_string(),
        })?;
        let run = RunResult {
            run: row.run,
            seed: row.seed,
            confusion,
            train_counts: split_numbers(&row.train_counts, line, "train count")?,
            test_count: row.test_count,
        };
        let same = |c: &(String, Task, f64, Option<f64>, Vec<RunResult>)| {
            c.0 == row.subject && c.1 == task && c.2 == row.fraction && c.3 == row.validated_fraction
        };
        match cells.last_mut() {
            Some(c) if same(c) => c.4.push(run),
            _ => cells.push((row.subject, task, row.fraction, row.validated_fraction, vec![run])),
        }
    }
    cells
        .into_iter()
        .map(|(s, t, f, v, runs)| ExperimentResult::new(s, t, f, v, runs))
        .collect()
}

/// `0.125` → `12.5%`, `0.25` → `25%`.
pub fn format_percent(fraction: f64) -> String {
    let s = format!("{:.3}", fraction * 100.0);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}

fn cell_text(mean: f64, std: f64) -> String {
    format!("{:.2} ± {:.2}", 100.0 * mean, 100.0 * std)
}

#[derive(PartialEq)]
struct TableKey {
    task: Task,
    /// Base fraction for retraining tables.
    retrain_base: Option<f64>,
}

fn key_of(r: &ExperimentResult) -> TableKey {
    TableKey {
        task: r.task,
        retrain_base: r.validated_fraction.map(|_| r.train_fraction),
    }
}

fn column_of(r: &ExperimentResult) -> f64 {
    r.validated_fraction.unwrap_or(r.train_fraction)
}

/// Markdown tables of mean ± std accuracy (in percent), one per task and
/// protocol. Rows are subjects in order of appearance followed by an
/// all-subjects row averaging the subject means and standard deviations;
/// columns are fractions in ascending order.
pub fn aggregate_report(results: &[ExperimentResult]) -> String {
    let mut keys: Vec<TableKey> = Vec::new();
    for r in results {
        let k = key_of(r);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = String::new();
    for key in keys {
        let cells: Vec<&ExperimentResult> = results.iter().filter(|r| key_of(r) == key).collect();
        let mut columns: Vec<f64> = Vec::new();
        let mut subjects: Vec<&str> = Vec::new();
        for c in &cells {
            if !columns.contains(&column_of(c)) {
                columns.push(column_of(c));
            }
            if !subjects.contains(&c.subject_id.as_str()) {
                subjects.push(&c.subject_id);
            }
        }
        columns.sort_by(f64::total_cmp);
        let title = match key.retrain_base {
            None => format!("{} accuracy (%) by training fraction", key.task.label()),
            Some(b) => format!(
                "{} accuracy (%) after retraining from {}",
                key.task.label(),
                format_percent(b)
            ),
        };
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&format!("### {title}\n\n| Subject |"));
        for &c in &columns {
            let head = match key.retrain_base {
                Some(_) if c == 0.0 => "Base".to_string(),
                _ => format_percent(c),
            };
            out.push_str(&format!(" {head} |"));
        }
        out.push_str(&format!("\n|---|{}\n", "---|".repeat(columns.len())));
        let find = |s: &str, col: f64| cells.iter().find(|c| c.subject_id == s && column_of(c) == col);
        for s in &subjects {
            out.push_str(&format!("| {s} |"));
            for &col in &columns {
                let text = find(s, col).map_or("-".to_string(), |c| cell_text(c.mean_accuracy, c.std_accuracy));
                out.push_str(&format!(" {text} |"));
            }
            out.push('\n');
        }
        out.push_str("| All subjects |");
        for &col in &columns {
            let present: Vec<&&ExperimentResult> = subjects.iter().filter_map(|s| find(s, col)).collect();
            let n = present.len() as f64;
            let mean = present.iter().map(|c| c.mean_accuracy).sum::<f64>() / n;
            let std = present.iter().map(|c| c.std_accuracy).sum::<f64>() / n;
            out.push_str(&format!(" {} |", cell_text(mean, std)));
        }
        out.push('\n');
    }
    out
}
