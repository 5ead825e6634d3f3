//! Results tables: CSV persistence and the grouped markdown report.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::linearize::{EdgeOrdering, Labeling, Method};
use crate::prompt::Shots;
use crate::tasks::TaskKind;

/// One scored cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: Method,
    pub labeling: Labeling,
    pub task: TaskKind,
    pub shots: Shots,
    pub n_instances: usize,
    /// Mean over `seeds` of the per-seed exact accuracy.
    pub accuracy: f64,
    pub seeds: Vec<u64>,
    /// Motif responses naming more than one shape.
    pub multi_mention: usize,
}

impl CellResult {
    pub fn is_baseline(&self) -> bool {
        self.method.ordering == EdgeOrdering::Random
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub model: String,
    pub dataset: String,
    pub cells: Vec<CellResult>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    method: String,
    labeling: String,
    linegraph: bool,
    task: String,
    shots: String,
    n_instances: usize,
    accuracy: String,
    seeds: String,
    multi_mention: usize,
}

impl ResultsTable {
    pub fn new(model: impl Into<String>, dataset: impl Into<String>) -> Self {
        Self {
            model: model.into(),
            dataset: dataset.into(),
            cells: Vec::new(),
        }
    }

    pub fn cell(&self, method: Method, labeling: Labeling, task: TaskKind, shots: Shots) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.labeling == labeling && c.task == task && c.shots == shots)
    }

    /// Writes `# key: value` metadata lines followed by the CSV body.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), EvalError> {
        writeln!(out, "# model: {}", self.model)?;
        writeln!(out, "# dataset: {}", self.dataset)?;
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cells {
            w.serialize(CsvRow {
                method: c.method.to_string(),
                labeling: c.labeling.to_string(),
                linegraph: c.method.via_linegraph,
                task: c.task.to_string(),
                shots: c.shots.to_string(),
                n_instances: c.n_instances,
                // shortest repr that round-trips exactly
                accuracy: format!("{:?}", c.accuracy),
                seeds: c.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
                multi_mention: c.multi_mention,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, EvalError> {
        let mut reader = std::io::BufReader::new(input);
        let mut meta = BTreeMap::new();
        let mut body = String::new();
        let mut line = String::new();
        while reader.read_line(&mut line)? > 0 {
            match line.strip_prefix("# ") {
                Some(m) if body.is_empty() => {
                    if let Some((k, v)) = m.trim_end_matches(['\r', '\n']).split_once(": ") {
                        meta.insert(k.to_string(), v.to_string());
                    }
                }
                _ => body.push_str(&line),
            }
            line.clear();
        }
        let mut table = ResultsTable::new(
            meta.remove("model").unwrap_or_default(),
            meta.remove("dataset").unwrap_or_default(),
        );
        let mut r = csv::Reader::from_reader(body.as_bytes());
        for row in r.deserialize::<CsvRow>() {
            let row = row?;
            let bad = |what: &str, v: &str| EvalError::Malformed(format!("{what} `{v}`"));
            let method: Method = row.method.parse().map_err(|_| bad("method", &row.method))?;
            if method.via_linegraph != row.linegraph {
                return Err(bad("linegraph flag for", &row.method));
            }
            let seeds = if row.seeds.is_empty() {
                Vec::new()
            } else {
                row.seeds
                    .split(';')
                    .map(|s| s.parse().map_err(|_| bad("seed", s)))
                    .collect::<Result<_, _>>()?
            };
            table.cells.push(CellResult {
                method,
                labeling: row.labeling.parse().map_err(|_| bad("labeling", &row.labeling))?,
                task: row.task.parse().map_err(|_| bad("task", &row.task))?,
                shots: row.shots.parse().map_err(|_| bad("shots", &row.shots))?,
                n_instances: row.n_instances,
                accuracy: row.accuracy.parse().map_err(|_| bad("accuracy", &row.accuracy))?,
                seeds,
                multi_mention: row.multi_mention,
            });
        }
        Ok(table)
    }

    /// Markdown table grouped by labeling, with a baseline row last.
    ///
    /// Each entry is `zero / one` shot accuracy in percent. Within a labeling
    /// group the best value per column is wrapped in `<u>`; the best value
    /// across all non-baseline rows is bold. Ties mark every tied entry.
    pub fn to_markdown(&self) -> String {
        let tasks: Vec<TaskKind> = {
            let present: BTreeSet<TaskKind> = self.cells.iter().map(|c| c.task).collect();
            TaskKind::ALL.into_iter().filter(|t| present.contains(t)).collect()
        };
        let shots: Vec<Shots> = {
            let present: BTreeSet<Shots> = self.cells.iter().map(|c| c.shots).collect();
            present.into_iter().collect()
        };

        // (labeling, method) rows in display order
        let mut groups: Vec<(Option<Labeling>, Vec<Method>)> = Vec::new();
        for labeling in Labeling::ALL {
            let mut methods: Vec<Method> = Method::structured();
            methods.push(Method::new(EdgeOrdering::DefaultOrder, false));
            methods.retain(|&m| self.cells.iter().any(|c| c.method == m && c.labeling == labeling));
            if !methods.is_empty() {
                groups.push((Some(labeling), methods));
            }
        }
        let baseline: Vec<&CellResult> = self.cells.iter().filter(|c| c.is_baseline()).collect();

        let value = |m: Method, l: Labeling, col: Option<TaskKind>, s: Shots| -> Option<f64> {
            match col {
                Some(t) => self.cell(m, l, t, s).map(|c| c.accuracy),
                None => {
                    let v: Vec<f64> = tasks.iter().filter_map(|&t| self.cell(m, l, t, s)).map(|c| c.accuracy).collect();
                    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
                }
            }
        };
        let columns: Vec<Option<TaskKind>> = tasks.iter().copied().map(Some).chain([None]).collect();

        let max_of = |rows: &[(Method, Labeling)], col: Option<TaskKind>, s: Shots| -> Option<f64> {
            rows.iter().filter_map(|&(m, l)| value(m, l, col, s)).reduce(f64::max)
        };
        let all_rows: Vec<(Method, Labeling)> = groups
            .iter()
            .flat_map(|(l, ms)| ms.iter().map(move |&m| (m, l.expect("structured group"))))
            .collect();

        let mut out = String::new();
        out.push_str(&format!("Model: {} | Dataset: {}\n\n", self.model, self.dataset));
        let shot_hdr = shots.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" / ");
        out.push_str("| Method |");
        for t in &tasks {
            out.push_str(&format!(" {} |", t.title()));
        }
        out.push_str(&format!(" Average |\n|---|{}---|\n", "---|".repeat(tasks.len())));
        out.push_str(&format!("| *({shot_hdr} shot)* |{}\n", " |".repeat(columns.len())));

        for (labeling, methods) in &groups {
            let l = labeling.expect("structured group");
            out.push_str(&format!("| **{}** |{}\n", l.title(), " |".repeat(columns.len())));
            let group_rows: Vec<(Method, Labeling)> = methods.iter().map(|&m| (m, l)).collect();
            for &m in methods {
                out.push_str(&format!("| {} |", m.title()));
                for &col in &columns {
                    let parts: Vec<String> = shots
                        .iter()
                        .map(|&s| match value(m, l, col, s) {
                            None => "-".to_string(),
                            Some(v) => {
                                let mut txt = format!("{:.2}", v * 100.0);
                                if max_of(&group_rows, col, s) == Some(v) {
                                    txt = format!("<u>{txt}</u>");
                                }
                                if max_of(&all_rows, col, s) == Some(v) {
                                    txt = format!("**{txt}**");
                                }
                                txt
                            }
                        })
                        .collect();
                    out.push_str(&format!(" {} |", parts.join(" / ")));
                }
                out.push('\n');
            }
        }

        if !baseline.is_empty() {
            let seeds = baseline[0].seeds.len();
            out.push_str(&format!("| **Baseline** ({seeds} seeds) |{}\n", " |".repeat(columns.len())));
            let b = baseline[0];
            out.push_str("| Random |");
            for &col in &columns {
                let parts: Vec<String> = shots
                    .iter()
                    .map(|&s| {
                        value(b.method, b.labeling, col, s)
                            .map(|v| format!("{:.2}", v * 100.0))
                            .unwrap_or_else(|| "-".into())
                    })
                    .collect();
                out.push_str(&format!(" {} |", parts.join(" / ")));
            }
            out.push('\n');
        }

        let flagged: usize = self.cells.iter().map(|c| c.multi_mention).sum();
        if flagged > 0 {
            out.push_str(&format!(
                "\n{flagged} motif responses named more than one shape; the first mention was scored.\n"
            ));
        }
        out
    }
}
