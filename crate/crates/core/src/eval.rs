//! Answer parsing, exact-accuracy scoring and the evaluation matrix.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::EvalError;
use crate::generators::{GraphRecord, MotifKind};
use crate::linearize::{linearize_with_emission_order, EdgeOrdering, Labeling, LinearizationSpec, LinearizedGraph, Method};
use crate::prompt::{render_prompt, Exemplar, PromptRecord, Shots};
use crate::report::{CellResult, ResultsTable};
use crate::tasks::{make_instance, Answer, TaskInstance, TaskKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParsedAnswer {
    Count(u64),
    YesNo(bool),
    Shape(MotifKind),
    Unparseable,
}

static INTEGER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\d+").unwrap());
static YES_NO: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(yes|no)\b").unwrap());
static SHAPE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(clique|star|fan|diamond|tree)s?\b").unwrap());

/// Extracts an answer: the first integer, the first yes/no, or the first
/// motif name, depending on the task. Never fails.
pub fn parse_answer(kind: TaskKind, raw: &str) -> ParsedAnswer {
    let found = if kind.is_existence() {
        YES_NO
            .captures(raw)
            .map(|c| ParsedAnswer::YesNo(c[1].eq_ignore_ascii_case("yes")))
    } else if kind == TaskKind::MotifShape {
        SHAPE
            .captures(raw)
            .and_then(|c| c[1].parse::<MotifKind>().ok())
            .map(ParsedAnswer::Shape)
    } else {
        INTEGER.find(raw).and_then(|m| m.as_str().parse().ok()).map(ParsedAnswer::Count)
    };
    found.unwrap_or(ParsedAnswer::Unparseable)
}

/// More than one distinct motif name in a motif-task response.
pub fn is_multi_mention(kind: TaskKind, raw: &str) -> bool {
    if kind != TaskKind::MotifShape {
        return false;
    }
    let mut names: Vec<String> = SHAPE.captures_iter(raw).map(|c| c[1].to_ascii_lowercase()).collect();
    names.sort_unstable();
    names.dedup();
    names.len() > 1
}

pub fn is_correct(truth: &Answer, parsed: &ParsedAnswer) -> bool {
    match (truth, parsed) {
        (Answer::Count(a), ParsedAnswer::Count(b)) => a == b,
        (Answer::YesNo(a), ParsedAnswer::YesNo(b)) => a == b,
        (Answer::Shapes(present), ParsedAnswer::Shape(s)) => present.contains(s),
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub record_id: String,
    pub task: TaskKind,
    pub spec: LinearizationSpec,
    pub shots: Shots,
    pub raw: String,
    pub parsed: ParsedAnswer,
    pub correct: bool,
    #[serde(default)]
    pub multi_mention: bool,
}

impl EvalRecord {
    pub fn score(inst: &TaskInstance, spec: LinearizationSpec, shots: Shots, raw: String) -> Self {
        let parsed = parse_answer(inst.kind, &raw);
        Self {
            record_id: inst.record_id.clone(),
            task: inst.kind,
            spec,
            shots,
            correct: is_correct(&inst.truth, &parsed),
            multi_mention: is_multi_mention(inst.kind, &raw),
            parsed,
            raw,
        }
    }
}

/// Fraction of records scored correct.
pub fn exact_accuracy(records: &[EvalRecord]) -> Result<f64, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(records.iter().filter(|r| r.correct).count() as f64 / records.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResponse {
    pub text: String,
    pub latency_ms: u64,
    #[serde(default)]
    pub prompt_tokens: Option<u64>,
    #[serde(default)]
    pub completion_tokens: Option<u64>,
    /// Served from a replay cache rather than the model.
    #[serde(default)]
    pub cached: bool,
}

/// Anything that can answer a batch of prompts.
pub trait Model: Sync {
    type Error: std::fmt::Display;

    fn name(&self) -> String;

    /// One result per prompt, in input order.
    fn complete_all(&self, prompts: &[PromptRecord]) -> Vec<Result<ModelResponse, Self::Error>>;
}

/// What to evaluate: rows of `(method, labeling)` crossed with tasks and shot modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixPlan {
    pub rows: Vec<(Method, Labeling)>,
    pub tasks: Vec<TaskKind>,
    pub shots: Vec<Shots>,
    /// Seed for structured linearizations and for on-the-fly task sampling.
    pub seed: u64,
    /// One random-baseline run per seed; empty disables the baseline row.
    pub baseline_seeds: Vec<u64>,
}

impl MatrixPlan {
    /// Six methods under random labels and under node relabeling, every
    /// task, both shot modes, and a five-seed baseline.
    pub fn standard(seed: u64) -> Self {
        let rows = [Labeling::RandomLabels, Labeling::NodeRelabeling]
            .into_iter()
            .flat_map(|l| Method::structured().into_iter().map(move |m| (m, l)))
            .collect();
        Self {
            rows,
            tasks: TaskKind::ALL.to_vec(),
            shots: vec![Shots::Zero, Shots::One],
            seed,
            baseline_seeds: (seed..seed + 5).collect(),
        }
    }

    /// The six methods plus the generator's own order, all under default labels.
    pub fn default_labels(seed: u64) -> Self {
        let mut rows: Vec<_> = Method::structured().into_iter().map(|m| (m, Labeling::DefaultLabels)).collect();
        rows.push((Method::new(EdgeOrdering::DefaultOrder, false), Labeling::DefaultLabels));
        Self {
            rows,
            baseline_seeds: Vec::new(),
            ..Self::standard(seed)
        }
    }
}

/// Identifies one cell of the matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub method: Method,
    pub labeling: Labeling,
    pub task: TaskKind,
    pub shots: Shots,
}

impl CellKey {
    pub fn file_stem(&self) -> String {
        format!("{}__{}__{}__{}", self.method, self.labeling, self.task, self.shots)
    }
}

/// Persisted per-cell results, so an interrupted run resumes where it stopped.
#[derive(Debug, Clone)]
pub struct Checkpoints {
    dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellCheckpoint {
    cell: CellResult,
    per_seed: Vec<f64>,
}

impl Checkpoints {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, EvalError> {
        let dir = dir.into();
        fs::create_dir_all(dir.join("cells"))?;
        fs::create_dir_all(dir.join("records"))?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn cell_path(&self, key: &CellKey) -> PathBuf {
        self.dir.join("cells").join(format!("{}.json", key.file_stem()))
    }

    fn load(&self, key: &CellKey) -> Option<CellCheckpoint> {
        let text = fs::read_to_string(self.cell_path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn save(&self, key: &CellKey, cp: &CellCheckpoint, records: &[EvalRecord]) -> Result<(), EvalError> {
        let mut f = fs::File::create(self.dir.join("records").join(format!("{}.jsonl", key.file_stem())))?;
        for r in records {
            serde_json::to_writer(&mut f, r)?;
            f.write_all(b"\n")?;
        }
        // cell file last: its presence marks the cell complete
        let tmp = self.cell_path(key).with_extension("tmp");
        fs::write(&tmp, serde_json::to_vec_pretty(cp)?)?;
        fs::rename(tmp, self.cell_path(key))?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    pub table: ResultsTable,
    /// Cells with model failures, with the first error message.
    pub incomplete: Vec<(CellKey, String)>,
    pub exemplar_ref: Option<String>,
    /// Per-seed accuracies behind every baseline cell.
    pub baseline_per_seed: BTreeMap<CellKey, Vec<f64>>,
}

/// Evaluates every cell of `plan` on `records` with `model`.
///
/// The record flagged as exemplar is the one-shot example throughout and is
/// left out of the scored set, so zero- and one-shot cells score the same
/// instances. Model failures leave a cell incomplete without aborting the run.
pub fn run_matrix<M: Model>(
    dataset: &str,
    records: &[GraphRecord],
    plan: &MatrixPlan,
    model: &M,
    checkpoints: Option<&Checkpoints>,
) -> Result<MatrixOutcome, EvalError> {
    let exemplar_idx = records.iter().position(|r| r.exemplar);
    if plan.shots.contains(&Shots::One) && exemplar_idx.is_none() {
        return Err(crate::error::PromptError::MissingExemplar.into());
    }
    let query_idx: Vec<usize> = (0..records.len()).filter(|&i| Some(i) != exemplar_idx).collect();

    // instance per (record, task), shared by every row
    let mut instances: BTreeMap<(usize, TaskKind), TaskInstance> = BTreeMap::new();
    for &task in &plan.tasks {
        for (i, rec) in records.iter().enumerate() {
            if !TaskKind::applicable(rec).contains(&task) {
                continue;
            }
            let inst = match rec.instances.iter().find(|x| x.kind == task) {
                Some(x) => x.clone(),
                None => make_instance(rec, task, plan.seed).map_err(|e| EvalError::Malformed(e.to_string()))?,
            };
            instances.insert((i, task), inst);
        }
    }

    let mut table = ResultsTable::new(model.name(), dataset);
    let mut incomplete = Vec::new();
    let mut baseline_per_seed = BTreeMap::new();

    let mut runs: Vec<(Method, Labeling, Vec<u64>)> =
        plan.rows.iter().map(|&(m, l)| (m, l, vec![plan.seed])).collect();
    if !plan.baseline_seeds.is_empty() {
        runs.push((
            Method::new(EdgeOrdering::Random, false),
            Labeling::RandomLabels,
            plan.baseline_seeds.clone(),
        ));
    }

    for (method, labeling, seeds) in runs {
        // linearizations per seed, computed lazily on the first uncached cell
        let mut linearized: Option<Vec<Vec<LinearizedGraph>>> = None;
        for &task in &plan.tasks {
            let scored: Vec<usize> = query_idx.iter().copied().filter(|&i| instances.contains_key(&(i, task))).collect();
            if scored.is_empty() {
                continue;
            }
            for &shots in &plan.shots {
                let key = CellKey { method, labeling, task, shots };
                if let Some(cp) = checkpoints.and_then(|c| c.load(&key)) {
                    if seeds.len() > 1 {
                        baseline_per_seed.insert(key.clone(), cp.per_seed.clone());
                    }
                    table.cells.push(cp.cell);
                    continue;
                }
                if linearized.is_none() {
                    let mut per_seed = Vec::with_capacity(seeds.len());
                    for &seed in &seeds {
                        let spec = LinearizationSpec::new(method, labeling, seed);
                        per_seed.push(
                            records
                                .iter()
                                .map(|r| linearize_with_emission_order(&r.graph, Some(&r.default_edge_order), &spec))
                                .collect::<Result<Vec<_>, _>>()?,
                        );
                    }
                    linearized = Some(per_seed);
                }
                let lins = linearized.as_ref().expect("filled above");

                let mut per_seed_acc = Vec::with_capacity(seeds.len());
                let mut all_records = Vec::new();
                let mut failure: Option<(usize, String)> = None;
                for lin in lins {
                    let exemplar = match (shots, exemplar_idx) {
                        (Shots::One, Some(e)) => Some(Exemplar {
                            instance: instances.get(&(e, task)).ok_or(crate::error::PromptError::MissingExemplar)?,
                            linearized: &lin[e],
                        }),
                        _ => None,
                    };
                    let prompts = scored
                        .iter()
                        .map(|&i| render_prompt(&instances[&(i, task)], &lin[i], shots, exemplar))
                        .collect::<Result<Vec<_>, _>>()?;
                    let responses = model.complete_all(&prompts);
                    let mut cell_records = Vec::with_capacity(scored.len());
                    let mut failed = 0;
                    for (&i, resp) in scored.iter().zip(responses) {
                        match resp {
                            Ok(r) => cell_records.push(EvalRecord::score(&instances[&(i, task)], lin[i].spec, shots, r.text)),
                            Err(e) => {
                                failed += 1;
                                if failure.is_none() {
                                    failure = Some((0, e.to_string()));
                                }
                            }
                        }
                    }
                    if failed > 0 {
                        if let Some(f) = failure.as_mut() {
                            f.0 += failed;
                        }
                        continue;
                    }
                    per_seed_acc.push(exact_accuracy(&cell_records)?);
                    all_records.extend(cell_records);
                }

                if let Some((failed, first)) = failure {
                    let _ = failed;
                    incomplete.push((key, first));
                    continue;
                }
                let accuracy = per_seed_acc.iter().sum::<f64>() / per_seed_acc.len() as f64;
                let cell = CellResult {
                    method,
                    labeling,
                    task,
                    shots,
                    n_instances: scored.len(),
                    accuracy,
                    seeds: seeds.clone(),
                    multi_mention: all_records.iter().filter(|r| r.multi_mention).count(),
                };
                if let Some(c) = checkpoints {
                    c.save(
                        &key,
                        &CellCheckpoint {
                            cell: cell.clone(),
                            per_seed: per_seed_acc.clone(),
                        },
                        &all_records,
                    )?;
                }
                if seeds.len() > 1 {
                    baseline_per_seed.insert(key, per_seed_acc);
                }
                table.cells.push(cell);
            }
        }
    }

    Ok(MatrixOutcome {
        table,
        incomplete,
        exemplar_ref: exemplar_idx.map(|e| records[e].id.clone()),
        baseline_per_seed,
    })
}
