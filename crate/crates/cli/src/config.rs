use std::path::{Path, PathBuf};

use graphlin::{DatasetKind, Labeling, Method, Shots, TaskKind};
use graphlin_gateway::ModelConfig;
use serde::{Deserialize, Serialize};

/// Settings for `graphlin eval`, read from TOML and overridable by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: String,
    /// Pre-generated JSONL; generated from `dataset` and `seed` when absent.
    pub dataset_file: Option<PathBuf>,
    pub seed: Option<u64>,
    pub methods: Vec<String>,
    pub labelings: Vec<String>,
    pub shots: Vec<String>,
    pub tasks: Vec<String>,
    /// Random-baseline seeds; 0 disables the baseline row.
    pub baseline_seeds: u64,
    /// `mock:oracle`, `mock:random[:seed]`, `mock:constant:<text>`, `http`, or a model name.
    pub model: String,
    /// TOML file with endpoint and decoding settings.
    pub model_config: Option<PathBuf>,
    pub out: PathBuf,
    pub cache: bool,
    /// Evaluate only the first N records (the exemplar is always kept).
    pub limit: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: "graphwave".into(),
            dataset_file: None,
            seed: None,
            methods: Method::structured().iter().map(|m| m.to_string()).collect(),
            labelings: vec!["random".into(), "relabel".into()],
            shots: vec!["zero".into(), "one".into()],
            tasks: TaskKind::ALL.iter().map(|t| t.to_string()).collect(),
            baseline_seeds: 5,
            model: "mock:oracle".into(),
            model_config: None,
            out: PathBuf::from("run"),
            cache: true,
            limit: None,
        }
    }
}

/// A checked [`RunConfig`].
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub dataset: DatasetKind,
    pub dataset_file: Option<PathBuf>,
    pub seed: u64,
    pub rows: Vec<(Method, Labeling)>,
    pub shots: Vec<Shots>,
    pub tasks: Vec<TaskKind>,
    pub baseline_seeds: Vec<u64>,
    pub model: String,
    pub model_config: ModelConfig,
    pub out: PathBuf,
    pub cache: bool,
    pub limit: Option<usize>,
}

fn parse_all<T: std::str::FromStr>(what: &str, items: &[String]) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    if items.is_empty() {
        return Err(format!("no {what} selected"));
    }
    items
        .iter()
        .map(|s| s.parse::<T>().map_err(|e| format!("{what}: {e}")))
        .collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn resolve(&self) -> Result<ResolvedRun, String> {
        let seed = self.seed.ok_or("a seed is required")?;
        let dataset: DatasetKind = self.dataset.parse()?;
        if let Some(f) = &self.dataset_file {
            if !f.is_file() {
                return Err(format!("dataset file {} does not exist", f.display()));
            }
        }
        let model_config = match &self.model_config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("model config {}: {e}", p.display()))?;
                toml::from_str(&text).map_err(|e| format!("model config {}: {e}", p.display()))?
            }
            None => ModelConfig::default(),
        };
        model_config.validate()?;
        let methods: Vec<Method> = parse_all("method", &self.methods)?;
        let labelings: Vec<Labeling> = parse_all("labeling", &self.labelings)?;
        let rows = labelings
            .iter()
            .flat_map(|&l| methods.iter().map(move |&m| (m, l)))
            .collect();
        Ok(ResolvedRun {
            dataset,
            dataset_file: self.dataset_file.clone(),
            seed,
            rows,
            shots: parse_all("shot mode", &self.shots)?,
            tasks: parse_all("task", &self.tasks)?,
            baseline_seeds: (seed..seed + self.baseline_seeds).collect(),
            model: self.model.clone(),
            model_config,
            out: self.out.clone(),
            cache: self.cache,
            limit: self.limit,
        })
    }
}
