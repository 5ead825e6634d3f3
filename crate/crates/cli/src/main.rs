use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use graphlin::eval::Checkpoints;
use graphlin::generators::{self, GraphRecord};
use graphlin::linearize::linearize_with_emission_order;
use graphlin::rng::RNG_VERSION;
use graphlin::tasks::attach_instances;
use graphlin::{edge_capacity, run_matrix, DatasetKind, Labeling, LinearizationSpec, MatrixPlan, Method, ResultsTable};
use graphlin_gateway::{backend_from_name, Gateway, ResponseCache};
use serde_json::json;
use sha2::{Digest, Sha256};

mod config;

use config::RunConfig;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "graphlin", version, about = "Graph linearization pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as JSONL with task instances.
    Generate {
        #[arg(long, default_value = "graphwave")]
        dataset: DatasetKind,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Linearize every record of a dataset file.
    Linearize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "random")]
        labeling: Labeling,
        #[arg(long)]
        seed: u64,
        /// Write one file per seed in `seed..seed+N`.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an evaluation matrix and write results.csv and results.md.
    Eval {
        /// TOML run configuration; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        dataset_file: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        labelings: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        shots: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        tasks: Option<Vec<String>>,
        #[arg(long)]
        baseline_seeds: Option<u64>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        model_config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Render a results CSV as a markdown table.
    Report {
        results: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest edge list that fits a context window.
    Capacity { window: usize },
}

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

const VALIDATION: u8 = 1;
const PARTIAL: u8 = 2;
const CONFIG: u8 = 3;

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure {
            code: VALIDATION,
            err: err.into(),
        }
    }
}

fn config_error(msg: impl std::fmt::Display) -> Failure {
    Failure {
        code: CONFIG,
        err: anyhow!("{msg}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { dataset, seed, out } => cmd_generate(dataset, seed, &out),
        Command::Linearize {
            input,
            method,
            labeling,
            seed,
            seeds,
            out,
        } => cmd_linearize(&input, method, labeling, seed, seeds, &out),
        Command::Eval {
            config,
            dataset,
            dataset_file,
            seed,
            methods,
            labelings,
            shots,
            tasks,
            baseline_seeds,
            model,
            model_config,
            out,
            no_cache,
            limit,
        } => (|| {
            let mut run = match &config {
                Some(p) => RunConfig::load(p).map_err(config_error)?,
                None => RunConfig::default(),
            };
            if let Some(v) = dataset {
                run.dataset = v;
            }
            if dataset_file.is_some() {
                run.dataset_file = dataset_file;
            }
            if seed.is_some() {
                run.seed = seed;
            }
            if let Some(v) = methods {
                run.methods = v;
            }
            if let Some(v) = labelings {
                run.labelings = v;
            }
            if let Some(v) = shots {
                run.shots = v;
            }
            if let Some(v) = tasks {
                run.tasks = v;
            }
            if let Some(v) = baseline_seeds {
                run.baseline_seeds = v;
            }
            if let Some(v) = model {
                run.model = v;
            }
            if model_config.is_some() {
                run.model_config = model_config;
            }
            if let Some(v) = out {
                run.out = v;
            }
            if no_cache {
                run.cache = false;
            }
            if limit.is_some() {
                run.limit = limit;
            }
            cmd_eval(&run)
        })(),
        Command::Report { results, out } => cmd_report(&results, out.as_deref()),
        Command::Capacity { window } => {
            println!("{}", edge_capacity(window));
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex(&Sha256::digest(&bytes)))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_manifest(path: &Path, value: &serde_json::Value) -> anyhow::Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for item in items {
        serde_json::to_writer(&mut w, &item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn read_records(path: &Path) -> Result<Vec<GraphRecord>, Failure> {
    let file = File::open(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        out.push(rec);
    }
    Ok(out)
}

fn cmd_generate(dataset: DatasetKind, seed: u64, out: &Path) -> Result<(), Failure> {
    let mut records = generators::generate(dataset, seed);
    attach_instances(&mut records, seed)?;
    write_jsonl(out, &records)?;
    let (count, nodes, edges) = generators::summary(&records);
    write_manifest(
        &manifest_path(out),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "generate",
            "dataset": dataset.name(),
            "seed": seed,
            "rng": RNG_VERSION,
            "count": count,
            "mean_nodes": nodes,
            "mean_edges": edges,
            "output_sha256": sha256_file(out)?,
        }),
    )?;
    println!("{count} graphs, mean {nodes:.2} nodes, mean {edges:.2} edges -> {}", out.display());
    Ok(())
}

fn cmd_linearize(
    input: &Path,
    method: Method,
    labeling: Labeling,
    seed: u64,
    seeds: u64,
    out: &Path,
) -> Result<(), Failure> {
    LinearizationSpec::new(method, labeling, seed)
        .validate()
        .map_err(config_error)?;
    let records = read_records(input)?;
    let input_hash = sha256_file(input)?;
    for s in seed..seed + seeds.max(1) {
        let spec = LinearizationSpec::new(method, labeling, s);
        let mut lines = Vec::with_capacity(records.len());
        for rec in &records {
            let lin = linearize_with_emission_order(&rec.graph, Some(&rec.default_edge_order), &spec)
                .with_context(|| format!("record {}", rec.id))?;
            lin.check_against(&rec.graph)
                .map_err(|e| anyhow!("record {} failed validation: {e}", rec.id))?;
            lines.push(json!({ "record_id": rec.id, "linearized": lin }));
        }
        let path = if seeds > 1 {
            let mut name = out.file_stem().unwrap_or_default().to_os_string();
            name.push(format!(".seed-{s}.jsonl"));
            out.with_file_name(name)
        } else {
            out.to_path_buf()
        };
        write_jsonl(&path, &lines)?;
        write_manifest(
            &manifest_path(&path),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "command": "linearize",
                "input": input,
                "input_sha256": input_hash,
                "method": method.to_string(),
                "labeling": labeling.to_string(),
                "seed": s,
                "count": lines.len(),
                "output_sha256": sha256_file(&path)?,
            }),
        )?;
        println!("{} linearizations -> {}", lines.len(), path.display());
    }
    Ok(())
}

fn cmd_eval(run: &RunConfig) -> Result<(), Failure> {
    let run = run.resolve().map_err(config_error)?;
    let backend = backend_from_name(&run.model, &run.model_config).map_err(config_error)?;
    let remote = backend.is_remote();

    let (mut records, input_hash) = match &run.dataset_file {
        Some(p) => (read_records(p)?, sha256_file(p)?),
        None => {
            let mut r = generators::generate(run.dataset, run.seed);
            attach_instances(&mut r, run.seed)?;
            (r, String::new())
        }
    };
    if let Some(limit) = run.limit {
        let mut kept = 0;
        records.retain(|r| {
            kept += 1;
            r.exemplar || kept <= limit
        });
    }

    fs::create_dir_all(&run.out).with_context(|| format!("creating {}", run.out.display()))?;
    let mut gateway = Gateway::new(backend, run.model_config.clone()).map_err(config_error)?;
    if run.cache && remote {
        gateway = gateway.with_cache(ResponseCache::open(run.out.join("responses.jsonl"))?);
    }
    let checkpoints = Checkpoints::new(run.out.join("checkpoints"))?;
    let plan = MatrixPlan {
        rows: run.rows.clone(),
        tasks: run.tasks.clone(),
        shots: run.shots.clone(),
        seed: run.seed,
        baseline_seeds: run.baseline_seeds.clone(),
    };
    let outcome = run_matrix(run.dataset.name(), &records, &plan, &gateway, Some(&checkpoints))
        ?;

    let csv_path = run.out.join("results.csv");
    outcome
        .table
        .write_csv(File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?)
        ?;
    fs::write(run.out.join("results.md"), outcome.table.to_markdown())?;

    let stats = gateway.stats();
    let load = |a: &std::sync::atomic::AtomicUsize| a.load(std::sync::atomic::Ordering::SeqCst);
    write_manifest(
        &run.out.join("manifest.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "eval",
            "dataset": run.dataset.name(),
            "input_sha256": input_hash,
            "seed": run.seed,
            "baseline_seeds": run.baseline_seeds,
            "rng": RNG_VERSION,
            "model": outcome.table.model,
            "exemplar_ref": outcome.exemplar_ref,
            "records": records.len(),
            "cells_complete": outcome.table.cells.len(),
            "cells_incomplete": outcome.incomplete.iter().map(|(k, e)| json!({"cell": k.file_stem(), "error": e})).collect::<Vec<_>>(),
            "backend_calls": load(&stats.backend_calls),
            "cache_hits": load(&stats.cache_hits),
            "max_in_flight": load(&stats.max_in_flight),
        }),
    )?;
    println!(
        "{} cells complete, {} incomplete, {} backend calls -> {}",
        outcome.table.cells.len(),
        outcome.incomplete.len(),
        load(&stats.backend_calls),
        run.out.display()
    );
    if let Some((key, err)) = outcome.incomplete.first() {
        return Err(Failure {
            code: PARTIAL,
            err: anyhow!("{} cells incomplete, first {}: {err}", outcome.incomplete.len(), key.file_stem()),
        });
    }
    Ok(())
}

fn cmd_report(results: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let file = File::open(results).map_err(|e| config_error(format!("{}: {e}", results.display())))?;
    let table = ResultsTable::read_csv(file)?;
    let md = table.to_markdown();
    match out {
        Some(p) => fs::write(p, md).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{md}"),
    }
    Ok(())
}
