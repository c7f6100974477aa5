use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::json;
use tmkit::behavior::Verdict;
use tmkit::bundled::Loaded;
use tmkit::engine::{Engine, EngineConfig, FiringOrder, Termination, Trace};
use tmkit::event::CatalogOptions;
use tmkit::info::empirical_info;
use tmkit::model::VarRole;

use crate::error::{CliError, CliResult, EXIT_FAILURE};
use crate::manifest::Manifest;
use crate::source;

pub const SEED_ENV: &str = "TMKIT_SEED";

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrderArg {
    Declaration,
    IdSorted,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Model file, or bundled:NAME (overrides the manifest)
    pub model: Option<String>,

    /// TOML run manifest
    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// Seed of the first run [default: manifest, then $TMKIT_SEED, then 0]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Number of independent runs; run i uses seed + i
    #[arg(long)]
    pub runs: Option<u64>,

    /// Tick budget per run [default: 1000]
    #[arg(long)]
    pub max_ticks: Option<u64>,

    /// Override a variable's initial value
    #[arg(long = "set", value_name = "NAME=VALUE")]
    pub set: Vec<String>,

    #[arg(long, value_enum)]
    pub firing_order: Option<OrderArg>,

    /// Directory for trace, events, verdict and info files
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

struct Plan {
    model: String,
    config: EngineConfig,
    runs: u64,
    output: Option<PathBuf>,
    set: BTreeMap<String, f64>,
}

fn plan(args: &SimulateArgs) -> CliResult<Plan> {
    let manifest = match &args.manifest {
        Some(path) => Manifest::load(path)?,
        None => Manifest::default(),
    };
    let model = args
        .model
        .clone()
        .or(manifest.model)
        .ok_or_else(|| CliError::input("no model given (argument or manifest `model`)"))?;
    let env_seed = match std::env::var(SEED_ENV) {
        Ok(s) => Some(s.trim().parse::<u64>().map_err(|_| {
            CliError::input(format!("{SEED_ENV}=`{s}` is not an unsigned integer"))
        })?),
        Err(_) => None,
    };
    let firing_order = match args.firing_order {
        Some(OrderArg::Declaration) => FiringOrder::Declaration,
        Some(OrderArg::IdSorted) => FiringOrder::IdSorted,
        None => manifest.config.firing_order.unwrap_or_default(),
    };
    let config = EngineConfig {
        seed: args.seed.or(manifest.config.seed).or(env_seed).unwrap_or(0),
        max_ticks: args.max_ticks.or(manifest.config.max_ticks).unwrap_or(1000),
        firing_order,
        ..Default::default()
    };
    let runs = args.runs.or(manifest.config.runs).unwrap_or(1);
    if runs == 0 {
        return Err(CliError::input("--runs must be at least 1"));
    }
    let mut set = manifest.set;
    for pair in &args.set {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("expected NAME=VALUE, got `{pair}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("`{value}` is not a number")))?;
        set.insert(name.trim().to_string(), value);
    }
    Ok(Plan {
        model,
        config,
        runs,
        output: args.output.clone().or(manifest.output),
        set,
    })
}

fn execute(loaded: &Loaded, config: EngineConfig) -> CliResult<(Trace, Verdict)> {
    let engine = Engine::new(&loaded.document.model, config).map_err(CliError::input)?;
    let engine = match &loaded.graph {
        Some(g) => engine.with_events(&loaded.catalog, g),
        None => engine,
    };
    let trace = engine.run().map_err(CliError::engine)?;
    let verdict = match &loaded.graph {
        Some(g) => g.conforms(&trace.events()).map_err(CliError::engine)?,
        None => Verdict::Conformant,
    };
    Ok((trace, verdict))
}

fn termination(t: &Termination) -> String {
    match t {
        Termination::TerminalEvent(e) => format!("terminal:{e}"),
        Termination::Quiescent => "quiescent".into(),
        Termination::MaxTicks => "max-ticks".into(),
    }
}

fn info_json(loaded: &Loaded, sequence: &[String]) -> String {
    let outcomes = loaded
        .graph
        .as_ref()
        .map(|g| g.outcome_events())
        .unwrap_or_default();
    let report = if outcomes.is_empty() {
        None
    } else {
        empirical_info(sequence, &outcomes).ok()
    };
    serde_json::to_string_pretty(&json!({"outcome_events": outcomes, "report": report}))
        .expect("info serializes")
        + "\n"
}

fn variables_tsv(loaded: &Loaded, trace: &Trace) -> Option<String> {
    let names: Vec<&str> = loaded
        .document
        .model
        .variables
        .iter()
        .filter(|v| v.role == VarRole::State)
        .map(|v| v.name.as_str())
        .collect();
    if names.is_empty() {
        return None;
    }
    let mut out = format!("tick\t{}\n", names.join("\t"));
    let mut last: BTreeMap<u64, &[(String, f64)]> = BTreeMap::new();
    for e in &trace.entries {
        last.insert(e.tick, &e.variables);
    }
    for (tick, vars) in last {
        let values: Vec<String> = vars.iter().map(|(_, v)| v.to_string()).collect();
        let _ = writeln!(out, "{tick}\t{}", values.join("\t"));
    }
    Some(out)
}

pub fn run(args: &SimulateArgs) -> CliResult {
    let plan = plan(args)?;
    let mut loaded = source::load(&plan.model, CatalogOptions::default())?;
    for (name, value) in &plan.set {
        let var = loaded
            .document
            .model
            .variables
            .iter_mut()
            .find(|v| &v.name == name)
            .ok_or_else(|| CliError::input(format!("--set: model has no variable `{name}`")))?;
        var.value = *value;
    }
    if plan.runs == 1 {
        single(&loaded, &plan)
    } else {
        batch(&loaded, &plan)
    }
}

fn single(loaded: &Loaded, plan: &Plan) -> CliResult {
    let (trace, verdict) = execute(loaded, plan.config.clone())?;
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    let events = trace.events();
    println!("model: {}", plan.model);
    println!("seed: {}", plan.config.seed);
    println!(
        "ticks: {} ({})",
        trace.ticks,
        termination(&trace.termination)
    );
    println!("events: {}", events.join(" "));
    let outcomes = trace.outcomes();
    if !outcomes.is_empty() {
        println!("outcomes: {}", outcomes.join(" "));
    }
    println!("verdict: {verdict}");

    if let Some(dir) = &plan.output {
        super::write_file(&dir.join("trace.tsv"), &trace.to_tsv())?;
        super::write_file(&dir.join("trace.jsonl"), &trace.to_jsonl())?;
        let mut lines = events.join("\n");
        if !lines.is_empty() {
            lines.push('\n');
        }
        super::write_file(&dir.join("events.txt"), &lines)?;
        super::write_file(&dir.join("verdict.txt"), &format!("{verdict}\n"))?;
        super::write_file(&dir.join("info.json"), &info_json(loaded, &events))?;
        if let Some(vars) = variables_tsv(loaded, &trace) {
            super::write_file(&dir.join("variables.tsv"), &vars)?;
        }
    }
    Ok(if verdict.is_conformant() {
        0
    } else {
        EXIT_FAILURE
    })
}

struct RunSummary {
    seed: u64,
    ticks: u64,
    termination: String,
    events: Vec<String>,
    verdict: Verdict,
}

fn batch(loaded: &Loaded, plan: &Plan) -> CliResult {
    let results: Vec<CliResult<RunSummary>> = (0..plan.runs)
        .into_par_iter()
        .map(|i| {
            let seed = plan.config.seed.wrapping_add(i);
            let config = EngineConfig {
                seed,
                ..plan.config.clone()
            };
            let (trace, verdict) = execute(loaded, config)?;
            Ok(RunSummary {
                seed,
                ticks: trace.ticks,
                termination: termination(&trace.termination),
                events: trace.events(),
                verdict,
            })
        })
        .collect();
    let summaries = results.into_iter().collect::<CliResult<Vec<_>>>()?;

    let mut tsv = String::from("seed\tticks\ttermination\tfinal\tverdict\tevents\n");
    let mut finals: BTreeMap<String, u64> = BTreeMap::new();
    let mut all_events = Vec::new();
    let mut failures = 0;
    for s in &summaries {
        let last = s.events.last().cloned().unwrap_or_else(|| "-".into());
        *finals.entry(last.clone()).or_default() += 1;
        let verdict = if s.verdict.is_conformant() {
            "conformant"
        } else {
            "violation"
        };
        failures += !s.verdict.is_conformant() as u64;
        let _ = writeln!(
            tsv,
            "{}\t{}\t{}\t{last}\t{verdict}\t{}",
            s.seed,
            s.ticks,
            s.termination,
            s.events.join(",")
        );
        all_events.extend(s.events.iter().cloned());
    }
    println!("model: {}", plan.model);
    println!("runs: {} (seeds {}..)", plan.runs, plan.config.seed);
    println!("conformant: {}", plan.runs - failures);
    println!("final events:");
    for (e, n) in &finals {
        println!("  {e:<6} {n}");
    }
    if let Some(dir) = &plan.output {
        super::write_file(&dir.join("runs.tsv"), &tsv)?;
        super::write_file(&dir.join("info.json"), &info_json(loaded, &all_events))?;
    }
    let outcomes = loaded
        .graph
        .as_ref()
        .map(|g| g.outcome_events())
        .unwrap_or_default();
    if !outcomes.is_empty() {
        if let Ok(r) = empirical_info(&all_events, &outcomes) {
            super::info::print_report(&r);
        }
    }
    Ok(if failures == 0 { 0 } else { EXIT_FAILURE })
}
