use clap::Args;
use serde::Serialize;
use tmkit::event::{coverage_check, CatalogOptions, Coverage};

use crate::error::CliResult;
use crate::source;

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// Model file, or bundled:NAME
    pub model: String,

    /// Accept event regions that are not connected
    #[arg(long)]
    pub allow_disconnected: bool,

    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Serialize)]
struct EventRow {
    id: String,
    description: String,
    data_emitting: bool,
    stages: Vec<String>,
    elements: usize,
}

#[derive(Serialize)]
struct Report {
    events: Vec<EventRow>,
    coverage: Coverage,
}

pub fn run(args: &DecomposeArgs) -> CliResult {
    let options = CatalogOptions {
        allow_disconnected: args.allow_disconnected,
    };
    let loaded = source::load(&args.model, options)?;
    let model = &loaded.document.model;
    let coverage = coverage_check(&loaded.catalog, model);
    let events: Vec<EventRow> = loaded
        .catalog
        .iter()
        .map(|e| EventRow {
            id: e.id.clone(),
            description: e.description.clone(),
            data_emitting: e.data_emitting,
            stages: e.region.stages().map(|s| model.stage_name(s)).collect(),
            elements: e.region.len(),
        })
        .collect();

    if args.json {
        let report = Report { events, coverage };
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
        return Ok(0);
    }

    let width = events.iter().map(|e| e.id.len()).max().unwrap_or(5).max(5);
    println!("{:<width$}  {:>8}  description", "event", "elements");
    for e in &events {
        let mark = if e.data_emitting { " (+data)" } else { "" };
        println!(
            "{:<width$}  {:>8}  {}{mark}",
            e.id, e.elements, e.description
        );
        println!("{:<width$}  {:>8}  {}", "", "", e.stages.join(", "));
    }
    let names = |set: &std::collections::BTreeSet<_>| {
        set.iter()
            .map(|e| model.element_name(*e))
            .collect::<Vec<_>>()
            .join(", ")
    };
    if coverage.uncovered.is_empty() {
        println!("uncovered: none");
    } else {
        println!("uncovered: {}", names(&coverage.uncovered));
    }
    println!("overlaps: {}", coverage.overlaps.len());
    for o in &coverage.overlaps {
        println!("  {} & {}: {}", o.first, o.second, names(&o.shared));
    }
    Ok(0)
}
