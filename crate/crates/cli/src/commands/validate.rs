use clap::Args;
use tmkit::bundled;
use tmkit::dsl::parse_lenient;
use tmkit::event::CatalogOptions;
use tmkit::model::element_census;
use tmkit::validate_static;

use crate::error::{CliError, CliResult, EXIT_FAILURE};
use crate::source;

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Model file, or bundled:NAME
    pub model: String,

    /// Print the report as JSON
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &ValidateArgs) -> CliResult {
    let src = source::read(&args.model)?;
    let (doc, warnings) =
        parse_lenient(&src).map_err(|d| CliError::input(source::diagnostics(&src.origin, &d)))?;
    if !warnings.is_empty() {
        eprintln!("{}", source::diagnostics(&src.origin, &warnings));
    }
    let report = validate_static(&doc.model);
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        );
    }
    if !report.is_empty() {
        if !args.json {
            print!("{report}");
        }
        return Ok(EXIT_FAILURE);
    }
    let census = element_census(&doc.model);
    match bundled::assemble(doc, CatalogOptions::default()) {
        Err(e) => {
            if !args.json {
                println!("{e}");
            }
            Ok(EXIT_FAILURE)
        }
        Ok(loaded) => {
            if !args.json {
                println!(
                    "{}: ok ({} thimacs, {} stages, {} flows, {} triggers, {} events)",
                    src.origin,
                    census.thimacs,
                    census.stages,
                    census.flows,
                    census.triggers,
                    loaded.catalog.len()
                );
            }
            Ok(0)
        }
    }
}
