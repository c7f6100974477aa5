use clap::Args;
use tmkit::behavior::{Verdict, DEFAULT_RUN_LIMIT};
use tmkit::event::CatalogOptions;

use crate::error::{CliError, CliResult, EXIT_FAILURE};
use crate::source;

#[derive(Args, Debug)]
pub struct BehaviorArgs {
    /// Model file, or bundled:NAME
    pub model: String,

    /// How often each recurrence may repeat in an enumerated run
    #[arg(long, default_value_t = 0)]
    pub max_recurrence: usize,

    /// Fail when enumeration would produce more runs than this
    #[arg(long, default_value_t = DEFAULT_RUN_LIMIT)]
    pub limit: usize,

    /// Check a comma-separated event sequence instead of enumerating
    #[arg(long, value_delimiter = ',', conflicts_with = "check_file")]
    pub check: Option<Vec<String>>,

    /// Check the event sequence in a file, one event per line
    #[arg(long)]
    pub check_file: Option<std::path::PathBuf>,
}

pub fn run(args: &BehaviorArgs) -> CliResult {
    let loaded = source::load(&args.model, CatalogOptions::default())?;
    let graph = loaded
        .graph
        .ok_or_else(|| CliError::input("model declares no events"))?;

    let sequence = match (&args.check, &args.check_file) {
        (Some(seq), _) => Some(seq.clone()),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            Some(
                text.lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty())
                    .map(String::from)
                    .collect(),
            )
        }
        (None, None) => None,
    };

    if let Some(seq) = sequence {
        let verdict = graph.conforms(&seq).map_err(CliError::input)?;
        println!("{verdict}");
        return Ok(match verdict {
            Verdict::Conformant => 0,
            Verdict::Violation { .. } => EXIT_FAILURE,
        });
    }

    let runs = graph
        .enumerate_runs_limited(args.max_recurrence, args.limit)
        .map_err(CliError::input)?;
    println!("{} runs", runs.len());
    for r in &runs {
        println!("{}", r.join(" "));
    }
    Ok(0)
}
