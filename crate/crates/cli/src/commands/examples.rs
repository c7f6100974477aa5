use std::path::PathBuf;

use clap::Args;
use serde_json::json;
use tmkit::bundled::BUNDLED;

use crate::error::CliResult;

#[derive(Args, Debug)]
pub struct ExamplesArgs {
    /// Also write the model files into this directory
    #[arg(long)]
    pub write: Option<PathBuf>,

    /// Print the listing as JSON
    #[arg(long)]
    pub json: bool,
}

pub fn run(args: &ExamplesArgs) -> CliResult {
    if args.json {
        let list: Vec<_> = BUNDLED
            .iter()
            .map(|b| json!({"name": b.name, "path": format!("bundled:{}", b.name), "file": b.file, "provenance": b.provenance}))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&list).expect("listing serializes")
        );
    } else {
        for b in &BUNDLED {
            println!(
                "{:<14} {:<22} {}",
                b.name,
                format!("bundled:{}", b.name),
                b.provenance
            );
        }
    }
    if let Some(dir) = &args.write {
        for b in &BUNDLED {
            super::write_file(&dir.join(b.file), b.source)?;
        }
    }
    Ok(0)
}
