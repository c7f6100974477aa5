use std::path::PathBuf;

use clap::{Args, ValueEnum};
use tmkit::event::CatalogOptions;
use tmkit::render::{render, RenderOptions, Target};

use crate::error::{CliError, CliResult};
use crate::source;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TargetArg {
    Static,
    Events,
    Behavior,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Model file, or bundled:NAME
    pub model: String,

    #[arg(long, value_enum, default_value = "static")]
    pub target: TargetArg,

    /// Output file (standard output when omitted)
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Leave triggers out
    #[arg(long)]
    pub no_triggers: bool,

    /// Do not group stages into thimac clusters
    #[arg(long)]
    pub no_clusters: bool,

    /// Comma-separated fill colors for event regions
    #[arg(long, value_delimiter = ',')]
    pub palette: Option<Vec<String>>,
}

pub fn run(args: &RenderArgs) -> CliResult {
    let loaded = source::load(&args.model, CatalogOptions::default())?;
    let target = match args.target {
        TargetArg::Static => Target::Static,
        TargetArg::Events => Target::Events,
        TargetArg::Behavior => Target::Behavior,
    };
    let mut opts = RenderOptions::new(target);
    opts.show_triggers = !args.no_triggers;
    opts.cluster_thimacs = !args.no_clusters;
    if let Some(p) = &args.palette {
        opts.palette = p.clone();
    }
    let catalog = (!loaded.document.events.is_empty()).then_some(&loaded.catalog);
    let dot = render(
        &loaded.document.model,
        catalog,
        loaded.graph.as_ref(),
        &opts,
    )
    .map_err(CliError::input)?;
    match &args.output {
        Some(path) => super::write_file(path, &dot)?,
        None => print!("{dot}"),
    }
    Ok(0)
}
