use std::path::PathBuf;

use clap::{Args, ValueEnum};
use tmkit::info::{empirical_info, report, Base, Distribution, InfoReport};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
    #[value(name = "10")]
    Ten,
}

impl From<BaseArg> for Base {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Two => Base::Two,
            BaseArg::E => Base::E,
            BaseArg::Ten => Base::Ten,
        }
    }
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    /// Distribution as label=probability pairs, e.g. heads=0.5,tails=0.5
    #[arg(long, value_delimiter = ',', required_unless_present_any = ["sequence", "events_file"])]
    pub dist: Option<Vec<String>>,

    /// Observed event sequence, comma separated
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["dist", "events_file"], requires = "outcomes")]
    pub sequence: Option<Vec<String>>,

    /// File of observed events, one per line (as written by simulate)
    #[arg(long, conflicts_with = "dist", requires = "outcomes")]
    pub events_file: Option<PathBuf>,

    /// Events counted as outcomes, comma separated
    #[arg(long, value_delimiter = ',')]
    pub outcomes: Option<Vec<String>>,

    /// Logarithm base for a distribution
    #[arg(long, value_enum, default_value = "2")]
    pub base: BaseArg,

    /// Also write the report as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}

fn parse_dist(pairs: &[String]) -> CliResult<Distribution> {
    let mut outcomes = Vec::new();
    for pair in pairs {
        let (label, p) = pair
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("expected label=probability, got `{pair}`")))?;
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("`{p}` is not a number")))?;
        outcomes.push((label.trim().to_string(), p));
    }
    Distribution::new(outcomes).map_err(CliError::input)
}

pub fn print_report(r: &InfoReport) {
    let unit = r.base.unit();
    let width = r
        .outcomes
        .iter()
        .map(|o| o.label.len())
        .max()
        .unwrap_or(7)
        .max(7);
    println!(
        "{:<width$}  {:>12}  {:>8}  information ({unit})",
        "outcome", "probability", "count"
    );
    for o in &r.outcomes {
        let count = o.count.map_or("-".to_string(), |c| c.to_string());
        let bits = o
            .information
            .map_or("inf".to_string(), |b| format!("{b:.6}"));
        println!(
            "{:<width$}  {:>12.6}  {:>8}  {bits}",
            o.label, o.probability, count
        );
    }
    println!("entropy: {:.6} {unit}", r.entropy);
    if r.observations > 0 {
        println!("observations: {}", r.observations);
    }
}

pub fn run(args: &InfoArgs) -> CliResult {
    let r = if let Some(pairs) = &args.dist {
        report(&parse_dist(pairs)?, args.base.into())
    } else {
        let sequence: Vec<String> = match (&args.sequence, &args.events_file) {
            (Some(seq), _) => seq.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect(),
            (None, None) => unreachable!("clap requires one input"),
        };
        let outcomes = args.outcomes.clone().unwrap_or_default();
        empirical_info(&sequence, &outcomes).map_err(CliError::input)?
    };
    print_report(&r);
    if let Some(path) = &args.json {
        super::write_file(
            path,
            &(serde_json::to_string_pretty(&r).expect("report serializes") + "\n"),
        )?;
    }
    Ok(0)
}
