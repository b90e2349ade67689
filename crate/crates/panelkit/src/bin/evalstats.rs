use std::path::PathBuf;

use clap::Parser;
use panelkit::cli::{eval_file, finish};

/// Selection rates and pairwise McNemar tests from survey responses.
#[derive(Debug, Parser)]
#[command(name = "evalstats", version)]
struct Args {
    /// CSV with header participant,object,method,selected.
    #[arg(long)]
    responses: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Emit JSON instead of text tables.
    #[arg(long)]
    json: bool,
}

fn main() {
    let a = Args::parse();
    std::process::exit(finish(eval_file(&a.responses, a.alpha, a.json)));
}
