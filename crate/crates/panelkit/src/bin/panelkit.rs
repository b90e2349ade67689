use clap::Parser;
use panelkit::cli::{finish, run, Cli};
use tracing_subscriber::filter::LevelFilter;

fn main() {
    let level = std::env::var("RUST_LOG")
        .ok()
        .and_then(|v| v.parse::<LevelFilter>().ok())
        .unwrap_or(LevelFilter::INFO);
    tracing_subscriber::fmt().with_max_level(level).with_writer(std::io::stderr).init();
    let code = finish(run(Cli::parse()));
    std::process::exit(code);
}
