//! Command-line front end. Each subcommand maps onto one pipeline call.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use panelkit_core::evalstats::{evaluate, format_report};
use panelkit_core::ComponentSpec;

use crate::config::Config;
use crate::error::ServiceError;
use crate::pipeline::{program_csv, ImageFormat, Pipeline, RenderQuery};
use crate::responses::read_responses;
use crate::session::Strategy;

#[derive(Debug, Parser)]
#[command(name = "panelkit", version, about = "Assign panels to a voxelized mesh and plan its robotic assembly")]
pub struct Cli {
    /// TOML configuration file. PANELKIT_* environment variables override it.
    #[arg(long, global = true, env = "PANELKIT_CONFIG")]
    pub config: Option<PathBuf>,
    /// Session storage directory.
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Vlm,
    Rule,
    Random,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Vlm => Strategy::Vlm,
            StrategyArg::Rule => Strategy::Rule,
            StrategyArg::Random => Strategy::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ImageArg {
    Svg,
    Png,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProgramFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Open a session from a prompt and an OBJ or STL mesh.
    Create {
        #[arg(long)]
        prompt: String,
        #[arg(long)]
        mesh: PathBuf,
    },
    /// Voxelize the mesh, label its faces and store the renders.
    Discretize {
        id: String,
        /// Structural component edge length in meters.
        #[arg(long)]
        edge: Option<f64>,
        /// Panel thickness in meters.
        #[arg(long)]
        thickness: Option<f64>,
    },
    /// Write a render of a discretized session.
    Render {
        id: String,
        #[arg(long, default_value = "A")]
        view: String,
        /// Draw face labels.
        #[arg(long)]
        labeled: bool,
        /// Fill the current assignment with the highlight color.
        #[arg(long)]
        highlight: bool,
        #[arg(long, value_enum, default_value = "svg")]
        format: ImageArg,
        /// Canvas size as WxH, e.g. 1024x1024.
        #[arg(long, value_parser = parse_canvas)]
        canvas: Option<(u32, u32)>,
        #[command(flatten)]
        output: Output,
    },
    /// Assign panels with one strategy.
    Select {
        id: String,
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Seed for the random strategy; drawn and recorded when absent.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Refine the assignment with a natural-language request.
    Feedback {
        id: String,
        #[arg(long)]
        text: String,
    },
    /// Build, sequence and simulate the assembly for the current assignment.
    Plan { id: String },
    /// Re-run the simulator on the stored program.
    Simulate { id: String },
    /// Print the robot program.
    Program {
        id: String,
        #[arg(long, value_enum, default_value = "json")]
        format: ProgramFormat,
        #[command(flatten)]
        output: Output,
    },
    /// Print the full session state as JSON.
    Show { id: String },
    /// List stored sessions.
    List,
    /// Selection rates and McNemar tests from a response CSV.
    Eval {
        #[arg(long)]
        responses: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Emit JSON instead of text tables.
        #[arg(long)]
        json: bool,
    },
    /// Run the REST service.
    Serve {
        /// Listen address, e.g. 127.0.0.1:8080.
        #[arg(long)]
        listen: Option<String>,
    },
}

pub fn parse_canvas(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w: u32 = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: u32 = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err("canvas must be non-empty".into());
    }
    Ok((w, h))
}

/// What a command produced: bytes for stdout or a file.
pub enum Outcome {
    Text(String),
    Bytes(Vec<u8>, Option<PathBuf>),
    /// Output plus a non-zero exit code, e.g. a failed simulation.
    Failed(String, i32),
}

fn json<T: serde::Serialize>(v: &T) -> Result<Outcome, ServiceError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(Outcome::Text(s))
}

pub fn load_config(cli: &Cli) -> Result<Config, ServiceError> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(d) = &cli.data_dir {
        cfg.data_dir = d.clone();
    }
    Ok(cfg)
}

fn pipeline(cfg: Config) -> Result<Pipeline, ServiceError> {
    let client = crate::vlm::client_from_config(&cfg)?;
    Pipeline::new(cfg, client)
}

pub fn eval_file(path: &Path, alpha: f64, as_json: bool) -> Result<Outcome, ServiceError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ServiceError::validation("alpha", "alpha must lie in (0, 1)"));
    }
    let file = std::fs::File::open(path)
        .map_err(|e| ServiceError::validation("responses", format!("{}: {e}", path.display())))?;
    let report = evaluate(&read_responses(file)?, alpha)?;
    if as_json {
        json(&report)
    } else {
        Ok(Outcome::Text(format_report(&report)))
    }
}

pub fn run(cli: Cli) -> Result<Outcome, ServiceError> {
    if let Command::Eval { responses, alpha, json } = &cli.command {
        return eval_file(responses, *alpha, *json);
    }
    let cfg = load_config(&cli)?;
    if let Command::Serve { listen } = &cli.command {
        let addr = listen.clone().unwrap_or_else(|| cfg.listen.clone());
        let p = Arc::new(pipeline(cfg)?);
        let rt = tokio::runtime::Runtime::new().map_err(|e| ServiceError::internal(e.to_string()))?;
        rt.block_on(crate::api::serve(p, &addr))?;
        return Ok(Outcome::Text(String::new()));
    }
    let p = pipeline(cfg)?;
    match cli.command {
        Command::Create { prompt, mesh } => {
            let bytes = std::fs::read(&mesh)
                .map_err(|e| ServiceError::validation("mesh", format!("{}: {e}", mesh.display())))?;
            let name = mesh.file_name().and_then(|n| n.to_str());
            json(&p.create_session(&prompt, &bytes, None, name)?.summary())
        }
        Command::Discretize { id, edge, thickness } => {
            let spec = match (edge, thickness) {
                (None, None) => None,
                (e, t) => Some(ComponentSpec::new(
                    e.unwrap_or(p.config.spec.structural_edge),
                    t.unwrap_or(p.config.spec.panel_thickness),
                )?),
            };
            json(&p.discretize(&id, spec)?.summary())
        }
        Command::Render {
            id,
            view,
            labeled,
            highlight,
            format,
            canvas,
            output,
        } => {
            let q = RenderQuery {
                view,
                labeled,
                highlight,
                canvas,
            };
            let format = match format {
                ImageArg::Svg => ImageFormat::Svg,
                ImageArg::Png => ImageFormat::Png,
            };
            Ok(Outcome::Bytes(p.render(&id, &q, format)?, output.out))
        }
        Command::Select { id, strategy, seed } => json(&p.select(&id, strategy.into(), seed)?.summary()),
        Command::Feedback { id, text } => json(&p.feedback(&id, &text)?.summary()),
        Command::Plan { id } => json(&p.plan(&id)?.summary()),
        Command::Simulate { id } => {
            let report = p.simulate(&id)?;
            let text = serde_json::to_string_pretty(&report)? + "\n";
            if report.passed() {
                Ok(Outcome::Text(text))
            } else {
                Ok(Outcome::Failed(text, 2))
            }
        }
        Command::Program { id, format, output } => {
            let prog = p.program(&id)?;
            let bytes = match format {
                ProgramFormat::Json => serde_json::to_vec_pretty(&prog)?,
                ProgramFormat::Csv => program_csv(&prog).into_bytes(),
            };
            Ok(Outcome::Bytes(bytes, output.out))
        }
        Command::Show { id } => json(&p.load(&id)?),
        Command::List => json(&p.list()?.iter().map(|s| s.summary()).collect::<Vec<_>>()),
        Command::Eval { .. } | Command::Serve { .. } => unreachable!("handled above"),
    }
}

/// Writes the outcome and returns the process exit code.
pub fn finish(result: Result<Outcome, ServiceError>) -> i32 {
    match result {
        Ok(Outcome::Text(t)) => {
            print!("{t}");
            0
        }
        Ok(Outcome::Bytes(b, None)) => {
            let _ = std::io::stdout().write_all(&b);
            0
        }
        Ok(Outcome::Bytes(b, Some(path))) => match std::fs::write(&path, b) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                4
            }
        },
        Ok(Outcome::Failed(t, code)) => {
            print!("{t}");
            code
        }
        Err(e) => {
            eprintln!("error [{}]: {}", e.code, e.message);
            e.class.exit_code()
        }
    }
}
