//! `saf`: check, render, format and trace SAF models, classify concerns,
//! suggest effects, ingest measures, evaluate KPIs and serve the API.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit statuses.
pub const OK: u8 = 0;
pub const STRICT_WARNINGS: u8 = 1;
pub const ERRORS: u8 = 2;
pub const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "saf", version, about = "Sustainability Assessment Framework toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, resolve and validate model files or directories.
    Check(CheckArgs),
    /// Render a decision map as SVG, draw.io or layout JSON.
    Render(RenderArgs),
    /// Rewrite model files in canonical form.
    Fmt(FmtArgs),
    /// Place a concern on an impact level by answering the decision graph.
    Classify(ClassifyArgs),
    /// Suggest effects for a decision map from dependency matrices.
    Suggest(SuggestArgs),
    /// KPI commands.
    #[command(subcommand)]
    Kpi(KpiCommand),
    /// Append JSONL measures to a store.
    Ingest(IngestArgs),
    /// Trace a KPI down to architecture elements, or an element up to KPIs.
    Trace(TraceArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
pub struct CheckArgs {
    /// Model files or directories.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Extra directory of dependency matrices.
    #[arg(long)]
    pub matrices: Option<PathBuf>,
    /// Treat warnings as failures (exit 1).
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args)]
pub struct RenderArgs {
    /// A `.dm.saf` file.
    pub file: PathBuf,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// svg, drawio or json. Defaults to the output extension, then svg.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Args)]
pub struct FmtArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Report files that are not canonical instead of rewriting them (exit 1).
    #[arg(long)]
    pub check: bool,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Decision graph file; the configured or built-in graph otherwise.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Comma separated answers (y, yes, n, no). Asks interactively when absent.
    #[arg(long)]
    pub answers: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args)]
pub struct SuggestArgs {
    /// A `.dm.saf` file.
    pub file: PathBuf,
    /// Directory of dependency matrices; the configured one otherwise.
    #[arg(long)]
    pub matrices: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Subcommand)]
enum KpiCommand {
    /// Evaluate KPIs against measures and print their status as JSON.
    Eval(KpiEvalArgs),
}

#[derive(Args)]
pub struct KpiEvalArgs {
    /// Workspace directory.
    pub dir: PathBuf,
    /// Evaluate only this KPI and print a single status.
    #[arg(long)]
    pub kpi: Option<String>,
    /// JSONL measures file.
    #[arg(long)]
    pub measures: Option<PathBuf>,
    /// Measure store directory; `<dir>/.saf-store` is used when it exists.
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Evaluation instant (RFC 3339); the wall clock otherwise.
    #[arg(long)]
    pub at: Option<String>,
    /// Previous status JSON; adds the transitions and fired actions.
    #[arg(long)]
    pub prev: Option<PathBuf>,
    /// Write the evaluated statuses to this file, for a later `--prev`.
    #[arg(long)]
    pub save: Option<PathBuf>,
}

#[derive(Args)]
pub struct IngestArgs {
    /// JSONL file, or `-` for standard input.
    pub file: PathBuf,
    #[arg(long)]
    pub store: PathBuf,
    /// Reject metrics not declared in the workspace's SQ models.
    #[arg(long)]
    pub strict: bool,
    /// Workspace declaring the metrics; required with --strict.
    #[arg(long)]
    pub workspace: Option<PathBuf>,
}

#[derive(Args)]
pub struct TraceArgs {
    /// Workspace directory.
    pub dir: PathBuf,
    #[arg(long, conflicts_with = "element", required_unless_present = "element")]
    pub kpi: Option<String>,
    #[arg(long)]
    pub element: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, default_value = ".")]
    pub workspace: PathBuf,
    /// Measure store directory; `<workspace>/.saf-store` by default.
    #[arg(long)]
    pub store: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Check(a) => commands::check(a),
        Command::Render(a) => commands::render(a),
        Command::Fmt(a) => commands::fmt(a),
        Command::Classify(a) => commands::classify(a),
        Command::Suggest(a) => commands::suggest(a),
        Command::Kpi(KpiCommand::Eval(a)) => commands::kpi_eval(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::Trace(a) => commands::trace(a),
        Command::Serve(a) => commands::serve(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("saf: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
