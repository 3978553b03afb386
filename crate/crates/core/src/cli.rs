//! The `tm` command line.
//!
//! Exit codes: 0 on success, 1 when the model has validation errors (the
//! report is still printed), 2 on usage errors, unreadable input or syntax
//! errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::diagnostic::{Diagnostic, ValidationReport};
use crate::dsl::{format, lower, parse, Lowered, SourceFile};
use crate::dynamics::{elementary_events, run as simulate, Policy, SimOptions};
use crate::render::{to_document, to_dot, to_json, EventDoc, RenderOptions};
use crate::transform::{simplify, OverlaySpec, SimplifyReport};
use crate::validate::validate_lowered;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Check a model and print the diagnostic report.
    Validate,
    /// List elementary and declared events.
    Events,
    /// Run the token simulation and print the trace as JSON lines.
    Simulate,
    /// Remove release/transfer/receive stages.
    Simplify,
    /// Emit Graphviz DOT or canonical JSON.
    Render,
    /// Print the model in canonical `.tm` syntax.
    Fmt,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    #[default]
    Fifo,
    Random,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    #[default]
    Dot,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq, Parser)]
#[command(name = "tm", version, about = "Thinging Machine model toolkit")]
pub struct CliConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Model file (`.tm`).
    pub input: PathBuf,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of simulation steps.
    #[arg(long, default_value_t = 1000)]
    pub steps: u64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Fifo)]
    pub policy: PolicyArg,
    /// How many times each spontaneous create may fire.
    #[arg(long, default_value_t = 1)]
    pub cap: u32,
    #[arg(long, value_enum, default_value_t = FormatArg::Dot)]
    pub format: FormatArg,
}

impl CliConfig {
    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            seed: self.seed,
            max_steps: self.steps,
            creation_cap: self.cap,
            policy: match self.policy {
                PolicyArg::Fifo => Policy::Fifo,
                PolicyArg::Random => Policy::Random,
            },
            ..SimOptions::default()
        }
    }
}

#[derive(Serialize)]
struct EventsOut {
    events: Vec<EventDoc>,
}

#[derive(Serialize)]
struct SimplifyOut {
    model: crate::render::Document,
    report: SimplifyReport,
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("outputs serialize");
    s.push('\n');
    s
}

enum Failure {
    Usage(String),
    Invalid(ValidationReport),
}

fn load(path: &PathBuf) -> Result<Lowered, Failure> {
    let source = SourceFile::read(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let ast = parse(&source).map_err(|errors| {
        Failure::Usage(
            errors
                .iter()
                .map(|e| format!("{}:{e}", source.path))
                .collect::<Vec<_>>()
                .join("\n"),
        )
    })?;
    lower(&ast).map_err(|diags: Vec<Diagnostic>| Failure::Invalid(ValidationReport::new(diags)))
}

fn execute(config: &CliConfig) -> Result<(String, i32), Failure> {
    let lowered = load(&config.input)?;
    let report = validate_lowered(&lowered);
    let Lowered {
        model,
        events,
        behavior,
        ..
    } = &lowered;
    let text = match config.command {
        Command::Validate => {
            let code = if report.ok { 0 } else { 1 };
            return Ok((to_pretty(&report), code));
        }
        Command::Events => {
            let all: Vec<_> = elementary_events(model).into_iter().chain(events.iter().cloned()).collect();
            let doc = to_document(model, &all, &Default::default());
            to_pretty(&EventsOut { events: doc.events })
        }
        Command::Simulate => {
            if !report.ok {
                return Err(Failure::Invalid(report));
            }
            let all: Vec<_> = elementary_events(model).into_iter().chain(events.iter().cloned()).collect();
            simulate(model, &all, config.sim_options()).to_jsonl()
        }
        Command::Simplify => {
            let (simplified, simplify_report) = simplify(model);
            to_pretty(&SimplifyOut {
                model: to_document(&simplified, &[], &Default::default()),
                report: simplify_report,
            })
        }
        Command::Render => match config.format {
            FormatArg::Json => to_json(model, events, behavior),
            FormatArg::Dot => {
                let options = RenderOptions {
                    overlay: (!events.is_empty()).then(|| OverlaySpec::for_events(events)),
                    ..RenderOptions::default()
                };
                to_dot(model, events, &options).expect("declared events always resolve")
            }
        },
        Command::Fmt => format(model, events, behavior),
    };
    Ok((text, 0))
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let (text, code) = match execute(&config) {
        Ok(done) => done,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
        Err(Failure::Invalid(report)) => (to_pretty(&report), 1),
    };
    match &config.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    code
}
