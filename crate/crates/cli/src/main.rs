use std::fmt::Write as _;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use tds_core::engine::{ExecErrorKind, ExecOptions};
use tds_core::script::Span;
use tds_core::{
    crosstab, emit_site, execute_script, frequencies, missing_summary, open_dataset, parse_script, AnalysisResult,
    Dataset, Environment, ReportBundle, Section,
};

/// Run analysis scripts over survey datasets and publish the results.
#[derive(Debug, Parser)]
#[command(name = "tds", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Directory for the HTML report.
    #[arg(long, global = true, value_name = "DIR", default_value = "./report")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    format: Format,

    /// Report recode values that matched no rule.
    #[arg(long, global = true)]
    strict: bool,

    /// Text shown on every report page, e.g. a date.
    #[arg(long, global = true, value_name = "TEXT")]
    stamp: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Execute a script and report every analysis it produces.
    Run { script: PathBuf },
    /// Frequency table of one variable.
    Freq { dataset: PathBuf, var: String },
    /// Cross tabulation of two variables.
    Crosstab { dataset: PathBuf, row: String, col: String },
    /// Print the schema and missing-value counts of a dataset.
    Info { dataset: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Html,
    Both,
}

/// A failure to report on stderr, with its exit status.
struct Failure {
    location: Option<String>,
    message: String,
}

impl Failure {
    fn at(file: &Path, span: (usize, usize), message: impl Into<String>) -> Failure {
        Failure { location: Some(format!("{}:{}:{}", file.display(), span.0, span.1)), message: message.into() }
    }

    fn plain(message: impl Into<String>) -> Failure {
        Failure { location: None, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let color = std::env::var_os("TDS_NO_COLOR").is_none() && std::io::stderr().is_terminal();
    match run(&cli, color) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", diagnostic(&f, color));
            ExitCode::from(2)
        }
    }
}

fn diagnostic(f: &Failure, color: bool) -> String {
    let label = if color { "\x1b[1;31merror:\x1b[0m" } else { "error:" };
    match &f.location {
        Some(loc) => format!("{loc}: {label} {}", f.message),
        None => format!("{label} {}", f.message),
    }
}

fn run(cli: &Cli, color: bool) -> Result<(), Failure> {
    let bundle = match &cli.command {
        Cmd::Run { script } => run_script(script, cli.strict, color)?,
        Cmd::Freq { dataset, var } => {
            let d = open(dataset)?;
            let t = frequencies(&d, var).map_err(|e| Failure::plain(format!("{}: {e}", dataset.display())))?;
            single(dataset, format!("FREQUENCIES VARIABLES={var}."), AnalysisResult::Frequencies(t))
        }
        Cmd::Crosstab { dataset, row, col } => {
            let d = open(dataset)?;
            let c = crosstab(&d, row, col).map_err(|e| Failure::plain(format!("{}: {e}", dataset.display())))?;
            single(dataset, format!("CROSSTABS /TABLES={row} BY {col}."), AnalysisResult::Crosstab(c))
        }
        Cmd::Info { dataset } => {
            print!("{}", info(&open(dataset)?));
            return Ok(());
        }
    };
    publish(cli, bundle)
}

fn run_script(path: &Path, strict: bool, color: bool) -> Result<ReportBundle, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::plain(format!("{}: {e}", path.display())))?;
    let script = parse_script(&text).map_err(|e| {
        let pos = e.position();
        Failure::at(path, pos, strip_position(&e.to_string(), pos))
    })?;
    let mut env = Environment::with_options(ExecOptions { strict, base_dir: None });
    let result = execute_script(&script, &mut env);
    let label = if color { "\x1b[1;33mwarning:\x1b[0m" } else { "warning:" };
    for w in env.warnings() {
        eprintln!(
            "{}: {label} {}",
            location(path, w.span),
            strip_position(&w.to_string(), (w.span.line, w.span.col))
        );
    }
    if let Err(e) = result {
        let message = match &e.kind {
            ExecErrorKind::NoActiveDataset => format!("{}: no active dataset; use GET FILE first", e.command),
            kind => format!("{}: {kind}", e.command),
        };
        return Err(Failure { location: Some(location(path, e.span)), message });
    }
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok(ReportBundle::from_outputs(format!("Analysis report: {name}"), env.outputs()))
}

fn location(path: &Path, span: Span) -> String {
    format!("{}:{}:{}", path.display(), span.line, span.col)
}

fn strip_position(message: &str, (line, col): (usize, usize)) -> String {
    let prefix = format!("{line}:{col}: ");
    message.strip_prefix(&prefix).unwrap_or(message).to_owned()
}

fn open(path: &Path) -> Result<Dataset, Failure> {
    let stem = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
    let stem = stem.split('.').next().unwrap_or_default().to_owned();
    open_dataset(path, &stem).map_err(|e| {
        let message = e.to_string();
        // Most errors already name the file.
        if message.contains(&path.display().to_string()) {
            Failure::plain(message)
        } else {
            Failure::plain(format!("{}: {message}", path.display()))
        }
    })
}

fn single(dataset: &Path, source: String, result: AnalysisResult) -> ReportBundle {
    let mut bundle = ReportBundle::new(format!("Analysis report: {}", dataset.display()));
    bundle.sections.push(Section::new(source, result));
    bundle
}

fn publish(cli: &Cli, mut bundle: ReportBundle) -> Result<(), Failure> {
    bundle.generated_stamp = cli.stamp.clone();
    if matches!(cli.format, Format::Text | Format::Both) {
        let mut out = std::io::stdout().lock();
        out.write_all(bundle.render_text().as_bytes())
            .and_then(|()| out.flush())
            .map_err(|e| Failure::plain(format!("standard output: {e}")))?;
    }
    if matches!(cli.format, Format::Html | Format::Both) {
        emit_site(&bundle, &cli.out).map_err(|e| Failure::plain(e.to_string()))?;
    }
    Ok(())
}

fn info(d: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Dataset: {}", d.name());
    let _ = writeln!(out, "Cases: {}", d.n_cases());
    let _ = writeln!(out, "Variables: {}", d.n_columns());
    let summary = missing_summary(d);
    let width = summary.iter().map(|s| s.variable.chars().count()).chain(["Variable".len()]).max().unwrap_or(0);
    let count_width = d.n_cases().to_string().len().max("Missing".len());
    let _ = writeln!(out, "{:<width$} | {:<7} | {:>count_width$} | {:>count_width$}", "Variable", "Type", "Valid", "Missing");
    for (s, c) in summary.iter().zip(d.columns()) {
        let _ = writeln!(
            out,
            "{:<width$} | {:<7} | {:>count_width$} | {:>count_width$}",
            s.variable,
            c.declared_type().as_str(),
            s.n_valid,
            s.n_missing
        );
    }
    out
}
