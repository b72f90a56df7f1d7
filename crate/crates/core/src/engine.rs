//! Script interpreter.
//!
//! An [`Environment`] holds named datasets, the active dataset handle and
//! the analysis results accumulated so far. Commands run in order and the
//! first failure halts execution, leaving the effects of earlier commands in
//! place.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use thiserror::Error;

use crate::ingest::{read_csv, IngestError, IngestOptions};
use crate::persist::{self, PersistError};
use crate::script::{render_statement, Command, FileRef, RecodeSpec, Script, Span, Statement};
use crate::stats::{crosstab, frequencies, AnalysisResult};
use crate::table::{Column, Dataset, RenameMap, TableError};
use crate::value::{ColumnType, Value};

#[derive(Debug, Error)]
pub enum ExecErrorKind {
    #[error("no active dataset")]
    NoActiveDataset,
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Open(#[from] OpenError),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

/// A failed command, with the span of the statement that failed.
#[derive(Debug, Error)]
#[error("{span}: {command}: {kind}")]
pub struct ExecError {
    pub span: Span,
    pub command: &'static str,
    #[source]
    pub kind: ExecErrorKind,
}

#[derive(Debug, Error)]
pub enum OpenError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Persist(#[from] PersistError),
}

/// Opens a dataset file: a persisted pair when its `.tds.json` sidecar
/// exists, otherwise a plain CSV file.
pub fn open_dataset(path: impl AsRef<Path>, name: &str) -> Result<Dataset, OpenError> {
    let path = path.as_ref();
    if persist::is_persisted(path) {
        Ok(persist::load_dataset(path)?)
    } else {
        Ok(read_csv(path, &IngestOptions::named(name))?)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExecOptions {
    /// Collect unmatched recode values as warnings.
    pub strict: bool,
    /// Directory relative script paths resolve against; the process working
    /// directory when unset.
    pub base_dir: Option<PathBuf>,
}

/// One analysis produced by a FREQUENCIES or CROSSTABS statement.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOutput {
    /// Canonical text of the statement that produced it.
    pub command: String,
    pub span: Span,
    pub result: AnalysisResult,
}

/// Values a RECODE left unchanged because no rule matched them.
#[derive(Debug, Clone, PartialEq)]
pub struct RecodeWarning {
    pub span: Span,
    pub variable: String,
    pub value: Value,
    pub count: usize,
}

impl fmt::Display for RecodeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown = match &self.value {
            Value::Text(s) => format!("'{s}'"),
            other => other.to_string(),
        };
        write!(
            f,
            "{}: RECODE {}: value {shown} matched no rule ({} case{})",
            self.span,
            self.variable,
            self.count,
            if self.count == 1 { "" } else { "s" }
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Environment {
    registry: IndexMap<String, Dataset>,
    active: Option<String>,
    outputs: Vec<AnalysisOutput>,
    warnings: Vec<RecodeWarning>,
    options: ExecOptions,
    unnamed: usize,
}

impl Environment {
    pub fn new() -> Environment {
        Environment::default()
    }

    pub fn with_options(options: ExecOptions) -> Environment {
        Environment { options, ..Environment::default() }
    }

    pub fn registry(&self) -> &IndexMap<String, Dataset> {
        &self.registry
    }

    pub fn active_name(&self) -> Option<&str> {
        self.active.as_deref()
    }

    pub fn active(&self) -> Option<&Dataset> {
        self.active.as_ref().and_then(|n| self.registry.get(n))
    }

    pub fn outputs(&self) -> &[AnalysisOutput] {
        &self.outputs
    }

    pub fn warnings(&self) -> &[RecodeWarning] {
        &self.warnings
    }

    /// Registers `d` under `name` and makes it active.
    pub fn insert_active(&mut self, name: impl Into<String>, d: Dataset) {
        let name = name.into();
        self.registry.insert(name.clone(), d.with_name(name.clone()));
        self.active = Some(name);
    }

    fn resolve(&self, path: &str) -> PathBuf {
        match &self.options.base_dir {
            Some(base) if Path::new(path).is_relative() => base.join(path),
            _ => PathBuf::from(path),
        }
    }

    fn fresh_name(&mut self) -> String {
        loop {
            self.unnamed += 1;
            let name = format!("DataSet{}", self.unnamed);
            if !self.registry.contains_key(&name) {
                return name;
            }
        }
    }

    fn require_active(&self) -> Result<(&str, &Dataset), ExecErrorKind> {
        let name = self.active.as_deref().ok_or(ExecErrorKind::NoActiveDataset)?;
        let d = self.registry.get(name).ok_or(ExecErrorKind::NoActiveDataset)?;
        Ok((name, d))
    }

    fn replace_active(&mut self, d: Dataset) {
        let name = match self.active.clone() {
            Some(n) => n,
            None => self.fresh_name(),
        };
        self.insert_active(name, d);
    }

    fn open(&mut self, path: &str) -> Result<Dataset, ExecErrorKind> {
        let name = self.fresh_name();
        Ok(open_dataset(self.resolve(path), &name)?)
    }

    fn run(&mut self, st: &Statement) -> Result<(), ExecErrorKind> {
        match &st.command {
            Command::GetFile { path } => {
                let d = self.open(path)?;
                let name = d.name().to_owned();
                let name = if self.registry.contains_key(&name) { self.fresh_name() } else { name };
                self.insert_active(name, d);
            }
            Command::DatasetName { name } => {
                let (old, _) = self.require_active()?;
                let old = old.to_owned();
                let d = self.registry.shift_remove(&old).expect("active dataset is registered");
                self.registry.shift_remove(name);
                self.insert_active(name.clone(), d);
            }
            Command::MatchFiles { files, rename } => {
                let mut acc: Option<Dataset> = None;
                for f in files {
                    let (next, map) = match f {
                        FileRef::Active => (self.require_active()?.1.clone(), RenameMap::empty()),
                        FileRef::Path(p) => (self.open(p)?, rename.clone()),
                    };
                    acc = Some(match acc {
                        None => next.rename_present(&map)?,
                        Some(base) => base.append_cases(&next, &map)?,
                    });
                }
                if let Some(d) = acc {
                    self.replace_active(d);
                }
            }
            Command::Recode { vars, spec } => {
                let (_, d) = self.require_active()?;
                let (d, unmatched) = recode_with_report(d, vars, spec)?;
                if self.options.strict {
                    self.warnings.extend(unmatched.into_iter().map(|(variable, value, count)| RecodeWarning {
                        span: st.span,
                        variable,
                        value,
                        count,
                    }));
                }
                self.replace_active(d);
            }
            Command::Execute => {}
            Command::Frequencies { vars } => {
                let (_, d) = self.require_active()?;
                let tables = vars.iter().map(|v| frequencies(d, v)).collect::<Result<Vec<_>, _>>()?;
                let text = render_statement(st);
                self.outputs.extend(tables.into_iter().map(|t| AnalysisOutput {
                    command: text.clone(),
                    span: st.span,
                    result: AnalysisResult::Frequencies(t),
                }));
            }
            Command::Crosstabs { row, col } => {
                let (_, d) = self.require_active()?;
                let ct = crosstab(d, row, col)?;
                self.outputs.push(AnalysisOutput {
                    command: render_statement(st),
                    span: st.span,
                    result: AnalysisResult::Crosstab(ct),
                });
            }
            Command::SaveOutfile { path } => {
                let (_, d) = self.require_active()?;
                persist::save_dataset(d, self.resolve(path))?;
            }
        }
        Ok(())
    }
}

/// Runs every statement of `script` against `env`, stopping at the first
/// error.
pub fn execute_script(script: &Script, env: &mut Environment) -> Result<(), ExecError> {
    for st in &script.statements {
        env.run(st).map_err(|kind| ExecError { span: st.span, command: st.command.keyword(), kind })?;
    }
    Ok(())
}

/// Applies the first rule whose pattern matches `v`. Missing and values no
/// rule matches pass through unchanged.
pub fn recode_value(v: &Value, spec: &RecodeSpec) -> Value {
    match spec.first_match(v) {
        Some(i) => spec.rules()[i].target.clone(),
        None => v.clone(),
    }
}

/// Recodes the named columns cell by cell. A recoded column is NUMERIC when
/// its cells are all numbers or missing with at least one number. Otherwise
/// it is TEXT and any numbers in it are rendered as canonical text.
pub fn exec_recode<S: AsRef<str>>(d: &Dataset, vars: &[S], spec: &RecodeSpec) -> Result<Dataset, TableError> {
    recode_with_report(d, vars, spec).map(|(d, _)| d)
}

type Unmatched = Vec<(String, Value, usize)>;

fn recode_with_report<S: AsRef<str>>(d: &Dataset, vars: &[S], spec: &RecodeSpec) -> Result<(Dataset, Unmatched), TableError> {
    for v in vars {
        d.column(v.as_ref())?;
    }
    let mut out = d.clone();
    let mut unmatched = Vec::new();
    for v in vars {
        let col = out.column(v.as_ref())?;
        let (values, ty, missed) = recode_column(col, spec);
        let name = col.name().to_owned();
        unmatched.extend(missed.into_iter().map(|(value, n)| (name.clone(), value, n)));
        out = out.replace_column(&name, ty, values)?;
    }
    Ok((out, unmatched))
}

fn recode_column(col: &Column, spec: &RecodeSpec) -> (Vec<Value>, ColumnType, BTreeMap<Value, usize>) {
    let mut missed = BTreeMap::new();
    let values: Vec<Value> = col
        .values()
        .iter()
        .map(|v| match spec.first_match(v) {
            Some(i) => spec.rules()[i].target.clone(),
            None => {
                if !v.is_missing() {
                    *missed.entry(v.clone()).or_insert(0) += 1;
                }
                v.clone()
            }
        })
        .collect();
    let any_text = values.iter().any(|v| matches!(v, Value::Text(_)));
    let any_number = values.iter().any(|v| matches!(v, Value::Number(_)));
    if !any_text && any_number {
        (values, ColumnType::Numeric, missed)
    } else {
        (values.into_iter().map(Value::into_text).collect(), ColumnType::Text, missed)
    }
}
