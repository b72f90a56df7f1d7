use thiserror::Error;

use super::lexer::Span;
use crate::table::RenameMap;
use crate::value::Value;

/// A parsed script: statements in source order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Script {
    pub statements: Vec<Statement>,
}

impl Script {
    pub fn commands(&self) -> impl Iterator<Item = &Command> {
        self.statements.iter().map(|s| &s.command)
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }
}

/// One command plus the subcommands the engine does not interpret.
#[derive(Debug, Clone)]
pub struct Statement {
    pub command: Command,
    /// Inert subcommands such as `WINDOW=FRONT`, `/ORDER=ANALYSIS`,
    /// `/COMPRESSED`. Kept so rendering preserves them.
    pub annotations: Vec<Annotation>,
    /// Position of the statement's first token.
    pub span: Span,
}

impl Statement {
    pub fn new(command: Command) -> Statement {
        Statement { command, annotations: Vec::new(), span: Span::default() }
    }
}

/// Structural equality; spans are ignored so a rendered and re-parsed
/// script compares equal to the original.
impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.command == other.command && self.annotations == other.annotations
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    GetFile { path: String },
    DatasetName { name: String },
    MatchFiles { files: Vec<FileRef>, rename: RenameMap },
    Recode { vars: Vec<String>, spec: RecodeSpec },
    Execute,
    Frequencies { vars: Vec<String> },
    Crosstabs { row: String, col: String },
    SaveOutfile { path: String },
}

impl Command {
    pub fn keyword(&self) -> &'static str {
        match self {
            Command::GetFile { .. } => "GET",
            Command::DatasetName { .. } => "DATASET NAME",
            Command::MatchFiles { .. } => "MATCH FILES",
            Command::Recode { .. } => "RECODE",
            Command::Execute => "EXECUTE",
            Command::Frequencies { .. } => "FREQUENCIES",
            Command::Crosstabs { .. } => "CROSSTABS",
            Command::SaveOutfile { .. } => "SAVE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FileRef {
    /// `*`, the active dataset.
    Active,
    Path(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub slash: bool,
    pub name: String,
    pub equals: bool,
    pub args: Vec<AnnotationArg>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnnotationArg {
    Word(String),
    Number(f64),
    Str(String),
    Star,
    LParen,
    RParen,
    Equals,
}

/// Source side of a recode rule.
#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    /// Matches by variant and payload equality.
    Exact(Value),
    /// Inclusive numeric interval.
    Range { lo: f64, hi: f64 },
    LowestThru(f64),
    ThruHighest(f64),
}

impl Pattern {
    pub fn matches(&self, v: &Value) -> bool {
        match (self, v) {
            (_, Value::Missing) => false,
            (Pattern::Exact(p), v) => p == v,
            (Pattern::Range { lo, hi }, Value::Number(x)) => lo <= x && x <= hi,
            (Pattern::LowestThru(hi), Value::Number(x)) => x <= hi,
            (Pattern::ThruHighest(lo), Value::Number(x)) => x >= lo,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecodeRule {
    pub pattern: Pattern,
    pub target: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecodeSpecError {
    #[error("a recode needs at least one rule")]
    Empty,
    #[error("range {lo} THRU {hi} has its bounds reversed")]
    InvertedRange { lo: String, hi: String },
    #[error("recode rules cannot use a missing or non-finite value or text with a line break")]
    InvalidValue,
}

fn literal_ok(v: &Value) -> bool {
    match v {
        Value::Missing => false,
        Value::Number(x) => x.is_finite(),
        Value::Text(s) => !s.contains(['\n', '\r']),
    }
}

/// Ordered recode rules, applied first-match-wins.
#[derive(Debug, Clone, PartialEq)]
pub struct RecodeSpec {
    rules: Vec<RecodeRule>,
}

impl RecodeSpec {
    pub fn new(rules: Vec<RecodeRule>) -> Result<RecodeSpec, RecodeSpecError> {
        if rules.is_empty() {
            return Err(RecodeSpecError::Empty);
        }
        for r in &rules {
            let finite = |x: f64| x.is_finite();
            let ok = match &r.pattern {
                Pattern::Exact(v) => literal_ok(v),
                Pattern::Range { lo, hi } => {
                    if !(finite(*lo) && finite(*hi)) {
                        false
                    } else if lo > hi {
                        return Err(RecodeSpecError::InvertedRange { lo: lo.to_string(), hi: hi.to_string() });
                    } else {
                        true
                    }
                }
                Pattern::LowestThru(x) | Pattern::ThruHighest(x) => finite(*x),
            };
            if !ok || !literal_ok(&r.target) {
                return Err(RecodeSpecError::InvalidValue);
            }
        }
        Ok(RecodeSpec { rules })
    }

    pub fn rules(&self) -> &[RecodeRule] {
        &self.rules
    }

    /// Index of the first rule matching `v`.
    pub fn first_match(&self, v: &Value) -> Option<usize> {
        self.rules.iter().position(|r| r.pattern.matches(v))
    }
}
