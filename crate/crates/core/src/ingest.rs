//! CSV ingestion with deterministic column type inference.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::csvio::{self, CsvSyntaxError};
use crate::table::{Dataset, TableError};
use crate::value::{parse_decimal, ColumnType, Value};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: file is not valid UTF-8", path.display())]
    Encoding { path: PathBuf },
    #[error("{}:{line}: row has {found} fields, header has {expected}", path.display())]
    RaggedRow { path: PathBuf, line: usize, expected: usize, found: usize },
    #[error("{}:{line}: unterminated or misplaced quote", path.display())]
    Malformed { path: PathBuf, line: usize },
    #[error("{}: missing or empty header", path.display())]
    EmptyHeader { path: PathBuf },
    #[error("{}: duplicate column `{column}`", path.display())]
    DuplicateColumn { path: PathBuf, column: String },
    #[error("invalid delimiter {0:?}")]
    InvalidDelimiter(char),
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub delimiter: char,
    pub header: bool,
    pub dataset_name: String,
}

impl IngestOptions {
    pub fn named(dataset_name: impl Into<String>) -> Self {
        IngestOptions { dataset_name: dataset_name.into(), ..Default::default() }
    }
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { delimiter: ',', header: true, dataset_name: "DataSet".to_owned() }
    }
}

/// Whether a raw field counts as empty. Whitespace-only fields do.
fn is_blank(field: &str) -> bool {
    field.trim().is_empty()
}

/// NUMERIC iff every non-empty field parses as a finite plain decimal and at
/// least one field is non-empty; otherwise TEXT.
pub fn infer_column_type<S: AsRef<str>>(raw: &[S]) -> ColumnType {
    let mut any = false;
    for f in raw.iter().map(AsRef::as_ref).filter(|f| !is_blank(f)) {
        if parse_decimal(f).is_none() {
            return ColumnType::Text;
        }
        any = true;
    }
    if any {
        ColumnType::Numeric
    } else {
        ColumnType::Text
    }
}

pub fn read_csv(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<Dataset, IngestError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| IngestError::Io { path: path.to_owned(), source })?;
    parse_csv(&bytes, opts).map_err(|e| e.at(path))
}

/// Error produced before a path is attached.
#[derive(Debug)]
pub(crate) enum ParseFailure {
    Encoding,
    Ragged { line: usize, expected: usize, found: usize },
    Malformed { line: usize },
    EmptyHeader,
    Duplicate(String),
    Delimiter(char),
}

impl ParseFailure {
    fn at(self, path: &Path) -> IngestError {
        let path = path.to_owned();
        match self {
            ParseFailure::Encoding => IngestError::Encoding { path },
            ParseFailure::Ragged { line, expected, found } => IngestError::RaggedRow { path, line, expected, found },
            ParseFailure::Malformed { line } => IngestError::Malformed { path, line },
            ParseFailure::EmptyHeader => IngestError::EmptyHeader { path },
            ParseFailure::Duplicate(column) => IngestError::DuplicateColumn { path, column },
            ParseFailure::Delimiter(c) => IngestError::InvalidDelimiter(c),
        }
    }
}

pub(crate) fn parse_csv(bytes: &[u8], opts: &IngestOptions) -> Result<Dataset, ParseFailure> {
    if matches!(opts.delimiter, '"' | '\n' | '\r') {
        return Err(ParseFailure::Delimiter(opts.delimiter));
    }
    let text = std::str::from_utf8(bytes).map_err(|_| ParseFailure::Encoding)?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let records = csvio::read_records(text, opts.delimiter).map_err(|e| match e {
        CsvSyntaxError::UnterminatedQuote { line } | CsvSyntaxError::TextAfterQuote { line } => {
            ParseFailure::Malformed { line }
        }
    })?;
    let mut records = records.into_iter().peekable();

    let names: Vec<String> = if opts.header {
        let header = records.next().ok_or(ParseFailure::EmptyHeader)?;
        let names: Vec<String> = header.fields.into_iter().map(|f| f.text.trim().to_owned()).collect();
        if names.iter().any(|n| n.is_empty()) {
            return Err(ParseFailure::EmptyHeader);
        }
        names
    } else {
        let width = records.peek().map_or(0, |r| r.fields.len());
        (1..=width).map(|i| format!("V{i}")).collect()
    };

    let width = names.len();
    let mut raw: Vec<Vec<String>> = vec![Vec::new(); width];
    for rec in records {
        if rec.fields.len() != width {
            return Err(ParseFailure::Ragged { line: rec.line, expected: width, found: rec.fields.len() });
        }
        for (col, f) in raw.iter_mut().zip(rec.fields) {
            col.push(f.text);
        }
    }

    let columns = names.into_iter().zip(raw).map(|(name, fields)| {
        let ty = infer_column_type(&fields);
        let values = fields.into_iter().map(|f| to_value(f, ty)).collect();
        (name, ty, values)
    });
    Dataset::build(opts.dataset_name.clone(), columns).map_err(|e| match e {
        TableError::DuplicateColumn(c) => ParseFailure::Duplicate(c),
        // Inference guarantees type conformance and equal lengths.
        other => unreachable!("ingest produced an invalid dataset: {other}"),
    })
}

fn to_value(field: String, ty: ColumnType) -> Value {
    if is_blank(&field) {
        return Value::Missing;
    }
    match ty {
        ColumnType::Numeric => parse_decimal(&field).map_or(Value::Missing, Value::number),
        ColumnType::Text => Value::Text(field),
    }
}
