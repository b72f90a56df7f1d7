//! Dataset persistence: a CSV body (`<stem>.tds.csv`) plus a JSON sidecar
//! (`<stem>.tds.json`) holding the dataset name, column order and declared
//! types.
//!
//! In the body a missing cell is an empty unquoted field and an empty text
//! cell is `""`, so `load(save(d)) == d` holds exactly.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csvio::{self, Record};
use crate::table::Dataset;
use crate::value::{format_number, ColumnType, Value};

pub const FORMAT_TAG: &str = "tds-dataset/1";
pub const BODY_SUFFIX: &str = ".tds.csv";
pub const META_SUFFIX: &str = ".tds.json";

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Format { path: PathBuf, line: usize, message: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct Metadata {
    format: String,
    name: String,
    cases: usize,
    columns: Vec<ColumnMeta>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ColumnMeta {
    name: String,
    #[serde(rename = "type")]
    ty: ColumnType,
}

/// Maps any dataset path to its body and metadata files.
///
/// `out/DATA.sav`, `out/DATA.tds.csv` and `out/DATA` all map to
/// `out/DATA.tds.csv` + `out/DATA.tds.json`.
pub fn pair_paths(path: impl AsRef<Path>) -> (PathBuf, PathBuf) {
    let path = path.as_ref();
    let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = file
        .strip_suffix(BODY_SUFFIX)
        .or_else(|| file.strip_suffix(META_SUFFIX))
        .map(str::to_owned)
        .unwrap_or_else(|| match file.rfind('.') {
            Some(i) if i > 0 => file[..i].to_owned(),
            _ => file.clone(),
        });
    (path.with_file_name(format!("{stem}{BODY_SUFFIX}")), path.with_file_name(format!("{stem}{META_SUFFIX}")))
}

/// Whether `path` names a persisted dataset (its sidecar exists).
pub fn is_persisted(path: impl AsRef<Path>) -> bool {
    pair_paths(path).1.is_file()
}

pub fn save_dataset(d: &Dataset, path: impl AsRef<Path>) -> Result<(), PersistError> {
    let (body_path, meta_path) = pair_paths(path);
    let meta = Metadata {
        format: FORMAT_TAG.to_owned(),
        name: d.name().to_owned(),
        cases: d.n_cases(),
        columns: d.columns().iter().map(|c| ColumnMeta { name: c.name().to_owned(), ty: c.declared_type() }).collect(),
    };
    let mut json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    json.push('\n');

    if let Some(dir) = body_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| PersistError::Io { path: dir.to_owned(), source })?;
    }
    fs::write(&body_path, render_body(d)).map_err(|source| PersistError::Io { path: body_path.clone(), source })?;
    fs::write(&meta_path, json).map_err(|source| PersistError::Io { path: meta_path.clone(), source })?;
    Ok(())
}

fn render_body(d: &Dataset) -> String {
    let mut out = String::new();
    push_row(&mut out, d.column_names().map(|n| (n, false)));
    for i in 0..d.n_cases() {
        let cells: Vec<(String, bool)> = d
            .columns()
            .iter()
            .map(|c| match &c.values()[i] {
                Value::Missing => (String::new(), false),
                Value::Number(x) => (format_number(*x), false),
                Value::Text(s) => (s.clone(), s.is_empty()),
            })
            .collect();
        push_row(&mut out, cells.iter().map(|(s, q)| (s.as_str(), *q)));
    }
    out
}

fn push_row<'a>(out: &mut String, fields: impl Iterator<Item = (&'a str, bool)>) {
    for (i, (text, force)) in fields.enumerate() {
        if i > 0 {
            out.push(',');
        }
        csvio::write_field(out, text, ',', force);
    }
    out.push('\n');
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset, PersistError> {
    let (body_path, meta_path) = pair_paths(path);
    let meta_text = read(&meta_path)?;
    let meta: Metadata = serde_json::from_str(&meta_text).map_err(|e| PersistError::Format {
        path: meta_path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if meta.format != FORMAT_TAG {
        return Err(PersistError::Format {
            path: meta_path,
            line: 1,
            message: format!("unrecognized format tag `{}`", meta.format),
        });
    }

    let body = read(&body_path)?;
    let fail = |line: usize, message: String| PersistError::Format { path: body_path.clone(), line, message };
    let records = csvio::read_records(&body, ',').map_err(|e| fail(e.line(), "malformed CSV".into()))?;
    let mut records = records.into_iter();
    let header = records.next().ok_or_else(|| fail(1, "missing header row".into()))?;
    let width = meta.columns.len();

    let header_names: Vec<&str> = if width == 0 && is_blank(&header) {
        Vec::new()
    } else {
        header.fields.iter().map(|f| f.text.as_str()).collect()
    };
    let expected: Vec<&str> = meta.columns.iter().map(|c| c.name.as_str()).collect();
    if header_names != expected {
        return Err(fail(header.line, "header does not match metadata columns".into()));
    }

    let mut columns: Vec<Vec<Value>> = vec![Vec::with_capacity(meta.cases); width];
    let mut n = 0;
    for rec in records {
        if width == 0 || rec.fields.len() != width {
            return Err(fail(rec.line, format!("expected {width} fields, found {}", rec.fields.len())));
        }
        for ((field, col), out) in rec.fields.into_iter().zip(&meta.columns).zip(columns.iter_mut()) {
            let v = if field.text.is_empty() && !field.quoted {
                Value::Missing
            } else {
                match col.ty {
                    ColumnType::Text => Value::Text(field.text),
                    ColumnType::Numeric => match field.text.parse::<f64>() {
                        Ok(x) if x.is_finite() => Value::number(x),
                        _ => return Err(fail(rec.line, format!("`{}` is not a number", field.text))),
                    },
                }
            };
            out.push(v);
        }
        n += 1;
    }
    if n != meta.cases {
        return Err(fail(n + 1, format!("expected {} cases, found {n}", meta.cases)));
    }

    Dataset::build(meta.name, meta.columns.into_iter().zip(columns).map(|(c, values)| (c.name, c.ty, values)))
        .map_err(|e| PersistError::Format { path: meta_path, line: 1, message: e.to_string() })
}

fn is_blank(r: &Record) -> bool {
    r.fields.len() == 1 && r.fields[0].text.is_empty() && !r.fields[0].quoted
}

fn read(path: &Path) -> Result<String, PersistError> {
    fs::read_to_string(path).map_err(|source| PersistError::Io { path: path.to_owned(), source })
}
