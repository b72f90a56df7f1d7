//! Cell values and column types.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Declared type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ColumnType {
    Text,
    Numeric,
}

impl ColumnType {
    pub fn as_str(self) -> &'static str {
        match self {
            ColumnType::Text => "TEXT",
            ColumnType::Numeric => "NUMERIC",
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single cell.
///
/// `Number` payloads are finite. Use [`Value::number`] to build one from an
/// arbitrary float; non-finite inputs collapse to `Missing`. Datasets apply
/// the same normalization to every cell they are built from.
#[derive(Debug, Clone)]
pub enum Value {
    Text(String),
    Number(f64),
    /// System-missing.
    Missing,
}

impl Value {
    pub fn number(x: f64) -> Value {
        if x.is_finite() {
            // -0.0 and 0.0 compare equal; keep a single representation.
            Value::Number(if x == 0.0 { 0.0 } else { x })
        } else {
            Value::Missing
        }
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Whether this value may live in a column of type `ty`.
    pub fn fits(&self, ty: ColumnType) -> bool {
        matches!(
            (self, ty),
            (Value::Missing, _) | (Value::Text(_), ColumnType::Text) | (Value::Number(_), ColumnType::Numeric)
        )
    }

    pub(crate) fn normalized(self) -> Value {
        match self {
            Value::Number(x) => Value::number(x),
            other => other,
        }
    }

    /// Converts to text using [`format_number`] for numbers.
    pub(crate) fn into_text(self) -> Value {
        match self {
            Value::Number(x) => Value::Text(format_number(x)),
            other => other,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Missing => 0,
            Value::Number(_) => 1,
            Value::Text(_) => 2,
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Text(a), Value::Text(b)) => a == b,
            (Value::Number(a), Value::Number(b)) => a == b,
            (Value::Missing, Value::Missing) => true,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Missing < every number < every text; numbers ascend numerically, text
/// lexicographically by code point.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a.partial_cmp(b).unwrap_or_else(|| a.total_cmp(b)),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) => f.write_str(s),
            Value::Number(x) => f.write_str(&format_number(*x)),
            Value::Missing => f.write_str("."),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::number(x)
    }
}

impl From<i32> for Value {
    fn from(x: i32) -> Self {
        Value::number(f64::from(x))
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_owned())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

/// Canonical number-to-text rendering: integers print without a fractional
/// part, everything else as the shortest decimal that parses back to the
/// same float. Never uses exponent notation.
pub fn format_number(x: f64) -> String {
    // std's Display is shortest-round-trip and exponent-free.
    format!("{x}")
}

/// Parses a plain decimal: optional sign, digits with an optional decimal
/// point, optional surrounding spaces. Thousands separators, currency marks,
/// exponents and non-finite spellings are rejected.
pub fn parse_decimal(field: &str) -> Option<f64> {
    let s = field.trim_matches(|c| c == ' ' || c == '\t');
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    let ok = digits(int)
        && frac.map_or(true, digits)
        && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()));
    if !ok {
        return None;
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}
