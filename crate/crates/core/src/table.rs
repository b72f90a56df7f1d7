//! Columnar dataset model: construction, rename, projection and case append.
//!
//! A [`Dataset`] is immutable once built. Every operation returns a new
//! dataset. Column names compare case-insensitively; the spelling a name was
//! first given with is the one kept for display.

use std::collections::HashMap;

use thiserror::Error;

use crate::value::{ColumnType, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("column `{column}` has {found} values, expected {expected}")]
    LengthMismatch { column: String, expected: usize, found: usize },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("column `{column}` is {declared} but row {row} holds a value of another type")]
    TypeViolation { column: String, declared: ColumnType, row: usize },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("invalid column name `{0}`")]
    InvalidName(String),
}

pub type Result<T, E = TableError> = std::result::Result<T, E>;

/// Case-folded key used for every column-name comparison.
pub(crate) fn name_key(name: &str) -> String {
    name.to_lowercase()
}

/// One named, typed column.
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    declared_type: ColumnType,
    values: Vec<Value>,
}

impl Column {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn declared_type(&self) -> ColumnType {
        self.declared_type
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_missing()).count()
    }

    fn checked(name: String, declared_type: ColumnType, values: Vec<Value>) -> Result<Column> {
        if name.trim().is_empty() {
            return Err(TableError::InvalidName(name));
        }
        let values: Vec<Value> = values.into_iter().map(Value::normalized).collect();
        if let Some(row) = values.iter().position(|v| !v.fits(declared_type)) {
            return Err(TableError::TypeViolation { column: name, declared: declared_type, row });
        }
        Ok(Column { name, declared_type, values })
    }
}

/// Input for [`Dataset::build`]: column name, declared type, cells.
pub type ColumnSpec = (String, ColumnType, Vec<Value>);

/// A named, ordered set of equal-length columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    columns: Vec<Column>,
}

impl Dataset {
    /// Builds a dataset, rejecting (never coercing) cells that do not match
    /// their column's declared type. Non-finite numbers become `Missing`.
    pub fn build<I, S>(name: impl Into<String>, columns: I) -> Result<Dataset>
    where
        I: IntoIterator<Item = (S, ColumnType, Vec<Value>)>,
        S: Into<String>,
    {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        let mut len = None;
        for (col_name, ty, values) in columns {
            let col_name = col_name.into();
            if seen.insert(name_key(&col_name), ()).is_some() {
                return Err(TableError::DuplicateColumn(col_name));
            }
            let expected = *len.get_or_insert(values.len());
            if values.len() != expected {
                return Err(TableError::LengthMismatch { column: col_name, expected, found: values.len() });
            }
            out.push(Column::checked(col_name, ty, values)?);
        }
        Ok(Dataset { name: name.into(), columns: out })
    }

    /// A dataset with no columns and no cases.
    pub fn empty(name: impl Into<String>) -> Dataset {
        Dataset { name: name.into(), columns: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Dataset {
        self.name = name.into();
        self
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Case count.
    pub fn n_cases(&self) -> usize {
        self.columns.first().map_or(0, Column::len)
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        let key = name_key(name);
        self.columns.iter().position(|c| name_key(&c.name) == key)
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.position(name)
            .map(|i| &self.columns[i])
            .ok_or_else(|| TableError::UnknownColumn(name.to_owned()))
    }

    /// Replaces one column's cells and type; length must stay N.
    pub fn replace_column(&self, name: &str, declared_type: ColumnType, values: Vec<Value>) -> Result<Dataset> {
        let idx = self.position(name).ok_or_else(|| TableError::UnknownColumn(name.to_owned()))?;
        let old = &self.columns[idx];
        if values.len() != old.len() {
            return Err(TableError::LengthMismatch { column: old.name.clone(), expected: old.len(), found: values.len() });
        }
        let mut columns = self.columns.clone();
        columns[idx] = Column::checked(old.name.clone(), declared_type, values)?;
        Ok(Dataset { name: self.name.clone(), columns })
    }

    /// Renames columns in place; names absent from the map are unchanged.
    pub fn rename_columns(&self, map: &RenameMap) -> Result<Dataset> {
        for (old, _) in map.pairs() {
            if self.position(old).is_none() {
                return Err(TableError::UnknownColumn(old.clone()));
            }
        }
        self.apply_renames(map)
    }

    /// Like [`Dataset::rename_columns`] but silently skips pairs whose old
    /// name is absent.
    pub fn rename_present(&self, map: &RenameMap) -> Result<Dataset> {
        self.apply_renames(map)
    }

    fn apply_renames(&self, map: &RenameMap) -> Result<Dataset> {
        let lookup: HashMap<String, &str> = map.pairs().iter().map(|(o, n)| (name_key(o), n.as_str())).collect();
        let columns: Vec<Column> = self
            .columns
            .iter()
            .map(|c| match lookup.get(&name_key(&c.name)) {
                Some(new) => Column { name: (*new).to_owned(), ..c.clone() },
                None => c.clone(),
            })
            .collect();
        let mut seen = HashMap::new();
        for c in &columns {
            if seen.insert(name_key(&c.name), ()).is_some() {
                return Err(TableError::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Dataset { name: self.name.clone(), columns })
    }

    /// Projects onto `names`, in that order.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Dataset> {
        let mut seen = HashMap::new();
        let mut columns = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let col = self.column(n)?;
            if seen.insert(name_key(n), ()).is_some() {
                return Err(TableError::DuplicateColumn(n.to_owned()));
            }
            columns.push(col.clone());
        }
        Ok(Dataset { name: self.name.clone(), columns })
    }

    /// Appends the cases of `other` (after applying `renames` to it) below
    /// the cases of `self`.
    ///
    /// The result has the union of both column sets: `self`'s columns first,
    /// then columns only `other` has, in `other`'s order. Cells a source does
    /// not have are `Missing`. A shared column whose declared types disagree
    /// becomes TEXT, numbers rendered with [`crate::value::format_number`].
    ///
    /// Rename pairs whose old name `other` lacks are skipped; the only error
    /// is a rename that makes two of `other`'s columns collide.
    pub fn append_cases(&self, other: &Dataset, renames: &RenameMap) -> Result<Dataset> {
        let other = other.rename_present(renames)?;
        let (n_base, n_other) = (self.n_cases(), other.n_cases());
        let mut used = vec![false; other.columns.len()];
        let mut columns = Vec::with_capacity(self.columns.len() + other.columns.len());

        for col in &self.columns {
            let appended = match other.position(&col.name) {
                Some(j) => {
                    used[j] = true;
                    let theirs = &other.columns[j];
                    if theirs.declared_type == col.declared_type {
                        let mut values = col.values.clone();
                        values.extend(theirs.values.iter().cloned());
                        Column { name: col.name.clone(), declared_type: col.declared_type, values }
                    } else {
                        let values = col.values.iter().chain(&theirs.values).cloned().map(Value::into_text).collect();
                        Column { name: col.name.clone(), declared_type: ColumnType::Text, values }
                    }
                }
                None => {
                    let mut values = col.values.clone();
                    values.resize(n_base + n_other, Value::Missing);
                    Column { name: col.name.clone(), declared_type: col.declared_type, values }
                }
            };
            columns.push(appended);
        }
        for (col, _) in other.columns.iter().zip(&used).filter(|(_, used)| !**used) {
            let mut values = vec![Value::Missing; n_base];
            values.extend(col.values.iter().cloned());
            columns.push(Column { name: col.name.clone(), declared_type: col.declared_type, values });
        }
        Ok(Dataset { name: self.name.clone(), columns })
    }

    /// Row `i` as a vector of cells, in column order.
    pub fn row(&self, i: usize) -> Vec<Value> {
        self.columns.iter().map(|c| c.values[i].clone()).collect()
    }
}

/// Ordered old-name to new-name pairs. Old names are pairwise distinct, as
/// are new names (both case-insensitively).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RenameMap {
    pairs: Vec<(String, String)>,
}

impl RenameMap {
    pub fn new<I, A, B>(pairs: I) -> Result<RenameMap>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let pairs: Vec<(String, String)> = pairs.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        let mut old_seen = HashMap::new();
        let mut new_seen = HashMap::new();
        for (old, new) in &pairs {
            if new.trim().is_empty() {
                return Err(TableError::InvalidName(new.clone()));
            }
            if old_seen.insert(name_key(old), ()).is_some() {
                return Err(TableError::DuplicateColumn(old.clone()));
            }
            if new_seen.insert(name_key(new), ()).is_some() {
                return Err(TableError::DuplicateColumn(new.clone()));
            }
        }
        Ok(RenameMap { pairs })
    }

    pub fn empty() -> RenameMap {
        RenameMap::default()
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}
