//! Descriptive statistics: frequency tables, crosstabs, missing summaries.
//!
//! Percentages are held as exact tenths ([`Percent`]) so every renderer
//! prints the stored value rather than re-rounding a float.

use std::collections::BTreeMap;
use std::fmt;

use crate::table::{Dataset, Result};
use crate::value::Value;

/// A percentage rounded to one decimal, stored as an integer count of
/// tenths of a percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Percent {
    tenths: u64,
}

impl Percent {
    pub const HUNDRED: Percent = Percent { tenths: 1000 };

    /// `part / whole × 100`, rounded half away from zero to one decimal.
    /// Computed in integers, so ties such as 0.05 round exactly.
    pub fn of(part: usize, whole: usize) -> Percent {
        if whole == 0 {
            return Percent::default();
        }
        let (p, w) = (part as u128, whole as u128);
        let tenths = (2 * p * 1000 + w) / (2 * w);
        Percent { tenths: tenths as u64 }
    }

    pub fn from_tenths(tenths: u64) -> Percent {
        Percent { tenths }
    }

    pub fn tenths(self) -> u64 {
        self.tenths
    }

    pub fn as_f64(self) -> f64 {
        self.tenths as f64 / 10.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!("{}.{}", self.tenths / 10, self.tenths % 10);
        f.pad(&s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyRow {
    pub value: Value,
    pub frequency: usize,
    /// Of all cases.
    pub percent: Percent,
    /// Of non-missing cases.
    pub valid_percent: Percent,
    /// Running valid share, rounded from the exact running count.
    pub cumulative_percent: Percent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    pub variable: String,
    pub n_valid: usize,
    pub n_missing: usize,
    /// Distinct non-missing values in ascending order.
    pub rows: Vec<FrequencyRow>,
}

impl FrequencyTable {
    pub fn n_total(&self) -> usize {
        self.n_valid + self.n_missing
    }

    /// Share of all cases that are valid; the "Total" line's percent.
    pub fn valid_total_percent(&self) -> Percent {
        Percent::of(self.n_valid, self.n_total())
    }

    pub fn missing_percent(&self) -> Percent {
        Percent::of(self.n_missing, self.n_total())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossTab {
    pub row_variable: String,
    pub col_variable: String,
    pub row_values: Vec<Value>,
    pub col_values: Vec<Value>,
    /// `cells[i][j]` counts cases with row value `i` and column value `j`.
    pub cells: Vec<Vec<usize>>,
    pub row_totals: Vec<usize>,
    pub col_totals: Vec<usize>,
    pub grand_total: usize,
    /// Cases missing in either variable.
    pub n_excluded: usize,
}

impl CrossTab {
    pub fn transpose(&self) -> CrossTab {
        let cells = (0..self.col_values.len())
            .map(|j| self.cells.iter().map(|row| row[j]).collect())
            .collect();
        CrossTab {
            row_variable: self.col_variable.clone(),
            col_variable: self.row_variable.clone(),
            row_values: self.col_values.clone(),
            col_values: self.row_values.clone(),
            cells,
            row_totals: self.col_totals.clone(),
            col_totals: self.row_totals.clone(),
            grand_total: self.grand_total,
            n_excluded: self.n_excluded,
        }
    }

    /// Cell count for a pair of values, zero when either is absent.
    pub fn count(&self, row: &Value, col: &Value) -> usize {
        let i = self.row_values.iter().position(|v| v == row);
        let j = self.col_values.iter().position(|v| v == col);
        match (i, j) {
            (Some(i), Some(j)) => self.cells[i][j],
            _ => 0,
        }
    }
}

/// Output of one analysis command.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalysisResult {
    Frequencies(FrequencyTable),
    Crosstab(CrossTab),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingSummary {
    pub variable: String,
    pub n_valid: usize,
    pub n_missing: usize,
}

pub fn frequencies(d: &Dataset, var: &str) -> Result<FrequencyTable> {
    let col = d.column(var)?;
    let mut counts: BTreeMap<&Value, usize> = BTreeMap::new();
    let mut n_missing = 0;
    for v in col.values() {
        if v.is_missing() {
            n_missing += 1;
        } else {
            *counts.entry(v).or_default() += 1;
        }
    }
    let n_valid = col.len() - n_missing;
    let n_total = col.len();
    let mut running = 0;
    let rows = counts
        .into_iter()
        .map(|(value, frequency)| {
            running += frequency;
            FrequencyRow {
                value: value.clone(),
                frequency,
                percent: Percent::of(frequency, n_total),
                valid_percent: Percent::of(frequency, n_valid),
                cumulative_percent: Percent::of(running, n_valid),
            }
        })
        .collect();
    Ok(FrequencyTable { variable: col.name().to_owned(), n_valid, n_missing, rows })
}

pub fn crosstab(d: &Dataset, row_var: &str, col_var: &str) -> Result<CrossTab> {
    let rc = d.column(row_var)?;
    let cc = d.column(col_var)?;
    let mut pairs: BTreeMap<(&Value, &Value), usize> = BTreeMap::new();
    let mut n_excluded = 0;
    for (r, c) in rc.values().iter().zip(cc.values()) {
        if r.is_missing() || c.is_missing() {
            n_excluded += 1;
        } else {
            *pairs.entry((r, c)).or_default() += 1;
        }
    }

    let (row_values, row_idx) = index_values(pairs.keys().map(|(r, _)| *r).collect());
    let (col_values, col_idx) = index_values(pairs.keys().map(|(_, c)| *c).collect());

    let mut cells = vec![vec![0usize; col_values.len()]; row_values.len()];
    for ((r, c), n) in &pairs {
        cells[row_idx[r]][col_idx[c]] = *n;
    }
    let row_totals: Vec<usize> = cells.iter().map(|row| row.iter().sum()).collect();
    let col_totals: Vec<usize> = (0..col_values.len()).map(|j| cells.iter().map(|row| row[j]).sum()).collect();
    let grand_total = row_totals.iter().sum();
    Ok(CrossTab {
        row_variable: rc.name().to_owned(),
        col_variable: cc.name().to_owned(),
        row_values,
        col_values,
        cells,
        row_totals,
        col_totals,
        grand_total,
        n_excluded,
    })
}

fn index_values(mut vals: Vec<&Value>) -> (Vec<Value>, BTreeMap<&Value, usize>) {
    vals.sort();
    vals.dedup();
    let idx = vals.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    (vals.into_iter().cloned().collect(), idx)
}

pub fn missing_summary(d: &Dataset) -> Vec<MissingSummary> {
    d.columns()
        .iter()
        .map(|c| {
            let n_missing = c.missing_count();
            MissingSummary { variable: c.name().to_owned(), n_valid: c.len() - n_missing, n_missing }
        })
        .collect()
}
