use crate::stats::{AnalysisResult, CrossTab, FrequencyTable};

/// Fixed-width table for one result. Cells are separated by ` | `; the
/// first column is left-aligned and the rest right-aligned.
pub fn render_text(result: &AnalysisResult) -> String {
    match result {
        AnalysisResult::Frequencies(t) => frequency_text(t),
        AnalysisResult::Crosstab(c) => crosstab_text(c),
    }
}

fn frequency_text(t: &FrequencyTable) -> String {
    let mut grid = vec![vec![
        t.variable.clone(),
        "Frequency".into(),
        "Percent".into(),
        "Valid Percent".into(),
        "Cumulative Percent".into(),
    ]];
    for r in &t.rows {
        grid.push(vec![
            r.value.to_string(),
            r.frequency.to_string(),
            r.percent.to_string(),
            r.valid_percent.to_string(),
            r.cumulative_percent.to_string(),
        ]);
    }
    if !t.rows.is_empty() {
        grid.push(vec![
            "Total".into(),
            t.n_valid.to_string(),
            t.valid_total_percent().to_string(),
            crate::stats::Percent::HUNDRED.to_string(),
            String::new(),
        ]);
    }
    let mut out = layout(&grid);
    out.push_str(&format!("Valid {} / Missing {}\n", t.n_valid, t.n_missing));
    out
}

fn crosstab_text(c: &CrossTab) -> String {
    let mut header = vec![format!("{} \\ {}", c.row_variable, c.col_variable)];
    header.extend(c.col_values.iter().map(ToString::to_string));
    header.push("Total".into());
    let mut grid = vec![header];
    for ((value, cells), total) in c.row_values.iter().zip(&c.cells).zip(&c.row_totals) {
        let mut row = vec![value.to_string()];
        row.extend(cells.iter().map(ToString::to_string));
        row.push(total.to_string());
        grid.push(row);
    }
    let mut totals = vec!["Total".to_owned()];
    totals.extend(c.col_totals.iter().map(ToString::to_string));
    totals.push(c.grand_total.to_string());
    grid.push(totals);
    let mut out = layout(&grid);
    if c.n_excluded > 0 {
        out.push_str(&format!("Excluded (missing): {}\n", c.n_excluded));
    }
    out
}

fn layout(grid: &[Vec<String>]) -> String {
    let ncols = grid.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|j| grid.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in grid {
        let used = row.iter().rposition(|s| !s.is_empty()).map_or(0, |i| i + 1);
        let cells: Vec<String> = row[..used]
            .iter()
            .enumerate()
            .map(|(j, s)| if j == 0 { format!("{s:<w$}", w = widths[j]) } else { format!("{s:>w$}", w = widths[j]) })
            .collect();
        out.push_str(cells.join(" | ").trim_end());
        out.push('\n');
    }
    out
}
