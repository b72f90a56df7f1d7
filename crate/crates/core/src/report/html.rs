use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{ReportBundle, Section};
use crate::stats::{AnalysisResult, CrossTab, FrequencyTable, Percent};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

const STYLE: &str = "body{font-family:sans-serif;margin:2em}\
table{border-collapse:collapse}\
th,td{border:1px solid #999;padding:0.2em 0.6em}\
td.num,td.frequency,td.percent,td.valid-percent,td.cumulative-percent{text-align:right}\
caption{font-weight:bold;margin-bottom:0.4em}\
pre.source{background:#f4f4f4;padding:0.6em}";

/// Escapes text for element content and attribute values.
pub fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// `<kind>-<sequence>.html`, sequence being the 1-based section position.
pub fn page_file_name(index: usize, section: &Section) -> String {
    let kind = match section.result {
        AnalysisResult::Frequencies(_) => "freq",
        AnalysisResult::Crosstab(_) => "ctab",
    };
    format!("{kind}-{}.html", index + 1)
}

/// Writes `index.html` and one page per section into `out_dir`, creating
/// it if needed. Returns the written paths, index first.
pub fn emit_site(bundle: &ReportBundle, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, ReportError> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|source| ReportError::Io { path: out_dir.to_owned(), source })?;
    let mut files = vec![("index.html".to_owned(), index_page(bundle))];
    for (i, s) in bundle.sections.iter().enumerate() {
        files.push((page_file_name(i, s), section_page(bundle, s)));
    }
    let mut written = Vec::with_capacity(files.len());
    for (name, body) in files {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|source| ReportError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}

fn page(title: &str, stamp: Option<&str>, body: &str) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\"/>\n");
    let _ = writeln!(out, "<title>{}</title>", escape_html(title));
    let _ = writeln!(out, "<style>{STYLE}</style>");
    out.push_str("</head>\n<body>\n");
    out.push_str(body);
    if let Some(stamp) = stamp {
        let _ = writeln!(out, "<p class=\"stamp\">Generated {}</p>", escape_html(stamp));
    }
    out.push_str("</body>\n</html>\n");
    out
}

fn index_page(bundle: &ReportBundle) -> String {
    let mut body = String::new();
    let _ = writeln!(body, "<h1>{}</h1>", escape_html(&bundle.title));
    if bundle.sections.is_empty() {
        body.push_str("<p>No analyses.</p>\n");
    } else {
        body.push_str("<ol class=\"sections\">\n");
        for (i, s) in bundle.sections.iter().enumerate() {
            let _ = writeln!(body, "<li><a href=\"{}\">{}</a></li>", page_file_name(i, s), escape_html(&s.heading));
        }
        body.push_str("</ol>\n");
    }
    page(&bundle.title, bundle.generated_stamp.as_deref(), &body)
}

fn section_page(bundle: &ReportBundle, s: &Section) -> String {
    let mut body = String::new();
    let _ = writeln!(body, "<p><a href=\"index.html\">{}</a></p>", escape_html(&bundle.title));
    let _ = writeln!(body, "<h1>{}</h1>", escape_html(&s.heading));
    match &s.result {
        AnalysisResult::Frequencies(t) => frequency_table(&mut body, t),
        AnalysisResult::Crosstab(c) => crosstab_table(&mut body, c),
    }
    body.push_str("<h2>Command</h2>\n");
    let _ = writeln!(body, "<pre class=\"source\">{}</pre>", escape_html(&s.source));
    page(&s.heading, bundle.generated_stamp.as_deref(), &body)
}

fn td(out: &mut String, class: &str, text: impl std::fmt::Display) {
    let _ = write!(out, "<td class=\"{class}\">{}</td>", escape_html(&text.to_string()));
}

fn frequency_table(out: &mut String, t: &FrequencyTable) {
    out.push_str("<table class=\"frequencies\">\n");
    let _ = writeln!(out, "<caption>{}</caption>", escape_html(&t.variable));
    out.push_str(
        "<thead><tr><th>Value</th><th>Frequency</th><th>Percent</th>\
         <th>Valid Percent</th><th>Cumulative Percent</th></tr></thead>\n<tbody>\n",
    );
    for r in &t.rows {
        out.push_str("<tr>");
        td(out, "value", &r.value);
        td(out, "frequency", r.frequency);
        td(out, "percent", r.percent);
        td(out, "valid-percent", r.valid_percent);
        td(out, "cumulative-percent", r.cumulative_percent);
        out.push_str("</tr>\n");
    }
    out.push_str("</tbody>\n");
    if !t.rows.is_empty() {
        out.push_str("<tfoot><tr><th>Total</th>");
        td(out, "total-frequency", t.n_valid);
        td(out, "total-percent", t.valid_total_percent());
        td(out, "total-valid-percent", Percent::HUNDRED);
        out.push_str("<td></td></tr></tfoot>\n");
    }
    out.push_str("</table>\n");
    let _ = writeln!(
        out,
        "<p class=\"summary\">Valid <span class=\"n-valid\">{}</span> / Missing <span class=\"n-missing\">{}</span></p>",
        t.n_valid, t.n_missing
    );
}

fn crosstab_table(out: &mut String, c: &CrossTab) {
    out.push_str("<table class=\"crosstab\">\n");
    let _ = writeln!(out, "<caption>{} by {}</caption>", escape_html(&c.row_variable), escape_html(&c.col_variable));
    let _ = write!(out, "<thead><tr><th>{} \\ {}</th>", escape_html(&c.row_variable), escape_html(&c.col_variable));
    for v in &c.col_values {
        let _ = write!(out, "<th class=\"col-value\">{}</th>", escape_html(&v.to_string()));
    }
    out.push_str("<th>Total</th></tr></thead>\n<tbody>\n");
    for ((value, cells), total) in c.row_values.iter().zip(&c.cells).zip(&c.row_totals) {
        let _ = write!(out, "<tr><th class=\"row-value\">{}</th>", escape_html(&value.to_string()));
        for n in cells {
            td(out, "cell", n);
        }
        td(out, "row-total", total);
        out.push_str("</tr>\n");
    }
    out.push_str("</tbody>\n<tfoot><tr><th>Total</th>");
    for n in &c.col_totals {
        td(out, "col-total", n);
    }
    td(out, "grand-total", c.grand_total);
    out.push_str("</tr></tfoot>\n</table>\n");
    let _ = writeln!(out, "<p class=\"summary\">Excluded (missing): <span class=\"n-excluded\">{}</span></p>", c.n_excluded);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{crosstab, frequencies};
    use crate::table::Dataset;
    use crate::value::{ColumnType, Value};

    fn bundle() -> ReportBundle {
        let d = Dataset::build(
            "D",
            [
                ("NAME", ColumnType::Text, vec![Value::text("A/L <b>&\"x\""), Value::text("Ç")]),
                ("N", ColumnType::Numeric, vec![Value::number(1.0), Value::number(2.0)]),
            ],
        )
        .unwrap();
        let mut b = ReportBundle::new("Report <1>");
        b.sections.push(Section::new("FREQUENCIES VARIABLES=NAME.", AnalysisResult::Frequencies(frequencies(&d, "NAME").unwrap())));
        b.sections.push(Section::new("CROSSTABS /TABLES=N BY NAME.", AnalysisResult::Crosstab(crosstab(&d, "N", "NAME").unwrap())));
        b
    }

    #[test]
    fn escaping() {
        assert_eq!(escape_html("<a href='x'>&\"</a>"), "&lt;a href=&#39;x&#39;&gt;&amp;&quot;&lt;/a&gt;");
    }

    #[test]
    fn file_set_and_escaped_cells() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_site(&bundle(), dir.path()).unwrap();
        let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
        assert_eq!(names, ["index.html", "freq-1.html", "ctab-2.html"]);
        let freq = fs::read_to_string(dir.path().join("freq-1.html")).unwrap();
        assert!(freq.contains("A/L &lt;b&gt;&amp;&quot;x&quot;"));
        assert!(!freq.contains("<b>"));
        assert!(!freq.contains("<script"));
        let index = fs::read_to_string(dir.path().join("index.html")).unwrap();
        assert!(index.contains("<title>Report &lt;1&gt;</title>"));
        assert!(index.contains("href=\"ctab-2.html\""));
    }

    #[test]
    fn empty_bundle_writes_index_only() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_site(&ReportBundle::new("t"), dir.path()).unwrap();
        assert_eq!(files, vec![dir.path().join("index.html")]);
    }

    #[test]
    fn unwritable_directory() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        assert!(matches!(emit_site(&ReportBundle::new("t"), blocker.join("sub")), Err(ReportError::Io { .. })));
    }

    #[test]
    fn stamp_is_only_source_of_variation() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        emit_site(&bundle(), a.path()).unwrap();
        emit_site(&bundle(), b.path()).unwrap();
        for f in ["index.html", "freq-1.html", "ctab-2.html"] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
        }
        let mut stamped = bundle();
        stamped.generated_stamp = Some("2024-01-01".into());
        emit_site(&stamped, b.path()).unwrap();
        assert!(fs::read_to_string(b.path().join("index.html")).unwrap().contains("Generated 2024-01-01"));
    }
}
