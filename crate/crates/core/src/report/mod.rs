//! Rendering of analysis results: fixed-width text tables and a static HTML
//! site. Output is a pure function of the inputs unless a generation stamp
//! is supplied.

mod html;
mod text;

pub use html::{emit_site, escape_html, page_file_name, ReportError};
pub use text::render_text;

use crate::engine::AnalysisOutput;
use crate::stats::AnalysisResult;

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub heading: String,
    /// Text of the command that produced the result.
    pub source: String,
    pub result: AnalysisResult,
}

impl Section {
    pub fn new(source: impl Into<String>, result: AnalysisResult) -> Section {
        Section { heading: default_heading(&result), source: source.into(), result }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportBundle {
    pub title: String,
    /// In execution order.
    pub sections: Vec<Section>,
    /// Free text shown on every page, typically a timestamp. `None` keeps
    /// the output byte-stable.
    pub generated_stamp: Option<String>,
}

impl ReportBundle {
    pub fn new(title: impl Into<String>) -> ReportBundle {
        ReportBundle { title: title.into(), ..Default::default() }
    }

    pub fn from_outputs(title: impl Into<String>, outputs: &[AnalysisOutput]) -> ReportBundle {
        ReportBundle {
            title: title.into(),
            sections: outputs.iter().map(|o| Section::new(o.command.clone(), o.result.clone())).collect(),
            generated_stamp: None,
        }
    }

    /// All sections as text, separated by blank lines.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&s.heading);
            out.push('\n');
            out.push_str(&render_text(&s.result));
        }
        out
    }
}

fn default_heading(result: &AnalysisResult) -> String {
    match result {
        AnalysisResult::Frequencies(t) => format!("Frequencies: {}", t.variable),
        AnalysisResult::Crosstab(c) => format!("Crosstab: {} by {}", c.row_variable, c.col_variable),
    }
}
