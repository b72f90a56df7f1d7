use std::fmt::Write as _;

use super::ast::{Annotation, AnnotationArg, Command, FileRef, Pattern, RecodeSpec, Script, Statement};
use crate::value::{format_number, Value};

/// Canonical text form: one statement per line, keywords upper-case,
/// strings single-quoted. Parsing the output yields an equal script.
pub fn render_script(script: &Script) -> String {
    let mut out = String::new();
    for st in &script.statements {
        out.push_str(&render_statement(st));
        out.push('\n');
    }
    out
}

/// One statement, terminator included, no trailing newline.
pub fn render_statement(st: &Statement) -> String {
    let mut out = String::new();
    match &st.command {
        Command::GetFile { path } => {
            let _ = write!(out, "GET FILE={}", quote(path));
        }
        Command::DatasetName { name } => {
            let _ = write!(out, "DATASET NAME {name}");
        }
        Command::MatchFiles { files, rename } => {
            out.push_str("MATCH FILES");
            for f in files {
                match f {
                    FileRef::Active => out.push_str(" /FILE=*"),
                    FileRef::Path(p) => {
                        let _ = write!(out, " /FILE={}", quote(p));
                    }
                }
            }
            if !rename.is_empty() {
                let (old, new): (Vec<&str>, Vec<&str>) =
                    rename.pairs().iter().map(|(o, n)| (o.as_str(), n.as_str())).unzip();
                let _ = write!(out, " /RENAME ({} = {})", old.join(" "), new.join(" "));
            }
        }
        Command::Recode { vars, spec } => {
            let _ = write!(out, "RECODE {} {}", vars.join(" "), render_recode_spec(spec));
        }
        Command::Execute => out.push_str("EXECUTE"),
        Command::Frequencies { vars } => {
            let _ = write!(out, "FREQUENCIES VARIABLES={}", vars.join(" "));
        }
        Command::Crosstabs { row, col } => {
            let _ = write!(out, "CROSSTABS /TABLES={row} BY {col}");
        }
        Command::SaveOutfile { path } => {
            let _ = write!(out, "SAVE OUTFILE={}", quote(path));
        }
    }
    for a in &st.annotations {
        out.push(' ');
        out.push_str(&render_annotation(a));
    }
    out.push('.');
    out
}

pub fn render_recode_spec(spec: &RecodeSpec) -> String {
    spec.rules()
        .iter()
        .map(|r| {
            let source = match &r.pattern {
                Pattern::Exact(v) => render_value(v),
                Pattern::Range { lo, hi } => format!("{} THRU {}", format_number(*lo), format_number(*hi)),
                Pattern::LowestThru(hi) => format!("LOWEST THRU {}", format_number(*hi)),
                Pattern::ThruHighest(lo) => format!("{} THRU HIGHEST", format_number(*lo)),
            };
            format!("({source}={})", render_value(&r.target))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Number(x) => format_number(*x),
        Value::Text(s) => quote(s),
        // RecodeSpec rejects missing values; nothing else renders one.
        Value::Missing => "SYSMIS".to_owned(),
    }
}

fn render_annotation(a: &Annotation) -> String {
    let mut out = String::new();
    if a.slash {
        out.push('/');
    }
    out.push_str(&a.name);
    if a.equals {
        out.push('=');
    }
    let args: Vec<String> = a
        .args
        .iter()
        .map(|arg| match arg {
            AnnotationArg::Word(w) => w.clone(),
            AnnotationArg::Number(x) => format_number(*x),
            AnnotationArg::Str(s) => quote(s),
            AnnotationArg::Star => "*".into(),
            AnnotationArg::LParen => "(".into(),
            AnnotationArg::RParen => ")".into(),
            AnnotationArg::Equals => "=".into(),
        })
        .collect();
    if !args.is_empty() {
        if !a.equals {
            out.push(' ');
        }
        out.push_str(&args.join(" "));
    }
    out
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}
