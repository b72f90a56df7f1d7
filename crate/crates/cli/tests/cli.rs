use std::path::Path;
use std::process::{Command, Output};

use tds_core::fixtures::{self, DEFAULT_SEED};

fn tds(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tds")).args(args).current_dir(dir).env("TDS_NO_COLOR", "1").output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fixtures::write_school_csvs(dir.path().join("schools"), DEFAULT_SEED).unwrap();
    std::fs::write(dir.path().join("integrate.tds.sps"), fixtures::pipeline_script("schools", "out")).unwrap();
    dir
}

#[test]
fn no_arguments_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = tds(dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage:"));
}

#[test]
fn unknown_flag_and_missing_operand_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tds(dir.path(), &["run", "--bogus", "x"]).status.code(), Some(1));
    assert_eq!(tds(dir.path(), &["crosstab", "d.csv", "A"]).status.code(), Some(1));
    assert_eq!(tds(dir.path(), &["run", "x", "--format", "pdf"]).status.code(), Some(1));
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let o = tds(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("crosstab"));
    assert_eq!(tds(dir.path(), &["--version"]).status.code(), Some(0));
}

#[test]
fn absent_dataset_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = tds(dir.path(), &["freq", "missing.tds.csv", "X"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.tds.csv"), "{}", stderr(&o));
}

#[test]
fn parse_error_carries_span() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.sps"), "GET FILE='a.csv'.\nRECODE X (\n").unwrap();
    let o = tds(dir.path(), &["run", "bad.sps"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("bad.sps:"), "{err}");
    assert!(err.contains(": error: "), "{err}");
    assert!(!err.contains('\x1b'));
    // identical diagnostics on rerun
    assert_eq!(stderr(&tds(dir.path(), &["run", "bad.sps"])), err);
}

#[test]
fn runtime_error_carries_statement_span() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "X,Y\n1,a\n").unwrap();
    std::fs::write(dir.path().join("s.sps"), "GET FILE='a.csv'.\n\nFREQUENCIES VARIABLES=Z.\n").unwrap();
    let o = tds(dir.path(), &["run", "s.sps"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("s.sps:3:1: error: FREQUENCIES"), "{err}");
    assert!(err.contains('Z'), "{err}");
}

#[test]
fn missing_input_file_in_script() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.sps"), "GET FILE='nowhere.csv'.\n").unwrap();
    let o = tds(dir.path(), &["run", "s.sps"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nowhere.csv"));
}

#[test]
fn run_writes_text_and_site() {
    let dir = fixture_dir();
    let o = tds(dir.path(), &["run", "integrate.tds.sps"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.split('|').map(str::trim).collect::<Vec<_>>() == ["SMK BELAGA, SRWK", "91", "13.2", "13.2", "13.2"]));
    assert!(text.lines().any(|l| l.starts_with("Total") && l.contains("691")));
    let index = std::fs::read_to_string(dir.path().join("report/index.html")).unwrap();
    assert!(index.contains("freq-1.html"));
    assert!(!index.contains("Generated"));
}

#[test]
fn format_selects_outputs() {
    let dir = fixture_dir();
    let o = tds(dir.path(), &["run", "integrate.tds.sps", "--format", "text", "--out", "site"]);
    assert!(o.status.success());
    assert!(!dir.path().join("site").exists());
    let o = tds(dir.path(), &["run", "integrate.tds.sps", "--format", "html", "--out", "site"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(dir.path().join("site/index.html").exists());
}

#[test]
fn strict_mode_only_adds_warnings() {
    let dir = fixture_dir();
    let relaxed = tds(dir.path(), &["run", "integrate.tds.sps", "--out", "a"]);
    let strict = tds(dir.path(), &["run", "integrate.tds.sps", "--out", "b", "--strict"]);
    assert_eq!(strict.status.code(), Some(0));
    assert_eq!(relaxed.stdout, strict.stdout);
    assert!(stderr(&relaxed).is_empty());
    let warnings = stderr(&strict);
    assert!(warnings.lines().all(|l| l.starts_with("integrate.tds.sps:") && l.contains("warning: RECODE SPBT")), "{warnings}");
    assert_eq!(warnings.lines().count(), 2);
    for f in ["index.html", "freq-1.html", "ctab-3.html"] {
        assert_eq!(std::fs::read(dir.path().join("a").join(f)).unwrap(), std::fs::read(dir.path().join("b").join(f)).unwrap());
    }
}

#[test]
fn adhoc_analyses_on_saved_dataset() {
    let dir = fixture_dir();
    assert!(tds(dir.path(), &["run", "integrate.tds.sps", "--format", "text"]).status.success());
    let o = tds(dir.path(), &["freq", "out/DATA_COMBINE.tds.csv", "NUM_FAMILY_MEMBERS", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("Valid 691 / Missing 0"));

    let o = tds(dir.path(), &["crosstab", "out/DATA_COMBINE.sav", "NUM_FAMILY_MEMBERS", "BM_SPM", "--out", "ct", "--stamp", "today"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let page = std::fs::read_to_string(dir.path().join("ct/ctab-1.html")).unwrap();
    assert!(page.contains("<td class=\"grand-total\">691</td>"));
    assert!(page.contains("Generated today"));

    let o = tds(dir.path(), &["freq", "out/DATA_COMBINE.sav", "NOPE"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("NOPE"));
}

#[test]
fn adhoc_analysis_on_plain_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("d.csv"), "A,B\n1,x\n2,x\n,y\n").unwrap();
    let o = tds(dir.path(), &["freq", "d.csv", "a", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Valid 2 / Missing 1"));
}

#[test]
fn info_prints_schema_and_missing() {
    let dir = fixture_dir();
    assert!(tds(dir.path(), &["run", "integrate.tds.sps", "--format", "text"]).status.success());
    let o = tds(dir.path(), &["info", "out/DATA_COMBINE.sav"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Cases: 691"));
    let row = |name: &str| {
        text.lines()
            .find(|l| l.starts_with(&format!("{name} ")))
            .map(|l| l.split('|').map(str::trim).map(str::to_owned).collect::<Vec<_>>())
            .unwrap()
    };
    assert_eq!(row("NUM_FAMILY_MEMBERS"), ["NUM_FAMILY_MEMBERS", "NUMERIC", "691", "0"]);
    assert_eq!(row("PENDO_SPM"), ["PENDO_SPM", "TEXT", "573", "118"]);
}

#[test]
fn malformed_csv_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("r.csv"), "A,B\n1,2\n3\n").unwrap();
    let o = tds(dir.path(), &["info", "r.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r.csv"));
}
