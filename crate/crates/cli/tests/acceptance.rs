//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always shown: `cargo test -p tds-cli --test acceptance`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command as Process;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

use tds_core::engine::ExecOptions;
use tds_core::fixtures::{self, DEFAULT_SEED, FAMILY6_BM, SCHOOLS, SYNTAX_CORPUS};
use tds_core::report::page_file_name;
use tds_core::script::{parse_recode_spec, tokenize, Pattern, RecodeRule};
use tds_core::{
    crosstab, exec_recode, execute_script, frequencies, load_dataset, missing_summary, parse_script, recode_value,
    render_script, save_dataset, AnalysisResult, ColumnType, Command, Dataset, Environment, Percent, RecodeSpec,
    RenameMap, ReportBundle, Value,
};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn corpus_recode(variable: &str) -> RecodeSpec {
    let (_, text) = SYNTAX_CORPUS.iter().find(|(n, _)| *n == "convert").expect("convert snippet");
    let script = parse_script(text).expect("convert snippet parses");
    let spec = script.commands().find_map(|c| match c {
        Command::Recode { vars, spec } if vars.iter().any(|v| v == variable) => Some(spec.clone()),
        _ => None,
    });
    spec.expect("recode present")
}

fn integrated() -> Dataset {
    let mut schools = fixtures::school_datasets(DEFAULT_SEED).into_iter();
    let first = schools.next().unwrap();
    schools.fold(first, |acc, d| acc.append_cases(&d, &RenameMap::empty()).unwrap())
}

fn grade_categorization() -> Outcome {
    let spec = corpus_recode("BM_SPM");
    let got: Vec<Value> = fixtures::GRADES.iter().map(|g| recode_value(&Value::text(*g), &spec)).collect();
    let expected: Vec<Value> = [1, 1, 2, 2, 3, 3, 4, 4, 5].into_iter().map(Value::from).collect();
    ensure!(got == expected, "got {got:?}");
    Ok(())
}

fn income_binning() -> Outcome {
    let spec = corpus_recode("FAMILY_INCOME");
    let cases = [(500, 1), (501, 2), (1000, 2), (1001, 3), (1800, 3), (2001, 4), (3001, 5), (5000, 5), (5001, 6)];
    for (income, class) in cases {
        let got = recode_value(&Value::from(income), &spec);
        ensure!(got == Value::from(class), "{income} -> {got}, expected {class}");
    }
    Ok(())
}

fn integration_count() -> Outcome {
    let d = integrated();
    ensure!(d.n_cases() == 691, "N = {}", d.n_cases());
    let t = frequencies(&d, "SCHOOLS").map_err(|e| e.to_string())?;
    let expected = ["13.2", "13.3", "14.5", "14.0", "13.6", "17.1", "14.3"];
    ensure!(t.rows.len() == 7, "{} schools", t.rows.len());
    for ((row, (name, n)), pct) in t.rows.iter().zip(SCHOOLS).zip(expected) {
        ensure!(row.value == Value::text(name), "value {} vs {name}", row.value);
        ensure!(row.frequency == n, "{name}: {} cases", row.frequency);
        ensure!(row.percent.to_string() == pct, "{name}: {} vs {pct}", row.percent);
    }
    ensure!(t.valid_total_percent().to_string() == "100.0", "total {}", t.valid_total_percent());
    Ok(())
}

fn crosstab_fixture() -> Outcome {
    let d = integrated();
    let ct = crosstab(&d, "NUM_FAMILY_MEMBERS", "BM_SPM").map_err(|e| e.to_string())?;
    let six = Value::from(6);
    for (grade, n) in FAMILY6_BM {
        let got = ct.count(&six, &Value::text(grade));
        ensure!(got == n, "6 x {grade}: {got}, expected {n}");
    }
    let i = ct.row_values.iter().position(|v| *v == six).ok_or("no family-size-6 row")?;
    ensure!(ct.row_totals[i] == 91, "row total {}", ct.row_totals[i]);
    let others: usize = ct.col_values.iter().filter(|g| !FAMILY6_BM.iter().any(|(b, _)| Value::text(*b) == **g)).map(|g| ct.count(&six, g)).sum();
    ensure!(others == 0, "{others} family-size-6 cases outside the listed grades");
    Ok(())
}

fn missing_report() -> Outcome {
    let d = integrated();
    let s = missing_summary(&d);
    let fam = s.iter().find(|s| s.variable == "NUM_FAMILY_MEMBERS").ok_or("no NUM_FAMILY_MEMBERS")?;
    ensure!(fam.n_valid == 691 && fam.n_missing == 0, "valid {} missing {}", fam.n_valid, fam.n_missing);
    Ok(())
}

fn random_dataset(rng: &mut ChaCha8Rng, max_cases: usize) -> Dataset {
    let n = rng.gen_range(0..=max_cases);
    let n_cols = rng.gen_range(2..=4);
    let columns: Vec<(String, ColumnType, Vec<Value>)> = (0..n_cols)
        .map(|j| {
            let numeric = rng.gen_bool(0.5);
            let distinct = rng.gen_range(1..=10);
            let pool: Vec<Value> = (0..distinct)
                .map(|k| {
                    if numeric {
                        Value::number(f64::from(rng.gen_range(-50..50)) / if k % 2 == 0 { 1.0 } else { 4.0 })
                    } else {
                        Value::text(["YA", "TIDAK", "A/L", "x,y", "\"q\"", "", "12", "Ç"][rng.gen_range(0..8)].to_owned() + &k.to_string())
                    }
                })
                .collect();
            let missing_rate = rng.gen_range(0.0..=0.1);
            let values = (0..n)
                .map(|_| if rng.gen_bool(missing_rate) { Value::Missing } else { pool.choose(rng).unwrap().clone() })
                .collect();
            (format!("V{j}"), if numeric { ColumnType::Numeric } else { ColumnType::Text }, values)
        })
        .collect();
    Dataset::build("R", columns).unwrap()
}

fn brute_force_counts(vals: &[&Value]) -> Vec<(Value, usize)> {
    let mut out: Vec<(Value, usize)> = Vec::new();
    for v in vals.iter().filter(|v| !v.is_missing()) {
        match out.iter_mut().find(|(u, _)| u == *v) {
            Some(e) => e.1 += 1,
            None => out.push(((*v).clone(), 1)),
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for round in 0..120 {
        let d = random_dataset(&mut rng, 1000);
        let a = d.column("V0").unwrap().values();
        let b = d.column("V1").unwrap().values();
        let t = frequencies(&d, "V0").unwrap();
        let oracle = brute_force_counts(&a.iter().collect::<Vec<_>>());
        let got: Vec<(Value, usize)> = t.rows.iter().map(|r| (r.value.clone(), r.frequency)).collect();
        ensure!(got == oracle, "round {round}: frequencies differ");
        ensure!(t.n_missing == a.iter().filter(|v| v.is_missing()).count(), "round {round}: missing count");
        for r in &t.rows {
            // within half a tenth of the exact ratio
            let err = (1000 * r.frequency as i64 - r.valid_percent.tenths() as i64 * t.n_valid as i64).abs();
            ensure!(2 * err <= t.n_valid as i64, "round {round}: valid percent {}", r.valid_percent);
        }

        let ct = crosstab(&d, "V0", "V1").unwrap();
        let pairs: Vec<(&Value, &Value)> = a.iter().zip(b).filter(|(x, y)| !x.is_missing() && !y.is_missing()).collect();
        ensure!(ct.grand_total == pairs.len(), "round {round}: grand total");
        ensure!(ct.n_excluded == d.n_cases() - pairs.len(), "round {round}: excluded");
        let rows = brute_force_counts(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
        let cols = brute_force_counts(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
        ensure!(ct.row_values == rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>(), "round {round}: row values");
        ensure!(ct.col_values == cols.iter().map(|c| c.0.clone()).collect::<Vec<_>>(), "round {round}: col values");
        for (i, (rv, rn)) in rows.iter().enumerate() {
            ensure!(ct.row_totals[i] == *rn, "round {round}: row total");
            for (j, (cv, _)) in cols.iter().enumerate() {
                let n = pairs.iter().filter(|(x, y)| *x == rv && *y == cv).count();
                ensure!(ct.cells[i][j] == n, "round {round}: cell ({rv}, {cv}) = {} vs {n}", ct.cells[i][j]);
            }
        }
        for (j, (_, cn)) in cols.iter().enumerate() {
            ensure!(ct.col_totals[j] == *cn, "round {round}: col total");
        }
        ensure!(crosstab(&d, "V1", "V0").unwrap() == ct.transpose(), "round {round}: transpose");
    }
    Ok(())
}

fn parser_golden_corpus() -> Outcome {
    for (name, text) in SYNTAX_CORPUS {
        let script = parse_script(text).map_err(|e| format!("{name}: {e}"))?;
        let rendered = render_script(&script);
        let again = parse_script(&rendered).map_err(|e| format!("{name} re-parse: {e}"))?;
        ensure!(script == again, "{name}: AST changed after render");
    }
    Ok(())
}

fn persistence_round_trip() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for round in 0..100 {
        let d = random_dataset(&mut rng, 200);
        let path = dir.path().join(format!("d{round}.sav"));
        save_dataset(&d, &path).map_err(|e| e.to_string())?;
        let back = load_dataset(&path).map_err(|e| e.to_string())?;
        ensure!(back == d, "round {round}: dataset changed");
    }
    Ok(())
}

fn recode_totality_and_idempotence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let specs = [corpus_recode("FAMILY_INCOME"), corpus_recode("SPBT"), corpus_recode("BM_SPM")];
    let mut probes = vec![Value::Missing, Value::number(f64::NAN), Value::text(""), Value::number(-0.0), Value::number(1e300)];
    probes.extend((0..500).map(|_| match rng.gen_range(0..3) {
        0 => Value::number(rng.gen_range(-10_000.0..10_000.0)),
        1 => Value::text(["YA", "TIDAK", "ya", "2A", "9G", "1A "][rng.gen_range(0..6)]),
        _ => Value::from(rng.gen_range(0..6000)),
    }));
    for spec in &specs {
        for v in &probes {
            let out = catch_unwind(|| recode_value(v, spec)).map_err(|_| format!("recode_value panicked on {v:?}"))?;
            if v.is_missing() {
                ensure!(out.is_missing(), "missing became {out}");
            }
        }
    }

    let spbt = parse_recode_spec(&tokenize("('YA'=1) (TIDAK=2)").unwrap()).map_err(|e| e.to_string())?;
    ensure!(spbt == specs[1], "SPBT spec differs from the corpus");
    let d = integrated();
    let once = exec_recode(&d, &["SPBT"], &spbt).map_err(|e| e.to_string())?;
    let twice = exec_recode(&once, &["SPBT"], &spbt).map_err(|e| e.to_string())?;
    ensure!(once == twice, "SPBT recode not idempotent");

    let grade_rules = specs[2].rules().to_vec();
    let reference = exec_recode(&d, &["BI_SPM"], &specs[2]).map_err(|e| e.to_string())?;
    for _ in 0..100 {
        let mut shuffled: Vec<RecodeRule> = grade_rules.clone();
        shuffled.shuffle(&mut rng);
        let spec = RecodeSpec::new(shuffled).map_err(|e| e.to_string())?;
        let got = exec_recode(&d, &["BI_SPM"], &spec).map_err(|e| e.to_string())?;
        ensure!(got == reference, "grade recode depends on rule order");
    }
    // disjoint numeric ranges
    let ranges: Vec<RecodeRule> = (0..6)
        .map(|k| RecodeRule { pattern: Pattern::Range { lo: f64::from(k * 1000), hi: f64::from(k * 1000 + 999) }, target: Value::from(k) })
        .collect();
    let base = exec_recode(&d, &["FAMILY_INCOME"], &RecodeSpec::new(ranges.clone()).unwrap()).unwrap();
    for _ in 0..100 {
        let mut shuffled = ranges.clone();
        shuffled.shuffle(&mut rng);
        let got = exec_recode(&d, &["FAMILY_INCOME"], &RecodeSpec::new(shuffled).unwrap()).unwrap();
        ensure!(got == base, "range recode depends on rule order");
    }
    Ok(())
}

fn site_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn cells(html: &str, class: &str) -> Vec<String> {
    let re = Regex::new(&format!(r#"<td class="{class}">([^<]*)</td>"#)).unwrap();
    re.captures_iter(html).map(|c| c[1].to_owned()).collect()
}

fn end_to_end_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    fixtures::write_school_csvs(dir.path().join("schools"), DEFAULT_SEED).map_err(|e| e.to_string())?;
    let script_text = fixtures::pipeline_script("schools", "out");
    std::fs::write(dir.path().join("integrate.tds.sps"), &script_text).map_err(|e| e.to_string())?;
    for site in ["site1", "site2"] {
        let status = Process::new(env!("CARGO_BIN_EXE_tds"))
            .args(["run", "integrate.tds.sps", "--format", "html", "--stamp", "2026-01-01", "--out", site])
            .current_dir(dir.path())
            .env("TDS_NO_COLOR", "1")
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(status.status.success(), "run failed: {}", String::from_utf8_lossy(&status.stderr));
    }
    let a = site_files(&dir.path().join("site1"));
    let b = site_files(&dir.path().join("site2"));
    ensure!(a == b, "sites differ between runs");

    let mut env = Environment::with_options(ExecOptions { strict: false, base_dir: Some(dir.path().to_owned()) });
    execute_script(&parse_script(&script_text).unwrap(), &mut env).map_err(|e| e.to_string())?;
    let bundle = ReportBundle::from_outputs("x", env.outputs());
    ensure!(a.len() == bundle.sections.len() + 1, "{} files for {} sections", a.len(), bundle.sections.len());
    for (i, s) in bundle.sections.iter().enumerate() {
        let name = page_file_name(i, s);
        let html = String::from_utf8(a.get(&name).ok_or(format!("missing {name}"))?.clone()).unwrap();
        ensure!(html.contains("2026-01-01"), "{name}: stamp missing");
        match &s.result {
            AnalysisResult::Frequencies(t) => {
                let col = |f: fn(&tds_core::stats::FrequencyRow) -> String| t.rows.iter().map(f).collect::<Vec<_>>();
                ensure!(cells(&html, "frequency") == col(|r| r.frequency.to_string()), "{name}: frequencies");
                ensure!(cells(&html, "percent") == col(|r| r.percent.to_string()), "{name}: percents");
                ensure!(cells(&html, "valid-percent") == col(|r| r.valid_percent.to_string()), "{name}: valid percents");
                ensure!(
                    cells(&html, "cumulative-percent") == col(|r| r.cumulative_percent.to_string()),
                    "{name}: cumulative percents"
                );
                ensure!(cells(&html, "total-frequency") == [t.n_valid.to_string()], "{name}: total");
                ensure!(html.contains(&format!("<span class=\"n-missing\">{}</span>", t.n_missing)), "{name}: missing");
            }
            AnalysisResult::Crosstab(c) => {
                let flat: Vec<String> = c.cells.iter().flatten().map(ToString::to_string).collect();
                ensure!(cells(&html, "cell") == flat, "{name}: cells");
                ensure!(cells(&html, "row-total") == c.row_totals.iter().map(ToString::to_string).collect::<Vec<_>>(), "{name}: row totals");
                ensure!(cells(&html, "col-total") == c.col_totals.iter().map(ToString::to_string).collect::<Vec<_>>(), "{name}: col totals");
                ensure!(cells(&html, "grand-total") == [c.grand_total.to_string()], "{name}: grand total");
            }
        }
    }
    // the school page carries the integrated total
    let school = String::from_utf8(a["freq-1.html"].clone()).unwrap();
    ensure!(cells(&school, "total-frequency") == ["691"], "school total");
    ensure!(cells(&school, "total-percent") == [Percent::HUNDRED.to_string()], "school total percent");
    Ok(())
}

fn main() -> std::process::ExitCode {
    let criteria: [Criterion; 10] = [
        ("grade categorization exactness", grade_categorization),
        ("income binning", income_binning),
        ("integration count", integration_count),
        ("crosstab fixture", crosstab_fixture),
        ("missing report", missing_report),
        ("oracle equivalence", oracle_equivalence),
        ("parser golden corpus", parser_golden_corpus),
        ("persistence round-trip", persistence_round_trip),
        ("recode totality and idempotence", recode_totality_and_idempotence),
        ("end-to-end determinism", end_to_end_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| (*s).to_owned())).unwrap_or_default())
        });
        match outcome {
            Ok(()) => println!("criterion {:>2} {title}: PASS", i + 1),
            Err(why) => {
                println!("criterion {:>2} {title}: FAIL ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
