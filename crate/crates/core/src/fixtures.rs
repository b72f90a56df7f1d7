//! Deterministic synthetic survey data: seven school files with the
//! per-school case counts of the original study, plus the script that
//! integrates and recodes them.
//!
//! The files are deliberately heterogeneous: column order differs between
//! schools, one school spells some headers in lower case, one carries an
//! extra `TUISYEN` column and one has no `PENDO_SPM` column at all.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::table::Dataset;
use crate::value::{ColumnType, Value};

pub const DEFAULT_SEED: u64 = 691;

/// School name (as stored in the `SCHOOLS` column) and case count.
pub const SCHOOLS: [(&str, usize); 7] = [
    ("SMK BELAGA, SRWK", 91),
    ("SMK INDERAPURA, PHG", 92),
    ("SMK KEPALA BATAS, KDH", 100),
    ("SMK KUALA KETIL, KDH", 97),
    ("SMK MARANG, TRG", 94),
    ("SMK SAMA GAGAH, PG", 118),
    ("SMK TENGGU IDRIS, SLGR", 99),
];

pub const TOTAL_CASES: usize = 691;

pub const GRADES: [&str; 9] = ["1A", "2A", "3B", "4B", "5C", "6C", "7D", "8E", "9G"];

pub const SUBJECTS: [&str; 7] = ["BM_SPM", "BI_SPM", "PI_SPM", "SEJ_SPM", "MAT_SPM", "SCI_SPM", "PENDO_SPM"];

/// BM grades of the family-size-6 group, across all schools.
pub const FAMILY6_BM: [(&str, usize); 8] =
    [("2A", 2), ("3B", 3), ("4B", 5), ("5C", 5), ("6C", 6), ("7D", 28), ("8E", 18), ("9G", 24)];

/// Columns of a school file before per-school variation.
pub const BASE_COLUMNS: [&str; 14] = [
    "SCHOOLS",
    "RESPONDENT_NAME",
    "NUM_FAMILY_MEMBERS",
    "NUM_FAMILY_MEMBERS_LEARN",
    "NUM_FAMILY_MEMBERS_RECEIVE_SPBT",
    "FAMILY_INCOME",
    "SPBT",
    "BM_SPM",
    "BI_SPM",
    "PI_SPM",
    "SEJ_SPM",
    "MAT_SPM",
    "SCI_SPM",
    "PENDO_SPM",
];

/// Income values that sit on or next to recode boundaries.
const EDGE_INCOMES: [f64; 9] = [500.0, 501.0, 1000.0, 1001.0, 2000.0, 2001.0, 3001.0, 5000.0, 5001.0];

const MID_SIZES: [u32; 6] = [3, 4, 5, 7, 8, 9];

const GIVEN: [&str; 12] = [
    "MOHAMAD", "MUHAMMAD", "NUR", "SITI", "CHEW", "YUVANESWARAN", "AHMAD", "NASRUL", "WAN", "ZAINI", "HUNG", "AISYAH",
];
const MIDDLE: [&str; 6] = ["SHAFIE", "FARID", "HUANG", "AMIRUDDIN", "SYAMIL", "ZULAIKHA"];
const LINK: [&str; 4] = ["B", "BT", "A/L", "A/P"];
const FAMILY: [&str; 8] = ["ABD RAHMAN", "KASIM", "ZAKARIAH", "SIVALINGAM", "OMAR", "HASHIM", "RODZI", "MUNIANDY"];

struct Respondent {
    school: usize,
    name: String,
    family: u32,
    learn: u32,
    spbt_count: u32,
    income: f64,
    spbt: &'static str,
    grades: [&'static str; 7],
    tuition: &'static str,
}

fn respondents(seed: u64) -> Vec<Respondent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Which of the 691 cases belong to the family-size-6 group, and their BM grade.
    let mut family6: Vec<Option<&'static str>> = FAMILY6_BM
        .iter()
        .flat_map(|(g, n)| std::iter::repeat(Some(*g)).take(*n))
        .collect();
    family6.resize(TOTAL_CASES, None);
    family6.shuffle(&mut rng);

    let other_sizes: Vec<u32> = (0..=13).filter(|&s| s != 6).collect();
    let mut out = Vec::with_capacity(TOTAL_CASES);
    let mut slot = 0;
    for (school, &(_, n)) in SCHOOLS.iter().enumerate() {
        for _ in 0..n {
            let bm6 = family6[slot];
            slot += 1;
            let family = match bm6 {
                Some(_) => 6,
                // Mostly mid-sized families, occasionally the extremes.
                None if rng.gen_bool(0.85) => *MID_SIZES.choose(&mut rng).expect("nonempty"),
                None => *other_sizes.choose(&mut rng).expect("nonempty"),
            };
            let learn = rng.gen_range(0..=family.min(7));
            let spbt_count = rng.gen_range(0..=learn);
            let income = if rng.gen_bool(0.15) {
                *EDGE_INCOMES.choose(&mut rng).expect("nonempty")
            } else {
                f64::from(rng.gen_range(8..=130u32) * 50)
            };
            let mut grades = [""; 7];
            for g in grades.iter_mut() {
                *g = GRADES.choose(&mut rng).expect("nonempty");
            }
            if let Some(bm) = bm6 {
                grades[0] = bm;
            } else if grades[0] == "1A" && rng.gen_bool(0.5) {
                // keep 1A rarer, as in typical results
                grades[0] = "5C";
            }
            let name = format!(
                "{} {} {} {}",
                GIVEN.choose(&mut rng).expect("nonempty"),
                MIDDLE.choose(&mut rng).expect("nonempty"),
                LINK.choose(&mut rng).expect("nonempty"),
                FAMILY.choose(&mut rng).expect("nonempty"),
            );
            out.push(Respondent {
                school,
                name,
                family,
                learn,
                spbt_count,
                income,
                spbt: if rng.gen_bool(0.8) { "YA" } else { "TIDAK" },
                grades,
                tuition: if rng.gen_bool(0.3) { "YA" } else { "TIDAK" },
            });
        }
    }
    out
}

fn cell(r: &Respondent, column: &str) -> Value {
    match column {
        "SCHOOLS" => Value::text(SCHOOLS[r.school].0),
        "RESPONDENT_NAME" => Value::text(r.name.clone()),
        "NUM_FAMILY_MEMBERS" => Value::number(f64::from(r.family)),
        "NUM_FAMILY_MEMBERS_LEARN" => Value::number(f64::from(r.learn)),
        "NUM_FAMILY_MEMBERS_RECEIVE_SPBT" => Value::number(f64::from(r.spbt_count)),
        "FAMILY_INCOME" => Value::number(r.income),
        "SPBT" => Value::text(r.spbt),
        "TUISYEN" => Value::text(r.tuition),
        subject => {
            let i = SUBJECTS.iter().position(|s| *s == subject).expect("known column");
            Value::text(r.grades[i])
        }
    }
}

/// Column headers (in file order) for school `i`.
pub fn school_columns(i: usize) -> Vec<String> {
    let mut cols: Vec<String> = BASE_COLUMNS.iter().map(|s| (*s).to_owned()).collect();
    // Rotate everything after SCHOOLS/RESPONDENT_NAME so files disagree on order.
    cols[2..].rotate_left(i % 5);
    match i {
        2 => {
            for c in cols.iter_mut().filter(|c| *c == "SPBT" || *c == "FAMILY_INCOME") {
                *c = c.to_lowercase();
            }
        }
        4 => cols.push("TUISYEN".into()),
        5 => cols.retain(|c| c != "PENDO_SPM"),
        _ => {}
    }
    cols
}

fn column_type(column: &str) -> ColumnType {
    match column.to_uppercase().as_str() {
        "NUM_FAMILY_MEMBERS" | "NUM_FAMILY_MEMBERS_LEARN" | "NUM_FAMILY_MEMBERS_RECEIVE_SPBT" | "FAMILY_INCOME" => {
            ColumnType::Numeric
        }
        _ => ColumnType::Text,
    }
}

/// The seven school datasets, in [`SCHOOLS`] order.
pub fn school_datasets(seed: u64) -> Vec<Dataset> {
    let people = respondents(seed);
    (0..SCHOOLS.len())
        .map(|i| {
            let rows: Vec<&Respondent> = people.iter().filter(|r| r.school == i).collect();
            let columns = school_columns(i).into_iter().map(|c| {
                let values = rows.iter().map(|r| cell(r, &c.to_uppercase())).collect();
                let ty = column_type(&c);
                (c, ty, values)
            });
            Dataset::build(SCHOOLS[i].0, columns).expect("fixture columns are consistent")
        })
        .collect()
}

/// File name used for school `i`, e.g. `SMK BELAGA, SRWK.csv`.
pub fn school_file_name(i: usize) -> String {
    format!("{}.csv", SCHOOLS[i].0)
}

/// Writes the seven school CSV files into `dir`; returns their paths.
pub fn write_school_csvs(dir: impl AsRef<Path>, seed: u64) -> io::Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    school_datasets(seed)
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let path = dir.join(school_file_name(i));
            fs::write(&path, to_csv(d))?;
            Ok(path)
        })
        .collect()
}

/// Plain CSV rendering (header row, LF endings, empty field for missing).
pub fn to_csv(d: &Dataset) -> String {
    let mut out = String::new();
    let quote = |s: &str| {
        if s.contains([',', '"', '\n', '\r']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_owned()
        }
    };
    out.push_str(&d.column_names().map(quote).collect::<Vec<_>>().join(","));
    out.push('\n');
    for i in 0..d.n_cases() {
        let row: Vec<String> = d
            .row(i)
            .iter()
            .map(|v| match v {
                Value::Missing => String::new(),
                other => quote(&other.to_string()),
            })
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

const GRADE_RULES: &str = "('1A'=1) (2A=1) (3B=2) (4B=2) (5C=3) (6C=3) (7D=4) (8E=4) (9G=5)";
const INCOME_RULES: &str =
    "(Lowest thru 500=1) (501 thru 1000=2) (1001 thru 2000=3) (2001 thru 3000=4) (3001 thru 5000=5) (5000 thru Highest=6)";

/// Full pipeline script over the school files in `school_dir`, saving into
/// `out_dir` (both as written in the script, relative or absolute).
pub fn pipeline_script(school_dir: &str, out_dir: &str) -> String {
    let mut s = String::new();
    s.push_str("# Integrate the seven school files into one dataset.\n");
    s.push_str(&format!("GET\nFILE='{school_dir}/{}'.\n", school_file_name(0)));
    s.push_str("DATASET NAME Data WINDOW=FRONT.\n\n");
    s.push_str("MATCH FILES /FILE=*\n");
    for i in 1..SCHOOLS.len() {
        s.push_str(&format!("/FILE='{school_dir}/{}'\n", school_file_name(i)));
    }
    s.push_str("/RENAME (TUISYEN = TUITION).\nEXECUTE.\n");
    s.push_str(&format!("SAVE OUTFILE='{out_dir}/DATA_COMBINE.sav' /COMPRESSED.\n\n"));
    s.push_str("FREQUENCIES VARIABLES=SCHOOLS NUM_FAMILY_MEMBERS /ORDER=ANALYSIS.\n");
    s.push_str("CROSSTABS /TABLES=NUM_FAMILY_MEMBERS BY BM_SPM.\n\n");
    s.push_str("# Convert to numeric classes.\n");
    s.push_str(&format!("RECODE FAMILY_INCOME {INCOME_RULES}.\nEXECUTE.\n\n"));
    s.push_str("RECODE SPBT ('YA'=1) (TIDAK=2).\nEXECUTE.\n\n");
    s.push_str("RECODE SPBT ('YA'=1) (TIDAK=2).\nEXECUTE.\n\n");
    for subj in SUBJECTS {
        s.push_str(&format!("RECODE {subj} {GRADE_RULES}.\nEXECUTE.\n"));
    }
    s.push_str(&format!("\nSAVE OUTFILE='{out_dir}/DATA_NOM.sav' /COMPRESSED.\n"));
    s.push_str("FREQUENCIES VARIABLES=FAMILY_INCOME SPBT BM_SPM.\n");
    s.push_str("CROSSTABS /TABLES=NUM_FAMILY_MEMBERS BY BM_SPM.\n");
    s
}

/// Hand-transcribed syntax from the original workflow, by purpose.
pub const SYNTAX_CORPUS: [(&str, &str); 4] = [
    ("import", include_str!("../corpus/import.sps")),
    ("convert", include_str!("../corpus/convert.sps")),
    ("integrate", include_str!("../corpus/integrate.sps")),
    ("missing_check", include_str!("../corpus/missing_check.sps")),
];
