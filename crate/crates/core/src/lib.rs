//! Script-driven integration, recoding and descriptive statistics for
//! tabular survey data.
//!
//! The pipeline: CSV files are ingested into [`Dataset`]s ([`ingest`]), a
//! script in the command language is parsed ([`script`]) and executed
//! ([`engine`]) to append, rename and recode cases and to run analyses
//! ([`stats`]), and the results are rendered as text or a static HTML site
//! ([`report`]). Datasets persist as a CSV body plus a JSON sidecar
//! ([`persist`]).

mod csvio;
pub mod engine;
pub mod fixtures;
pub mod ingest;
pub mod persist;
pub mod report;
pub mod script;
pub mod stats;
pub mod table;
pub mod value;

pub use engine::{execute_script, exec_recode, open_dataset, recode_value, Environment, ExecError, ExecOptions};
pub use ingest::{infer_column_type, read_csv, IngestError, IngestOptions};
pub use persist::{load_dataset, save_dataset, PersistError};
pub use report::{emit_site, render_text, ReportBundle, Section};
pub use script::{parse_script, render_script, Command, ParseError, RecodeSpec, Script};
pub use stats::{crosstab, frequencies, missing_summary, AnalysisResult, CrossTab, FrequencyTable, Percent};
pub use table::{Column, Dataset, RenameMap, TableError};
pub use value::{ColumnType, Value};
