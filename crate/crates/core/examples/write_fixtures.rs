//! Writes the synthetic school files and the pipeline script into a directory.
//!
//! cargo run -p tds-core --example write_fixtures -- DIR

use std::path::PathBuf;

use tds_core::fixtures::{pipeline_script, write_school_csvs, DEFAULT_SEED};

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    write_school_csvs(dir.join("schools"), DEFAULT_SEED)?;
    std::fs::write(dir.join("integrate.tds.sps"), pipeline_script("schools", "out"))?;
    println!("wrote {}", dir.display());
    Ok(())
}
