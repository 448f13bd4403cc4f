//! CSV and JSON emission. Column order equals struct field order.

use std::path::PathBuf;

use serde::Serialize;

use crate::args::OutFormat;
use crate::config::OutputPlan;
use crate::error::{CliError, CliResult};

pub fn to_csv<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Usage(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json<T: Serialize>(rows: &[T]) -> String {
    let mut s = serde_json::to_string_pretty(rows).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes `<dir>/<name>.csv` and/or `<dir>/<name>.json`; returns the paths.
pub fn write_reports<T: Serialize>(plan: &OutputPlan, rows: &[T]) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(&plan.dir).map_err(CliError::io(&plan.dir))?;
    let mut written = Vec::new();
    if matches!(plan.format, OutFormat::Csv | OutFormat::Both) {
        let p = plan.dir.join(format!("{}.csv", plan.name));
        std::fs::write(&p, to_csv(rows)?).map_err(CliError::io(&p))?;
        written.push(p);
    }
    if matches!(plan.format, OutFormat::Json | OutFormat::Both) {
        let p = plan.dir.join(format!("{}.json", plan.name));
        std::fs::write(&p, to_json(rows)).map_err(CliError::io(&p))?;
        written.push(p);
    }
    Ok(written)
}
