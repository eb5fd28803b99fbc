use std::fmt::Write as _;
use std::path::Path;

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{Error, Result};

const ABORT_PREFIX: &str = "# abort: ";

/// CSV text: the column header, one row per record, and an optional
/// terminal `# abort: …` comment row.
pub fn diagnostics_csv(records: &[DiagnosticsRecord], abort: Option<&str>) -> String {
    let mut out = DiagnosticsRecord::COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let row: Vec<String> = r.values().iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    if let Some(reason) = abort {
        let _ = writeln!(out, "{ABORT_PREFIX}{}", reason.replace('\n', " "));
    }
    out
}

pub fn write_diagnostics(path: &Path, records: &[DiagnosticsRecord], abort: Option<&str>) -> Result<()> {
    std::fs::write(path, diagnostics_csv(records, abort)).map_err(|e| Error::io(path, e))
}

/// Parsed diagnostics file.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsTable {
    pub records: Vec<DiagnosticsRecord>,
    pub abort: Option<String>,
}

pub fn parse_diagnostics(text: &str) -> Result<DiagnosticsTable> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l).unwrap_or("");
    if header != DiagnosticsRecord::COLUMNS.join(",") {
        return Err(Error::ConfigParse { line: 1, message: "unexpected diagnostics header".into() });
    }
    let mut records = Vec::new();
    let mut abort = None;
    for (i, line) in lines {
        if let Some(reason) = line.strip_prefix(ABORT_PREFIX) {
            abort = Some(reason.to_string());
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::ConfigParse { line: i + 1, message: e.to_string() })?;
        let r = DiagnosticsRecord::from_values(&values)
            .ok_or_else(|| Error::ConfigParse { line: i + 1, message: format!("expected {} columns", DiagnosticsRecord::COLUMNS.len()) })?;
        records.push(r);
    }
    Ok(DiagnosticsTable { records, abort })
}

pub fn read_diagnostics(path: &Path) -> Result<DiagnosticsTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_diagnostics(&text)
}

/// Two-column `t value` text for one diagnostics column.
pub fn plot_data(records: &[DiagnosticsRecord], field: &str) -> Result<String> {
    if !DiagnosticsRecord::COLUMNS.contains(&field) {
        return Err(Error::UnknownField { name: field.to_string(), valid: DiagnosticsRecord::COLUMNS.join(", ") });
    }
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{:?} {:?}", r.t, r.column(field).expect("checked"));
    }
    Ok(out)
}

/// Write `<stem>_<field>.dat` next to the CSV and return its path.
pub fn emit_plot_data(csv: &Path, field: &str) -> Result<std::path::PathBuf> {
    let table = read_diagnostics(csv)?;
    let text = plot_data(&table.records, field)?;
    let stem = csv.file_stem().and_then(|s| s.to_str()).unwrap_or("diagnostics");
    let path = csv.with_file_name(format!("{stem}_{field}.dat"));
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(t: f64) -> DiagnosticsRecord {
        let mut v = [0.1; 14];
        v[0] = t;
        v[4] = 1.0;
        v[13] = f64::NAN;
        DiagnosticsRecord::from_values(&v).unwrap()
    }

    #[test]
    fn round_trip_with_abort() {
        let recs = vec![record(0.0), record(0.1 + 0.2)];
        let text = diagnostics_csv(&recs, Some("depth violation"));
        let back = parse_diagnostics(&text).unwrap();
        assert_eq!(back.abort.as_deref(), Some("depth violation"));
        assert_eq!(back.records[1].t.to_bits(), (0.1f64 + 0.2).to_bits());
        assert!(back.records[0].backend_gap.is_nan());
    }

    #[test]
    fn plot_columns() {
        let recs = vec![record(0.0), record(0.5)];
        let text = plot_data(&recs, "a_min").unwrap();
        assert_eq!(text, "0.0 1.0\n0.5 1.0\n");
        match plot_data(&recs, "nope") {
            Err(Error::UnknownField { valid, .. }) => assert!(valid.contains("E_basic")),
            other => panic!("{other:?}"),
        }
    }
}
