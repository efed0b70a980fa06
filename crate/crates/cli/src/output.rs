use std::io::Write;
use std::path::{Path, PathBuf};

use jacobi_core::report::DiagnosisReport;

use crate::error::{CliError, CliResult};

/// A numeric table written as CSV with `.` decimals, `,` separators and LF line endings.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>, rows: Vec<Vec<f64>>) -> Table {
        Table { header, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory csv");
        for r in &self.rows {
            w.write_record(r.iter().map(|x| format!("{x:?}"))).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("ascii csv")
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Writes the report to `path`, or to stdout without one.
pub fn emit_report(report: &DiagnosisReport, path: Option<&PathBuf>) -> CliResult<()> {
    let mut json = report.to_json();
    json.push('\n');
    match path {
        Some(p) => write_file(p, &json),
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = Table::new(vec!["r".into(), "A".into()], vec![vec![0.5, 1.0 / 3.0], vec![1.0, f64::INFINITY]]);
        assert_eq!(t.to_csv(), "r,A\n0.5,0.3333333333333333\n1.0,inf\n");
    }
}
