use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::CliError;

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvSink<'a> {
    pub dir: &'a Path,
    pub timestamp: bool,
}

impl CsvSink<'_> {
    /// Writes `rows` under `header`, preceded by a `# generated ...` line
    /// when timestamps are enabled.
    pub fn write<I>(&self, name: &str, header: &[&str], rows: I) -> Result<PathBuf, CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        fs::create_dir_all(self.dir).map_err(|e| io_error(self.dir, e))?;
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| io_error(&path, e))?;
        let mut out = BufWriter::new(file);
        if self.timestamp {
            writeln!(out, "# generated {}", chrono::Utc::now().to_rfc3339()).map_err(|e| io_error(&path, e))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header).map_err(|e| csv_error(&path, e))?;
        for row in rows {
            w.write_record(&row).map_err(|e| csv_error(&path, e))?;
        }
        w.flush().map_err(|e| io_error(&path, e))?;
        Ok(path)
    }

    pub fn write_text(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(self.dir).map_err(|e| io_error(self.dir, e))?;
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| io_error(&path, e))?;
        Ok(path)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}
