//! CSV files and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};

use crate::CliError;

/// One CSV cell.
pub enum Cell<'a> {
    F(f64),
    I(i64),
    U(usize),
    S(&'a str),
}

/// 17 significant digits, enough for an exact double round trip.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() { format!("{v:.16e}") } else { format!("{v}") }
}

/// A CSV table built in memory and written in one go.
pub struct Csv {
    name: String,
    columns: usize,
    text: String,
}

impl Csv {
    pub fn new(name: &str, header: &[&str]) -> Csv {
        let mut text = header.join(",");
        text.push('\n');
        Csv { name: name.to_string(), columns: header.len(), text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        assert_eq!(cells.len(), self.columns, "row width differs from header in {}", self.name);
        for (k, c) in cells.iter().enumerate() {
            if k > 0 {
                self.text.push(',');
            }
            match c {
                Cell::F(v) => self.text.push_str(&fmt_real(*v)),
                Cell::I(v) => write!(self.text, "{v}").unwrap(),
                Cell::U(v) => write!(self.text, "{v}").unwrap(),
                Cell::S(v) => self.text.push_str(v),
            }
        }
        self.text.push('\n');
    }
}

/// Output directory that remembers what it wrote.
pub struct OutDir {
    root: PathBuf,
    written: Vec<(String, String)>,
    started: SystemTime,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<OutDir, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new(), started: SystemTime::now() })
    }

    pub fn write(&mut self, csv: Csv) -> Result<(), CliError> {
        let path = self.root.join(&csv.name);
        fs::write(&path, csv.text.as_bytes()).map_err(|e| CliError::io(&path, e))?;
        let digest = Sha256::digest(csv.text.as_bytes());
        let hex = digest.iter().fold(String::new(), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        });
        log::info!("wrote {}", path.display());
        self.written.push((csv.name, hex));
        Ok(())
    }

    /// File names and SHA-256 checksums in write order.
    pub fn checksums(&self) -> &[(String, String)] {
        &self.written
    }

    /// Write `manifest.txt` via a temporary file and rename.
    pub fn finish(self, command: &str, config_echo: &str) -> Result<PathBuf, CliError> {
        let finished = SystemTime::now();
        let secs = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        let wall = finished.duration_since(self.started).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        let mut m = String::new();
        m.push_str("# kondo-walk run manifest\n[config]\n");
        m.push_str(config_echo);
        m.push_str("[run]\n");
        writeln!(m, "command = {command}").unwrap();
        writeln!(m, "tool_version = {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(m, "started_unix = {:.6}", secs(self.started)).unwrap();
        writeln!(m, "finished_unix = {:.6}", secs(finished)).unwrap();
        writeln!(m, "wall_seconds = {wall:.6}").unwrap();
        m.push_str("[outputs]\n");
        for (name, hex) in &self.written {
            writeln!(m, "{name} = sha256:{hex}").unwrap();
        }
        let tmp = self.root.join(".manifest.txt.tmp");
        let path = self.root.join("manifest.txt");
        fs::write(&tmp, m.as_bytes()).map_err(|e| CliError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_exactly() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, -0.0] {
            let s = fmt_real(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_real(f64::NAN), "NaN");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut c = Csv::new("a.csv", &["t", "x", "name"]);
        c.row(&[Cell::U(3), Cell::F(0.5), Cell::S("bound")]);
        c.row(&[Cell::I(-1), Cell::F(2.0), Cell::S("bulk")]);
        assert_eq!(c.text, "t,x,name\n3,5.0000000000000000e-1,bound\n-1,2.0000000000000000e0,bulk\n");
    }
}
