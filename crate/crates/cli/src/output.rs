//! CSV tables, checksums and the run manifest.
//!
//! Everything is rendered in memory first, so a non-finite value aborts the
//! run before any file exists. Files are then written through a temporary
//! name and renamed; if any write fails, the files already placed are removed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 17 significant digits round-trip every double
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// One CSV file. Column headers read `name [unit]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: String,
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(file: &str, columns: &[(&str, &str)]) -> Self {
        Table {
            file: file.to_string(),
            columns: columns
                .iter()
                .map(|(n, u)| (n.to_string(), u.to_string()))
                .collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.file);
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        for (r, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if let Cell::Float(x) = cell {
                    if !x.is_finite() {
                        return Err(CliError::Numerical(format!(
                            "{} row {} column {:?} is {x}",
                            self.file,
                            r + 1,
                            self.columns[c].0
                        )));
                    }
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|(name, unit)| format!("{name} [{unit}]"))
            .collect();
        let csv_err = |e: csv::Error| CliError::Io(format!("{}: {e}", self.file));
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Io(format!("{}: {e}", self.file)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Files written so far in one run; removed again unless `commit` is called.
pub struct OutputDir {
    dir: PathBuf,
    created_dir: bool,
    placed: Vec<PathBuf>,
    committed: bool,
}

impl OutputDir {
    pub fn open(dir: &Path) -> Result<Self, CliError> {
        let created_dir = !dir.exists();
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            created_dir,
            placed: Vec::new(),
            committed: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    /// Writes `data` under a temporary name and renames it into place.
    pub fn place(&mut self, name: &str, data: &[u8]) -> Result<Artifact, CliError> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp"));
        let write = || -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(data)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        };
        if let Err(e) = write() {
            let _ = fs::remove_file(&tmp);
            return Err(CliError::io(target.display(), e));
        }
        self.placed.push(target);
        Ok(Artifact {
            file: name.to_string(),
            sha256: sha256_hex(data),
            bytes: data.len() as u64,
        })
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        if self.committed {
            return;
        }
        for path in &self.placed {
            let _ = fs::remove_file(path);
        }
        if self.created_dir {
            // only succeeds if nothing else landed there
            let _ = fs::remove_dir(&self.dir);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new("t.csv", &[("N", "particles"), ("S", "1")]);
        t.push(vec![50usize.into(), 0.1f64.into()]);
        t
    }

    #[test]
    fn renders_units_and_17_digits() {
        let text = String::from_utf8(table().render().unwrap()).unwrap();
        assert_eq!(text, "N [particles],S [1]\n50,1.0000000000000001e-1\n");
        let parsed: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(parsed, 0.1);
    }

    #[test]
    fn non_finite_cells_are_numerical_failures() {
        let mut t = table();
        t.push(vec![1usize.into(), f64::NAN.into()]);
        let err = t.render().unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn checksum_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn uncommitted_outputs_are_removed() {
        let root = tempfile::tempdir().unwrap();
        let dir = root.path().join("out");
        {
            let mut out = OutputDir::open(&dir).unwrap();
            out.place("a.csv", b"x\n").unwrap();
            assert!(dir.join("a.csv").exists());
        }
        assert!(!dir.exists());

        let mut out = OutputDir::open(&dir).unwrap();
        out.place("a.csv", b"x\n").unwrap();
        out.commit();
        assert!(dir.join("a.csv").exists());
    }
}
