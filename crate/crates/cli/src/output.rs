//! Result tables, plot curves and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use mi_sco_core::bounds::{fmt_float, reports_to_csv, BoundReport};

pub const RESULTS_FILE: &str = "results.csv";
pub const NOTES_FILE: &str = "notes.txt";
pub const MANIFEST_FILE: &str = "manifest.json";

/// A CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// One plotted curve, written as two whitespace-separated columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(name: impl Into<String>) -> Self {
        Curve { name: name.into(), points: Vec::new() }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (x, y) in &self.points {
            let _ = writeln!(out, "{} {}", fmt_float(*x), fmt_float(*y));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub reports: Vec<BoundReport>,
    pub tables: Vec<Table>,
    pub curves: Vec<Curve>,
}

impl ExperimentOutput {
    pub fn all_hold(&self) -> bool {
        self.reports.iter().all(|r| r.holds)
    }

    pub fn failures(&self) -> Vec<&BoundReport> {
        self.reports.iter().filter(|r| !r.holds).collect()
    }

    pub fn extend(&mut self, other: ExperimentOutput) {
        self.reports.extend(other.reports);
        self.tables.extend(other.tables);
        self.curves.extend(other.curves);
    }

    /// Data files in write order: `(file name, contents)`.
    pub fn files(&self) -> Vec<(String, String)> {
        let mut files = vec![(RESULTS_FILE.to_string(), reports_to_csv(&self.reports))];
        for t in &self.tables {
            files.push((format!("{}.csv", file_stem(&t.name)), t.to_csv()));
        }
        for c in &self.curves {
            files.push((format!("plot_{}.dat", file_stem(&c.name)), c.to_text()));
        }
        let mut notes = String::new();
        for r in &self.reports {
            for n in &r.notes {
                let _ = writeln!(notes, "{}: {}", r.name, n);
            }
        }
        files.push((NOTES_FILE.to_string(), notes));
        files
    }
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FileEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub experiment: String,
    pub artifact_version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub all_hold: bool,
    pub files: Vec<FileEntry>,
}

/// Write every data file into `dir`, then the manifest.
pub fn write_run(
    dir: &Path,
    output: &ExperimentOutput,
    mut manifest: RunManifest,
) -> std::io::Result<(PathBuf, RunManifest)> {
    std::fs::create_dir_all(dir)?;
    manifest.files.clear();
    for (name, contents) in output.files() {
        std::fs::write(dir.join(&name), contents.as_bytes())?;
        manifest.files.push(FileEntry { path: name, bytes: contents.len(), sha256: sha256_hex(contents.as_bytes()) });
    }
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    std::fs::write(&path, json + "\n")?;
    Ok((path, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn file_names_are_sanitized() {
        let mut out = ExperimentOutput::default();
        out.curves.push(Curve { name: "mi vs δ [rho=0.5]".into(), points: vec![(1.0, 2.0)] });
        let files = out.files();
        assert_eq!(files[1].0, "plot_mi_vs____rho_0.5_.dat");
        assert_eq!(files[1].1, "1.0000000000000000e0 2.0000000000000000e0\n");
    }

    #[test]
    fn table_csv() {
        let mut t = Table::new("t", &["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
    }
}
