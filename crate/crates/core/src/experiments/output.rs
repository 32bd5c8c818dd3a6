use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::liouville::{lep_detuning, SystemParams};

use super::to_khz;

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Shortest round-trip text for a float; exponent form outside [1e-4, 1e15).
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == 0.0 || (x.abs() >= 1e-4 && x.abs() < 1e15) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// `#` header lines naming the dataset, the code version and every
/// system parameter (as ω/2π in kHz).
pub fn provenance(dataset: &str, params: &SystemParams, dim: Option<usize>) -> Vec<String> {
    let mut lines = vec![
        format!("dataset: {dataset}"),
        format!("code_version: {CODE_VERSION}"),
        "units: frequencies in kHz as omega/2pi, times in us".to_string(),
        format!("delta_khz: {}", fmt_num(to_khz(params.delta))),
        format!("kerr_khz: {}", fmt_num(to_khz(params.kerr))),
        format!("drive_khz: {}", fmt_num(to_khz(params.drive))),
        format!("kappa_khz: {}", fmt_num(to_khz(params.kappa))),
        format!("kappa_phi_khz: {}", fmt_num(to_khz(params.kappa_phi))),
        format!("alpha: {}", fmt_num(params.alpha())),
    ];
    if let Ok(lep) = lep_detuning(params) {
        lines.push(format!("delta_lep2_khz: {}", fmt_num(to_khz(lep))));
    }
    if let Some(dim) = dim {
        lines.push(format!("fock_dim: {dim}"));
    }
    lines
}

/// A named CSV dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: Vec<String>, columns: &[&str]) -> Self {
        Self { name: name.into(), header, columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for line in &self.header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub code_version: String,
    pub command: String,
    /// Fully resolved configuration that produced the files.
    pub config: serde_json::Value,
    pub files: Vec<ManifestEntry>,
}

/// Write tables and extra files into `dir` and a `manifest.json` listing
/// them, sorted by file name, with SHA-256 checksums.
pub fn write_bundle(
    dir: &Path,
    command: &str,
    config: serde_json::Value,
    tables: &[Table],
    extra: Vec<(String, Vec<u8>)>,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(String, Vec<u8>)> = extra;
    for t in tables {
        files.push((t.file_name(), t.to_csv_bytes()?));
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));
    let mut entries = Vec::with_capacity(files.len());
    for (name, bytes) in &files {
        fs::write(dir.join(name), bytes)?;
        entries.push(ManifestEntry { file: name.clone(), sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() });
    }
    let manifest = Manifest { code_version: CODE_VERSION.into(), command: command.into(), config, files: entries };
    let mut text = serde_json::to_vec_pretty(&manifest)?;
    text.push(b'\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(manifest)
}
