use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::MRange;
use crate::error::CliResult;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Start vectors are the fixed all-ones defaults, so every run uses this seed.
pub const SEED: u64 = 0;

/// What was run, recorded next to the outputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_ratio: Option<f64>,
    pub methods: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_range: Option<MRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<f64>>,
    pub seed: u64,
    pub deterministic: bool,
    pub out_dir: PathBuf,
}

impl RunManifest {
    pub fn new(
        command: &'static str,
        inputs: Vec<PathBuf>,
        out_dir: &Path,
        deterministic: bool,
    ) -> Self {
        Self {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            kind: None,
            omega: None,
            n_ratio: None,
            methods: Vec::new(),
            m: None,
            m_range: None,
            k: None,
            omega_grid: None,
            n_list: None,
            seed: SEED,
            deterministic,
            out_dir: out_dir.to_path_buf(),
        }
    }

    pub fn write(&self) -> CliResult<()> {
        write_json(&self.out_dir.join(MANIFEST_FILE), self)
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Buffered writer for an output file.
pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}
