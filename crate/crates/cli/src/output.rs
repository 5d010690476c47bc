//! Output files, run manifests and `--verify`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// A file produced by a command, held in memory until written.
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(path: impl Into<PathBuf>, bytes: Vec<u8>) -> Self {
        Artifact { path: path.into(), bytes }
    }
}

/// Everything a command produces, plus the facts recorded in its manifest.
pub struct Run {
    pub artifacts: Vec<Artifact>,
    pub seeds: Vec<u64>,
    pub parameters: Value,
    pub inputs: Vec<PathBuf>,
    /// Printed to stdout after the files are written.
    pub summary: String,
    /// Set when every requested fit diverged.
    pub all_diverged: bool,
}

#[derive(Serialize)]
struct OutputEntry {
    path: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command_line: Vec<String>,
    subcommand: &'a str,
    seeds: &'a [u64],
    parameters: &'a Value,
    inputs: Vec<String>,
    outputs: Vec<OutputEntry>,
    threads: usize,
    wall_clock_seconds: f64,
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn display(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Writes the artifacts and a manifest next to the first of them.
pub fn write_run(run: &Run, subcommand: &str, started: Instant) -> Result<PathBuf, CliError> {
    for a in &run.artifacts {
        if let Some(dir) = a.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(&a.path, &a.bytes)?;
    }
    let primary = &run.artifacts.first().expect("every command writes a file").path;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command_line: std::env::args().collect(),
        subcommand,
        seeds: &run.seeds,
        parameters: &run.parameters,
        inputs: run.inputs.iter().map(|p| display(p)).collect(),
        outputs: run.artifacts.iter().map(|a| OutputEntry { path: display(&a.path), bytes: a.bytes.len() }).collect(),
        threads: rayon::current_num_threads(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = manifest_path(primary);
    let mut json = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    json.push(b'\n');
    fs::write(&path, json)?;
    Ok(path)
}

/// Compares a fresh derivation with the files on disk.
pub fn verify(rederived: &Run) -> Result<usize, CliError> {
    for a in &rederived.artifacts {
        let on_disk = fs::read(&a.path)?;
        if on_disk != a.bytes {
            return Err(CliError::Mismatch(display(&a.path)));
        }
    }
    Ok(rederived.artifacts.len())
}

pub fn to_json<T: Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v).map_err(|e| CliError::Internal(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Appends `suffix` to the final component of `prefix`.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
