use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use consensus_kinetics::{Error, Result};

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file).map_err(|e| Error::io(path, e))
}

pub fn print_json<T: Serialize + ?Sized>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a, A: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a A,
    outputs: &'a [String],
    timestamp: String,
}

fn timestamp() -> String {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .unwrap_or_default();
    chrono::DateTime::from_timestamp(now.as_secs() as i64, now.subsec_nanos())
        .map(|t| t.to_rfc3339())
        .unwrap_or_default()
}

/// Records the resolved configuration and the files a run produced in
/// `<command>.manifest.json`.
pub fn write_manifest<A: Serialize>(dir: &Path, command: &str, config: &A, outputs: &[String]) -> Result<()> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        outputs,
        timestamp: timestamp(),
    };
    let name = format!("{}.manifest.json", command.replace(' ', "_"));
    write_json(&dir.join(name), &manifest)
}

/// Collects output file names relative to a run directory.
pub struct Outputs {
    dir: PathBuf,
    names: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        ensure_dir(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            names: Vec::new(),
        })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.names.push(name.to_string());
        self.dir.join(name)
    }

    pub fn record(&mut self, name: String) {
        self.names.push(name);
    }

    pub fn finish<A: Serialize>(self, command: &str, config: &A) -> Result<()> {
        write_manifest(&self.dir, command, config, &self.names)
    }
}

pub fn write_table(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(header).map_err(Error::from)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(Error::from)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
