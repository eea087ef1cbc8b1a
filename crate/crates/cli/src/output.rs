//! Artifact directory, manifest and timings.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use tfdecay_core::io::{write_dump, write_json, Dump};

use crate::config::RawConfig;
use crate::RunResult;

pub const MANIFEST_SCHEMA: &str = "tfdecay.run_manifest/1";

pub struct Artifacts {
    dir: PathBuf,
    command: String,
    pub hash: [u8; 32],
    pub hash_hex: String,
    written: Vec<String>,
    started: Instant,
    timings: Vec<(String, f64)>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'a str,
    command: &'a str,
    versions: std::collections::BTreeMap<&'a str, &'a str>,
    config_hash: &'a str,
    config: std::collections::BTreeMap<String, String>,
    artifacts: &'a [String],
    /// Wall-clock timings vary between runs and live in this file, outside the manifest.
    timings: &'a str,
}

impl Artifacts {
    pub fn create(dir: &Path, command: &str, raw: &RawConfig) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let hash = raw.hash(command);
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            hash,
            hash_hex: hex::encode(hash),
            written: Vec::new(),
            started: Instant::now(),
            timings: Vec::new(),
        })
    }

    /// Opens `name` for writing and records it in the manifest.
    pub fn file(&mut self, name: &str) -> std::io::Result<BufWriter<File>> {
        self.written.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    pub fn json(&mut self, name: &str, schema: &str, value: &impl Serialize) -> RunResult {
        let hash = self.hash_hex.clone();
        let mut w = self.file(name)?;
        write_json(&mut w, schema, &hash, value)?;
        w.flush()?;
        Ok(())
    }

    pub fn dump(&mut self, name: &str, d: &Dump) -> RunResult {
        let mut w = self.file(name)?;
        write_dump(&mut w, d)?;
        w.flush()?;
        Ok(())
    }

    pub fn time(&mut self, stage: &str, since: Instant) {
        self.timings.push((stage.to_string(), since.elapsed().as_secs_f64()));
    }

    /// Writes `run_manifest.json` (deterministic) and `timings.log` (not).
    pub fn finish(mut self, raw: &RawConfig) -> RunResult {
        self.written.sort();
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA,
            command: &self.command,
            versions: [("tfdecay", env!("CARGO_PKG_VERSION")), ("tfdecay-core", tfdecay_core::VERSION)].into(),
            config_hash: &self.hash_hex,
            config: raw.hashed_entries(),
            artifacts: &self.written,
            timings: "timings.log",
        };
        let mut w = BufWriter::new(File::create(self.dir.join("run_manifest.json"))?);
        serde_json::to_writer_pretty(&mut w, &manifest).map_err(std::io::Error::other)?;
        writeln!(w)?;
        w.flush()?;

        let mut t = BufWriter::new(File::create(self.dir.join("timings.log"))?);
        writeln!(t, "command {}", self.command)?;
        writeln!(t, "config_hash {}", self.hash_hex)?;
        writeln!(t, "threads {}", raw.get("threads"))?;
        for (stage, secs) in &self.timings {
            writeln!(t, "{stage} {secs:.6}")?;
        }
        writeln!(t, "total {:.6}", self.started.elapsed().as_secs_f64())?;
        t.flush()?;
        Ok(())
    }
}

