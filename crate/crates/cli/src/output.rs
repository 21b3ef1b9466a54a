use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Output directory: explicit flag, then the environment override, then `out`.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(crate::OUT_DIR_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from("out"),
    }
}

/// Formats a float for tables: plain decimal in a readable range,
/// scientific notation outside it.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e6).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Comma-separated table with a header row.
pub fn csv_table<I>(header: &[&str], rows: I) -> anyhow::Result<Vec<u8>>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(w.into_inner()?)
}

pub fn json_bytes<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    /// Simulated time span covered by the run.
    pub sim_time_start: f64,
    pub sim_time_end: f64,
    pub config: serde_json::Value,
    pub files: Vec<FileRecord>,
}

#[derive(Debug, Clone, Serialize)]
struct Timing {
    started_unix_s: f64,
    finished_unix_s: f64,
    wall_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Collects the files of one run and writes them with a checksummed
/// manifest. Wall-clock timing goes to `timing.json`, which is not listed
/// in the manifest so that identical runs give identical manifests.
pub struct Artifacts {
    dir: PathBuf,
    files: Vec<FileRecord>,
    started: f64,
}

impl Artifacts {
    pub fn create(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            started: unix_now(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)?;
        self.files.push(FileRecord {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn finish(
        self,
        command: &str,
        seed: Option<u64>,
        replicas: Option<u64>,
        sim_time: (f64, f64),
        config: serde_json::Value,
    ) -> anyhow::Result<RunManifest> {
        let manifest = RunManifest {
            tool: "radswap",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            replicas,
            sim_time_start: sim_time.0,
            sim_time_end: sim_time.1,
            config,
            files: self.files,
        };
        std::fs::write(self.dir.join("manifest.json"), json_bytes(&manifest)?)?;
        let finished = unix_now();
        let timing = Timing {
            started_unix_s: self.started,
            finished_unix_s: finished,
            wall_seconds: finished - self.started,
        };
        std::fs::write(self.dir.join("timing.json"), json_bytes(&timing)?)?;
        Ok(manifest)
    }
}
