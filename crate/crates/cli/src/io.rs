//! Dataset files and their sidecars.
//!
//! Datasets are JSONL with one permutation (a JSON array of 1-based elements,
//! best first) per line. The ground truth and the corruption mask live in
//! separate JSON files next to the dataset.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use robust_mallows::{MallowsModel, Permutation};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub fn read_jsonl(path: &Path) -> Result<Vec<Permutation>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Permutation = serde_json::from_str(&line)
            .with_context(|| format!("{}:{}: not a permutation", path.display(), i + 1))?;
        if let Some(first) = out.first().map(Permutation::len) {
            if p.len() != first {
                bail!("{}:{}: length {} differs from {}", path.display(), i + 1, p.len(), first);
            }
        }
        out.push(p);
    }
    Ok(out)
}

pub fn write_jsonl(path: &Path, samples: &[Permutation]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for p in samples {
        serde_json::to_writer(&mut w, p)?;
        w.write_all(b"\n")?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?).with_context(|| format!("writing {}", path.display()))
}

/// `data.jsonl` → `data.<kind>.json`.
pub fn sidecar(path: &Path, kind: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{kind}.json"))
}

/// Ground truth written next to a sampled dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truth {
    pub n: usize,
    pub phi: f64,
    pub central: Permutation,
    pub samples: usize,
    pub seed: u64,
}

impl Truth {
    pub fn model(&self) -> Result<MallowsModel> {
        Ok(MallowsModel::new(self.phi, self.central.clone())?)
    }
}

/// Which lines a corruption replaced. Only evaluation code should read this.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskFile {
    pub evaluation_only: bool,
    pub eps: f64,
    pub strategy: robust_mallows::contamination::AdversaryStrategy,
    pub seed: u64,
    pub corrupted_count: usize,
    pub mask: Vec<bool>,
}
