use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{SamplerConfig, SnrSampleBatch, Stage};

/// On-disk layout of exported samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchFormat {
    /// One `gamma` column with a header row, shortest round-trip decimals.
    Csv,
    /// Little-endian IEEE-754 f64 values, no header.
    Binary,
}

/// JSON document written next to an exported batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSidecar {
    pub tool: String,
    pub version: String,
    pub format: BatchFormat,
    pub n_samples: usize,
    pub redraws: u64,
    pub stages: Vec<Stage>,
    pub config: SamplerConfig,
    /// Free-form record of the invocation that produced the batch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

/// `<path>.meta.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes the samples to `path` and the sidecar to `<path>.meta.json`.
pub fn write_batch(batch: &SnrSampleBatch, path: &Path, format: BatchFormat) -> std::io::Result<()> {
    write_batch_with_meta(batch, path, format, None)
}

/// [`write_batch`] with an extra `meta` record stored in the sidecar.
pub fn write_batch_with_meta(
    batch: &SnrSampleBatch,
    path: &Path,
    format: BatchFormat,
    meta: Option<serde_json::Value>,
) -> std::io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        BatchFormat::Csv => {
            writeln!(out, "gamma")?;
            let mut buf = ryu::Buffer::new();
            for &g in &batch.samples {
                writeln!(out, "{}", buf.format(g))?;
            }
        }
        BatchFormat::Binary => {
            for &g in &batch.samples {
                out.write_all(&g.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    let sidecar = BatchSidecar {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        format,
        n_samples: batch.samples.len(),
        redraws: batch.redraws,
        stages: batch.stages.clone(),
        config: batch.config,
        meta,
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(std::io::Error::other)?;
    std::fs::write(sidecar_path(path), json + "\n")
}

/// Reads samples written with [`BatchFormat::Binary`].
pub fn read_batch_binary(path: &Path) -> std::io::Result<Vec<f64>> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "file length is not a multiple of 8 bytes",
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8 bytes")))
        .collect())
}

/// Reads samples written with [`BatchFormat::Csv`].
pub fn read_batch_csv(path: &Path) -> std::io::Result<Vec<f64>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines().skip(1) {
        let line = line?;
        out.push(line.trim().parse().map_err(|e| {
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{line:?}: {e}"))
        })?);
    }
    Ok(out)
}
