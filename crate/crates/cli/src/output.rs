use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::{Format, OutputArgs};
use crate::error::{CliError, Result};

/// Rendered output and where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    /// Self-describing file stem, used with `--output-dir`.
    pub stem: String,
    pub format: Format,
    pub body: Vec<u8>,
    pub output: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl Artifact {
    pub fn new(stem: String, out: &OutputArgs, body: Vec<u8>) -> Result<Self> {
        Ok(Self {
            stem,
            format: out.format,
            body,
            output: out.output.clone(),
            output_dir: out.output_dir.clone(),
        })
    }

    pub fn file_name(&self) -> String {
        format!("{}.{}", self.stem, self.format.extension())
    }

    /// Target path, or `None` for stdout.
    pub fn destination(&self) -> Option<PathBuf> {
        match (&self.output, &self.output_dir) {
            (Some(path), _) => Some(path.clone()),
            (None, Some(dir)) => Some(dir.join(self.file_name())),
            (None, None) => None,
        }
    }

    pub fn write(&self) -> Result<Option<PathBuf>> {
        match self.destination() {
            Some(path) => {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)
                        .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
                }
                fs::write(&path, &self.body)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Ok(Some(path))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(&self.body)?;
                stdout.flush()?;
                Ok(None)
            }
        }
    }
}

/// Pretty JSON with shortest round-trip floats and a trailing newline.
pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    body.push(b'\n');
    Ok(body)
}

pub fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}
