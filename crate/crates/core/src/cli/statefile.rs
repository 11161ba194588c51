//! On-disk state format.
//!
//! ```json
//! {
//!   "dim": 2,
//!   "matrix": [[[0.5, 0.0], [0.5, 0.0]],
//!              [[0.5, 0.0], [0.5, 0.0]]],
//!   "label": "plus"
//! }
//! ```
//!
//! `matrix` is row-major; each entry is a `[re, im]` pair. Floats are written
//! in shortest round-trip form, so a write/read cycle is bit-exact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::linalg::{ComplexMatrix, ToleranceConfig, C64};
use crate::operators::{make_density, make_projector, DensityOperator, Projector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: malformed state file: {source}")]
    Syntax {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Layout { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: Error },
}

impl StateFile {
    pub fn from_matrix(m: &ComplexMatrix, label: Option<String>) -> Self {
        let dim = m.rows();
        let matrix = (0..dim)
            .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self { dim, matrix, label }
    }

    /// Layout check and conversion; does not validate as a state.
    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.dim == 0 {
            return Err("dim must be positive".into());
        }
        if self.matrix.len() != self.dim {
            return Err(format!(
                "matrix has {} rows, dim is {}",
                self.matrix.len(),
                self.dim
            ));
        }
        let mut data = Vec::with_capacity(self.dim * self.dim);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != self.dim {
                return Err(format!(
                    "row {i} has {} entries, dim is {}",
                    row.len(),
                    self.dim
                ));
            }
            data.extend(row.iter().map(|&[re, im]| C64::new(re, im)));
        }
        ComplexMatrix::new(self.dim, self.dim, data).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serialises")
    }

    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub fn read_file(path: &Path) -> Result<StateFile, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    StateFile::parse(&text).map_err(|source| FileError::Syntax {
        path: path.to_path_buf(),
        source,
    })
}

fn read_matrix(path: &Path) -> Result<(StateFile, ComplexMatrix), FileError> {
    let file = read_file(path)?;
    let m = file.to_matrix().map_err(|message| FileError::Layout {
        path: path.to_path_buf(),
        message,
    })?;
    Ok((file, m))
}

/// Read and validate a density operator, returning it with its label.
pub fn read_state(
    path: &Path,
    tol: &ToleranceConfig,
) -> Result<(DensityOperator, Option<String>), FileError> {
    let (file, m) = read_matrix(path)?;
    let rho = make_density(&m, tol).map_err(|source| FileError::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((rho, file.label))
}

pub fn read_projector(path: &Path, tol: &ToleranceConfig) -> Result<Projector, FileError> {
    let (_, m) = read_matrix(path)?;
    make_projector(&m, tol).map_err(|source| FileError::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix, label: Option<String>) -> Result<(), FileError> {
    let mut text = StateFile::from_matrix(m, label).to_json();
    text.push('\n');
    fs::write(path, text).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}
