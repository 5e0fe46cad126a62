//! JSON matrix files.
//!
//! ```json
//! {"kind": "density", "dim": 4, "dA": 2, "dB": 2,
//!  "entries": [[0.5, 0.0], [0.0, 0.0], ...]}
//! ```
//!
//! `entries` holds `dim * dim` `[re, im]` pairs in row-major order.

use std::fs;
use std::path::Path;

use lqu_core::uncertainty::Observable;
use lqu_core::{BipartiteState, ComplexMatrix, DensityMatrix, Tolerances, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Density,
    Observable,
    Unitary,
}

impl MatrixKind {
    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Density => "density",
            MatrixKind::Observable => "observable",
            MatrixKind::Unitary => "unitary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: MatrixKind,
    pub dim: usize,
    #[serde(rename = "dA", default, skip_serializing_if = "Option::is_none")]
    pub d_a: Option<usize>,
    #[serde(rename = "dB", default, skip_serializing_if = "Option::is_none")]
    pub d_b: Option<usize>,
    pub entries: Vec<[f64; 2]>,
}

/// A parsed file together with the SHA-256 of its bytes.
#[derive(Debug, Clone)]
pub struct LoadedMatrix {
    pub file: MatrixFile,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl MatrixFile {
    pub fn from_matrix(kind: MatrixKind, m: &ComplexMatrix, dims: Option<(usize, usize)>) -> Self {
        Self {
            kind,
            dim: m.dim(),
            d_a: dims.map(|d| d.0),
            d_b: dims.map(|d| d.1),
            entries: m.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        let expected = file.dim.checked_mul(file.dim).filter(|&n| n > 0);
        if expected != Some(file.entries.len()) {
            return Err(CliError::Parse(format!(
                "dim {} needs {} entries, found {}",
                file.dim,
                file.dim.saturating_mul(file.dim),
                file.entries.len()
            )));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix file serializes")
    }

    pub fn matrix(&self) -> CliResult<ComplexMatrix> {
        let entries: Vec<C64> = self.entries.iter().map(|e| C64::new(e[0], e[1])).collect();
        Ok(ComplexMatrix::from_row_major(self.dim, &entries)?)
    }

    fn expect_kind(&self, kind: MatrixKind) -> CliResult<()> {
        if self.kind != kind {
            return Err(CliError::Validation(format!(
                "expected a {} file, found {}",
                kind.name(),
                self.kind.name()
            )));
        }
        Ok(())
    }

    pub fn density(&self, tol: &Tolerances) -> CliResult<DensityMatrix> {
        self.expect_kind(MatrixKind::Density)?;
        Ok(DensityMatrix::new(self.matrix()?, tol)?)
    }

    /// The state with its declared split. Files without `dA`/`dB` are read as
    /// a qubit A when the dimension is even.
    pub fn bipartite(&self, tol: &Tolerances) -> CliResult<BipartiteState> {
        let (d_a, d_b) = match (self.d_a, self.d_b) {
            (Some(a), Some(b)) => (a, b),
            (Some(a), None) if a > 0 && self.dim % a == 0 => (a, self.dim / a),
            (None, Some(b)) if b > 0 && self.dim % b == 0 => (self.dim / b, b),
            (None, None) if self.dim % 2 == 0 => (2, self.dim / 2),
            _ => {
                return Err(CliError::Validation(format!(
                    "cannot split dimension {} as dA x dB",
                    self.dim
                )))
            }
        };
        if d_a.checked_mul(d_b) != Some(self.dim) {
            return Err(CliError::Validation(format!(
                "dA * dB = {d_a} * {d_b} != dim {}",
                self.dim
            )));
        }
        Ok(BipartiteState::new(self.density(tol)?, d_a, d_b)?)
    }

    pub fn observable(&self, tol: &Tolerances) -> CliResult<Observable> {
        self.expect_kind(MatrixKind::Observable)?;
        Ok(Observable::new(self.matrix()?, tol)?)
    }

    pub fn unitary(&self, tol: &Tolerances) -> CliResult<ComplexMatrix> {
        self.expect_kind(MatrixKind::Unitary)?;
        let u = self.matrix()?;
        let residual = u.unitarity_residual();
        if residual > tol.unitarity {
            return Err(lqu_core::Error::NotUnitary { residual }.into());
        }
        Ok(u)
    }
}

pub fn load(path: &Path) -> CliResult<LoadedMatrix> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => CliError::MissingInput(format!("{}: no such file", path.display())),
        _ => CliError::io(path, e),
    })?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let file = MatrixFile::parse(text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok(LoadedMatrix {
        file,
        sha256: sha256_hex(&bytes),
    })
}
