//! JSON schemas for the on-disk inputs: matrices, density operators,
//! channels, signal ensembles, and LOCC protocol scripts.
//!
//! Matrix JSON is `{"rows":n,"cols":m,"data":[[re,im],...]}` row-major; a
//! state adds `"kind":"density"`; a channel is
//! `{"in_dim":n,"out_dim":m,"kraus":[matrix,...]}`. Loaders name the
//! offending file and field on failure so the CLI can exit with the
//! bad-input status.

use qrelent_core::channels::QuantumChannel;
use qrelent_core::opalg::{C64, ComplexMatrix, ComplexVector};
use qrelent_core::states::{DensityOperator, WeightedStates};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: field {field}: {message}")]
    Invalid {
        path: String,
        field: &'static str,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, SchemaError>;

fn invalid(path: &str, field: &'static str, message: impl Into<String>) -> SchemaError {
    SchemaError::Invalid {
        path: path.into(),
        field,
        message: message.into(),
    }
}

/// Row-major complex matrix: `{"rows":n,"cols":m,"data":[[re,im],...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.as_slice().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn to_matrix(&self, path: &str) -> Result<ComplexMatrix> {
        let entries: Vec<C64> = self.data.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ComplexMatrix::new(self.rows, self.cols, entries)
            .map_err(|e| invalid(path, "data", e.to_string()))
    }

    /// Interprets a single-column (or single-row) matrix as a vector.
    pub fn to_vector(&self, path: &str) -> Result<ComplexVector> {
        if self.cols != 1 && self.rows != 1 {
            return Err(invalid(
                path,
                "cols",
                format!("expected a vector, got {}x{}", self.rows, self.cols),
            ));
        }
        Ok(ComplexVector::new(
            self.data.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
        ))
    }
}

/// Matrix JSON plus `"kind":"density"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateJson {
    pub kind: String,
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

impl StateJson {
    pub fn from_density(rho: &DensityOperator) -> Self {
        Self {
            kind: "density".into(),
            matrix: MatrixJson::from_matrix(rho.matrix()),
        }
    }

    pub fn to_density(&self, path: &str) -> Result<DensityOperator> {
        if self.kind != "density" {
            return Err(invalid(
                path,
                "kind",
                format!("expected \"density\", got {:?}", self.kind),
            ));
        }
        let m = self.matrix.to_matrix(path)?;
        DensityOperator::new(m).map_err(|e| invalid(path, "data", e.to_string()))
    }
}

/// `{"in_dim":n,"out_dim":m,"kraus":[matrix,...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self {
            in_dim: ch.in_dim(),
            out_dim: ch.out_dim(),
            kraus: ch.kraus().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_channel(&self, path: &str) -> Result<QuantumChannel> {
        let kraus: Vec<ComplexMatrix> = self
            .kraus
            .iter()
            .map(|m| m.to_matrix(path))
            .collect::<Result<_>>()?;
        for (i, k) in kraus.iter().enumerate() {
            if k.rows() != self.out_dim || k.cols() != self.in_dim {
                return Err(invalid(
                    path,
                    "kraus",
                    format!(
                        "operator {i} is {}x{}, expected {}x{}",
                        k.rows(),
                        k.cols(),
                        self.out_dim,
                        self.in_dim
                    ),
                ));
            }
        }
        QuantumChannel::new(kraus).map_err(|e| invalid(path, "kraus", e.to_string()))
    }
}

/// `{"probs":[...],"states":[state,...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub probs: Vec<f64>,
    pub states: Vec<StateJson>,
}

impl EnsembleJson {
    pub fn to_weighted(&self, path: &str) -> Result<WeightedStates> {
        let states: Vec<DensityOperator> = self
            .states
            .iter()
            .map(|s| s.to_density(path))
            .collect::<Result<_>>()?;
        WeightedStates::new(self.probs.clone(), states)
            .map_err(|e| invalid(path, "probs", e.to_string()))
    }
}

/// One step of an LOCC protocol script: a local unitary or a complete local
/// measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum ProtocolStepJson {
    Unitary { party: usize, matrix: MatrixJson },
    Measure { party: usize, basis: Vec<MatrixJson> },
}

pub type ProtocolJson = Vec<ProtocolStepJson>;

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| SchemaError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|source| SchemaError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    parse::<MatrixJson>(path)?.to_matrix(&path.display().to_string())
}

/// Accepts both bare matrix JSON and state JSON with a kind tag.
pub fn load_density(path: &Path) -> Result<DensityOperator> {
    let text = read_to_string(path)?;
    let name = path.display().to_string();
    if let Ok(state) = serde_json::from_str::<StateJson>(&text) {
        return state.to_density(&name);
    }
    let matrix: MatrixJson = serde_json::from_str(&text).map_err(|source| SchemaError::Parse {
        path: name.clone(),
        source,
    })?;
    DensityOperator::new(matrix.to_matrix(&name)?)
        .map_err(|e| invalid(&name, "data", e.to_string()))
}

pub fn load_vector(path: &Path) -> Result<ComplexVector> {
    parse::<MatrixJson>(path)?.to_vector(&path.display().to_string())
}

pub fn load_channel(path: &Path) -> Result<QuantumChannel> {
    parse::<ChannelJson>(path)?.to_channel(&path.display().to_string())
}

pub fn load_ensemble(path: &Path) -> Result<WeightedStates> {
    parse::<EnsembleJson>(path)?.to_weighted(&path.display().to_string())
}

pub fn load_protocol(path: &Path) -> Result<ProtocolJson> {
    parse::<ProtocolJson>(path)
}

/// Comma-separated party dimensions, e.g. "2,2,2".
pub fn parse_dims(spec: &str) -> std::result::Result<Vec<usize>, String> {
    let dims: std::result::Result<Vec<usize>, _> =
        spec.split(',').map(|s| s.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if !d.is_empty() && d.iter().all(|&x| x >= 2) => Ok(d),
        Ok(_) => Err(format!("dims {spec:?} must all be at least 2")),
        Err(e) => Err(format!("cannot parse dims {spec:?}: {e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        let json = MatrixJson::from_matrix(&m);
        let text = serde_json::to_string(&json).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix("test").unwrap(), m);
    }

    #[test]
    fn state_requires_density_kind() {
        let rho = DensityOperator::maximally_mixed(2);
        let mut json = StateJson::from_density(&rho);
        assert!(json.to_density("test").is_ok());
        json.kind = "unitary".into();
        assert!(matches!(
            json.to_density("test"),
            Err(SchemaError::Invalid { field: "kind", .. })
        ));
    }

    #[test]
    fn state_json_layout_is_flat() {
        let rho = DensityOperator::maximally_mixed(2);
        let text = serde_json::to_string(&StateJson::from_density(&rho)).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["kind"], "density");
        assert_eq!(value["rows"], 2);
        assert!(value["data"].is_array());
    }

    #[test]
    fn channel_shape_is_checked() {
        let id = qrelent_core::channels::standard_channel(
            &qrelent_core::channels::StandardKind::Identity,
            2,
        )
        .unwrap();
        let mut json = ChannelJson::from_channel(&id);
        assert!(json.to_channel("test").is_ok());
        json.out_dim = 3;
        assert!(matches!(
            json.to_channel("test"),
            Err(SchemaError::Invalid { field: "kraus", .. })
        ));
    }

    #[test]
    fn dims_parsing() {
        assert_eq!(parse_dims("2,2,2").unwrap(), vec![2, 2, 2]);
        assert!(parse_dims("2,x").is_err());
        assert!(parse_dims("2,1").is_err());
    }

    #[test]
    fn protocol_steps_parse() {
        let text = r#"[
            {"op":"unitary","party":0,"matrix":{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[1,0]]}},
            {"op":"measure","party":1,"basis":[
                {"rows":2,"cols":1,"data":[[1,0],[0,0]]},
                {"rows":2,"cols":1,"data":[[0,0],[1,0]]}
            ]}
        ]"#;
        let steps: ProtocolJson = serde_json::from_str(text).unwrap();
        assert_eq!(steps.len(), 2);
        assert!(matches!(steps[0], ProtocolStepJson::Unitary { party: 0, .. }));
        assert!(matches!(steps[1], ProtocolStepJson::Measure { party: 1, .. }));
    }
}
