//! Trained classifier model: the synthesized representation set, decoded
//! parameters, and the embedded training set, persisted as a self-contained
//! JSON bundle.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::EmbeddedTrainingSet;
use crate::error::{OdseError, Result};
use crate::graph::{LabelDissimConfig, LabeledGraph};
use crate::prototypes::CompressionEstimator;
use crate::twec::TwecWeights;

/// The four synthesized system variants: initialization scheme crossed with
/// the compression entropy estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "v1-qre")]
    V1Qre,
    #[serde(rename = "v2-qre")]
    V2Qre,
    #[serde(rename = "v1-mst")]
    V1Mst,
    #[serde(rename = "v2-mst")]
    V2Mst,
}

impl Variant {
    /// Variant 1 initializes the RS by random sampling and runs expansion;
    /// variant 2 initializes by Mode Seek and does not expand.
    pub fn expands(&self) -> bool {
        matches!(self, Variant::V1Qre | Variant::V1Mst)
    }

    pub fn uses_mst(&self) -> bool {
        matches!(self, Variant::V1Mst | Variant::V2Mst)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::V1Qre => "v1-qre",
            Variant::V2Qre => "v2-qre",
            Variant::V1Mst => "v1-mst",
            Variant::V2Mst => "v2-mst",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = OdseError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "v1-qre" => Ok(Variant::V1Qre),
            "v2-qre" => Ok(Variant::V2Qre),
            "v1-mst" => Ok(Variant::V1Mst),
            "v2-mst" => Ok(Variant::V2Mst),
            other => Err(OdseError::Config(format!(
                "unknown variant `{other}` (expected v1-qre, v2-qre, v1-mst, v2-mst)"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Compression-side parameter: the QRE kernel size or the MST edge exponent,
/// depending on the variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompressionParam {
    SigmaC(f64),
    Gamma(f64),
}

/// Decoded model parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdseParams {
    pub tau_c: f64,
    pub tau_e: f64,
    pub compression: CompressionParam,
    pub sigma_e: f64,
    pub weights: TwecWeights,
    pub label_cfg: LabelDissimConfig,
}

impl OdseParams {
    pub fn compression_estimator(&self) -> CompressionEstimator {
        match self.compression {
            CompressionParam::SigmaC(sigma_c) => CompressionEstimator::Qre {
                tau_c: self.tau_c,
                sigma_c,
            },
            CompressionParam::Gamma(gamma) => CompressionEstimator::Mst {
                tau_c: self.tau_c,
                gamma,
            },
        }
    }
}

/// Per-evaluation objective breakdown and prototype-set accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessBreakdown {
    pub fitness: f64,
    /// Validation recognition rate (the f1 objective).
    pub recognition_rate: f64,
    /// Prototype-count cost term (Theta), clamped into [0, 1].
    pub theta_term: f64,
    /// Normalized entropy of the final DM (Upsilon).
    pub upsilon: f64,
    pub initial_rs_size: usize,
    pub final_rs_size: usize,
    pub expanded_prototypes: usize,
    /// Set when the pipeline degenerated (e.g. the RS emptied) and the
    /// fitness was pinned to zero.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OdseModel {
    pub variant: Variant,
    pub knn_k: usize,
    pub params: OdseParams,
    pub prototypes: Vec<LabeledGraph>,
    pub prototype_origins: Vec<usize>,
    pub class_set: Vec<String>,
    pub embedded_train: EmbeddedTrainingSet,
    pub diagnostics: FitnessBreakdown,
}

impl OdseModel {
    pub fn validate(&self) -> Result<()> {
        if self.prototypes.is_empty() {
            return Err(OdseError::Config("model has no prototypes".into()));
        }
        if self.embedded_train.dim() != self.prototypes.len() {
            return Err(OdseError::Config(format!(
                "embedding dimension {} != prototype count {}",
                self.embedded_train.dim(),
                self.prototypes.len()
            )));
        }
        Ok(())
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json).map_err(|e| OdseError::io(path.display().to_string(), e))
    }

    pub fn load_json(path: &Path) -> Result<OdseModel> {
        let data = std::fs::read_to_string(path)
            .map_err(|e| OdseError::io(path.display().to_string(), e))?;
        let model: OdseModel = serde_json::from_str(&data)?;
        model.validate()?;
        Ok(model)
    }
}

