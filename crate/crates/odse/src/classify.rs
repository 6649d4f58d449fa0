//! k-NN classification in the dissimilarity space and accuracy evaluation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dm::build_dm;
use crate::error::{OdseError, Result};
use crate::graph::LabeledGraph;
use crate::model::OdseModel;

/// Training vectors (DM rows) with their class labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddedTrainingSet {
    vectors: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl EmbeddedTrainingSet {
    pub fn new(vectors: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(OdseError::EmptySample("embedded training set"));
        }
        if vectors.len() != labels.len() {
            return Err(OdseError::Config(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        let dim = vectors[0].len();
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(OdseError::Config(
                "embedded vectors have inconsistent dimensions".into(),
            ));
        }
        Ok(EmbeddedTrainingSet { vectors, labels })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Majority label among the k Euclidean-nearest training vectors.
///
/// Distance ties break toward the lower training index; vote ties break
/// toward the class of the nearest member among the tied classes.
pub fn knn_classify(train: &EmbeddedTrainingSet, query: &[f64], k: usize) -> Result<String> {
    if query.len() != train.dim() {
        return Err(OdseError::EmbeddingDimensionMismatch {
            query: query.len(),
            train: train.dim(),
        });
    }
    if k == 0 || k > train.len() {
        return Err(OdseError::Config(format!(
            "k = {k} outside [1, {}]",
            train.len()
        )));
    }
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.sort_by(|&a, &b| {
        squared_euclidean(&train.vectors[a], query)
            .total_cmp(&squared_euclidean(&train.vectors[b], query))
            .then(a.cmp(&b))
    });

    let mut votes: BTreeMap<&str, usize> = BTreeMap::new();
    for &idx in order.iter().take(k) {
        *votes.entry(train.labels[idx].as_str()).or_insert(0) += 1;
    }
    let top = *votes.values().max().unwrap();
    // Nearest member whose class reached the top vote count.
    for &idx in order.iter().take(k) {
        if votes[train.labels[idx].as_str()] == top {
            return Ok(train.labels[idx].clone());
        }
    }
    unreachable!("a top-voted class always has a member among the k nearest")
}

/// Accuracy plus per-class confusion counts (true class -> predicted class).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
}

/// Embeds each split graph against the model's representation set and
/// classifies it with the model's k-NN rule.
pub fn evaluate(model: &OdseModel, split: &[(LabeledGraph, String)]) -> Result<EvaluationReport> {
    if split.is_empty() {
        return Err(OdseError::EmptySample("evaluation split"));
    }
    model.validate()?;
    let graphs: Vec<LabeledGraph> = split.iter().map(|(g, _)| g.clone()).collect();
    let dm = build_dm(
        &graphs,
        &model.prototypes,
        &model.params.weights,
        &model.params.label_cfg,
    )?;
    let predictions: Vec<String> = (0..split.len())
        .into_par_iter()
        .map(|i| knn_classify(&model.embedded_train, dm.row_embedding(i), model.knn_k))
        .collect::<Result<Vec<_>>>()?;

    let mut correct = 0;
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for ((_, truth), predicted) in split.iter().zip(predictions.iter()) {
        if truth == predicted {
            correct += 1;
        }
        *confusion
            .entry(truth.clone())
            .or_default()
            .entry(predicted.clone())
            .or_insert(0) += 1;
    }
    Ok(EvaluationReport {
        accuracy: correct as f64 / split.len() as f64,
        correct,
        total: split.len(),
        confusion,
    })
}
