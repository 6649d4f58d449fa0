//! Train/eval orchestration shared by the CLI and the C API: run
//! configuration, metrics reporting, and model persistence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classify::{evaluate, EvaluationReport};
use crate::error::{OdseError, Result};
use crate::ingest::{load_dataset, Dataset, DatasetFormat};
use crate::model::{FitnessBreakdown, OdseModel, Variant};
use crate::optimizer::{ga_optimize, GaConfig, GenerationStats};

/// Training-run configuration, loaded from a JSON file. Every field of the
/// embedded GA configuration is optional and defaults to the standard
/// protocol values.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Master manifest path (or dataset directory).
    pub data: PathBuf,
    pub format: DatasetFormat,
    #[serde(flatten)]
    pub ga: GaConfig,
}

impl RunConfig {
    pub fn load_json(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| OdseError::io(path.display().to_string(), e))?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.ga.validate()?;
        Ok(cfg)
    }

    /// Resolves the data path relative to the config file location.
    pub fn anchored_to(mut self, config_path: &Path) -> RunConfig {
        if self.data.is_relative() {
            if let Some(dir) = config_path.parent() {
                self.data = dir.join(&self.data);
            }
        }
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainMetrics {
    pub variant: Variant,
    pub knn_k: usize,
    pub seed: u64,
    pub train_size: usize,
    pub zeta: usize,
    /// Test-split accuracy of the synthesized model.
    pub accuracy: f64,
    pub rs_size: usize,
    pub generations_run: usize,
    pub best_fitness: f64,
    pub diagnostics: FitnessBreakdown,
    pub per_generation: Vec<GenerationStats>,
    pub final_population: Vec<FitnessBreakdown>,
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
    /// Timing only; excluded from determinism comparisons.
    pub wall_time_seconds: f64,
}

pub struct TrainOutcome {
    pub model: OdseModel,
    pub metrics: TrainMetrics,
}

/// Loads the dataset, runs the GA synthesis, and evaluates the best model on
/// the test split.
pub fn train(
    cfg: &RunConfig,
    mut progress: impl FnMut(&GenerationStats),
) -> Result<TrainOutcome> {
    let started = Instant::now();
    let dataset = load_dataset(&cfg.data, cfg.format)?;
    dataset.validate_for_training()?;
    train_on(&dataset, &cfg.ga, &mut progress, started)
}

/// Same as [`train`] but over an already-loaded dataset.
pub fn train_on(
    dataset: &Dataset,
    ga: &GaConfig,
    progress: &mut dyn FnMut(&GenerationStats),
    started: Instant,
) -> Result<TrainOutcome> {
    let (model, trace) = ga_optimize(
        &dataset.train,
        &dataset.validation,
        &dataset.class_set,
        ga,
        progress,
    )?;
    let report = evaluate(&model, &dataset.test)?;
    let metrics = TrainMetrics {
        variant: ga.variant,
        knn_k: ga.knn_k,
        seed: ga.seed,
        train_size: dataset.train.len(),
        zeta: dataset.zeta(),
        accuracy: report.accuracy,
        rs_size: model.prototypes.len(),
        generations_run: trace.generations_run,
        best_fitness: trace.best_fitness,
        diagnostics: model.diagnostics.clone(),
        per_generation: trace.per_generation,
        final_population: trace.final_population,
        confusion: report.confusion,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(TrainOutcome { model, metrics })
}

/// Writes `model.json` and `metrics.json` into the output directory.
pub fn persist(outcome: &TrainOutcome, out_dir: &Path) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| OdseError::io(out_dir.display().to_string(), e))?;
    let model_path = out_dir.join("model.json");
    outcome.model.save_json(&model_path)?;
    let metrics_path = out_dir.join("metrics.json");
    let json = serde_json::to_string_pretty(&outcome.metrics)?;
    std::fs::write(&metrics_path, json)
        .map_err(|e| OdseError::io(metrics_path.display().to_string(), e))?;
    Ok((model_path, metrics_path))
}

/// Loads a persisted model and evaluates it on the test split of a dataset.
pub fn eval_model(
    model_path: &Path,
    data_manifest: &Path,
    format: DatasetFormat,
) -> Result<EvaluationReport> {
    let model = OdseModel::load_json(model_path)?;
    let dataset = load_dataset(data_manifest, format)?;
    if dataset.test.is_empty() {
        return Err(OdseError::Dataset("test split is empty".into()));
    }
    evaluate(&model, &dataset.test)
}
