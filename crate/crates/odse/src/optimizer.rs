//! Genetic-algorithm synthesis of the classification model.
//!
//! A genome is a fixed-order vector of genes in [0, 1] encoding the two
//! entropy thresholds, the kernel size (or MST exponent) plus expansion
//! kernel size, the six TWEC weights, and the label-dissimilarity
//! parameters. Each fitness evaluation runs the full per-variant pipeline:
//! RS initialization, DM construction, compression, (variant 1) expansion,
//! re-embedding, validation k-NN scoring, and the convex objective that
//! trades recognition rate against model parsimony and DM informativeness.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{knn_classify, EmbeddedTrainingSet};
use crate::dm::DissimilarityMatrix;
use crate::entropy::{mst_renyi_normalized, qre_joint, sigma_upper_bound, MstReConfig, QreConfig};
use crate::error::{OdseError, Result};
use crate::graph::{LabelDissimConfig, LabeledGraph};
use crate::model::{CompressionParam, FitnessBreakdown, OdseModel, OdseParams, Variant};
use crate::prototypes::{compress, expand, mode_seek, random_init, PrototypeSet};
use crate::twec::{twec, TwecWeights};

/// Number of genes: tau_c, tau_e, sigma_c-or-gamma, sigma_e, six TWEC
/// weights, real-vector scale, symbol mismatch.
pub const GENOME_LEN: usize = 12;

/// Lower end of the decoded sigma/gamma ranges, kept off zero.
pub const DECODE_EPS: f64 = 1e-3;

/// Upper end of the decoded gamma range.
pub const GAMMA_MAX: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdseGenome {
    pub genes: Vec<f64>,
}

impl OdseGenome {
    pub fn validate(&self) -> Result<()> {
        if self.genes.len() != GENOME_LEN {
            return Err(OdseError::Config(format!(
                "genome has {} genes, expected {GENOME_LEN}",
                self.genes.len()
            )));
        }
        if self.genes.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(OdseError::Config("gene outside [0, 1]".into()));
        }
        Ok(())
    }
}

/// Affine gene-to-range decoding.
pub fn decode_genome(genome: &OdseGenome, cfg: &GaConfig) -> Result<OdseParams> {
    genome.validate()?;
    let g = &genome.genes;
    let sigma = |gene: f64| DECODE_EPS + gene * (sigma_upper_bound() - DECODE_EPS);
    let compression = if cfg.variant.uses_mst() {
        CompressionParam::Gamma(DECODE_EPS + g[2] * (GAMMA_MAX - DECODE_EPS))
    } else {
        CompressionParam::SigmaC(sigma(g[2]))
    };
    Ok(OdseParams {
        tau_c: g[0],
        tau_e: g[1],
        compression,
        sigma_e: sigma(g[3]),
        weights: TwecWeights {
            w_sub_v: g[4],
            w_ins_v: g[5],
            w_del_v: g[6],
            w_sub_e: g[7],
            w_ins_e: g[8],
            w_del_e: g[9],
        },
        label_cfg: LabelDissimConfig {
            real_vector_scale: g[10],
            symbol_mismatch: g[11],
            composite_weights: Default::default(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub variant: Variant,
    pub knn_k: usize,
    pub population_size: usize,
    pub max_generations: usize,
    pub stall_generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub seed: u64,
    /// Variant-1 random-initialization selection probability.
    pub selection_probability: f64,
    /// Variant-2 Mode Seek neighborhood size.
    pub mode_seek_s: usize,
    /// Expansion replacement multiplicity per class.
    pub expansion_l: usize,
    /// Weight of the recognition rate in the objective.
    pub eta: f64,
    /// Weight of the prototype-count cost inside the model-quality term.
    pub varsigma: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            variant: Variant::V1Qre,
            knn_k: 1,
            population_size: 30,
            max_generations: 40,
            stall_generations: 15,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            elitism: 1,
            seed: 0,
            selection_probability: 0.3,
            mode_seek_s: 5,
            expansion_l: 1,
            eta: 0.9,
            varsigma: 0.2,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(OdseError::Config("population size must be >= 2".into()));
        }
        if self.max_generations == 0 || self.stall_generations == 0 {
            return Err(OdseError::Config(
                "generation budgets must be positive".into(),
            ));
        }
        let unit = |v: f64, name: &str| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(OdseError::Config(format!("{name} = {v} outside [0, 1]")))
            }
        };
        unit(self.crossover_rate, "crossover rate")?;
        unit(self.mutation_rate, "mutation rate")?;
        unit(self.eta, "eta")?;
        unit(self.varsigma, "varsigma")?;
        if !(self.selection_probability > 0.0 && self.selection_probability <= 1.0) {
            return Err(OdseError::Config(format!(
                "selection probability {} outside (0, 1]",
                self.selection_probability
            )));
        }
        if self.elitism >= self.population_size {
            return Err(OdseError::Config(
                "elitism must be smaller than the population".into(),
            ));
        }
        if self.knn_k == 0 || self.mode_seek_s == 0 || self.expansion_l == 0 {
            return Err(OdseError::Config(
                "knn_k, mode_seek_s and expansion_l must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Splitmix-style mixer deriving one evaluation seed per
/// (master seed, generation, individual) triple.
fn eval_seed(master: u64, generation: usize, index: usize) -> u64 {
    let mut z = master
        ^ (generation as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shared per-evaluation TWEC column cache: the training-set column of a
/// prototype is keyed by the prototype's training origin, so compression,
/// expansion and the final embedding reuse every computed distance.
struct EvalContext<'a> {
    train_graphs: Vec<&'a LabeledGraph>,
    weights: TwecWeights,
    label_cfg: LabelDissimConfig,
    columns: HashMap<usize, Vec<f64>>,
}

impl<'a> EvalContext<'a> {
    fn new(train: &'a [(LabeledGraph, String)], params: &OdseParams) -> Self {
        EvalContext {
            train_graphs: train.iter().map(|(g, _)| g).collect(),
            weights: params.weights,
            label_cfg: params.label_cfg.clone(),
            columns: HashMap::new(),
        }
    }

    /// Training-set DM over the given prototype set, computing only the
    /// columns not yet cached.
    fn dm_for(&mut self, rs: &PrototypeSet) -> Result<DissimilarityMatrix> {
        let missing: Vec<usize> = rs
            .origin_indices()
            .iter()
            .copied()
            .filter(|o| !self.columns.contains_key(o))
            .collect();
        if !missing.is_empty() {
            let origin_to_graph: HashMap<usize, &LabeledGraph> = rs
                .origin_indices()
                .iter()
                .zip(rs.graphs().iter())
                .map(|(&o, g)| (o, g))
                .collect();
            let computed: Vec<(usize, Vec<f64>)> = missing
                .par_iter()
                .map(|&origin| {
                    let proto = origin_to_graph[&origin];
                    let column = self
                        .train_graphs
                        .iter()
                        .map(|g| twec(g, proto, &self.weights, &self.label_cfg))
                        .collect::<Result<Vec<f64>>>()?;
                    Ok((origin, column))
                })
                .collect::<Result<Vec<_>>>()?;
            self.columns.extend(computed);
        }
        let n = self.train_graphs.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                rs.origin_indices()
                    .iter()
                    .map(|o| self.columns[o][i])
                    .collect()
            })
            .collect();
        DissimilarityMatrix::from_rows(
            rows,
            self.train_graphs.iter().map(|g| g.id().to_string()).collect(),
            rs.graphs().iter().map(|g| g.id().to_string()).collect(),
        )
    }
}

struct PipelineOutcome {
    report: FitnessBreakdown,
    model: Option<OdseModel>,
}

fn degenerate_report(initial_rs: usize) -> FitnessBreakdown {
    FitnessBreakdown {
        fitness: 0.0,
        recognition_rate: 0.0,
        theta_term: 0.0,
        upsilon: 0.0,
        initial_rs_size: initial_rs,
        final_rs_size: 0,
        expanded_prototypes: 0,
        degenerate: true,
    }
}

/// Runs the per-variant synthesis pipeline for one genome.
fn run_pipeline(
    genome: &OdseGenome,
    train: &[(LabeledGraph, String)],
    validation: &[(LabeledGraph, String)],
    class_set: &[String],
    cfg: &GaConfig,
    init_seed: u64,
    want_model: bool,
) -> Result<PipelineOutcome> {
    let params = decode_genome(genome, cfg)?;
    let mut ctx = EvalContext::new(train, &params);

    let initial_rs = if cfg.variant.expands() {
        random_init(train, cfg.selection_probability, init_seed)?
    } else {
        mode_seek(train, cfg.mode_seek_s, &params.weights, &params.label_cfg)?
    };
    let initial_size = initial_rs.len();

    let dm0 = ctx.dm_for(&initial_rs)?;
    let compressed = compress(&initial_rs, &dm0, &params.compression_estimator())?;
    let dm1 = dm0.filter_columns(&compressed.surviving_columns)?;

    let (final_rs, expanded) = if cfg.variant.expands() {
        match expand(
            &compressed.prototypes,
            &dm1,
            train,
            class_set,
            params.tau_e,
            params.sigma_e,
            cfg.expansion_l,
        ) {
            Ok(outcome) => (outcome.prototypes, outcome.expanded),
            Err(OdseError::DegenerateRs(_)) => {
                return Ok(PipelineOutcome {
                    report: degenerate_report(initial_size),
                    model: None,
                });
            }
            Err(e) => return Err(e),
        }
    } else {
        (compressed.prototypes, 0)
    };

    let dm_final = ctx.dm_for(&final_rs)?;
    let embedded = EmbeddedTrainingSet::new(
        (0..dm_final.rows())
            .map(|i| dm_final.row_embedding(i).to_vec())
            .collect(),
        train.iter().map(|(_, c)| c.clone()).collect(),
    )?;

    // Validation recognition rate.
    let validation_graphs: Vec<LabeledGraph> =
        validation.iter().map(|(g, _)| g.clone()).collect();
    let dm_validation = crate::dm::build_dm(
        &validation_graphs,
        final_rs.graphs(),
        &params.weights,
        &params.label_cfg,
    )?;
    let predictions: Vec<String> = (0..validation.len())
        .into_par_iter()
        .map(|i| knn_classify(&embedded, dm_validation.row_embedding(i), cfg.knn_k))
        .collect::<Result<Vec<_>>>()?;
    let correct = predictions
        .iter()
        .zip(validation.iter())
        .filter(|(p, (_, truth))| *p == truth)
        .count();
    let f1 = correct as f64 / validation.len() as f64;

    // Model-quality term: prototype-count cost plus DM informativeness.
    let d_i = final_rs.len() as f64;
    let zeta = class_set.len() as f64;
    let theta_term = (1.0 - (d_i - zeta) / train.len() as f64).clamp(0.0, 1.0);
    let upsilon = match params.compression {
        CompressionParam::SigmaC(sigma_c) => {
            qre_joint(&dm_final.columns(), &QreConfig::new(sigma_c))?
        }
        CompressionParam::Gamma(gamma) => {
            if final_rs.len() < 2 {
                0.0
            } else {
                mst_renyi_normalized(&dm_final.columns(), &MstReConfig::new(gamma))?
            }
        }
    };
    let f2 = cfg.varsigma * theta_term + (1.0 - cfg.varsigma) * upsilon;
    let fitness = cfg.eta * f1 + (1.0 - cfg.eta) * f2;

    let report = FitnessBreakdown {
        fitness,
        recognition_rate: f1,
        theta_term,
        upsilon,
        initial_rs_size: initial_size,
        final_rs_size: final_rs.len(),
        expanded_prototypes: expanded,
        degenerate: false,
    };
    let model = if want_model {
        Some(OdseModel {
            variant: cfg.variant,
            knn_k: cfg.knn_k,
            params,
            prototypes: final_rs.graphs().to_vec(),
            prototype_origins: final_rs.origin_indices().to_vec(),
            class_set: class_set.to_vec(),
            embedded_train: embedded,
            diagnostics: report.clone(),
        })
    } else {
        None
    };
    Ok(PipelineOutcome { report, model })
}

/// Objective value and diagnostics for one genome.
pub fn fitness(
    genome: &OdseGenome,
    train: &[(LabeledGraph, String)],
    validation: &[(LabeledGraph, String)],
    class_set: &[String],
    cfg: &GaConfig,
    init_seed: u64,
) -> Result<FitnessBreakdown> {
    run_pipeline(genome, train, validation, class_set, cfg, init_seed, false)
        .map(|out| out.report)
}

/// Roulette-wheel pick driven by an externally supplied uniform draw in
/// [0, 1). Falls back to a uniform pick when the total fitness is zero.
pub fn roulette_pick(fitness_values: &[f64], draw: f64) -> usize {
    let total: f64 = fitness_values.iter().sum();
    if total <= 0.0 {
        return ((draw * fitness_values.len() as f64) as usize).min(fitness_values.len() - 1);
    }
    let threshold = draw * total;
    let mut cumulative = 0.0;
    for (i, f) in fitness_values.iter().enumerate() {
        cumulative += f;
        if cumulative > threshold {
            return i;
        }
    }
    fitness_values.len() - 1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub mean_fitness: f64,
    pub best_rs_size: usize,
    pub stall: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaTrace {
    pub generations_run: usize,
    pub best_fitness: f64,
    pub per_generation: Vec<GenerationStats>,
    /// Fitness breakdowns of the last evaluated population, in population
    /// order.
    pub final_population: Vec<FitnessBreakdown>,
}

/// Evolutionary loop: roulette selection over raw fitness, two-point
/// crossover, per-gene uniform-replacement mutation, elitism on the
/// best-ever genome, and a stall-based early stop. Deterministic per seed:
/// every fitness evaluation owns a seed derived from
/// (seed, generation, index), so results do not depend on evaluation order.
pub fn ga_optimize(
    train: &[(LabeledGraph, String)],
    validation: &[(LabeledGraph, String)],
    class_set: &[String],
    cfg: &GaConfig,
    mut progress: impl FnMut(&GenerationStats),
) -> Result<(OdseModel, GaTrace)> {
    use rand::prelude::*;

    cfg.validate()?;
    if train.is_empty() || validation.is_empty() {
        return Err(OdseError::EmptySample("training or validation split"));
    }
    if cfg.knn_k > train.len() {
        return Err(OdseError::Config(format!(
            "knn_k = {} exceeds the training size {}",
            cfg.knn_k,
            train.len()
        )));
    }
    if cfg.variant.uses_mst() && train.len() < crate::entropy::MST_MIN_DIM {
        return Err(OdseError::DimensionTooSmall { dim: train.len() });
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut population: Vec<OdseGenome> = (0..cfg.population_size)
        .map(|_| OdseGenome {
            genes: (0..GENOME_LEN).map(|_| rng.random::<f64>()).collect(),
        })
        .collect();

    let mut best: Option<(f64, OdseGenome, usize, usize)> = None; // fitness, genome, gen, idx
    let mut stall = 0usize;
    let mut trace = GaTrace {
        generations_run: 0,
        best_fitness: 0.0,
        per_generation: Vec::new(),
        final_population: Vec::new(),
    };

    for generation in 1..=cfg.max_generations {
        if generation > 1 {
            // Breed the next population from the previous reports.
            let fitness_values: Vec<f64> = trace
                .final_population
                .iter()
                .map(|r| r.fitness)
                .collect();
            let mut next: Vec<OdseGenome> = Vec::with_capacity(cfg.population_size);
            for _ in 0..cfg.elitism {
                next.push(best.as_ref().unwrap().1.clone());
            }
            while next.len() < cfg.population_size {
                let a = roulette_pick(&fitness_values, rng.random::<f64>());
                let b = roulette_pick(&fitness_values, rng.random::<f64>());
                let (mut c1, mut c2) = (population[a].clone(), population[b].clone());
                if rng.random::<f64>() < cfg.crossover_rate {
                    let cut_a = rng.random_range(0..GENOME_LEN);
                    let cut_b = rng.random_range(0..GENOME_LEN);
                    let (lo, hi) = (cut_a.min(cut_b), cut_a.max(cut_b));
                    for g in lo..hi {
                        std::mem::swap(&mut c1.genes[g], &mut c2.genes[g]);
                    }
                }
                for child in [&mut c1, &mut c2] {
                    for gene in child.genes.iter_mut() {
                        if rng.random::<f64>() < cfg.mutation_rate {
                            *gene = rng.random::<f64>();
                        }
                    }
                }
                next.push(c1);
                if next.len() < cfg.population_size {
                    next.push(c2);
                }
            }
            population = next;
        }

        let reports: Vec<FitnessBreakdown> = population
            .par_iter()
            .enumerate()
            .map(|(idx, genome)| {
                fitness(
                    genome,
                    train,
                    validation,
                    class_set,
                    cfg,
                    eval_seed(cfg.seed, generation, idx),
                )
            })
            .collect::<Result<Vec<_>>>()?;

        let mut improved = false;
        for (idx, report) in reports.iter().enumerate() {
            let is_better = match &best {
                Some((bf, ..)) => report.fitness > *bf,
                None => true,
            };
            if is_better {
                best = Some((report.fitness, population[idx].clone(), generation, idx));
                improved = true;
            }
        }
        stall = if improved { 0 } else { stall + 1 };

        let best_fitness = best.as_ref().unwrap().0;
        let mean_fitness =
            reports.iter().map(|r| r.fitness).sum::<f64>() / reports.len() as f64;
        let best_in_gen = reports
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.fitness.total_cmp(&b.1.fitness).then(b.0.cmp(&a.0)))
            .unwrap()
            .1;
        let stats = GenerationStats {
            generation,
            best_fitness,
            mean_fitness,
            best_rs_size: best_in_gen.final_rs_size,
            stall,
        };
        progress(&stats);
        trace.per_generation.push(stats);
        trace.generations_run = generation;
        trace.final_population = reports;

        if stall >= cfg.stall_generations {
            break;
        }
    }

    let (best_fitness, best_genome, best_gen, best_idx) = best.unwrap();
    trace.best_fitness = best_fitness;
    let outcome = run_pipeline(
        &best_genome,
        train,
        validation,
        class_set,
        cfg,
        eval_seed(cfg.seed, best_gen, best_idx),
        true,
    )?;
    let model = outcome.model.ok_or_else(|| {
        OdseError::DegenerateRs("best genome degenerated on rebuild".into())
    })?;
    Ok((model, trace))
}
