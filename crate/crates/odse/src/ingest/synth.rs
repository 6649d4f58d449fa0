//! Seeded generator of letter-like planar graph datasets.
//!
//! Every class gets a random prototype drawing (a handful of 2D points
//! connected by a spanning tree plus an occasional chord); samples are the
//! prototype with Gaussian noise on the coordinates. Small noise levels give
//! linearly separable classes in the dissimilarity space.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{OdseError, Result};
use crate::graph::{Edge, LabelValue, LabeledGraph};
use crate::ingest::Dataset;

#[derive(Debug, Clone, Copy)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub per_class: usize,
    pub noise: f64,
    pub seed: u64,
}

struct ClassPrototype {
    coords: Vec<(f64, f64)>,
    edges: Vec<(usize, usize)>,
}

fn draw_prototype(rng: &mut ChaCha8Rng) -> ClassPrototype {
    let order = rng.random_range(4..=7);
    let coords: Vec<(f64, f64)> = (0..order)
        .map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
        .collect();
    // Spanning tree by sequential attachment, plus at most one chord.
    let mut edges: Vec<(usize, usize)> = (1..order)
        .map(|v| (rng.random_range(0..v), v))
        .collect();
    if rng.random::<f64>() < 0.5 && order >= 4 {
        for _ in 0..8 {
            let u = rng.random_range(0..order);
            let v = rng.random_range(0..order);
            let (u, v) = (u.min(v), u.max(v));
            if u != v && !edges.iter().any(|&(a, b)| (a, b) == (u, v)) {
                edges.push((u, v));
                break;
            }
        }
    }
    ClassPrototype { coords, edges }
}

fn sample_from(
    prototype: &ClassPrototype,
    noise: &Normal<f64>,
    rng: &mut ChaCha8Rng,
    id: String,
) -> Result<LabeledGraph> {
    let vertices = prototype
        .coords
        .iter()
        .map(|&(x, y)| {
            LabelValue::RealVector(vec![x + noise.sample(rng), y + noise.sample(rng)])
        })
        .collect();
    let edges = prototype
        .edges
        .iter()
        .map(|&(u, v)| Edge::new(u, v, None))
        .collect();
    LabeledGraph::new(id, vertices, edges)
}

/// Generates a three-split dataset with `per_class` samples per class per
/// split. Deterministic in the seed.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.classes == 0 || spec.per_class == 0 {
        return Err(OdseError::Config(
            "synthetic generator needs at least one class and one sample".into(),
        ));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(OdseError::Config(format!(
            "noise {} must be a nonnegative real",
            spec.noise
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise.max(1e-12))
        .map_err(|e| OdseError::Config(format!("bad noise level: {e}")))?;

    let prototypes: Vec<ClassPrototype> =
        (0..spec.classes).map(|_| draw_prototype(&mut rng)).collect();

    let mut splits: Vec<Vec<(LabeledGraph, String)>> = Vec::with_capacity(3);
    for split_name in ["tr", "vs", "ts"] {
        let mut samples = Vec::with_capacity(spec.classes * spec.per_class);
        for (c, prototype) in prototypes.iter().enumerate() {
            let class = format!("c{c}");
            for i in 0..spec.per_class {
                let id = format!("syn-{split_name}-{class}-{i}");
                samples.push((sample_from(prototype, &noise, &mut rng, id)?, class.clone()));
            }
        }
        splits.push(samples);
    }
    let test = splits.pop().unwrap();
    let validation = splits.pop().unwrap();
    let train = splits.pop().unwrap();
    Ok(Dataset::from_splits(train, validation, test))
}
