//! Three-weight edit scheme (TWEC) graph dissimilarity.
//!
//! Vertices of the first graph are greedily assigned, in index order, to the
//! not-yet-matched vertex of the second graph with the lowest label
//! dissimilarity (best matching first). Edge operations are induced by the
//! vertex assignment. The directed raw cost is normalized by the maximum cost
//! attainable in that direction and the two directions are averaged, yielding
//! a symmetric measure in [0, 2] with an exact zero diagonal.

use serde::{Deserialize, Serialize};

use crate::error::{OdseError, Result};
use crate::graph::{label_dissimilarity, LabelDissimConfig, LabelValue, LabeledGraph};

/// The six edit weights, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwecWeights {
    pub w_sub_v: f64,
    pub w_ins_v: f64,
    pub w_del_v: f64,
    pub w_sub_e: f64,
    pub w_ins_e: f64,
    pub w_del_e: f64,
}

impl Default for TwecWeights {
    fn default() -> Self {
        TwecWeights::uniform(1.0)
    }
}

impl TwecWeights {
    pub fn uniform(w: f64) -> Self {
        TwecWeights {
            w_sub_v: w,
            w_ins_v: w,
            w_del_v: w,
            w_sub_e: w,
            w_ins_e: w,
            w_del_e: w,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.w_sub_v,
            self.w_ins_v,
            self.w_del_v,
            self.w_sub_e,
            self.w_ins_e,
            self.w_del_e,
        ];
        if all.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(OdseError::Config(format!(
                "TWEC weights outside [0, 1]: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Dissimilarity between two optional edge labels.
///
/// Two unlabeled edges are identical; a labeled edge never matches an
/// unlabeled one for free.
fn edge_label_dissim(
    a: &Option<LabelValue>,
    b: &Option<LabelValue>,
    cfg: &LabelDissimConfig,
) -> Result<f64> {
    match (a, b) {
        (None, None) => Ok(0.0),
        (Some(x), Some(y)) => label_dissimilarity(x, y, cfg),
        _ => Ok(1.0),
    }
}

/// Greedy best-matching-first assignment of `g1` vertices onto `g2` vertices.
///
/// Returns, per `g1` vertex, the matched `g2` index (or `None` once `g2` is
/// exhausted). Ties in label dissimilarity go to the lower `g2` index.
fn greedy_assignment(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    cfg: &LabelDissimConfig,
) -> Result<Vec<Option<usize>>> {
    let mut taken = vec![false; g2.order()];
    let mut assignment = Vec::with_capacity(g1.order());
    for v1 in g1.vertices() {
        let mut best: Option<(usize, f64)> = None;
        for (j, v2) in g2.vertices().iter().enumerate() {
            if taken[j] {
                continue;
            }
            let d = label_dissimilarity(v1, v2, cfg)?;
            match best {
                Some((_, bd)) if d >= bd => {}
                _ => best = Some((j, d)),
            }
        }
        match best {
            Some((j, _)) => {
                taken[j] = true;
                assignment.push(Some(j));
            }
            None => assignment.push(None),
        }
    }
    Ok(assignment)
}

struct DirectedCost {
    raw: f64,
    max: f64,
}

fn directed_cost(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    w: &TwecWeights,
    cfg: &LabelDissimConfig,
) -> Result<DirectedCost> {
    let assignment = greedy_assignment(g1, g2, cfg)?;

    let mut raw = 0.0;
    for (i, slot) in assignment.iter().enumerate() {
        match slot {
            Some(j) => raw += w.w_sub_v * label_dissimilarity(g1.vertex(i), g2.vertex(*j), cfg)?,
            None => raw += w.w_del_v,
        }
    }
    let matched = assignment.iter().filter(|s| s.is_some()).count();
    raw += w.w_ins_v * (g2.order() - matched) as f64;

    // Edge operations induced by the vertex assignment: a g1 edge whose both
    // endpoints map onto a g2 edge is a substitution, otherwise a deletion;
    // g2 edges not covered by a substitution are insertions.
    let mut covered = std::collections::HashSet::new();
    for e in g1.edges() {
        let (a, b) = e.endpoints();
        let image = match (assignment[a], assignment[b]) {
            (Some(x), Some(y)) => {
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                g2.edge_label(x, y).map(|l2| ((x, y), l2))
            }
            _ => None,
        };
        match image {
            Some(((x, y), l2)) => {
                raw += w.w_sub_e * edge_label_dissim(&e.label, l2, cfg)?;
                covered.insert((x, y));
            }
            None => raw += w.w_del_e,
        }
    }
    let inserted = g2
        .edges()
        .iter()
        .filter(|e| !covered.contains(&e.endpoints()))
        .count();
    raw += w.w_ins_e * inserted as f64;

    let n1 = g1.order() as f64;
    let n2 = g2.order() as f64;
    let max = n1.min(n2) * w.w_sub_v
        + (n2 - n1).max(0.0) * w.w_ins_v
        + (n1 - n2).max(0.0) * w.w_del_v
        + g1.size() as f64 * w.w_sub_e.max(w.w_del_e)
        + g2.size() as f64 * w.w_ins_e;

    Ok(DirectedCost { raw, max })
}

/// Raw (unnormalized) directed TWEC cost from `g1` to `g2`.
pub fn twec_directed(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    w: &TwecWeights,
    cfg: &LabelDissimConfig,
) -> Result<f64> {
    Ok(directed_cost(g1, g2, w, cfg)?.raw)
}

/// Symmetric TWEC dissimilarity in [0, 2].
///
/// Each directed raw cost is divided by its direction's maximum attainable
/// cost; the mean of the two normalized costs is scaled to the [0, 2] range.
/// A direction with a zero denominator (all relevant weights zero)
/// contributes 0.
pub fn twec(
    g1: &LabeledGraph,
    g2: &LabeledGraph,
    w: &TwecWeights,
    cfg: &LabelDissimConfig,
) -> Result<f64> {
    let fwd = directed_cost(g1, g2, w, cfg)?;
    let bwd = directed_cost(g2, g1, w, cfg)?;
    // The denominator bounds the raw cost mathematically; the clamp only
    // strips the ulp-level noise of the two summation orders.
    let norm = |c: &DirectedCost| {
        if c.max > 0.0 {
            (c.raw / c.max).clamp(0.0, 1.0)
        } else {
            0.0
        }
    };
    Ok(norm(&fwd) + norm(&bwd))
}
