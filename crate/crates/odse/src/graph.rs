//! Labeled graphs and the pluggable vertex/edge label dissimilarity measures.
//!
//! A graph carries one label per vertex and an optional label per edge. Label
//! values are either a real vector (e.g. 2D coordinates), a symbol (e.g. a
//! chemical element), or a named composite of sub-labels. All dissimilarities
//! are bounded in [0, 1] so that the graph matcher can renormalize cleanly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{OdseError, Result};

/// Absolute tolerance under which two real-vector labels count as equal.
pub const LABEL_EQ_TOLERANCE: f64 = 1e-12;

/// A vertex or edge label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelValue {
    RealVector(Vec<f64>),
    Symbol(String),
    Composite(BTreeMap<String, LabelValue>),
}

impl LabelValue {
    pub fn kind(&self) -> &'static str {
        match self {
            LabelValue::RealVector(_) => "real_vector",
            LabelValue::Symbol(_) => "symbol",
            LabelValue::Composite(_) => "composite",
        }
    }

    /// Checks that every real entry is finite, recursively.
    pub fn validate(&self) -> Result<()> {
        match self {
            LabelValue::RealVector(values) => {
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(OdseError::Config(
                        "real-vector label contains a non-finite entry".into(),
                    ));
                }
                Ok(())
            }
            LabelValue::Symbol(_) => Ok(()),
            LabelValue::Composite(subs) => {
                if subs.is_empty() {
                    return Err(OdseError::Config("composite label has no sub-labels".into()));
                }
                subs.values().try_for_each(LabelValue::validate)
            }
        }
    }
}

/// An undirected edge between two vertex indices, with an optional label.
///
/// Endpoints are stored normalized (`u < v`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<LabelValue>,
}

impl Edge {
    pub fn new(u: usize, v: usize, label: Option<LabelValue>) -> Self {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        Edge { u, v, label }
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct LabeledGraph {
    id: String,
    vertices: Vec<LabelValue>,
    edges: Vec<Edge>,
}

/// Serde-facing mirror of [`LabeledGraph`] without the invariants enforced.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGraph {
    id: String,
    vertices: Vec<LabelValue>,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for LabeledGraph {
    type Error = OdseError;

    fn try_from(raw: RawGraph) -> Result<Self> {
        LabeledGraph::new(raw.id, raw.vertices, raw.edges)
    }
}

impl From<LabeledGraph> for RawGraph {
    fn from(g: LabeledGraph) -> Self {
        RawGraph {
            id: g.id,
            vertices: g.vertices,
            edges: g.edges,
        }
    }
}

impl LabeledGraph {
    /// Builds a graph, enforcing: at least one vertex, valid edge endpoints,
    /// no self-loops, no duplicate edges, finite labels.
    pub fn new(
        id: impl Into<String>,
        vertices: Vec<LabelValue>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: String| OdseError::InvalidGraph {
            id: id.clone(),
            reason,
        };

        if vertices.is_empty() {
            return Err(invalid("graph has no vertices".into()));
        }
        for (i, label) in vertices.iter().enumerate() {
            label
                .validate()
                .map_err(|e| invalid(format!("vertex {i}: {e}")))?;
        }

        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for edge in edges {
            let Edge { u, v, label } = edge;
            if u >= vertices.len() || v >= vertices.len() {
                return Err(invalid(format!(
                    "edge ({u}, {v}) references a vertex out of range (|V| = {})",
                    vertices.len()
                )));
            }
            if u == v {
                return Err(invalid(format!("self-loop on vertex {u}")));
            }
            let edge = Edge::new(u, v, label);
            if let Some(l) = &edge.label {
                l.validate()
                    .map_err(|e| invalid(format!("edge ({u}, {v}): {e}")))?;
            }
            if !seen.insert((edge.u, edge.v)) {
                return Err(invalid(format!("duplicate edge ({}, {})", edge.u, edge.v)));
            }
            normalized.push(edge);
        }

        Ok(LabeledGraph {
            id,
            vertices,
            edges: normalized,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[LabelValue] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &LabelValue {
        &self.vertices[i]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        self.edges.iter().any(|e| e.u == u && e.v == v)
    }

    pub fn edge_label(&self, u: usize, v: usize) -> Option<&Option<LabelValue>> {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        self.edges
            .iter()
            .find(|e| e.u == u && e.v == v)
            .map(|e| &e.label)
    }

    /// Structural equality with real-vector labels compared at [`LABEL_EQ_TOLERANCE`].
    pub fn structurally_equal(&self, other: &LabeledGraph) -> bool {
        if self.order() != other.order() || self.size() != other.size() {
            return false;
        }
        let labels_eq = self
            .vertices
            .iter()
            .zip(other.vertices.iter())
            .all(|(a, b)| labels_equal(a, b));
        if !labels_eq {
            return false;
        }
        self.edges.iter().zip(other.edges.iter()).all(|(a, b)| {
            a.u == b.u
                && a.v == b.v
                && match (&a.label, &b.label) {
                    (None, None) => true,
                    (Some(x), Some(y)) => labels_equal(x, y),
                    _ => false,
                }
        })
    }
}

fn labels_equal(a: &LabelValue, b: &LabelValue) -> bool {
    match (a, b) {
        (LabelValue::RealVector(x), LabelValue::RealVector(y)) => {
            x.len() == y.len()
                && x.iter()
                    .zip(y.iter())
                    .all(|(p, q)| (p - q).abs() <= LABEL_EQ_TOLERANCE)
        }
        (LabelValue::Symbol(x), LabelValue::Symbol(y)) => x == y,
        (LabelValue::Composite(x), LabelValue::Composite(y)) => {
            x.len() == y.len()
                && x.iter().zip(y.iter()).all(|((nx, vx), (ny, vy))| {
                    nx == ny && labels_equal(vx, vy)
                })
        }
        _ => false,
    }
}

/// Parameters of the label dissimilarity measures, all in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelDissimConfig {
    /// Scale applied to the Euclidean distance between real-vector labels
    /// before clipping to 1.
    pub real_vector_scale: f64,
    /// Cost charged when two symbol labels differ.
    pub symbol_mismatch: f64,
    /// Mixing weights per composite sub-label name. Empty means uniform.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub composite_weights: BTreeMap<String, f64>,
}

impl Default for LabelDissimConfig {
    fn default() -> Self {
        LabelDissimConfig {
            real_vector_scale: 1.0,
            symbol_mismatch: 1.0,
            composite_weights: BTreeMap::new(),
        }
    }
}

impl LabelDissimConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.real_vector_scale) {
            return Err(OdseError::Config(format!(
                "real_vector_scale {} outside [0, 1]",
                self.real_vector_scale
            )));
        }
        if !in_unit(self.symbol_mismatch) {
            return Err(OdseError::Config(format!(
                "symbol_mismatch {} outside [0, 1]",
                self.symbol_mismatch
            )));
        }
        for (name, w) in &self.composite_weights {
            if !in_unit(*w) {
                return Err(OdseError::Config(format!(
                    "composite weight for `{name}` = {w} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Dissimilarity between two labels of the same kind, in [0, 1].
///
/// Real vectors: scaled Euclidean distance clipped to 1, snapped to exactly 0
/// when the raw distance is within [`LABEL_EQ_TOLERANCE`]. Symbols: 0/1
/// indicator scaled by the mismatch cost. Composites: convex combination of
/// the sub-label dissimilarities.
pub fn label_dissimilarity(
    a: &LabelValue,
    b: &LabelValue,
    cfg: &LabelDissimConfig,
) -> Result<f64> {
    match (a, b) {
        (LabelValue::RealVector(x), LabelValue::RealVector(y)) => {
            if x.len() != y.len() {
                return Err(OdseError::LabelDimensionMismatch {
                    left: x.len(),
                    right: y.len(),
                });
            }
            let dist = x
                .iter()
                .zip(y.iter())
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            if dist <= LABEL_EQ_TOLERANCE {
                return Ok(0.0);
            }
            Ok((cfg.real_vector_scale * dist).min(1.0))
        }
        (LabelValue::Symbol(x), LabelValue::Symbol(y)) => {
            Ok(if x == y { 0.0 } else { cfg.symbol_mismatch })
        }
        (LabelValue::Composite(x), LabelValue::Composite(y)) => {
            if x.len() != y.len() || x.keys().zip(y.keys()).any(|(p, q)| p != q) {
                return Err(OdseError::LabelKindMismatch {
                    left: format!("composite({})", keys_of(x)),
                    right: format!("composite({})", keys_of(y)),
                });
            }
            let mut weights = Vec::with_capacity(x.len());
            for name in x.keys() {
                weights.push(match cfg.composite_weights.get(name) {
                    Some(w) => *w,
                    None => 1.0,
                });
            }
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                return Err(OdseError::Config(
                    "composite weights sum to zero".into(),
                ));
            }
            let mut acc = 0.0;
            for ((name, va), w) in x.iter().zip(weights.iter()) {
                let vb = &y[name];
                acc += (w / total) * label_dissimilarity(va, vb, cfg)?;
            }
            Ok(acc)
        }
        _ => Err(OdseError::LabelKindMismatch {
            left: a.kind().to_string(),
            right: b.kind().to_string(),
        }),
    }
}

fn keys_of(m: &BTreeMap<String, LabelValue>) -> String {
    m.keys().cloned().collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(values: &[f64]) -> LabelValue {
        LabelValue::RealVector(values.to_vec())
    }

    fn sym(s: &str) -> LabelValue {
        LabelValue::Symbol(s.to_string())
    }

    #[test]
    fn identical_real_vectors_have_zero_dissimilarity() {
        let cfg = LabelDissimConfig::default();
        let d = label_dissimilarity(&rv(&[0.3, 0.7]), &rv(&[0.3, 0.7]), &cfg).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn symbol_mismatch_is_zero_one() {
        let cfg = LabelDissimConfig::default();
        assert_eq!(label_dissimilarity(&sym("C"), &sym("N"), &cfg).unwrap(), 1.0);
        assert_eq!(label_dissimilarity(&sym("C"), &sym("C"), &cfg).unwrap(), 0.0);
    }

    #[test]
    fn scaled_euclidean_distance_is_clipped() {
        let cfg = LabelDissimConfig {
            real_vector_scale: 0.1,
            ..Default::default()
        };
        // ||(3,4)|| = 5, scaled by 0.1.
        let d = label_dissimilarity(&rv(&[0.0, 0.0]), &rv(&[3.0, 4.0]), &cfg).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        let far = label_dissimilarity(&rv(&[0.0, 0.0]), &rv(&[30.0, 40.0]), &cfg).unwrap();
        assert_eq!(far, 1.0);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let cfg = LabelDissimConfig::default();
        let err = label_dissimilarity(&rv(&[1.0]), &sym("C"), &cfg).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("real_vector") && msg.contains("symbol"), "{msg}");
    }

    #[test]
    fn composite_is_convex_combination() {
        let mut subs_a = BTreeMap::new();
        subs_a.insert("coords".to_string(), rv(&[0.0]));
        subs_a.insert("kind".to_string(), sym("A"));
        let mut subs_b = BTreeMap::new();
        subs_b.insert("coords".to_string(), rv(&[0.5]));
        subs_b.insert("kind".to_string(), sym("B"));
        let cfg = LabelDissimConfig::default();
        let d = label_dissimilarity(
            &LabelValue::Composite(subs_a),
            &LabelValue::Composite(subs_b),
            &cfg,
        )
        .unwrap();
        // Uniform weights: (0.5 + 1.0) / 2.
        assert!((d - 0.75).abs() < 1e-15);
    }

    #[test]
    fn graph_invariants_are_enforced() {
        let v = vec![rv(&[0.0]), rv(&[1.0])];
        assert!(LabeledGraph::new("g", v.clone(), vec![Edge::new(0, 0, None)]).is_err());
        assert!(LabeledGraph::new("g", v.clone(), vec![Edge::new(0, 2, None)]).is_err());
        assert!(LabeledGraph::new(
            "g",
            v.clone(),
            vec![Edge::new(0, 1, None), Edge::new(1, 0, None)]
        )
        .is_err());
        assert!(LabeledGraph::new("g", vec![], vec![]).is_err());
        assert!(LabeledGraph::new("g", v, vec![Edge::new(0, 1, None)]).is_ok());
    }

    #[test]
    fn nan_labels_are_rejected() {
        assert!(LabeledGraph::new("g", vec![rv(&[f64::NAN])], vec![]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_label() -> impl Strategy<Value = LabelValue> {
            prop_oneof![
                proptest::collection::vec(-10.0f64..10.0, 1..4).prop_map(LabelValue::RealVector),
                "[a-z]{1,3}".prop_map(LabelValue::Symbol),
            ]
        }

        fn compatible_pair() -> impl Strategy<Value = (LabelValue, LabelValue)> {
            prop_oneof![
                (
                    proptest::collection::vec(-10.0f64..10.0, 3),
                    proptest::collection::vec(-10.0f64..10.0, 3)
                )
                    .prop_map(|(a, b)| (LabelValue::RealVector(a), LabelValue::RealVector(b))),
                ("[a-z]{1,3}", "[a-z]{1,3}")
                    .prop_map(|(a, b)| (LabelValue::Symbol(a), LabelValue::Symbol(b))),
            ]
        }

        proptest! {
            #[test]
            fn symmetric_and_bounded((a, b) in compatible_pair(), scale in 0.0f64..=1.0) {
                let cfg = LabelDissimConfig { real_vector_scale: scale, ..Default::default() };
                let ab = label_dissimilarity(&a, &b, &cfg).unwrap();
                let ba = label_dissimilarity(&b, &a, &cfg).unwrap();
                prop_assert_eq!(ab, ba);
                prop_assert!((0.0..=1.0).contains(&ab));
            }

            #[test]
            fn zero_on_self(a in arb_label(), scale in 0.001f64..=1.0) {
                let cfg = LabelDissimConfig { real_vector_scale: scale, ..Default::default() };
                prop_assert_eq!(label_dissimilarity(&a, &a, &cfg).unwrap(), 0.0);
            }
        }
    }
}
