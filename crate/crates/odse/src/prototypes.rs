//! Representation-set lifecycle: initialization, clustering-based
//! compression with theorem-derived radii, entropy-gated expansion, and the
//! input-ordering efficiency experiment.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bsas::{bsas, euclidean, Partition};
use crate::dm::DissimilarityMatrix;
use crate::entropy::{beta_approx, qre_scalar, sigma_upper_bound, QreConfig, MST_MIN_DIM};
use crate::error::{OdseError, Result};
use crate::graph::{LabelDissimConfig, LabeledGraph};
use crate::twec::{twec, TwecWeights};

/// Ordered set of reference graphs with provenance into the training set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrototypeSet {
    graphs: Vec<LabeledGraph>,
    origin_indices: Vec<usize>,
}

impl PrototypeSet {
    pub fn new(graphs: Vec<LabeledGraph>, origin_indices: Vec<usize>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(OdseError::Dataset("prototype set is empty".into()));
        }
        if graphs.len() != origin_indices.len() {
            return Err(OdseError::Dataset(
                "prototype graphs and origin indices differ in length".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for &idx in &origin_indices {
            if !seen.insert(idx) {
                return Err(OdseError::Dataset(format!(
                    "duplicate origin index {idx} in prototype set"
                )));
            }
        }
        Ok(PrototypeSet {
            graphs,
            origin_indices,
        })
    }

    /// Prototypes taken from training-set positions, in the given order.
    pub fn from_training(
        train: &[(LabeledGraph, String)],
        indices: &[usize],
    ) -> Result<Self> {
        let graphs = indices
            .iter()
            .map(|&i| {
                train
                    .get(i)
                    .map(|(g, _)| g.clone())
                    .ok_or_else(|| OdseError::Dataset(format!("training index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        PrototypeSet::new(graphs, indices.to_vec())
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[LabeledGraph] {
        &self.graphs
    }

    pub fn origin_indices(&self) -> &[usize] {
        &self.origin_indices
    }

    /// Sub-set by positions within this set, in the given order.
    pub fn subset(&self, positions: &[usize]) -> Result<PrototypeSet> {
        let graphs = positions.iter().map(|&p| self.graphs[p].clone()).collect();
        let origins = positions.iter().map(|&p| self.origin_indices[p]).collect();
        PrototypeSet::new(graphs, origins)
    }
}

/// Independent Bernoulli(p) selection of training graphs; if the draw comes
/// out empty one graph is forced in uniformly at random.
pub fn random_init(
    train: &[(LabeledGraph, String)],
    p: f64,
    seed: u64,
) -> Result<PrototypeSet> {
    if train.is_empty() {
        return Err(OdseError::EmptySample("training set"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(OdseError::Config(format!(
            "selection probability {p} outside (0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = Vec::new();
    for i in 0..train.len() {
        if rng.random::<f64>() < p {
            indices.push(i);
        }
    }
    if indices.is_empty() {
        indices.push(rng.random_range(0..train.len()));
    }
    PrototypeSet::from_training(train, &indices)
}

/// Mode Seek initialization: per class, an object is a mode when its
/// distance to its s-th nearest same-class neighbor is minimal among its s
/// nearest same-class neighbors.
///
/// Classes with fewer than s+1 members fall back to the single object
/// minimizing the radius at the largest feasible neighborhood size.
pub fn mode_seek(
    train: &[(LabeledGraph, String)],
    s: usize,
    w: &TwecWeights,
    cfg: &LabelDissimConfig,
) -> Result<PrototypeSet> {
    if train.is_empty() {
        return Err(OdseError::EmptySample("training set"));
    }
    if s == 0 {
        return Err(OdseError::Config("neighborhood size s must be >= 1".into()));
    }

    // Classes in order of first appearance.
    let mut class_order: Vec<&str> = Vec::new();
    for (_, c) in train {
        if !class_order.contains(&c.as_str()) {
            class_order.push(c);
        }
    }

    let mut selected = Vec::new();
    for class in &class_order {
        let members: Vec<usize> = train
            .iter()
            .enumerate()
            .filter(|(_, (_, c))| c == class)
            .map(|(i, _)| i)
            .collect();
        let m = members.len();
        if m == 1 {
            selected.push(members[0]);
            continue;
        }

        // Intra-class distance matrix.
        let pairs: Vec<(usize, usize)> = (0..m)
            .flat_map(|a| ((a + 1)..m).map(move |b| (a, b)))
            .collect();
        let dists: Vec<f64> = pairs
            .par_iter()
            .map(|&(a, b)| twec(&train[members[a]].0, &train[members[b]].0, w, cfg))
            .collect::<Result<Vec<_>>>()?;
        let mut matrix = vec![vec![0.0; m]; m];
        for (&(a, b), &d) in pairs.iter().zip(dists.iter()) {
            matrix[a][b] = d;
            matrix[b][a] = d;
        }

        let eff_s = s.min(m - 1);
        // Per object: neighbors sorted by (distance, index), radius at eff_s.
        let mut radii = vec![0.0; m];
        let mut neighborhoods = vec![Vec::new(); m];
        for a in 0..m {
            let mut order: Vec<usize> = (0..m).filter(|&b| b != a).collect();
            order.sort_by(|&x, &y| matrix[a][x].total_cmp(&matrix[a][y]).then(x.cmp(&y)));
            radii[a] = matrix[a][order[eff_s - 1]];
            neighborhoods[a] = order[..eff_s].to_vec();
        }

        if m <= s {
            // Degenerate class: contribute its single most central object.
            let best = (0..m)
                .min_by(|&x, &y| radii[x].total_cmp(&radii[y]).then(x.cmp(&y)))
                .unwrap();
            selected.push(members[best]);
            continue;
        }

        for a in 0..m {
            if neighborhoods[a].iter().all(|&b| radii[a] <= radii[b]) {
                selected.push(members[a]);
            }
        }
    }

    selected.sort_unstable();
    selected.dedup();
    PrototypeSet::from_training(train, &selected)
}

/// Cluster radius guaranteeing QRE-compressible clusters:
/// sqrt(tau_c * n * sigma_c^2 * ln 2 / 2).
pub fn theta_qre(tau_c: f64, sigma_c: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau_c) {
        return Err(OdseError::Config(format!(
            "compression threshold {tau_c} outside [0, 1]"
        )));
    }
    if !(sigma_c > 0.0 && sigma_c <= sigma_upper_bound()) {
        return Err(OdseError::Config(format!(
            "kernel size {sigma_c} outside (0, {:.6}]",
            sigma_upper_bound()
        )));
    }
    Ok((tau_c * n as f64 * sigma_c * sigma_c * std::f64::consts::LN_2 / 2.0).sqrt())
}

/// Cluster radius guaranteeing MST-RE-compressible clusters:
/// 2^(tau_c - 1) * n^(tau_c / 2) * beta^((1 - tau_c) / gamma) * c(gamma),
/// with c evaluated at the largest realizable cluster size (the tightest
/// admissible value, since the factor decreases with cluster size).
pub fn theta_mst(tau_c: f64, gamma: f64, n: usize, k_max: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau_c) {
        return Err(OdseError::Config(format!(
            "compression threshold {tau_c} outside [0, 1]"
        )));
    }
    if !(gamma > 0.0 && gamma <= 3.0) {
        return Err(OdseError::Config(format!("gamma {gamma} outside (0, 3]")));
    }
    if n < MST_MIN_DIM {
        return Err(OdseError::DimensionTooSmall { dim: n });
    }
    if k_max < 2 {
        return Err(OdseError::Config(format!(
            "maximum cluster size {k_max} must be >= 2"
        )));
    }
    let nf = n as f64;
    let kf = k_max as f64;
    let alpha = (nf - gamma) / nf;
    let beta = beta_approx(gamma, n);
    let c = (kf.powf(alpha) / (kf - 1.0)).powf((1.0 - tau_c) / gamma);
    Ok(2f64.powf(tau_c - 1.0) * nf.powf(tau_c / 2.0) * beta.powf((1.0 - tau_c) / gamma) * c)
}

/// Which estimator (and thus which theorem-derived radius) drives the
/// compression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CompressionEstimator {
    Qre { tau_c: f64, sigma_c: f64 },
    Mst { tau_c: f64, gamma: f64 },
}

#[derive(Debug, Clone)]
pub struct CompressionOutcome {
    pub prototypes: PrototypeSet,
    /// Positions (columns of the input DM) of the surviving prototypes, in
    /// cluster-creation order.
    pub surviving_columns: Vec<usize>,
    pub partition: Partition,
}

/// Clustering-based compression: BSAS over the DM columns with the
/// theorem-derived radius and Q = |R|, then one MinSOD representative per
/// cluster.
pub fn compress(
    rs: &PrototypeSet,
    dm: &DissimilarityMatrix,
    estimator: &CompressionEstimator,
) -> Result<CompressionOutcome> {
    if dm.cols() != rs.len() {
        return Err(OdseError::Config(format!(
            "DM has {} columns but the prototype set has {} members",
            dm.cols(),
            rs.len()
        )));
    }
    if rs.len() < 2 {
        let mut partition = Partition::default();
        if rs.len() == 1 {
            partition = bsas(&dm.columns(), 0.0, 1, euclidean);
        }
        return Ok(CompressionOutcome {
            prototypes: rs.clone(),
            surviving_columns: (0..rs.len()).collect(),
            partition,
        });
    }
    let theta = match estimator {
        CompressionEstimator::Qre { tau_c, sigma_c } => theta_qre(*tau_c, *sigma_c, dm.rows())?,
        CompressionEstimator::Mst { tau_c, gamma } => {
            theta_mst(*tau_c, *gamma, dm.rows(), rs.len())?
        }
    };
    let partition = bsas(&dm.columns(), theta, rs.len(), euclidean);
    let surviving_columns = partition.representatives();
    let prototypes = rs.subset(&surviving_columns)?;
    Ok(CompressionOutcome {
        prototypes,
        surviving_columns,
        partition,
    })
}

#[derive(Debug, Clone)]
pub struct ExpansionOutcome {
    pub prototypes: PrototypeSet,
    /// Number of prototypes that tripped the expansion rule.
    pub expanded: usize,
    /// Number of replacement graphs drawn from the unselected pool.
    pub added: usize,
}

/// Entropy-gated expansion: every prototype whose DM column carries entropy
/// at most `tau_e` is replaced by, per class, the `l` unselected training
/// graphs most dissimilar to it.
///
/// `dm` must be the training-set DM over `rs`; the unselected pool is the
/// training set minus the current prototype origins. A class with an
/// exhausted pool contributes fewer than `l` replacements.
pub fn expand(
    rs: &PrototypeSet,
    dm: &DissimilarityMatrix,
    train: &[(LabeledGraph, String)],
    class_set: &[String],
    tau_e: f64,
    sigma_e: f64,
    l: usize,
) -> Result<ExpansionOutcome> {
    if dm.cols() != rs.len() || dm.rows() != train.len() {
        return Err(OdseError::Config(
            "expansion DM shape does not match the prototype/training sets".into(),
        ));
    }
    if l == 0 {
        return Err(OdseError::Config("expansion multiplicity l must be >= 1".into()));
    }
    let qre_cfg = QreConfig::new(sigma_e);
    qre_cfg.validate()?;

    let in_rs: std::collections::HashSet<usize> =
        rs.origin_indices().iter().copied().collect();
    let mut pool: Vec<usize> = (0..train.len()).filter(|i| !in_rs.contains(i)).collect();

    let mut keep = Vec::new();
    let mut additions: Vec<usize> = Vec::new();
    let mut expanded = 0;
    for j in 0..rs.len() {
        let column = dm.column(j)?;
        let h = qre_scalar(&column, &qre_cfg)?;
        if h > tau_e {
            keep.push(j);
            continue;
        }
        expanded += 1;
        for class in class_set {
            let mut candidates: Vec<usize> = pool
                .iter()
                .copied()
                .filter(|&i| &train[i].1 == class)
                .collect();
            candidates.sort_by(|&a, &b| column[b].total_cmp(&column[a]).then(a.cmp(&b)));
            for &chosen in candidates.iter().take(l) {
                additions.push(chosen);
                pool.retain(|&i| i != chosen);
            }
        }
    }

    let mut graphs: Vec<LabeledGraph> = keep.iter().map(|&j| rs.graphs()[j].clone()).collect();
    let mut origins: Vec<usize> = keep.iter().map(|&j| rs.origin_indices()[j]).collect();
    let added = additions.len();
    for i in additions {
        graphs.push(train[i].0.clone());
        origins.push(i);
    }
    if graphs.is_empty() {
        return Err(OdseError::DegenerateRs(
            "expansion emptied the prototype set (degenerate columns and exhausted pool)".into(),
        ));
    }
    Ok(ExpansionOutcome {
        prototypes: PrototypeSet::new(graphs, origins)?,
        expanded,
        added,
    })
}

/// Input ordering applied before the BSAS run of the efficiency experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EfficiencyOrdering {
    /// Natural order: adjacent elements at exactly the cluster radius.
    Best,
    /// Even positions first, then odd positions; for odd n this is the
    /// ordering s[(2j mod n) + 1].
    Worst,
    Random(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyResult {
    pub n: usize,
    pub achieved_clusters: usize,
    pub optimal_clusters: usize,
    /// Optimal over achieved: 1.0 when the ordering lets BSAS reach the
    /// ceil(n/3) optimum.
    pub ratio: f64,
}

/// Worst-case compression-efficiency experiment: n collinear points at
/// spacing theta, clustered after the chosen ordering.
pub fn efficiency_experiment(
    n: usize,
    theta: f64,
    ordering: EfficiencyOrdering,
) -> Result<EfficiencyResult> {
    if n < 3 {
        return Err(OdseError::Config(format!(
            "efficiency experiment needs n >= 3, got {n}"
        )));
    }
    if !theta.is_finite() || theta <= 0.0 {
        return Err(OdseError::Config("theta must be positive".into()));
    }
    let mut order: Vec<usize> = match ordering {
        EfficiencyOrdering::Best => (0..n).collect(),
        EfficiencyOrdering::Worst => {
            let mut o: Vec<usize> = (0..n).step_by(2).collect();
            o.extend((1..n).step_by(2));
            o
        }
        EfficiencyOrdering::Random(seed) => {
            let mut o: Vec<usize> = (0..n).collect();
            o.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            o
        }
    };
    let elements: Vec<Vec<f64>> = order
        .drain(..)
        .map(|i| vec![i as f64 * theta])
        .collect();
    let partition = bsas(&elements, theta, n, euclidean);
    let achieved = partition.len();
    let optimal = n.div_ceil(3);
    Ok(EfficiencyResult {
        n,
        achieved_clusters: achieved,
        optimal_clusters: optimal,
        ratio: optimal as f64 / achieved as f64,
    })
}
