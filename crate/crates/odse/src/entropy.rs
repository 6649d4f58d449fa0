//! Normalized Rényi entropy estimators.
//!
//! Two estimators are provided: the kernel-based quadratic Rényi entropy
//! (QRE), computed from the quadratic information potential of a Gaussian
//! kernel density estimate, and the alpha-order entropy obtained from the
//! weighted length of an entropic minimum spanning tree (MST-RE). Both are
//! normalized into [0, 1] against the maximum attainable under the bounded
//! input extent, so downstream compression/expansion thresholds compare
//! directly against them.
//!
//! Conventions: unit-peak Gaussian kernel K(u; s) = exp(-u^2 / (2 s^2)), so a
//! degenerate sample yields exactly zero entropy, and base-2 logarithms, so
//! the maximum-entropy normalization over extent 2 reduces to the sample
//! dimension.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{OdseError, Result};

/// Extent of the dissimilarity values: TWEC is normalized into [0, 2].
pub const EXTENT: f64 = 2.0;

/// 2 * pi * e, the constant in the MST-RE beta approximation.
pub const TWO_PI_E: f64 = 2.0 * std::f64::consts::PI * std::f64::consts::E;

/// Smallest sample dimension accepted by the MST-RE estimator: the beta
/// approximation needs dim > 2*pi*e and a comfortable margin above the
/// ceiling of that constant.
pub const MST_MIN_DIM: usize = 19;

static CLIP_EVENTS: AtomicU64 = AtomicU64::new(0);

/// Number of times a normalized entropy overshot 1 and was clipped.
pub fn clip_events() -> u64 {
    CLIP_EVENTS.load(Ordering::Relaxed)
}

fn clip_unit(h: f64) -> f64 {
    if h > 1.0 {
        CLIP_EVENTS.fetch_add(1, Ordering::Relaxed);
        1.0
    } else if h < 0.0 {
        0.0
    } else {
        h
    }
}

/// Upper end of the admissible kernel-size interval, sqrt(8 / ln 2).
pub fn sigma_upper_bound() -> f64 {
    (8.0 / std::f64::consts::LN_2).sqrt()
}

/// Configuration of the kernel-based QRE estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QreConfig {
    /// Kernel size sigma, in (0, sqrt(8 / ln 2)].
    pub sigma: f64,
    /// Input data extent; 2 for TWEC dissimilarity values.
    pub extent: f64,
}

impl QreConfig {
    pub fn new(sigma: f64) -> Self {
        QreConfig {
            sigma,
            extent: EXTENT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= sigma_upper_bound()) {
            return Err(OdseError::Config(format!(
                "kernel size {} outside (0, {:.6}]",
                self.sigma,
                sigma_upper_bound()
            )));
        }
        if !self.extent.is_finite() || self.extent <= 0.0 {
            return Err(OdseError::Config(format!(
                "extent {} must be positive",
                self.extent
            )));
        }
        Ok(())
    }
}

/// Configuration of the MST-based estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MstReConfig {
    /// Exponent applied to MST edge lengths, in (0, 3].
    pub gamma: f64,
}

impl MstReConfig {
    pub fn new(gamma: f64) -> Self {
        MstReConfig { gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 3.0) {
            return Err(OdseError::Config(format!(
                "gamma {} outside (0, 3]",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Entropy order induced by the edge-length exponent: (dim - gamma) / dim.
pub fn alpha_of_gamma(gamma: f64, dim: usize) -> f64 {
    (dim as f64 - gamma) / dim as f64
}

/// Large-dimension approximation of the MST length constant:
/// (gamma / 2) * ln(dim / (2 pi e)).
pub fn beta_approx(gamma: f64, dim: usize) -> f64 {
    (gamma / 2.0) * (dim as f64 / TWO_PI_E).ln()
}

/// Quadratic information potential of `samples` (k points of dimension m):
/// the mean over all ordered pairs of the product of per-coordinate
/// unit-peak Gaussian kernels with doubled variance.
fn information_potential(samples: &[Vec<f64>], sigma: f64) -> f64 {
    let k = samples.len();
    let inv_four_sigma_sq = 1.0 / (4.0 * sigma * sigma);
    // Pairwise term via the squared Euclidean distance: the per-coordinate
    // kernel product collapses to exp(-||xi - xj||^2 / (4 sigma^2)).
    let mut off_diagonal = 0.0;
    for i in 0..k {
        let mut row = 0.0;
        for j in (i + 1)..k {
            let sq: f64 = samples[i]
                .iter()
                .zip(samples[j].iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            row += (-sq * inv_four_sigma_sq).exp();
        }
        off_diagonal += row;
    }
    (k as f64 + 2.0 * off_diagonal) / (k as f64 * k as f64)
}

/// Normalized joint QRE of `samples`: k measurements of an m-dimensional
/// random vector, each coordinate in [0, extent]. Returns a value in [0, 1];
/// 0 for a degenerate (single-support-point) sample.
pub fn qre_joint(samples: &[Vec<f64>], cfg: &QreConfig) -> Result<f64> {
    cfg.validate()?;
    if samples.is_empty() {
        return Err(OdseError::EmptySample("QRE sample"));
    }
    let m = samples[0].len();
    if m == 0 {
        return Err(OdseError::EmptySample("QRE sample dimension"));
    }
    if samples.iter().any(|s| s.len() != m) {
        return Err(OdseError::Config(
            "QRE sample vectors have inconsistent dimensions".into(),
        ));
    }
    let v = information_potential(samples, cfg.sigma);
    let h = -v.log2() / (m as f64 * cfg.extent.log2());
    Ok(clip_unit(h))
}

/// Normalized QRE of a unidimensional sample: n measurements of dimension 1.
pub fn qre_scalar(values: &[f64], cfg: &QreConfig) -> Result<f64> {
    let wrapped: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
    qre_joint(&wrapped, cfg)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Kruskal over the complete graph of `points`, returning MST edges in
/// acceptance order. Ties in edge weight break by lexicographic endpoint
/// index.
fn mst_edges(points: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let k = points.len();
    let mut edges = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            edges.push((i, j, euclidean(&points[i], &points[j])));
        }
    }
    edges.sort_by(|a, b| {
        a.2.total_cmp(&b.2)
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });

    let mut parent: Vec<usize> = (0..k).collect();
    fn root(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] == x {
            x
        } else {
            let r = root(parent, parent[x]);
            parent[x] = r;
            r
        }
    }

    let mut tree = Vec::with_capacity(k - 1);
    for (i, j, w) in edges {
        let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            tree.push((i, j, w));
            if tree.len() == k - 1 {
                break;
            }
        }
    }
    tree
}

/// Weighted MST length: the minimum over spanning trees of the sum of edge
/// lengths raised to `gamma`.
pub fn mst_length(points: &[Vec<f64>], gamma: f64) -> Result<f64> {
    MstReConfig::new(gamma).validate()?;
    if points.len() < 2 {
        return Err(OdseError::EmptySample(
            "MST length needs at least two points",
        ));
    }
    Ok(mst_edges(points)
        .iter()
        .map(|&(_, _, w)| w.powf(gamma))
        .sum())
}

/// Normalized alpha-order Rényi entropy from the MST length of k points of
/// dimension m.
///
/// The raw estimate (m / gamma) * [ln(L / k^alpha) - ln beta] is divided by
/// its maximizer, attained when all points sit at the extreme mutual distance
/// `extent * sqrt(m)` of the bounded hypercube, and clipped into [0, 1].
pub fn mst_renyi_normalized(points: &[Vec<f64>], cfg: &MstReConfig) -> Result<f64> {
    cfg.validate()?;
    if points.len() < 2 {
        return Err(OdseError::EmptySample(
            "MST entropy needs at least two points",
        ));
    }
    let m = points[0].len();
    if points.iter().any(|p| p.len() != m) {
        return Err(OdseError::Config(
            "MST sample vectors have inconsistent dimensions".into(),
        ));
    }
    if m < MST_MIN_DIM {
        return Err(OdseError::DimensionTooSmall { dim: m });
    }
    let k = points.len() as f64;
    let gamma = cfg.gamma;
    let dim = m as f64;

    let alpha = alpha_of_gamma(gamma, m);
    let beta = beta_approx(gamma, m);
    debug_assert!(beta > 0.0);

    let length = mst_length(points, gamma)?;
    let raw = (dim / gamma) * ((length / k.powf(alpha)).ln() - beta.ln());
    let iota = (dim / gamma)
        * ((k - 1.0).ln() + gamma * (EXTENT * dim.sqrt()).ln() - alpha * k.ln() - beta.ln());
    if iota <= 0.0 {
        return Err(OdseError::DegenerateNormalizer(iota));
    }
    Ok(clip_unit(raw / iota))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_bound_value() {
        let s = sigma_upper_bound();
        assert!((s - 3.3972).abs() < 5e-4);
        assert!((s * s * std::f64::consts::LN_2 - 8.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_sample_has_zero_entropy() {
        let cfg = QreConfig::new(0.5);
        let samples = vec![vec![0.7, 1.1]; 8];
        assert_eq!(qre_joint(&samples, &cfg).unwrap(), 0.0);
        assert_eq!(qre_scalar(&[1.3; 10], &cfg).unwrap(), 0.0);
    }

    #[test]
    fn two_scalar_samples_closed_form() {
        let sigma = 0.8;
        let cfg = QreConfig::new(sigma);
        for &c in &[0.1, 0.5, 1.0, 1.9] {
            let h = qre_scalar(&[0.0, c], &cfg).unwrap();
            let v = (2.0 + 2.0 * (-c * c / (4.0 * sigma * sigma)).exp()) / 4.0;
            let expected = (-v.log2()).clamp(0.0, 1.0);
            assert!((h - expected).abs() < 1e-14, "c={c}: {h} vs {expected}");
        }
    }

    #[test]
    fn scalar_equals_joint_of_wrapped_values() {
        let cfg = QreConfig::new(0.3);
        let values = [0.1, 0.4, 1.2, 1.9, 0.8];
        let wrapped: Vec<Vec<f64>> = values.iter().map(|&v| vec![v]).collect();
        assert_eq!(
            qre_scalar(&values, &cfg).unwrap(),
            qre_joint(&wrapped, &cfg).unwrap()
        );
    }

    #[test]
    fn qre_agrees_with_literal_double_sum() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let k = rng.random_range(2..30);
            let m = rng.random_range(1..12);
            let sigma = rng.random_range(0.05..sigma_upper_bound());
            let samples: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..m).map(|_| rng.random_range(0.0..EXTENT)).collect())
                .collect();
            let cfg = QreConfig::new(sigma);
            let h = qre_joint(&samples, &cfg).unwrap();

            // Literal O(k^2 m) evaluation: product of per-coordinate kernels
            // over every ordered pair.
            let mut v = 0.0;
            for a in &samples {
                for b in &samples {
                    let mut prod = 1.0;
                    for r in 0..m {
                        let u = b[r] - a[r];
                        prod *= (-u * u / (2.0 * (sigma * std::f64::consts::SQRT_2).powi(2))).exp();
                    }
                    v += prod;
                }
            }
            v /= (k * k) as f64;
            let oracle = (-v.log2() / m as f64).clamp(0.0, 1.0);
            assert!(
                (h - oracle).abs() <= 1e-12 * oracle.max(1.0),
                "k={k} m={m}: {h} vs {oracle}"
            );
        }
    }

    #[test]
    fn qre_scalar_fifty_values_vs_double_sum() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        let values: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..2.0)).collect();
        let sigma = 0.35;
        let h = qre_scalar(&values, &QreConfig::new(sigma)).unwrap();
        let n = values.len() as f64;
        let mut v = 0.0;
        for a in &values {
            for b in &values {
                v += (-(b - a) * (b - a) / (4.0 * sigma * sigma)).exp();
            }
        }
        v /= n * n;
        let oracle = (-v.log2()).clamp(0.0, 1.0);
        assert!((h - oracle).abs() <= 1e-12 * oracle.max(1.0), "{h} vs {oracle}");
    }

    #[test]
    fn qre_invariant_under_permutations() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..5).map(|_| rng.random_range(0.0..2.0)).collect())
            .collect();
        let cfg = QreConfig::new(0.4);
        let base = qre_joint(&samples, &cfg).unwrap();

        let mut shuffled = samples.clone();
        shuffled.shuffle(&mut rng);
        let permuted_samples = qre_joint(&shuffled, &cfg).unwrap();
        assert!((base - permuted_samples).abs() < 1e-12);

        let coord_permuted: Vec<Vec<f64>> = samples
            .iter()
            .map(|s| {
                let mut r = s.clone();
                r.rotate_left(2);
                r
            })
            .collect();
        let permuted_coords = qre_joint(&coord_permuted, &cfg).unwrap();
        assert!((base - permuted_coords).abs() < 1e-12);
    }

    #[test]
    fn qre_rejects_bad_inputs() {
        assert!(qre_joint(&[], &QreConfig::new(0.5)).is_err());
        assert!(qre_scalar(&[1.0], &QreConfig::new(0.0)).is_err());
        assert!(qre_scalar(&[1.0], &QreConfig::new(sigma_upper_bound() + 0.01)).is_err());
    }

    #[test]
    fn overshoot_is_clipped_and_counted() {
        let before = clip_events();
        // Four well-separated scalar values with a tiny kernel: the raw
        // normalized entropy exceeds 1 (log2 k > m * log2 extent).
        let h = qre_scalar(&[0.0, 0.7, 1.4, 2.0], &QreConfig::new(0.03)).unwrap();
        assert_eq!(h, 1.0);
        assert!(clip_events() > before);
    }

    #[test]
    fn mst_length_of_two_points() {
        for &gamma in &[0.5, 1.0, 2.0, 3.0] {
            let l = mst_length(&[vec![0.0, 0.0], vec![3.0, 4.0]], gamma).unwrap();
            assert!((l - 5.0f64.powf(gamma)).abs() < 1e-12);
        }
    }

    #[test]
    fn mst_length_of_collinear_points_is_a_path() {
        let h = 0.7;
        let points: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64 * h]).collect();
        let l = mst_length(&points, 1.7).unwrap();
        assert!((l - 8.0 * h.powf(1.7)).abs() < 1e-12);
    }

    /// Enumerates every labeled spanning tree of K_k via Pruefer sequences.
    fn brute_force_min_tree_length(points: &[Vec<f64>], gamma: f64) -> f64 {
        let k = points.len();
        assert!((2..=6).contains(&k));
        if k == 2 {
            return euclidean(&points[0], &points[1]).powf(gamma);
        }
        let seq_len = k - 2;
        let total = (k as u64).pow(seq_len as u32);
        let mut best = f64::INFINITY;
        for code in 0..total {
            // Decode the Pruefer sequence into an edge list.
            let mut seq = Vec::with_capacity(seq_len);
            let mut c = code;
            for _ in 0..seq_len {
                seq.push((c % k as u64) as usize);
                c /= k as u64;
            }
            let mut degree = vec![1usize; k];
            for &s in &seq {
                degree[s] += 1;
            }
            let mut edges = Vec::with_capacity(k - 1);
            let mut deg = degree.clone();
            for &s in &seq {
                let leaf = (0..k).find(|&v| deg[v] == 1).unwrap();
                edges.push((leaf, s));
                deg[leaf] = 0;
                deg[s] -= 1;
            }
            let rest: Vec<usize> = (0..k).filter(|&v| deg[v] == 1).collect();
            edges.push((rest[0], rest[1]));

            let mut lens: Vec<f64> = edges
                .iter()
                .map(|&(a, b)| euclidean(&points[a], &points[b]))
                .collect();
            lens.sort_by(|a, b| a.total_cmp(b));
            let length: f64 = lens.iter().map(|w| w.powf(gamma)).sum();
            if length < best {
                best = length;
            }
        }
        best
    }

    #[test]
    fn mst_length_matches_spanning_tree_enumeration() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let k = rng.random_range(3..=6);
            let gamma = rng.random_range(0.2..=3.0);
            let points: Vec<Vec<f64>> = (0..k)
                .map(|_| vec![rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)])
                .collect();
            let fast = mst_length(&points, gamma).unwrap();
            let brute = brute_force_min_tree_length(&points, gamma);
            assert_eq!(fast, brute, "k={k} gamma={gamma}");
        }
    }

    #[test]
    fn mst_length_invariant_under_point_permutation() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let points: Vec<Vec<f64>> = (0..10)
            .map(|_| vec![rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)])
            .collect();
        let base = mst_length(&points, 1.3).unwrap();
        let mut shuffled = points.clone();
        shuffled.shuffle(&mut rng);
        let permuted = mst_length(&shuffled, 1.3).unwrap();
        assert!((base - permuted).abs() < 1e-12);
    }

    #[test]
    fn alpha_and_beta_hand_values() {
        assert_eq!(alpha_of_gamma(1.0, 2), 0.5);
        assert!((alpha_of_gamma(3.0, 100) - 0.97).abs() < 1e-15);
        // dim = 2 pi e * e makes ln(dim / 2 pi e) = 1.
        let dim = (TWO_PI_E * std::f64::consts::E).round() as usize;
        let expected = (dim as f64 / TWO_PI_E).ln();
        assert!((beta_approx(2.0, dim) - expected).abs() < 1e-15);
        for i in 1..50 {
            let gamma = i as f64 * 0.06;
            let a = alpha_of_gamma(gamma, 30);
            assert!(a > 0.0 && a < 1.0);
        }
    }

    #[test]
    fn alpha_depends_only_on_ratio() {
        assert_eq!(alpha_of_gamma(1.0, 20), alpha_of_gamma(2.0, 40));
    }

    #[test]
    fn corner_spread_sample_attains_unit_entropy() {
        // k points mutually at distance extent*sqrt(m): scaled basis vectors.
        let m = 25;
        let scale = (2.0 * m as f64).sqrt();
        let mut points = Vec::new();
        for i in 0..3 {
            let mut p = vec![0.0; m];
            p[i] = scale;
            points.push(p);
        }
        let h = mst_renyi_normalized(&points, &MstReConfig::new(1.5)).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mst_entropy_formula_reimplementation() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let k = 10;
        let m = 50;
        let gamma = 1.0;
        let points: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..m).map(|_| rng.random_range(0.0..2.0)).collect())
            .collect();
        let h = mst_renyi_normalized(&points, &MstReConfig::new(gamma)).unwrap();

        // Independent re-evaluation from scratch.
        let alpha = (m as f64 - gamma) / m as f64;
        let beta = gamma / 2.0 * (m as f64 / (2.0 * std::f64::consts::PI * std::f64::consts::E)).ln();
        let length = brute_force_prim_length(&points, gamma);
        let raw = m as f64 / gamma * ((length / (k as f64).powf(alpha)).ln() - beta.ln());
        let iota = m as f64 / gamma
            * (((k - 1) as f64).ln() + gamma * (2.0 * (m as f64).sqrt()).ln()
                - alpha * (k as f64).ln()
                - beta.ln());
        let expected = (raw / iota).clamp(0.0, 1.0);
        let rel = (h - expected).abs() / expected.abs().max(1e-300);
        assert!(rel <= 1e-12, "{h} vs {expected}");
    }

    /// Prim's algorithm as an independent MST route for the oracle above.
    fn brute_force_prim_length(points: &[Vec<f64>], gamma: f64) -> f64 {
        let k = points.len();
        let mut in_tree = vec![false; k];
        let mut dist = vec![f64::INFINITY; k];
        in_tree[0] = true;
        for j in 1..k {
            dist[j] = euclidean(&points[0], &points[j]);
        }
        let mut edge_lengths = Vec::with_capacity(k - 1);
        for _ in 1..k {
            let next = (0..k)
                .filter(|&v| !in_tree[v])
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
                .unwrap();
            edge_lengths.push(dist[next]);
            in_tree[next] = true;
            for v in 0..k {
                if !in_tree[v] {
                    let d = euclidean(&points[next], &points[v]);
                    if d < dist[v] {
                        dist[v] = d;
                    }
                }
            }
        }
        edge_lengths.sort_by(|a, b| a.total_cmp(b));
        edge_lengths.iter().map(|w| w.powf(gamma)).sum()
    }

    #[test]
    fn mst_entropy_monotone_under_dilation() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let m = 24;
        let points: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..m).map(|_| rng.random_range(0.0..0.1)).collect())
            .collect();
        let cfg = MstReConfig::new(2.0);
        let mut last = -1.0;
        for step in 0..12 {
            let factor = 1.5f64.powi(step);
            let dilated: Vec<Vec<f64>> = points
                .iter()
                .map(|p| p.iter().map(|v| v * factor).collect())
                .collect();
            let h = mst_renyi_normalized(&dilated, &cfg).unwrap();
            assert!(h >= last - 1e-12, "step {step}: {h} < {last}");
            last = h;
        }
    }

    #[test]
    fn mst_entropy_rejects_small_dimensions() {
        let points = vec![vec![0.0; 18], vec![1.0; 18]];
        match mst_renyi_normalized(&points, &MstReConfig::new(1.0)) {
            Err(OdseError::DimensionTooSmall { dim }) => assert_eq!(dim, 18),
            other => panic!("expected dimension error, got {other:?}"),
        }
        assert!(mst_renyi_normalized(&[vec![0.0; 20]], &MstReConfig::new(1.0)).is_err());
    }
}
