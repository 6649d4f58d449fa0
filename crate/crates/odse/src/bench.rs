//! Verification suites behind the `bench` CLI command: the compression
//! guarantees of the two estimators, the input-ordering efficiency
//! reproduction, and independent-oracle checks of the numeric kernels.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::bsas::euclidean;
use crate::dm::DissimilarityMatrix;
use crate::entropy::{
    alpha_of_gamma, beta_approx, mst_length, mst_renyi_normalized, qre_joint, sigma_upper_bound,
    MstReConfig, QreConfig, EXTENT, TWO_PI_E,
};
use crate::error::Result;
use crate::graph::{LabelValue, LabeledGraph};
use crate::prototypes::{
    compress, efficiency_experiment, CompressionEstimator, EfficiencyOrdering, PrototypeSet,
};

#[derive(Debug, Clone)]
pub struct BenchCase {
    pub name: String,
    pub measured: String,
    pub expected: String,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub suite: String,
    pub cases: Vec<BenchCase>,
}

impl BenchReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: impl Into<String>, measured: String, expected: String, pass: bool) {
        self.cases.push(BenchCase {
            name: name.into(),
            measured,
            expected,
            pass,
        });
    }
}

/// Input-ordering compression-efficiency reproduction on collinear points
/// spaced at the cluster radius.
pub fn bench_efficiency() -> Result<BenchReport> {
    let mut report = BenchReport {
        suite: "efficiency".into(),
        cases: Vec::new(),
    };
    for &n in &[99usize, 999, 9999] {
        let best = efficiency_experiment(n, 1.0, EfficiencyOrdering::Best)?;
        report.push(
            format!("best ordering n={n}"),
            format!("{} clusters, ratio {:.4}", best.achieved_clusters, best.ratio),
            format!("{} clusters, ratio 1.0000", n.div_ceil(3)),
            best.achieved_clusters == n.div_ceil(3) && best.ratio == 1.0,
        );
        let worst = efficiency_experiment(n, 1.0, EfficiencyOrdering::Worst)?;
        let expected_ratio = n.div_ceil(3) as f64 / n.div_ceil(2) as f64;
        report.push(
            format!("worst ordering n={n}"),
            format!("{} clusters, ratio {:.4}", worst.achieved_clusters, worst.ratio),
            format!("{} clusters, ratio {:.4}", n.div_ceil(2), expected_ratio),
            worst.achieved_clusters == n.div_ceil(2) && worst.ratio == expected_ratio,
        );
    }
    let asymptote = efficiency_experiment(9999, 1.0, EfficiencyOrdering::Worst)?;
    report.push(
        "worst-case asymptote n=9999",
        format!("{:.4}", asymptote.ratio),
        "2/3 within 0.005".into(),
        (asymptote.ratio - 2.0 / 3.0).abs() <= 0.005,
    );
    for seed in 0..5 {
        let random = efficiency_experiment(999, 1.0, EfficiencyOrdering::Random(seed))?;
        report.push(
            format!("random ordering seed={seed}"),
            format!("ratio {:.4}", random.ratio),
            "within [2/3 - 0.01, 1]".into(),
            random.ratio >= 2.0 / 3.0 - 0.01 && random.ratio <= 1.0,
        );
    }
    Ok(report)
}

fn dummy_prototypes(d: usize) -> PrototypeSet {
    let graphs: Vec<LabeledGraph> = (0..d)
        .map(|i| {
            LabeledGraph::new(
                format!("p{i}"),
                vec![LabelValue::RealVector(vec![i as f64])],
                vec![],
            )
            .unwrap()
        })
        .collect();
    PrototypeSet::new(graphs, (0..d).collect()).unwrap()
}

fn dm_from_columns(columns: &[Vec<f64>]) -> DissimilarityMatrix {
    let n = columns[0].len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    DissimilarityMatrix::from_rows(
        rows,
        (0..n).map(|i| format!("r{i}")).collect(),
        (0..columns.len()).map(|j| format!("p{j}")).collect(),
    )
    .unwrap()
}

/// Random DM columns in [0, 2]^n: a third uniform, a third drawn around a
/// few cluster centers, a third near-duplicates, so the compression actually
/// merges prototypes.
fn random_columns(rng: &mut ChaCha8Rng, n: usize, d: usize, style: usize) -> Vec<Vec<f64>> {
    match style % 3 {
        0 => (0..d)
            .map(|_| (0..n).map(|_| rng.random_range(0.0..EXTENT)).collect())
            .collect(),
        1 => {
            let centers: Vec<Vec<f64>> = (0..rng.random_range(2..5))
                .map(|_| (0..n).map(|_| rng.random_range(0.0..EXTENT)).collect())
                .collect();
            let spread = rng.random_range(0.01..0.2);
            (0..d)
                .map(|_| {
                    let c = &centers[rng.random_range(0..centers.len())];
                    c.iter()
                        .map(|v| (v + rng.random_range(-spread..spread)).clamp(0.0, EXTENT))
                        .collect()
                })
                .collect()
        }
        _ => {
            let base: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..EXTENT)).collect();
            (0..d)
                .map(|_| {
                    base.iter()
                        .map(|v| (v + rng.random_range(-1e-3..1e-3)).clamp(0.0, EXTENT))
                        .collect()
                })
                .collect()
        }
    }
}

/// QRE compression guarantee: every cluster produced under the
/// theorem-derived radius stays below the compression threshold.
pub fn bench_theorem1(instances: usize, seed: u64) -> Result<BenchReport> {
    let mut report = BenchReport {
        suite: "theorem1".into(),
        cases: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut clusters_checked = 0usize;
    let mut multi_clusters = 0usize;
    let mut worst_margin = f64::NEG_INFINITY;
    for instance in 0..instances {
        let n = rng.random_range(20..=200);
        let d = rng.random_range(10..=100);
        let tau_c = rng.random_range(0.05..=0.95);
        let sigma_c = rng.random_range(0.05..sigma_upper_bound());
        let columns = random_columns(&mut rng, n, d, instance);
        let dm = dm_from_columns(&columns);
        let rs = dummy_prototypes(d);
        let out = compress(&rs, &dm, &CompressionEstimator::Qre { tau_c, sigma_c })?;
        let qre_cfg = QreConfig::new(sigma_c);
        for cluster in &out.partition.clusters {
            let sample: Vec<Vec<f64>> = cluster
                .members
                .iter()
                .map(|&j| columns[j].clone())
                .collect();
            let h = qre_joint(&sample, &qre_cfg)?;
            clusters_checked += 1;
            if cluster.members.len() > 1 {
                multi_clusters += 1;
            }
            if h > tau_c + 1e-9 {
                violations += 1;
            }
            if h - tau_c > worst_margin {
                worst_margin = h - tau_c;
            }
        }
    }
    report.push(
        format!("{instances} randomized DMs, {clusters_checked} clusters ({multi_clusters} multi-member)"),
        format!("{violations} violations, worst H - tau_c = {worst_margin:.3e}"),
        "0 violations".into(),
        violations == 0,
    );
    Ok(report)
}

/// MST-RE compression guarantee over non-singleton clusters.
pub fn bench_theorem3(instances: usize, seed: u64) -> Result<BenchReport> {
    let mut report = BenchReport {
        suite: "theorem3".into(),
        cases: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    let mut clusters_checked = 0usize;
    let mut worst_margin = f64::NEG_INFINITY;
    for instance in 0..instances {
        let n = rng.random_range(50..=200);
        let d = rng.random_range(10..=100);
        let tau_c = rng.random_range(0.05..=0.95);
        let gamma = rng.random_range(0.05..=3.0);
        let columns = random_columns(&mut rng, n, d, instance);
        let dm = dm_from_columns(&columns);
        let rs = dummy_prototypes(d);
        let out = compress(&rs, &dm, &CompressionEstimator::Mst { tau_c, gamma })?;
        let cfg = MstReConfig::new(gamma);
        for cluster in &out.partition.clusters {
            if cluster.members.len() < 2 {
                continue;
            }
            let sample: Vec<Vec<f64>> = cluster
                .members
                .iter()
                .map(|&j| columns[j].clone())
                .collect();
            let h = mst_renyi_normalized(&sample, &cfg)?;
            clusters_checked += 1;
            if h > tau_c + 1e-9 {
                violations += 1;
            }
            if h - tau_c > worst_margin {
                worst_margin = h - tau_c;
            }
        }
    }
    report.push(
        format!("{instances} randomized DMs, {clusters_checked} non-singleton clusters"),
        format!("{violations} violations, worst H - tau_c = {worst_margin:.3e}"),
        "0 violations".into(),
        violations == 0,
    );
    Ok(report)
}

/// Pruefer-sequence enumeration of every labeled spanning tree of K_k.
fn min_tree_length_by_enumeration(points: &[Vec<f64>], gamma: f64) -> f64 {
    let k = points.len();
    if k == 2 {
        return euclidean(&points[0], &points[1]).powf(gamma);
    }
    let seq_len = k - 2;
    let total = (k as u64).pow(seq_len as u32);
    let mut best = f64::INFINITY;
    for code in 0..total {
        let mut seq = Vec::with_capacity(seq_len);
        let mut c = code;
        for _ in 0..seq_len {
            seq.push((c % k as u64) as usize);
            c /= k as u64;
        }
        let mut deg = vec![1usize; k];
        for &s in &seq {
            deg[s] += 1;
        }
        let mut lens: Vec<f64> = Vec::with_capacity(k - 1);
        for &s in &seq {
            let leaf = (0..k).find(|&v| deg[v] == 1).unwrap();
            lens.push(euclidean(&points[leaf], &points[s]));
            deg[leaf] = 0;
            deg[s] -= 1;
        }
        let rest: Vec<usize> = (0..k).filter(|&v| deg[v] == 1).collect();
        lens.push(euclidean(&points[rest[0]], &points[rest[1]]));
        lens.sort_by(|a, b| a.total_cmp(b));
        let length: f64 = lens.iter().map(|w| w.powf(gamma)).sum();
        if length < best {
            best = length;
        }
    }
    best
}

/// Independent-oracle equivalence checks plus the closed-form constants.
pub fn bench_oracles(seed: u64) -> Result<BenchReport> {
    let mut report = BenchReport {
        suite: "oracles".into(),
        cases: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // QRE vs the literal double sum.
    let mut worst_rel = 0.0f64;
    for _ in 0..100 {
        let k = rng.random_range(2..=40);
        let m = rng.random_range(1..=20);
        let sigma = rng.random_range(0.05..sigma_upper_bound());
        let samples: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..m).map(|_| rng.random_range(0.0..EXTENT)).collect())
            .collect();
        let h = qre_joint(&samples, &QreConfig::new(sigma))?;
        let mut v = 0.0;
        for a in &samples {
            for b in &samples {
                let mut prod = 1.0;
                for r in 0..m {
                    let u = b[r] - a[r];
                    prod *= (-u * u / (4.0 * sigma * sigma)).exp();
                }
                v += prod;
            }
        }
        v /= (k * k) as f64;
        let oracle = (-v.log2() / m as f64).clamp(0.0, 1.0);
        let rel = (h - oracle).abs() / oracle.max(1.0);
        worst_rel = worst_rel.max(rel);
    }
    report.push(
        "qre_joint vs literal double sum (100 instances)",
        format!("worst relative error {worst_rel:.3e}"),
        "<= 1e-12".into(),
        worst_rel <= 1e-12,
    );

    // MST length vs all-spanning-trees brute force.
    let mut mst_mismatches = 0usize;
    for _ in 0..50 {
        let k = rng.random_range(3..=6);
        let gamma = rng.random_range(0.2..=3.0);
        let points: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                vec![
                    rng.random_range(0.0..EXTENT),
                    rng.random_range(0.0..EXTENT),
                ]
            })
            .collect();
        let fast = mst_length(&points, gamma)?;
        let brute = min_tree_length_by_enumeration(&points, gamma);
        if fast != brute {
            mst_mismatches += 1;
        }
    }
    report.push(
        "mst_length vs spanning-tree enumeration (50 instances, k <= 6)",
        format!("{mst_mismatches} mismatches"),
        "exact".into(),
        mst_mismatches == 0,
    );

    // MinSOD vs exhaustive argmin.
    let mut minsod_mismatches = 0usize;
    for _ in 0..100 {
        let n = rng.random_range(2..=25);
        let dim = rng.random_range(1..=8);
        let members: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(0.0..EXTENT)).collect())
            .collect();
        let got = crate::bsas::minsod(&members, euclidean).unwrap();
        let sods: Vec<f64> = members
            .iter()
            .map(|c| members.iter().map(|m| euclidean(c, m)).sum())
            .collect();
        let best = sods
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        if sods[got] != sods[best] {
            minsod_mismatches += 1;
        }
    }
    report.push(
        "minsod vs exhaustive argmin (100 instances)",
        format!("{minsod_mismatches} mismatches"),
        "exact".into(),
        minsod_mismatches == 0,
    );

    // Closed-form constants.
    let sigma_err = (sigma_upper_bound() - (8.0 / 2.0f64.ln()).sqrt()).abs();
    report.push(
        "sigma_upper_bound = sqrt(8 / ln 2)",
        format!("error {sigma_err:.3e}"),
        "<= 1e-12".into(),
        sigma_err <= 1e-12,
    );
    let alpha_err = (alpha_of_gamma(3.0, 100) - 0.97).abs();
    report.push(
        "alpha(gamma=3, dim=100)",
        format!("error {alpha_err:.3e}"),
        "<= 1e-12".into(),
        alpha_err <= 1e-12,
    );
    let beta_err = (beta_approx(2.0, 50) - (50.0 / TWO_PI_E).ln()).abs();
    report.push(
        "beta(gamma=2, dim=50)",
        format!("error {beta_err:.3e}"),
        "<= 1e-12".into(),
        beta_err <= 1e-12,
    );
    Ok(report)
}
