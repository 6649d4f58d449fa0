//! Basic sequential algorithmic scheme (BSAS) clustering with MinSOD
//! representatives.
//!
//! Elements arrive in a fixed order. Each element joins the cluster whose
//! representative is nearest when that distance is within the radius theta
//! (or when the cluster budget Q is exhausted); otherwise it opens a new
//! cluster. After every insertion the cluster representative is recomputed
//! as the member minimizing the sum of distances to all members (MinSOD),
//! with ties going to the most recently inserted member.

pub type Metric = fn(&[f64], &[f64]) -> f64;

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One cluster: member indices into the input sequence, in insertion order.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub members: Vec<usize>,
    /// Index (into the input sequence) of the MinSOD representative.
    pub representative: usize,
    /// Sum of pairwise distances from each member to all members, aligned
    /// with `members`.
    sod: Vec<f64>,
}

impl Cluster {
    fn new(first: usize) -> Self {
        Cluster {
            members: vec![first],
            representative: first,
            sod: vec![0.0],
        }
    }

    fn insert(&mut self, index: usize, elements: &[Vec<f64>], metric: Metric) {
        let mut new_sod = 0.0;
        for (pos, &m) in self.members.iter().enumerate() {
            let d = metric(&elements[m], &elements[index]);
            self.sod[pos] += d;
            new_sod += d;
        }
        self.members.push(index);
        self.sod.push(new_sod);

        // MinSOD with ties toward the most recent insertion.
        let mut best_pos = 0;
        for pos in 1..self.members.len() {
            if self.sod[pos] <= self.sod[best_pos] {
                best_pos = pos;
            }
        }
        self.representative = self.members[best_pos];
    }
}

/// A partition of the input sequence into clusters, in creation order.
#[derive(Debug, Clone, Default)]
pub struct Partition {
    pub clusters: Vec<Cluster>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn representatives(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.representative).collect()
    }
}

/// Runs BSAS over `elements` in order with radius `theta` and cluster budget
/// `max_clusters`.
pub fn bsas(
    elements: &[Vec<f64>],
    theta: f64,
    max_clusters: usize,
    metric: Metric,
) -> Partition {
    let mut partition = Partition::default();
    if elements.is_empty() || max_clusters == 0 {
        return partition;
    }
    for (index, element) in elements.iter().enumerate() {
        if partition.clusters.is_empty() {
            partition.clusters.push(Cluster::new(index));
            continue;
        }
        // Nearest representative; ties go to the earliest-created cluster.
        let mut nearest = 0;
        let mut nearest_dist = f64::INFINITY;
        for (ci, cluster) in partition.clusters.iter().enumerate() {
            let d = metric(&elements[cluster.representative], element);
            if d < nearest_dist {
                nearest_dist = d;
                nearest = ci;
            }
        }
        if nearest_dist > theta && partition.clusters.len() < max_clusters {
            partition.clusters.push(Cluster::new(index));
        } else {
            partition.clusters[nearest].insert(index, elements, metric);
        }
    }
    partition
}

/// MinSOD representative of a standalone member list: the index minimizing
/// the sum of distances to all members, ties toward the latest index.
pub fn minsod(members: &[Vec<f64>], metric: Metric) -> Option<usize> {
    if members.is_empty() {
        return None;
    }
    let mut best = 0;
    let mut best_sod = f64::INFINITY;
    for (i, cand) in members.iter().enumerate() {
        let sod: f64 = members.iter().map(|m| metric(cand, m)).sum();
        if sod <= best_sod {
            best_sod = sod;
            best = i;
        }
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalars(values: &[f64]) -> Vec<Vec<f64>> {
        values.iter().map(|&v| vec![v]).collect()
    }

    #[test]
    fn single_element_single_cluster() {
        let p = bsas(&scalars(&[4.2]), 1.0, 10, euclidean);
        assert_eq!(p.len(), 1);
        assert_eq!(p.clusters[0].representative, 0);
    }

    #[test]
    fn two_distant_elements_two_clusters() {
        let p = bsas(&scalars(&[0.0, 5.0]), 1.0, 10, euclidean);
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn budget_forces_join() {
        let p = bsas(&scalars(&[0.0, 5.0]), 1.0, 1, euclidean);
        assert_eq!(p.len(), 1);
        assert_eq!(p.clusters[0].members, vec![0, 1]);
    }

    #[test]
    fn collinear_at_radius_forms_triples_in_natural_order() {
        // Spacing exactly theta: the representative drifts with the recency
        // tie-break, capping clusters at three members.
        let theta = 1.0;
        let points = scalars(&(0..9).map(|i| i as f64 * theta).collect::<Vec<_>>());
        let p = bsas(&points, theta, 9, euclidean);
        assert_eq!(p.len(), 3);
        for c in &p.clusters {
            assert_eq!(c.members.len(), 3);
        }
        // Middle member is the final representative of each triple.
        assert_eq!(p.representatives(), vec![1, 4, 7]);
    }

    #[test]
    fn minsod_singleton_and_collinear() {
        assert_eq!(minsod(&scalars(&[3.0]), euclidean), Some(0));
        // SOD of the middle point is 2, the extremes 3.
        assert_eq!(minsod(&scalars(&[0.0, 1.0, 2.0]), euclidean), Some(1));
    }

    #[test]
    fn minsod_ties_take_latest() {
        assert_eq!(minsod(&scalars(&[0.0, 1.0]), euclidean), Some(1));
    }

    #[test]
    fn minsod_matches_exhaustive_argmin() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(2..20);
            let dim = rng.random_range(1..6);
            let members: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..dim).map(|_| rng.random_range(0.0..2.0)).collect())
                .collect();
            let got = minsod(&members, euclidean).unwrap();
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
            assert_eq!(sods[got], sods[best]);
        }
    }

    #[test]
    fn cluster_sod_bookkeeping_matches_recompute() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let elements: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..4).map(|_| rng.random_range(0.0..2.0)).collect())
            .collect();
        let p = bsas(&elements, 1.2, 40, euclidean);
        let total: usize = p.clusters.iter().map(|c| c.members.len()).sum();
        assert_eq!(total, elements.len());
        for c in &p.clusters {
            let views: Vec<Vec<f64>> = c.members.iter().map(|&m| elements[m].clone()).collect();
            let standalone = minsod(&views, euclidean).unwrap();
            assert_eq!(c.representative, c.members[standalone]);
        }
    }
}
