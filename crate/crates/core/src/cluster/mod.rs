//! Overlapping property cluster families.
//!
//! Reduced embeddings are compared by cosine distance. Partitions from
//! k-means and k-medoids over a range of `k` are unioned into one family of
//! clusters of size at least 2, plus the set of all properties.

mod kmeans;
mod kmedoids;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Workers};

pub use kmeans::kmeans;
pub use kmedoids::kmedoids;

pub const DEFAULT_MAX_CLUSTERS: usize = 64;
pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("k = {k} is outside 2..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("need at least 2 properties, got {0}")]
    TooFewProperties(usize),
    #[error("points have differing dimensions")]
    DimensionMismatch,
}

/// Assignment of every point to one of `k` groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub objective: f64,
    /// Medoid point indices for k-medoids partitions.
    pub medoids: Option<Vec<usize>>,
}

impl Partition {
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.k];
        for (i, &g) in self.assignment.iter().enumerate() {
            groups[g].push(i);
        }
        groups
    }
}

pub fn normalize(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / norm).collect()
    }
}

/// `1 - cos(a, b)`; a zero vector is at distance 1 from everything.
pub fn cosine_distance(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    1.0 - dot / (na * nb)
}

pub(crate) fn check_points(points: &[Vec<f64>], k: usize) -> Result<(), ClusterError> {
    let n = points.len();
    if k < 2 || k > n {
        return Err(ClusterError::KOutOfRange { k, n });
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d) {
        return Err(ClusterError::DimensionMismatch);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum Origin {
    Full,
    Kmeans { k: usize },
    Kmedoids { k: usize },
}

impl Origin {
    fn k(self) -> usize {
        match self {
            Origin::Full => 0,
            Origin::Kmeans { k } | Origin::Kmedoids { k } => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub design: String,
    /// Sorted property indices.
    pub members: Vec<usize>,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterFamily {
    pub design: String,
    pub clusters: Vec<Cluster>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyOptions {
    pub max_clusters: usize,
    pub max_iters: usize,
    pub workers: Workers,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            max_clusters: DEFAULT_MAX_CLUSTERS,
            max_iters: DEFAULT_MAX_ITERS,
            workers: Workers::SEQUENTIAL,
        }
    }
}

/// Unions k-means and k-medoids partitions for `k` in `2..=max(2, ceil(n/2))`.
pub fn build_family(
    design: &str,
    embeddings: &BTreeMap<usize, Vec<f64>>,
    seed: u64,
    opts: &FamilyOptions,
) -> Result<ClusterFamily, ClusterError> {
    let n = embeddings.len();
    if n < 2 {
        return Err(ClusterError::TooFewProperties(n));
    }
    let ids: Vec<usize> = embeddings.keys().copied().collect();
    let points: Vec<Vec<f64>> = embeddings.values().cloned().collect();
    let k_max = 2.max(n.div_ceil(2)).min(n);

    let jobs: Vec<(usize, bool)> = (2..=k_max).flat_map(|k| [(k, false), (k, true)]).collect();
    let runs = par::map(&jobs, opts.workers, |&(k, medoids)| {
        if medoids {
            kmedoids(&points, k, seed, opts.max_iters).map(|p| (Origin::Kmedoids { k }, p))
        } else {
            kmeans(&points, k, seed, opts.max_iters).map(|p| (Origin::Kmeans { k }, p))
        }
    });

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut clusters = Vec::new();
    let full: Vec<usize> = ids.clone();
    seen.insert(full.clone());
    clusters.push(Cluster {
        design: design.to_string(),
        members: full,
        origin: Origin::Full,
    });
    for run in runs {
        let (origin, partition) = run?;
        for group in partition.groups() {
            if group.len() < 2 {
                continue;
            }
            let members: Vec<usize> = group.iter().map(|&i| ids[i]).collect();
            if seen.insert(members.clone()) {
                clusters.push(Cluster {
                    design: design.to_string(),
                    members,
                    origin,
                });
            }
        }
    }

    let cap = opts.max_clusters.max(1);
    while clusters.len() > cap {
        // drop the last cluster produced by the largest k
        let victim = (0..clusters.len())
            .rev()
            .max_by_key(|&i| clusters[i].origin.k())
            .expect("non-empty");
        clusters.remove(victim);
    }
    Ok(ClusterFamily {
        design: design.to_string(),
        clusters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn emb(points: &[&[f64]]) -> BTreeMap<usize, Vec<f64>> {
        points.iter().enumerate().map(|(i, p)| (i, p.to_vec())).collect()
    }

    fn member_sets(f: &ClusterFamily) -> Vec<Vec<usize>> {
        f.clusters.iter().map(|c| c.members.clone()).collect()
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine_distance(&[1.0, 0.0], &[2.0, 0.0])).abs() < 1e-15);
        assert!((cosine_distance(&[1.0, 0.0], &[0.0, 3.0]) - 1.0).abs() < 1e-15);
        assert!((cosine_distance(&[1.0, 0.0], &[-1.0, 0.0]) - 2.0).abs() < 1e-15);
        assert_eq!(cosine_distance(&[0.0, 0.0], &[1.0, 0.0]), 1.0);
    }

    #[test]
    fn two_properties_give_only_the_pair() {
        let f = build_family("d", &emb(&[&[1.0, 0.0], &[0.0, 1.0]]), 1, &FamilyOptions::default()).unwrap();
        assert_eq!(member_sets(&f), vec![vec![0, 1]]);
    }

    #[test]
    fn two_tight_pairs() {
        let e = emb(&[&[1.0, 0.01], &[-1.0, 0.02], &[1.0, -0.01], &[-1.0, -0.03]]);
        let f = build_family("d", &e, 3, &FamilyOptions::default()).unwrap();
        let sets = member_sets(&f);
        assert!(sets.contains(&vec![0, 2]));
        assert!(sets.contains(&vec![1, 3]));
        assert!(sets.contains(&vec![0, 1, 2, 3]));
        for c in &f.clusters {
            assert!(c.members.len() >= 2);
        }
    }

    #[test]
    fn family_is_deterministic_and_capped() {
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![(i as f64).sin(), (i as f64 * 0.7).cos(), 0.3]).collect();
        let e: BTreeMap<usize, Vec<f64>> = pts.into_iter().enumerate().collect();
        let opts = FamilyOptions {
            max_clusters: 7,
            ..FamilyOptions::default()
        };
        let a = build_family("d", &e, 9, &opts).unwrap();
        let b = build_family(
            "d",
            &e,
            9,
            &FamilyOptions {
                workers: Workers::new(3),
                ..opts
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.clusters.len(), 7);
        assert_eq!(a.clusters[0].origin, Origin::Full);
        let max_k = a.clusters.iter().map(|c| c.origin.k()).max().unwrap();
        assert!(max_k < 10);
    }

    #[test]
    fn too_few() {
        assert_eq!(
            build_family("d", &emb(&[&[1.0]]), 0, &FamilyOptions::default()),
            Err(ClusterError::TooFewProperties(1))
        );
    }
}
