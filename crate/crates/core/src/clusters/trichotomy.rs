use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::ClusterError;
use crate::graphs::{ball, FiniteTruncation, GraphSpec};
use crate::percolation::{check_probability, clusters, sample_bonds, ClusterLabeling};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrichotomyReport {
    pub spec: GraphSpec,
    pub p: f64,
    pub inner_radius: u32,
    pub outer_radius: u32,
    pub replicas: u64,
    pub seed: u64,
    /// Number of replicas per observed count; the masses sum to `replicas`.
    pub histogram: BTreeMap<usize, u64>,
    pub mean: f64,
    pub stderr: f64,
}

impl TrichotomyReport {
    pub fn frequency(&self, count: usize) -> f64 {
        self.histogram.get(&count).copied().unwrap_or(0) as f64 / self.replicas.max(1) as f64
    }

    /// CSV with header `count,frequency`.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("count,frequency\n");
        for &c in self.histogram.keys() {
            out.push_str(&format!("{c},{}\n", self.frequency(c)));
        }
        out
    }
}

/// Distinct clusters of `label` meeting both the vertices within distance
/// `r` of the window centers and the window boundary.
pub fn boundary_clusters_in(label: &ClusterLabeling<'_>, r: u32) -> usize {
    let t = label.truncation();
    let inner: HashSet<usize> = (0..t.vertex_count())
        .filter(|&i| t.distance(i) <= r)
        .map(|i| label.root(i))
        .collect();
    t.boundary()
        .map(|i| label.root(i))
        .filter(|root| inner.contains(root))
        .collect::<HashSet<_>>()
        .len()
}

/// Histogram, over replicas, of the number of open clusters joining
/// ball(origin, r) to the boundary of ball(origin, R).
pub fn boundary_cluster_count(
    spec: &GraphSpec,
    r: u32,
    big_r: u32,
    p: f64,
    replicas: u64,
    seed: u64,
) -> Result<TrichotomyReport, ClusterError> {
    if !(0 < r && r < big_r) {
        return Err(ClusterError::InvalidParameter(format!("need 0 < r < R, got r={r} R={big_r}")));
    }
    check_probability(p)?;
    let window: FiniteTruncation = ball(spec, &spec.origin(), big_r)?;
    let counts: Vec<usize> = (0..replicas)
        .into_par_iter()
        .map(|rep| {
            let s = sample_bonds(&window, p, seed, rep).expect("probability checked");
            boundary_clusters_in(&clusters(&s), r)
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for &c in &counts {
        *histogram.entry(c).or_insert(0u64) += 1;
    }
    let n = replicas.max(1) as f64;
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(TrichotomyReport {
        spec: spec.clone(),
        p,
        inner_radius: r,
        outer_radius: big_r,
        replicas,
        seed,
        histogram,
        mean,
        stderr: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: GraphSpec = GraphSpec::Lattice { dim: 2 };

    #[test]
    fn trivial_probabilities() {
        let rep = boundary_cluster_count(&SQUARE, 2, 6, 0.0, 20, 1).unwrap();
        assert_eq!(rep.histogram, BTreeMap::from([(0, 20)]));
        let rep = boundary_cluster_count(&SQUARE, 2, 6, 1.0, 20, 1).unwrap();
        assert_eq!(rep.histogram, BTreeMap::from([(1, 20)]));
        assert_eq!(rep.mean, 1.0);
        assert_eq!(rep.histogram_csv(), "count,frequency\n1,1\n");
    }

    #[test]
    fn bad_radii() {
        assert!(boundary_cluster_count(&SQUARE, 3, 3, 0.5, 1, 1).is_err());
        assert!(boundary_cluster_count(&SQUARE, 0, 3, 0.5, 1, 1).is_err());
    }

    #[test]
    fn full_inner_ball_counts_boundary_clusters() {
        let spec = GraphSpec::RegularTree { degree: 3 };
        let t = ball(&spec, &spec.origin(), 5).unwrap();
        for rep in 0..20 {
            let label = clusters(&sample_bonds(&t, 0.6, 4, rep).unwrap());
            let touching: HashSet<usize> = t.boundary().map(|i| label.root(i)).collect();
            assert_eq!(boundary_clusters_in(&label, 5), touching.len());
            // with r = R - 1, only boundary clusters that also reach distance R - 1
            let deep: HashSet<usize> = (0..t.vertex_count())
                .filter(|&i| t.distance(i) <= 4)
                .map(|i| label.root(i))
                .filter(|r| touching.contains(r))
                .collect();
            assert_eq!(boundary_clusters_in(&label, 4), deep.len());
        }
    }

    #[test]
    fn histogram_mass() {
        let rep = boundary_cluster_count(&GraphSpec::RegularTree { degree: 4 }, 1, 4, 0.5, 200, 2).unwrap();
        assert_eq!(rep.histogram.values().sum::<u64>(), 200);
        // at most one cluster per vertex of ball(1)
        assert!(rep.histogram.keys().all(|&c| c <= 5));
    }
}
