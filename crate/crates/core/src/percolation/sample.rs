use std::collections::BTreeMap;

use bitvec::prelude::*;

use super::{check_probability, PercolationError};
use crate::graphs::{FiniteTruncation, GraphError, VertexId};
use crate::rng::uniform_at;
use crate::unionfind::UnionFind;

/// One percolation configuration on a window: bit `e` is set iff edge `e`
/// (in the window's edge order) is open.
#[derive(Debug, Clone)]
pub struct PercolationSample<'a> {
    truncation: &'a FiniteTruncation,
    p: f64,
    open: BitVec,
    seed: u64,
    replica: u64,
}

/// Draws an i.i.d. Bernoulli(`p`) state for every edge of `trunc`.
pub fn sample_bonds(
    trunc: &FiniteTruncation,
    p: f64,
    seed: u64,
    replica: u64,
) -> Result<PercolationSample<'_>, PercolationError> {
    check_probability(p)?;
    let open = (0..trunc.edge_count() as u64)
        .map(|e| uniform_at(seed, replica, e) < p)
        .collect();
    Ok(PercolationSample {
        truncation: trunc,
        p,
        open,
        seed,
        replica,
    })
}

impl<'a> PercolationSample<'a> {
    /// Builds a sample from explicit edge states, e.g. a hand-made configuration.
    pub fn from_states(trunc: &'a FiniteTruncation, p: f64, states: &[bool]) -> Result<Self, PercolationError> {
        check_probability(p)?;
        if states.len() != trunc.edge_count() {
            return Err(PercolationError::InvalidParameter(format!(
                "{} edge states for {} edges",
                states.len(),
                trunc.edge_count()
            )));
        }
        Ok(PercolationSample {
            truncation: trunc,
            p,
            open: states.iter().collect(),
            seed: 0,
            replica: 0,
        })
    }

    pub fn truncation(&self) -> &'a FiniteTruncation {
        self.truncation
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }

    pub fn is_open(&self, edge: usize) -> bool {
        self.open[edge]
    }

    pub fn open_edges(&self) -> &BitSlice {
        &self.open
    }

    pub fn open_count(&self) -> usize {
        self.open.count_ones()
    }
}

/// Per-edge uniforms of one replica, kept so that samples at several `p`
/// share their randomness (threshold coupling).
#[derive(Debug, Clone)]
pub struct EdgeWeights<'a> {
    truncation: &'a FiniteTruncation,
    weights: Vec<f64>,
    seed: u64,
    replica: u64,
}

impl<'a> EdgeWeights<'a> {
    pub fn new(trunc: &'a FiniteTruncation, seed: u64, replica: u64) -> Self {
        EdgeWeights {
            truncation: trunc,
            weights: (0..trunc.edge_count() as u64)
                .map(|e| uniform_at(seed, replica, e))
                .collect(),
            seed,
            replica,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The configuration at `p`; identical to `sample_bonds` with the same seed.
    pub fn at(&self, p: f64) -> Result<PercolationSample<'a>, PercolationError> {
        check_probability(p)?;
        Ok(PercolationSample {
            truncation: self.truncation,
            p,
            open: self.weights.iter().map(|&u| u < p).collect(),
            seed: self.seed,
            replica: self.replica,
        })
    }
}

/// Partition of a window's vertices into open clusters.
#[derive(Debug, Clone)]
pub struct ClusterLabeling<'a> {
    truncation: &'a FiniteTruncation,
    parent: Vec<u32>,
    rank: Vec<u8>,
    sizes: BTreeMap<u32, usize>,
    open: BitVec,
}

/// Union-find over the open edges of `sample`.
pub fn clusters<'a>(sample: &PercolationSample<'a>) -> ClusterLabeling<'a> {
    let trunc = sample.truncation;
    let mut uf = UnionFind::new(trunc.vertex_count());
    for e in sample.open.iter_ones() {
        let (a, b) = trunc.edges()[e];
        uf.union(a as usize, b as usize);
    }
    let (parent, rank) = uf.into_flat();
    let mut sizes = BTreeMap::new();
    for &r in &parent {
        *sizes.entry(r).or_insert(0) += 1;
    }
    ClusterLabeling {
        truncation: trunc,
        parent,
        rank,
        sizes,
        open: sample.open.clone(),
    }
}

impl<'a> ClusterLabeling<'a> {
    pub fn truncation(&self) -> &'a FiniteTruncation {
        self.truncation
    }

    /// Root of the cluster of vertex index `i`; roots are fixed points.
    pub fn root(&self, i: usize) -> usize {
        self.parent[i] as usize
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn ranks(&self) -> &[u8] {
        &self.rank
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    /// Map from root index to cluster size.
    pub fn sizes(&self) -> &BTreeMap<u32, usize> {
        &self.sizes
    }

    pub fn size_of(&self, i: usize) -> usize {
        self.sizes[&self.parent[i]]
    }

    /// Edge states of the sample this labeling was built from.
    pub fn is_open(&self, edge: usize) -> bool {
        self.open[edge]
    }

    pub fn largest(&self) -> usize {
        self.sizes.values().copied().max().unwrap_or(0)
    }

    /// Whether `x` and `y` lie in the same open cluster of the window.
    pub fn connected(&self, x: &VertexId, y: &VertexId) -> Result<bool, GraphError> {
        let i = self.truncation.index_of(x)?;
        let j = self.truncation.index_of(y)?;
        Ok(self.parent[i] == self.parent[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{ball, GraphSpec};

    fn square(r: u32) -> FiniteTruncation {
        let spec = GraphSpec::Lattice { dim: 2 };
        ball(&spec, &spec.origin(), r).unwrap()
    }

    #[test]
    fn extreme_probabilities() {
        let t = square(4);
        let s0 = sample_bonds(&t, 0.0, 1, 0).unwrap();
        assert_eq!(s0.open_count(), 0);
        let c0 = clusters(&s0);
        assert_eq!(c0.cluster_count(), t.vertex_count());
        let s1 = sample_bonds(&t, 1.0, 1, 0).unwrap();
        assert_eq!(s1.open_count(), t.edge_count());
        assert_eq!(clusters(&s1).cluster_count(), 1);
        assert!(sample_bonds(&t, 1.5, 1, 0).is_err());
        assert!(sample_bonds(&t, -0.1, 1, 0).is_err());
    }

    #[test]
    fn reproducible_and_coupled() {
        let t = square(6);
        let a = sample_bonds(&t, 0.4, 9, 3).unwrap();
        let b = sample_bonds(&t, 0.4, 9, 3).unwrap();
        assert_eq!(a.open_edges(), b.open_edges());
        let w = EdgeWeights::new(&t, 9, 3);
        assert_eq!(w.at(0.4).unwrap().open_edges(), a.open_edges());
        let lo = w.at(0.3).unwrap();
        let hi = w.at(0.6).unwrap();
        for e in 0..t.edge_count() {
            assert!(!lo.is_open(e) || hi.is_open(e));
        }
    }

    #[test]
    fn labeling_invariants() {
        let t = square(5);
        let s = sample_bonds(&t, 0.5, 2, 0).unwrap();
        let c = clusters(&s);
        let total: usize = c.sizes().values().sum();
        assert_eq!(total, t.vertex_count());
        for i in 0..t.vertex_count() {
            let r = c.root(i);
            assert_eq!(c.root(r), r);
        }
        let o = t.vertex(0).clone();
        assert!(c.connected(&o, &o).unwrap());
        assert!(c.connected(&o, &VertexId::Plain(vec![50, 0])).is_err());
    }

    #[test]
    fn closed_configuration_separates() {
        let t = square(2);
        let c = clusters(&sample_bonds(&t, 0.0, 5, 0).unwrap());
        let x = VertexId::Plain(vec![0, 0]);
        let y = VertexId::Plain(vec![1, 0]);
        assert!(!c.connected(&x, &y).unwrap());
    }
}
