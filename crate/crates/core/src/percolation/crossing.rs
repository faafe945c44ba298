use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_probability, Estimate, PercolationError};
use crate::graphs::GraphSpec;
use crate::rng::uniform_at;
use crate::unionfind::UnionFind;

/// Box in ℤ^d with first coordinate in `0..=L` and the others in `0..L`.
///
/// For d = 2 this is the L × (L+1) rectangle whose dual is a congruent
/// rectangle, so the left-right crossing probability at p = 1/2 is exactly 1/2.
#[derive(Debug, Clone)]
pub struct CrossingBox {
    dims: Vec<usize>,
    edges: Vec<(u32, u32)>,
    left: Vec<u32>,
    right: Vec<u32>,
}

impl CrossingBox {
    pub fn new(dim: u32, l: usize) -> Result<CrossingBox, PercolationError> {
        if dim == 0 {
            return Err(PercolationError::InvalidParameter("dimension must be positive".into()));
        }
        if l < 2 {
            return Err(PercolationError::InvalidParameter(format!("box side {l} < 2")));
        }
        let mut dims = vec![l; dim as usize];
        dims[0] = l + 1;
        let n: usize = dims.iter().product();
        if n > u32::MAX as usize / 2 {
            return Err(PercolationError::InvalidParameter(format!("box with {n} vertices")));
        }
        let mut strides = vec![1usize; dims.len()];
        for k in 1..dims.len() {
            strides[k] = strides[k - 1] * dims[k - 1];
        }
        let mut edges = Vec::with_capacity(n * dims.len());
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for v in 0..n {
            for k in 0..dims.len() {
                let c = (v / strides[k]) % dims[k];
                if c + 1 < dims[k] {
                    edges.push((v as u32, (v + strides[k]) as u32));
                }
            }
            let c0 = v % dims[0];
            if c0 == 0 {
                left.push(v as u32);
            } else if c0 == l {
                right.push(v as u32);
            }
        }
        Ok(CrossingBox { dims, edges, left, right })
    }

    pub fn vertex_count(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Union-find with two extra nodes, `n` glued to the left face and `n+1` to the right.
    fn faces(&self) -> UnionFind {
        let n = self.vertex_count();
        let mut uf = UnionFind::new(n + 2);
        for &v in &self.left {
            uf.union(v as usize, n);
        }
        for &v in &self.right {
            uf.union(v as usize, n + 1);
        }
        uf
    }

    /// Whether replica `replica` has an open left-right crossing at `p`.
    pub fn crosses(&self, p: f64, seed: u64, replica: u64) -> bool {
        let n = self.vertex_count();
        let mut uf = self.faces();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            if uniform_at(seed, replica, e as u64) < p {
                uf.union(a as usize, b as usize);
            }
        }
        uf.same(n, n + 1)
    }

    /// Smallest weight w such that the edges of weight <= w cross the box;
    /// the replica crosses at `p` iff this threshold is `< p`.
    pub fn threshold(&self, seed: u64, replica: u64) -> f64 {
        let n = self.vertex_count();
        let mut weighted: Vec<(f64, u32)> = (0..self.edges.len() as u32)
            .map(|e| (uniform_at(seed, replica, e as u64), e))
            .collect();
        weighted.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut uf = self.faces();
        for (w, e) in weighted {
            let (a, b) = self.edges[e as usize];
            if uf.union(a as usize, b as usize) && uf.same(n, n + 1) {
                return w;
            }
        }
        f64::INFINITY
    }
}

fn lattice_dim(spec: &GraphSpec) -> Result<u32, PercolationError> {
    match spec {
        GraphSpec::Lattice { dim } => Ok(*dim),
        other => Err(PercolationError::UnsupportedSpec(other.to_string())),
    }
}

/// Frequency of a left-right crossing of the side-`l` box.
pub fn crossing_probability(
    spec: &GraphSpec,
    l: usize,
    p: f64,
    replicas: u64,
    seed: u64,
) -> Result<Estimate, PercolationError> {
    check_probability(p)?;
    let bx = CrossingBox::new(lattice_dim(spec)?, l)?;
    let hits: u64 = (0..replicas)
        .into_par_iter()
        .map(|r| u64::from(bx.crosses(p, seed, r)))
        .sum();
    Ok(Estimate::from_hits(hits, replicas, l as u32))
}

/// Per-replica crossing thresholds, in replica order.
pub fn crossing_thresholds(spec: &GraphSpec, l: usize, replicas: u64, seed: u64) -> Result<Vec<f64>, PercolationError> {
    let bx = CrossingBox::new(lattice_dim(spec)?, l)?;
    Ok((0..replicas).into_par_iter().map(|r| bx.threshold(seed, r)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcEstimate {
    /// Midpoint of the final bracket.
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
    pub replicas: u64,
    pub box_side: usize,
    /// (p, crossing frequency) at every bisection probe.
    pub probes: Vec<(f64, f64)>,
}

/// Bisection for the p at which the crossing frequency reaches 1/2, starting from [0, 1].
pub fn estimate_pc(
    spec: &GraphSpec,
    l: usize,
    tolerance: f64,
    replicas: u64,
    seed: u64,
) -> Result<PcEstimate, PercolationError> {
    estimate_pc_within(spec, l, (0.0, 1.0), tolerance, replicas, seed)
}

/// Bisection on `[lo, hi]`. Every probe reuses the same per-edge uniforms, so
/// the empirical crossing frequency is non-decreasing in p.
pub fn estimate_pc_within(
    spec: &GraphSpec,
    l: usize,
    bracket: (f64, f64),
    tolerance: f64,
    replicas: u64,
    seed: u64,
) -> Result<PcEstimate, PercolationError> {
    if !(tolerance > 0.0) {
        return Err(PercolationError::InvalidParameter(format!("tolerance {tolerance}")));
    }
    if replicas == 0 {
        return Err(PercolationError::InvalidParameter("zero replicas".into()));
    }
    let (mut lo, mut hi) = bracket;
    check_probability(lo)?;
    check_probability(hi)?;
    let thresholds = crossing_thresholds(spec, l, replicas, seed)?;
    let freq = |p: f64| thresholds.iter().filter(|&&t| t < p).count() as f64 / replicas as f64;
    let (f_lo, f_hi) = (freq(lo), freq(hi));
    if !(lo < hi && f_lo < 0.5 && f_hi >= 0.5) {
        return Err(PercolationError::NonBracketing { lo, hi, f_lo, f_hi });
    }
    let mut probes = vec![(lo, f_lo), (hi, f_hi)];
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        let f = freq(mid);
        probes.push((mid, f));
        if f >= 0.5 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(PcEstimate {
        p: 0.5 * (lo + hi),
        lo,
        hi,
        replicas,
        box_side: l,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: GraphSpec = GraphSpec::Lattice { dim: 2 };

    #[test]
    fn box_shape() {
        let b = CrossingBox::new(2, 3).unwrap();
        assert_eq!(b.vertex_count(), 12);
        // 3 rows of 3 horizontal edges, 4 columns of 2 vertical edges
        assert_eq!(b.edge_count(), 17);
        assert!(CrossingBox::new(2, 1).is_err());
    }

    #[test]
    fn trivial_probabilities() {
        assert_eq!(crossing_probability(&SQUARE, 8, 0.0, 50, 1).unwrap().estimate, 0.0);
        assert_eq!(crossing_probability(&SQUARE, 8, 1.0, 50, 1).unwrap().estimate, 1.0);
    }

    #[test]
    fn threshold_agrees_with_direct_test() {
        let b = CrossingBox::new(2, 6).unwrap();
        for r in 0..40 {
            let t = b.threshold(11, r);
            for p in [0.3, 0.45, 0.5, 0.55, 0.7] {
                assert_eq!(b.crosses(p, 11, r), t < p);
            }
        }
    }

    #[test]
    fn line_threshold_is_max_weight() {
        let b = CrossingBox::new(1, 5).unwrap();
        let t = b.threshold(3, 0);
        let m = (0..5).map(|e| uniform_at(3, 0, e)).fold(0.0, f64::max);
        assert_eq!(t, m);
    }

    #[test]
    fn non_bracketing() {
        let err = estimate_pc_within(&SQUARE, 8, (0.8, 0.9), 0.01, 200, 1).unwrap_err();
        assert!(matches!(err, PercolationError::NonBracketing { .. }));
        assert!(estimate_pc(&SQUARE, 8, 0.0, 200, 1).is_err());
        assert!(estimate_pc(&GraphSpec::RegularTree { degree: 3 }, 8, 0.01, 10, 1).is_err());
    }

    #[test]
    fn probes_are_monotone() {
        let est = estimate_pc(&SQUARE, 10, 0.001, 300, 5).unwrap();
        let mut probes = est.probes.clone();
        probes.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(probes.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(est.hi - est.lo <= 0.001);
    }
}
