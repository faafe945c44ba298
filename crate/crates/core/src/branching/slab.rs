//! Crossings between consecutive insertion levels.
//!
//! For x at level l_{n-1}, the slab holds x at height 0, the descendants of x
//! strictly between the two levels at heights [-W, W], the copies of Z^d × Z
//! inserted below level l_n clipped to [-W, n+W]^d × [-W, W], and each
//! level-l_n endpoint z at height 0 only. Paths through the slab are exactly
//! the open paths between the two levels that end at (z, 0).

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::BranchingError;
use crate::graphs::{level_sequence, GraphError, DEFAULT_POPULATION_CAP};
use crate::percolation::check_probability;
use crate::rng::{hash_words, uniform_at, tag};

/// Explicit slab graph with integer vertex ids; vertex 0 is (x, 0).
#[derive(Debug, Clone)]
pub struct Slab {
    pub d: u32,
    pub n: u32,
    pub window: u32,
    /// Number of level-l_n endpoints, (4d-1)^(l_n - l_{n-1}).
    pub level_size: u64,
    offsets: Vec<u32>,
    adj: Vec<(u32, u32)>,
    edge_count: usize,
    /// Vertices on the edge of the window.
    rim: Vec<bool>,
    /// First endpoint id; endpoints occupy the last `level_size` ids.
    first_end: u32,
}

impl Slab {
    pub fn new(d: u32, n: u32, window: u32) -> Result<Slab, BranchingError> {
        if d < 1 || n < 2 {
            return Err(BranchingError::InvalidParameter(format!("need d >= 1 and n >= 2, got d={d} n={n}")));
        }
        let levels = level_sequence(d, n as usize);
        let g = (levels[n as usize - 1] - levels[n as usize - 2]) as u32;
        let b = (4 * d - 1) as u64;
        let w = window as i64;
        let h = 2 * w + 1;
        let side = n as i64 + 2 * w + 1;
        let box_size = (side as u64).pow(d) * h as u64;
        let level_size = b.pow(g);
        // tree nodes at depths 1..g-1
        let depth_sizes: Vec<u64> = (1..g).map(|k| b.pow(k)).collect();
        let tree_nodes: u64 = depth_sizes.iter().sum();
        let total = 1 + tree_nodes * h as u64 + level_size * (box_size + 1);
        if total > DEFAULT_POPULATION_CAP as u64 {
            return Err(GraphError::TooLarge {
                cap: DEFAULT_POPULATION_CAP,
            }
            .into());
        }
        let mut depth_start = vec![0u64; g as usize];
        for k in 1..g as usize {
            depth_start[k] = depth_start[k - 1] + depth_sizes[k - 1];
        }
        let tree_id = |depth: u32, i: u64, k: i64| (1 + (depth_start[depth as usize - 1] + i) * h as u64 + (k + w) as u64) as u32;
        let copy_base = 1 + tree_nodes * h as u64;
        // copy point: coordinates c_j in [-w, n+w], height k in [-w, w]
        let copy_id = |c: u64, coords: &[i64], k: i64| {
            let mut idx = (k + w) as u64;
            for &x in coords {
                idx = idx * side as u64 + (x + w) as u64;
            }
            (copy_base + c * box_size + idx) as u32
        };
        let first_end = (copy_base + level_size * box_size) as u32;

        let mut edges: Vec<(u32, u32)> = Vec::new();
        let mut rim = vec![false; total as usize];
        let origin = vec![0i64; d as usize];
        // from x
        if g == 1 {
            for c in 0..level_size {
                edges.push((0, copy_id(c, &origin, 0)));
            }
        } else {
            for i in 0..b {
                edges.push((0, tree_id(1, i, 0)));
            }
        }
        // tree part
        for depth in 1..g {
            for i in 0..b.pow(depth) {
                for k in -w..=w {
                    let v = tree_id(depth, i, k);
                    if k.abs() == w {
                        rim[v as usize] = true;
                    }
                    if k < w {
                        edges.push((v, tree_id(depth, i, k + 1)));
                    }
                    for j in 0..b {
                        let child = i * b + j;
                        let u = if depth + 1 < g {
                            tree_id(depth + 1, child, k)
                        } else {
                            copy_id(child, &origin, k)
                        };
                        edges.push((v, u));
                    }
                }
            }
        }
        // copies
        let far = vec![n as i64; d as usize];
        let dims = d as usize + 1;
        let mut point = vec![0i64; dims];
        for c in 0..level_size {
            for idx in 0..box_size {
                let mut r = idx;
                for axis in (0..dims - 1).rev() {
                    point[axis] = (r % side as u64) as i64 - w;
                    r /= side as u64;
                }
                point[dims - 1] = r as i64 - w;
                let (coords, k) = (&point[..dims - 1], point[dims - 1]);
                let v = copy_id(c, coords, k);
                if k.abs() == w || coords.iter().any(|&x| x == -w || x == n as i64 + w) {
                    rim[v as usize] = true;
                }
                if k < w {
                    edges.push((v, copy_id(c, coords, k + 1)));
                }
                for axis in 0..dims - 1 {
                    if point[axis] < n as i64 + w {
                        let mut q = coords.to_vec();
                        q[axis] += 1;
                        edges.push((v, copy_id(c, &q, k)));
                    }
                }
            }
            edges.push((copy_id(c, &far, 0), first_end + c as u32));
        }
        let mut deg = vec![0u32; total as usize];
        for &(a, b) in &edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut offsets = vec![0u32; total as usize + 1];
        for i in 0..total as usize {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![(0u32, 0u32); 2 * edges.len()];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adj[fill[a as usize] as usize] = (b, e as u32);
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = (a, e as u32);
            fill[b as usize] += 1;
        }
        Ok(Slab {
            d,
            n,
            window,
            level_size,
            offsets,
            adj,
            edge_count: edges.len(),
            rim,
            first_end,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// |Z| for one configuration, and whether the cluster touched the window edge.
    fn crossings(&self, p: f64, key: u64, replica: u64) -> (u64, bool) {
        let mut seen = vec![false; self.vertex_count()];
        seen[0] = true;
        let mut queue = VecDeque::from([0u32]);
        let mut count = 0;
        let mut rim = false;
        while let Some(v) = queue.pop_front() {
            if v >= self.first_end {
                count += 1;
            }
            rim |= self.rim[v as usize];
            for &(u, e) in &self.adj[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize] {
                if !seen[u as usize] && uniform_at(key, replica, e as u64) < p {
                    seen[u as usize] = true;
                    queue.push_back(u);
                }
            }
        }
        (count, rim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffspringReport {
    pub d: u32,
    pub n: u32,
    pub p: f64,
    pub window: u32,
    pub replicas: u64,
    pub seed: u64,
    pub level_size: u64,
    /// |Z| per replica, in replica order.
    pub samples: Vec<u64>,
    pub histogram: BTreeMap<u64, u64>,
    pub mean: f64,
    pub stderr: f64,
    /// Replicas whose cluster reached the window edge; their |Z| is only a lower bound.
    pub lower_bound_only: u64,
}

/// Empirical law of the number of level-l_n vertices reached from one
/// level-l_{n-1} vertex by open paths between the two levels.
pub fn offspring_simulation(
    d: u32,
    n: u32,
    p: f64,
    replicas: u64,
    seed: u64,
    window: u32,
) -> Result<OffspringReport, BranchingError> {
    check_probability(p)?;
    let slab = Slab::new(d, n, window)?;
    let key = hash_words(&[seed, tag::OFFSPRING]);
    let runs: Vec<(u64, bool)> = (0..replicas)
        .into_par_iter()
        .map(|r| slab.crossings(p, key, r))
        .collect();
    let samples: Vec<u64> = runs.iter().map(|r| r.0).collect();
    let mut histogram = BTreeMap::new();
    for &s in &samples {
        *histogram.entry(s).or_insert(0u64) += 1;
    }
    let m = replicas.max(1) as f64;
    let mean = samples.iter().sum::<u64>() as f64 / m;
    let var = samples.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    Ok(OffspringReport {
        d,
        n,
        p,
        window,
        replicas,
        seed,
        level_size: slab.level_size,
        histogram,
        mean,
        stderr: (var / m).sqrt(),
        lower_bound_only: runs.iter().filter(|r| r.1).count() as u64,
        samples,
    })
}
