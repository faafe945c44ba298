use rayon::prelude::*;
use serde::Serialize;

use super::ClusterError;
use crate::graphs::{ball, FiniteTruncation, GraphError, GraphSpec, VertexId, DEFAULT_POPULATION_CAP};
use crate::percolation::{check_probability, sample_bonds};
use crate::unionfind::UnionFind;

/// Frequencies of the escape events around the fibre `{v} × Z`.
///
/// With Q_i the ball of radius `radii[i]` around `v` in the base graph and
/// ∂Q_i its inner vertex boundary:
/// * E_i: (v,0) reaches ∂Q_i × Z but not ∂Q_{i+1} × Z, for i < m − 1;
/// * F_i: the set of heights n with (v,0) ↔ (x,n) in Q_i × Z for some
///   x ∈ ∂Q_i has between 1 and L elements.
///
/// The Z fibre is clipped to `[-z_max, z_max]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusReport {
    pub spec: GraphSpec,
    pub vertex: VertexId,
    pub p: f64,
    pub radii: Vec<u32>,
    pub l: usize,
    pub z_max: u32,
    pub replicas: u64,
    pub seed: u64,
    pub e_freq: Vec<f64>,
    pub f_freq: Vec<f64>,
    pub e_sum: f64,
    /// Largest number of E events seen in one replica; at most 1 by disjointness.
    pub max_e_per_replica: usize,
}

impl AnnulusReport {
    pub fn f_decreasing(&self) -> bool {
        self.f_freq.windows(2).all(|w| w[1] <= w[0])
    }
}

struct Layout {
    window: FiniteTruncation,
    base_dist: Vec<u32>,
    z: Vec<i64>,
    /// `shell[k][i]`: window vertex `i` lies over ∂Q_k.
    shell: Vec<Vec<bool>>,
    start: usize,
}

fn layout(base: &GraphSpec, v: &VertexId, radii: &[u32], z_max: u32) -> Result<Layout, ClusterError> {
    let outer = *radii.last().expect("nonempty radii");
    let b = ball(base, v, outer)?;
    let height = 2 * z_max as usize + 1;
    if b.vertex_count() * height > DEFAULT_POPULATION_CAP {
        return Err(GraphError::TooLarge { cap: DEFAULT_POPULATION_CAP }.into());
    }
    // ∂Q_k: distance exactly radii[k] with a neighbour farther out.
    let base_shell: Vec<Vec<bool>> = radii
        .iter()
        .map(|&rk| {
            (0..b.vertex_count())
                .map(|i| {
                    b.distance(i) == rk
                        && (b.outside_degree(i) > 0
                            || b.adjacent(i).iter().any(|&(j, _)| b.distance(j as usize) > rk))
                })
                .collect()
        })
        .collect();
    let spec = GraphSpec::product(base.clone());
    let z_max = z_max as i64;
    let mut vertices = Vec::with_capacity(b.vertex_count() * height);
    for u in b.vertices() {
        for z in -z_max..=z_max {
            vertices.push(VertexId::product(u.clone(), z));
        }
    }
    let start = VertexId::product(v.clone(), 0);
    let window = FiniteTruncation::from_vertices(&spec, vertices, std::slice::from_ref(&start))?;
    let mut base_dist = Vec::with_capacity(window.vertex_count());
    let mut z = Vec::with_capacity(window.vertex_count());
    let mut base_index = Vec::with_capacity(window.vertex_count());
    for w in window.vertices() {
        let (u, h) = w.split_product();
        let i = b.index_of(u)?;
        base_dist.push(b.distance(i));
        z.push(h);
        base_index.push(i);
    }
    let shell = base_shell
        .iter()
        .map(|bs| base_index.iter().map(|&i| bs[i]).collect())
        .collect();
    let start = window.index_of(&start)?;
    Ok(Layout {
        window,
        base_dist,
        z,
        shell,
        start,
    })
}

/// Estimates the E_i and F_i frequencies; `spec` may be the base graph or its product with Z.
#[allow(clippy::too_many_arguments)]
pub fn annulus_escape_events(
    spec: &GraphSpec,
    v: &VertexId,
    p: f64,
    radii: &[u32],
    l: usize,
    z_max: u32,
    replicas: u64,
    seed: u64,
) -> Result<AnnulusReport, ClusterError> {
    check_probability(p)?;
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ClusterError::InvalidParameter("radii must be nonempty and strictly increasing".into()));
    }
    if l < 1 {
        return Err(ClusterError::InvalidParameter("L must be at least 1".into()));
    }
    let base = spec.base();
    let v = v.split_product().0;
    let lay = layout(base, v, radii, z_max)?;
    let m = radii.len();
    let per_replica: Vec<(Vec<bool>, Vec<bool>)> = (0..replicas)
        .into_par_iter()
        .map(|rep| replica_events(&lay, radii, l, p, seed, rep))
        .collect();
    let mut e_count = vec![0u64; m.saturating_sub(1)];
    let mut f_count = vec![0u64; m];
    let mut max_e = 0;
    for (e, f) in &per_replica {
        max_e = max_e.max(e.iter().filter(|&&x| x).count());
        for (k, &x) in e.iter().enumerate() {
            e_count[k] += u64::from(x);
        }
        for (k, &x) in f.iter().enumerate() {
            f_count[k] += u64::from(x);
        }
    }
    let n = replicas.max(1) as f64;
    let e_freq: Vec<f64> = e_count.iter().map(|&c| c as f64 / n).collect();
    Ok(AnnulusReport {
        spec: spec.clone(),
        vertex: v.clone(),
        p,
        radii: radii.to_vec(),
        l,
        z_max,
        replicas,
        seed,
        e_sum: e_freq.iter().sum(),
        e_freq,
        f_freq: f_count.iter().map(|&c| c as f64 / n).collect(),
        max_e_per_replica: max_e,
    })
}

fn replica_events(lay: &Layout, radii: &[u32], l: usize, p: f64, seed: u64, rep: u64) -> (Vec<bool>, Vec<bool>) {
    let t = &lay.window;
    let s = sample_bonds(t, p, seed, rep).expect("probability checked");
    let n = t.vertex_count();
    let open_edges: Vec<(usize, usize)> = s
        .open_edges()
        .iter_ones()
        .map(|e| (t.edges()[e].0 as usize, t.edges()[e].1 as usize))
        .collect();

    let mut full = UnionFind::new(n);
    for &(a, b) in &open_edges {
        full.union(a, b);
    }
    let root = full.find(lay.start);
    let reaches: Vec<bool> = lay
        .shell
        .iter()
        .map(|sh| (0..n).any(|i| sh[i] && full.find(i) == root))
        .collect();
    let e: Vec<bool> = (0..radii.len().saturating_sub(1))
        .map(|k| reaches[k] && !reaches[k + 1])
        .collect();

    let f = radii
        .iter()
        .enumerate()
        .map(|(k, &rk)| {
            let mut uf = UnionFind::new(n);
            for &(a, b) in &open_edges {
                if lay.base_dist[a] <= rk && lay.base_dist[b] <= rk {
                    uf.union(a, b);
                }
            }
            let root = uf.find(lay.start);
            let mut heights: Vec<i64> = (0..n)
                .filter(|&i| lay.shell[k][i] && uf.find(i) == root)
                .map(|i| lay.z[i])
                .collect();
            heights.sort_unstable();
            heights.dedup();
            (1..=l).contains(&heights.len())
        })
        .collect();
    (e, f)
}
