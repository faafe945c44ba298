//! The modified branching random walk on G × Z, G a tree with lattice insertions.
//!
//! * A particle on a tree vertex sends one particle to each neighbour with
//!   probability p.
//! * A particle on an attachment point (0,…,0,k) or (n,…,n,k) of a copy of
//!   Z^{d+1} sends one particle to its tree neighbour with probability p, and
//!   one particle to every other point of the two attachment fibres that lies
//!   in its open cluster inside the copy. That cluster is sampled afresh for
//!   every particle, in an l1 window of radius `copy_window`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{binomial, BranchingError};
use crate::graphs::{insertion_index, FiniteTruncation, GraphSpec, VertexId};
use crate::percolation::{check_probability, PercolationSample};
use crate::rng::{hash_bytes, stream, tag};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrwConfig {
    pub max_t: u32,
    pub population_cap: u64,
    /// l1 radius of the window in which copy clusters are sampled.
    pub copy_window: u32,
}

/// Particle counts per vertex at one generation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParticleFront {
    pub particles: BTreeMap<VertexId, u64>,
    pub generation: u64,
    pub population_cap: u64,
    /// Set once the population exceeded the cap; the counts are kept as they were.
    pub aborted: bool,
}

impl ParticleFront {
    pub fn single(v: VertexId, population_cap: u64) -> ParticleFront {
        ParticleFront {
            particles: BTreeMap::from([(v, 1)]),
            generation: 0,
            population_cap,
            aborted: false,
        }
    }

    pub fn population(&self) -> u64 {
        self.particles.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrwRun {
    pub spec: GraphSpec,
    pub start: VertexId,
    pub p: f64,
    pub config: BrwConfig,
    pub seed: u64,
    pub visited: BTreeSet<VertexId>,
    /// Particles at the start summed over generations 1..=maxT.
    pub returns: u64,
    pub final_population: u64,
    pub generations: u64,
    pub aborted: bool,
    /// Copy-cluster samples that reached the edge of their window.
    pub copy_window_hits: u64,
}

enum Site {
    Tree,
    Attachment,
    Interior,
}

fn classify(d: u32, n0: u32, v: &VertexId) -> Site {
    match v.split_product().0 {
        VertexId::TreeNode(_) => Site::Tree,
        VertexId::LatticePoint { owner, coords } => {
            let n = insertion_index(d, n0, owner.len() as u64).unwrap_or(0) as i64;
            if coords.iter().all(|&c| c == 0) || coords.iter().all(|&c| c == n) {
                Site::Attachment
            } else {
                Site::Interior
            }
        }
        _ => Site::Interior,
    }
}

fn insertion_params(spec: &GraphSpec) -> Result<(u32, u32), BranchingError> {
    match spec {
        GraphSpec::Product(b) => match **b {
            GraphSpec::TreeWithLatticeInsertions { d, n0 } => Ok((d, n0)),
            _ => Err(BranchingError::InvalidParameter(format!("{spec} is not a product of a tree with insertions"))),
        },
        _ => Err(BranchingError::InvalidParameter(format!("{spec} is not a product of a tree with insertions"))),
    }
}

/// Randomness behind the walk's emissions.
trait Source {
    /// How many of `m` particles at `from` send a particle to `to`.
    fn emit(&mut self, from: &VertexId, to: &VertexId, m: u64, p: f64, rng: &mut ChaCha8Rng) -> u64;
    /// Fibre offspring of one particle at the attachment point `start`.
    fn copy_offspring(&mut self, start: &VertexId, p: f64, window: u32, rng: &mut ChaCha8Rng) -> (Vec<VertexId>, bool);
}

struct Fresh;

impl Source for Fresh {
    fn emit(&mut self, _: &VertexId, _: &VertexId, m: u64, p: f64, rng: &mut ChaCha8Rng) -> u64 {
        binomial(rng, m, p)
    }

    fn copy_offspring(&mut self, start: &VertexId, p: f64, window: u32, rng: &mut ChaCha8Rng) -> (Vec<VertexId>, bool) {
        fresh_copy_cluster(start, p, window, rng)
    }
}

/// Open cluster of an attachment point inside its copy, explored breadth
/// first; each edge is examined at most once. Returns the other attachment
/// points in the cluster and whether the window edge was reached.
fn fresh_copy_cluster(start: &VertexId, p: f64, window: u32, rng: &mut ChaCha8Rng) -> (Vec<VertexId>, bool) {
    let (base, z0) = start.split_product();
    let VertexId::LatticePoint { owner, coords } = base else {
        return (Vec::new(), false);
    };
    let d = coords.len();
    let mut origin = coords.clone();
    origin.push(z0);
    let l1 = |x: &[i64]| x.iter().zip(&origin).map(|(a, b)| (a - b).unsigned_abs()).sum::<u64>();
    let mut cluster: HashSet<Vec<i64>> = HashSet::from([origin.clone()]);
    let mut queue = VecDeque::from([origin.clone()]);
    let mut order = Vec::new();
    let mut hit = false;
    while let Some(x) = queue.pop_front() {
        if l1(&x) == window as u64 {
            hit = true;
        }
        for axis in 0..=d {
            for step in [-1i64, 1] {
                let mut y = x.clone();
                y[axis] += step;
                if l1(&y) > window as u64 || cluster.contains(&y) {
                    continue;
                }
                if rng.random::<f64>() < p {
                    cluster.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        order.push(x);
    }
    let n = match classify_n(owner, coords) {
        Some(n) => n,
        None => return (Vec::new(), hit),
    };
    let offspring = order
        .into_iter()
        .skip(1)
        .filter(|x| x[..d].iter().all(|&c| c == 0) || x[..d].iter().all(|&c| c == n))
        .map(|x| {
            VertexId::product(
                VertexId::LatticePoint {
                    owner: owner.clone(),
                    coords: x[..d].to_vec(),
                },
                x[d],
            )
        })
        .collect();
    (offspring, hit)
}

/// The far attachment coordinate n of a copy, read off an attachment point's
/// coordinates when it is (n,…,n); otherwise recomputed from the owner depth.
fn classify_n(owner: &[u32], coords: &[i64]) -> Option<i64> {
    let d = coords.len() as u32;
    // copies exist only at insertion levels; n0 does not change n
    insertion_index(d, 1, owner.len() as u64).map(|n| n as i64)
}

/// One generation of the walk from `front`.
pub fn brw_step(
    spec: &GraphSpec,
    front: &ParticleFront,
    p: f64,
    copy_window: u32,
    seed: u64,
) -> Result<ParticleFront, BranchingError> {
    check_probability(p)?;
    let (d, n0) = insertion_params(spec)?;
    let (next, _) = step_with(spec, d, n0, front, p, copy_window, seed, &mut Fresh)?;
    Ok(next)
}

#[allow(clippy::too_many_arguments)]
fn step_with(
    spec: &GraphSpec,
    d: u32,
    n0: u32,
    front: &ParticleFront,
    p: f64,
    copy_window: u32,
    seed: u64,
    source: &mut impl Source,
) -> Result<(ParticleFront, u64), BranchingError> {
    let t = front.generation + 1;
    let mut next: BTreeMap<VertexId, u64> = BTreeMap::new();
    let mut hits = 0;
    for (v, &m) in &front.particles {
        let mut rng = stream(&[seed, tag::BRANCHING, t, hash_bytes(&v.encode())]);
        match classify(d, n0, v) {
            Site::Tree => {
                for u in spec.neighbors(v)? {
                    let k = source.emit(v, &u, m, p, &mut rng);
                    if k > 0 {
                        *next.entry(u).or_insert(0) += k;
                    }
                }
            }
            Site::Attachment => {
                for u in spec.neighbors(v)?.into_iter().filter(|u| u.is_tree_node()) {
                    let k = source.emit(v, &u, m, p, &mut rng);
                    if k > 0 {
                        *next.entry(u).or_insert(0) += k;
                    }
                }
                for _ in 0..m {
                    let (offspring, hit) = source.copy_offspring(v, p, copy_window, &mut rng);
                    hits += u64::from(hit);
                    for u in offspring {
                        *next.entry(u).or_insert(0) += 1;
                    }
                }
            }
            Site::Interior => {
                return Err(BranchingError::InvalidParameter(format!(
                    "{v} is neither a tree vertex nor an attachment point"
                )))
            }
        }
    }
    let mut out = ParticleFront {
        particles: next,
        generation: t,
        population_cap: front.population_cap,
        aborted: front.aborted,
    };
    if out.population() > out.population_cap {
        out.aborted = true;
    }
    Ok((out, hits))
}

#[allow(clippy::too_many_arguments)]
fn run_with(
    spec: &GraphSpec,
    start: &VertexId,
    p: f64,
    config: &BrwConfig,
    seed: u64,
    source: &mut impl Source,
) -> Result<BrwRun, BranchingError> {
    check_probability(p)?;
    let (d, n0) = insertion_params(spec)?;
    spec.check_vertex(start)?;
    if matches!(classify(d, n0, start), Site::Interior) {
        return Err(BranchingError::InvalidParameter(format!(
            "start {start} is neither a tree vertex nor an attachment point"
        )));
    }
    let mut front = ParticleFront::single(start.clone(), config.population_cap);
    let mut visited = BTreeSet::from([start.clone()]);
    let mut returns = 0;
    let mut hits_total = 0;
    while front.generation < config.max_t as u64 && !front.is_empty() && !front.aborted {
        let (next, hits) = step_with(spec, d, n0, &front, p, config.copy_window, seed, source)?;
        hits_total += hits;
        returns += next.particles.get(start).copied().unwrap_or(0);
        visited.extend(next.particles.keys().cloned());
        front = next;
    }
    Ok(BrwRun {
        spec: spec.clone(),
        start: start.clone(),
        p,
        config: *config,
        seed,
        visited,
        returns,
        final_population: front.population(),
        generations: front.generation,
        aborted: front.aborted,
        copy_window_hits: hits_total,
    })
}

/// Runs the walk from a single particle at `start` for up to `maxT` generations.
pub fn simulate_brw(
    spec: &GraphSpec,
    start: &VertexId,
    p: f64,
    config: &BrwConfig,
    seed: u64,
) -> Result<BrwRun, BranchingError> {
    run_with(spec, start, p, config, seed, &mut Fresh)
}

/// Randomness that reuses a percolation configuration on a window: the first
/// emission across an edge uses the edge's state, and the first particle
/// whose copy cluster is needed gets the configuration's cluster inside the
/// copy. Every later use draws fresh randomness. Nothing leaves the window.
struct Coupled<'a> {
    window: &'a FiniteTruncation,
    sample: &'a PercolationSample<'a>,
    used_edges: HashSet<usize>,
    copy_root: Vec<usize>,
    copy_members: HashMap<usize, Vec<usize>>,
    used_clusters: HashSet<usize>,
}

impl<'a> Coupled<'a> {
    fn new(sample: &'a PercolationSample<'a>, d: u32, n0: u32) -> Self {
        let window = sample.truncation();
        let same_copy = |a: &VertexId, b: &VertexId| match (a.split_product().0, b.split_product().0) {
            (VertexId::LatticePoint { owner: o1, .. }, VertexId::LatticePoint { owner: o2, .. }) => o1 == o2,
            _ => false,
        };
        let mut uf = UnionFind::new(window.vertex_count());
        for e in sample.open_edges().iter_ones() {
            let (a, b) = window.edges()[e];
            if same_copy(window.vertex(a as usize), window.vertex(b as usize)) {
                uf.union(a as usize, b as usize);
            }
        }
        let copy_root: Vec<usize> = (0..window.vertex_count()).map(|i| uf.find(i)).collect();
        let mut copy_members: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..window.vertex_count() {
            if matches!(classify(d, n0, window.vertex(i)), Site::Attachment) {
                copy_members.entry(copy_root[i]).or_default().push(i);
            }
        }
        Coupled {
            window,
            sample,
            used_edges: HashSet::new(),
            copy_root,
            copy_members,
            used_clusters: HashSet::new(),
        }
    }
}

impl Source for Coupled<'_> {
    fn emit(&mut self, from: &VertexId, to: &VertexId, m: u64, p: f64, rng: &mut ChaCha8Rng) -> u64 {
        let Some(e) = self.window.edge_index(from, to) else {
            return 0;
        };
        if self.used_edges.insert(e) {
            u64::from(self.sample.is_open(e)) + binomial(rng, m - 1, p)
        } else {
            binomial(rng, m, p)
        }
    }

    fn copy_offspring(&mut self, start: &VertexId, p: f64, window: u32, rng: &mut ChaCha8Rng) -> (Vec<VertexId>, bool) {
        let i = self.window.index_of(start).expect("particles stay in the window");
        let root = self.copy_root[i];
        if self.used_clusters.insert(root) {
            let members = self.copy_members.get(&root).map(Vec::as_slice).unwrap_or(&[]);
            let offspring = members
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| self.window.vertex(j).clone())
                .collect();
            (offspring, false)
        } else {
            let (mut offspring, hit) = fresh_copy_cluster(start, p, window, rng);
            offspring.retain(|v| self.window.contains(v));
            (offspring, hit)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledRun {
    pub run: BrwRun,
    /// Open cluster of the start inside the window.
    pub cluster: Vec<VertexId>,
    /// Cluster vertices off every copy that the walk never visited.
    pub missed_off_copies: Vec<VertexId>,
    /// Cluster vertices that are tree vertices or attachment points and were never visited.
    pub missed_non_interior: Vec<VertexId>,
}

/// Open cluster of `start` in the window of `sample`, in encoding order, and
/// its depth: the largest open-path distance from `start`. A coupled walk
/// visits every cluster vertex off the copies within `depth` generations.
pub fn open_cluster(sample: &PercolationSample<'_>, start: &VertexId) -> Result<(Vec<VertexId>, u32), BranchingError> {
    let window = sample.truncation();
    let s = window.index_of(start)?;
    let mut dist = vec![u32::MAX; window.vertex_count()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    let mut cluster = Vec::new();
    let mut depth = 0;
    while let Some(i) = queue.pop_front() {
        cluster.push(window.vertex(i).clone());
        depth = depth.max(dist[i]);
        for &(j, e) in window.adjacent(i) {
            if sample.is_open(e as usize) && dist[j as usize] == u32::MAX {
                dist[j as usize] = dist[i] + 1;
                queue.push_back(j as usize);
            }
        }
    }
    cluster.sort_by_key(|v| v.encode());
    Ok((cluster, depth))
}

/// Runs the walk coupled to `sample` (a configuration on a window of G × Z)
/// and compares the visited set with the open cluster of `start`.
pub fn simulate_coupled_brw(
    sample: &PercolationSample<'_>,
    start: &VertexId,
    config: &BrwConfig,
    seed: u64,
) -> Result<CoupledRun, BranchingError> {
    let window = sample.truncation();
    let spec = window.spec();
    let (d, n0) = insertion_params(spec)?;
    window.index_of(start)?;
    let mut source = Coupled::new(sample, d, n0);
    let run = run_with(spec, start, sample.p(), config, seed, &mut source)?;

    let (cluster, _) = open_cluster(sample, start)?;
    let missed_off_copies = cluster
        .iter()
        .filter(|v| !v.is_lattice_point() && !run.visited.contains(*v))
        .cloned()
        .collect();
    let missed_non_interior = cluster
        .iter()
        .filter(|v| !matches!(classify(d, n0, v), Site::Interior) && !run.visited.contains(*v))
        .cloned()
        .collect();
    Ok(CoupledRun {
        run,
        cluster,
        missed_off_copies,
        missed_non_interior,
    })
}
