use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use super::ClusterError;
use crate::graphs::{ball_around, FiniteTruncation, GraphSpec, VertexId, DEFAULT_POPULATION_CAP};

/// Outcome of checking a cutset. Infiniteness can never be certified from a
/// finite window, so a failed check is inconclusive rather than false.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutsetVerdict {
    /// Every vertex of the target set lies in a component strictly inside the window.
    Confined,
    /// Some target vertex reaches an uncut edge leaving the window.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutsetCertificate {
    pub target: Vec<VertexId>,
    pub cut_edges: Vec<(VertexId, VertexId)>,
    pub k: usize,
    /// Radius at which the certificate was checked to be `Confined`.
    pub verify_radius: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutsetSearch {
    /// Fewest edges separating the target from the outside of the search window.
    pub min_cut: usize,
    pub search_radius: u32,
    /// Present iff `min_cut <= K`.
    pub certificate: Option<CutsetCertificate>,
}

fn edge_key(a: &VertexId, b: &VertexId) -> (VertexId, VertexId) {
    if a.encode() <= b.encode() {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

/// Checks, inside ball(A, radius), whether removing `cut` confines all of `A`.
pub fn verify_cutset(
    spec: &GraphSpec,
    target: &[VertexId],
    cut: &[(VertexId, VertexId)],
    radius: u32,
) -> Result<CutsetVerdict, ClusterError> {
    if target.is_empty() {
        return Err(ClusterError::InvalidParameter("empty target set".into()));
    }
    let mut removed = HashSet::new();
    for (a, b) in cut {
        if !spec.neighbors(a)?.contains(b) {
            return Err(ClusterError::InvalidParameter(format!("{a} -- {b} is not an edge")));
        }
        removed.insert(edge_key(a, b));
    }
    let w = ball_around(spec, target, radius, DEFAULT_POPULATION_CAP)?;
    let mut seen = vec![false; w.vertex_count()];
    let mut queue = VecDeque::new();
    for v in target {
        let i = w.index_of(v)?;
        if !seen[i] {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let v = w.vertex(i);
        if w.is_boundary(i) {
            let leaving = spec
                .neighbors(v)?
                .into_iter()
                .filter(|u| !w.contains(u) && !removed.contains(&edge_key(v, u)))
                .count();
            if leaving > 0 {
                return Ok(CutsetVerdict::Inconclusive);
            }
        }
        for &(j, _) in w.adjacent(i) {
            let j = j as usize;
            if !seen[j] && !removed.contains(&edge_key(v, w.vertex(j))) {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(CutsetVerdict::Confined)
}

/// Unit-capacity flow network on a window: one arc pair per window edge, an
/// infinite source arc into each target vertex and an arc of capacity
/// `outside_degree` from each boundary vertex to the sink.
struct Network {
    head: Vec<usize>,
    cap: Vec<u64>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    /// Arc `a -> b` with capacity `c` and its reverse with capacity `rc`.
    fn add(&mut self, a: usize, b: usize, c: u64, rc: u64) {
        self.adj[a].push(self.head.len());
        self.head.push(b);
        self.cap.push(c);
        self.adj[b].push(self.head.len());
        self.head.push(a);
        self.cap.push(rc);
    }

    /// Breadth-first residual search; returns the predecessor arc of each reached node.
    fn residual_bfs(&self, s: usize) -> Vec<Option<usize>> {
        let mut pred = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &arc in &self.adj[x] {
                let y = self.head[arc];
                if self.cap[arc] > 0 && !seen[y] {
                    seen[y] = true;
                    pred[y] = Some(arc);
                    queue.push_back(y);
                }
            }
        }
        pred[s] = Some(usize::MAX);
        pred
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        loop {
            let pred = self.residual_bfs(s);
            if pred[t].is_none() {
                return flow;
            }
            let mut path = Vec::new();
            let mut y = t;
            while y != s {
                let arc = pred[y].expect("on path");
                path.push(arc);
                y = self.head[arc ^ 1];
            }
            let push = path.iter().map(|&a| self.cap[a]).min().expect("nonempty path");
            for a in path {
                self.cap[a] -= push;
                self.cap[a ^ 1] += push;
            }
            flow += push;
        }
    }
}

/// Minimum edge cut between `target` and the outside of ball(target,
/// search_radius), with a certificate when it has at most `k` edges.
pub fn find_bounded_cutset(
    spec: &GraphSpec,
    target: &[VertexId],
    k: usize,
    search_radius: u32,
) -> Result<CutsetSearch, ClusterError> {
    if k < 1 {
        return Err(ClusterError::InvalidParameter("K must be at least 1".into()));
    }
    if target.is_empty() {
        return Err(ClusterError::InvalidParameter("empty target set".into()));
    }
    let w: FiniteTruncation = ball_around(spec, target, search_radius, DEFAULT_POPULATION_CAP)?;
    let n = w.vertex_count();
    let (s, t) = (n, n + 1);
    let mut net = Network::new(n + 2);
    for &(a, b) in w.edges() {
        net.add(a as usize, b as usize, 1, 1);
    }
    let inf = 2 * (w.edge_count() as u64 + (0..n).map(|i| w.outside_degree(i) as u64).sum::<u64>()) + 1;
    for v in target {
        net.add(s, w.index_of(v)?, inf, 0);
    }
    for i in w.boundary() {
        net.add(i, t, w.outside_degree(i) as u64, 0);
    }
    let min_cut = net.max_flow(s, t) as usize;
    let certificate = if min_cut <= k {
        let reached = net.residual_bfs(s);
        let inside = |i: usize| reached[i].is_some();
        let mut cut_edges = Vec::new();
        for &(a, b) in w.edges() {
            let (a, b) = (a as usize, b as usize);
            if inside(a) != inside(b) {
                cut_edges.push(edge_key(w.vertex(a), w.vertex(b)));
            }
        }
        for i in w.boundary().filter(|&i| inside(i)) {
            let v = w.vertex(i);
            for u in spec.neighbors(v)? {
                if !w.contains(&u) {
                    cut_edges.push(edge_key(v, &u));
                }
            }
        }
        debug_assert_eq!(cut_edges.len(), min_cut);
        let verify_radius = search_radius + 1;
        match verify_cutset(spec, target, &cut_edges, verify_radius)? {
            CutsetVerdict::Confined => Some(CutsetCertificate {
                target: target.to_vec(),
                cut_edges,
                k,
                verify_radius,
            }),
            CutsetVerdict::Inconclusive => None,
        }
    } else {
        None
    };
    Ok(CutsetSearch {
        min_cut,
        search_radius,
        certificate,
    })
}
