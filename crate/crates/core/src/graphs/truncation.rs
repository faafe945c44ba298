use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use super::{GraphError, GraphSpec, VertexId};

/// Default cap on the number of vertices in a truncation.
pub const DEFAULT_POPULATION_CAP: usize = 2_000_000;

/// An explicit finite window of an infinite graph.
///
/// Vertices are stored in the order of their canonical encodings, edges as
/// index pairs `(u, v)` with `u < v` in lexicographic order. The edge set is
/// the induced edge set of the infinite graph.
#[derive(Debug, Clone)]
pub struct FiniteTruncation {
    spec: GraphSpec,
    vertices: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    edges: Vec<(u32, u32)>,
    /// Per vertex: number of neighbours outside the window.
    outside: Vec<u32>,
    /// Per vertex: graph distance to the nearest center.
    distance: Vec<u32>,
    adj_offsets: Vec<u32>,
    adj: Vec<(u32, u32)>,
    radius: u32,
}

/// The ball of radius `r` around `center`.
pub fn ball(spec: &GraphSpec, center: &VertexId, r: u32) -> Result<FiniteTruncation, GraphError> {
    ball_around(spec, std::slice::from_ref(center), r, DEFAULT_POPULATION_CAP)
}

/// All vertices within distance `r` of some center, found breadth first.
pub fn ball_around(
    spec: &GraphSpec,
    centers: &[VertexId],
    r: u32,
    cap: usize,
) -> Result<FiniteTruncation, GraphError> {
    spec.validate()?;
    let mut dist: HashMap<VertexId, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    for c in centers {
        spec.check_vertex(c)?;
        if dist.insert(c.clone(), 0).is_none() {
            queue.push_back(c.clone());
        }
    }
    if dist.len() > cap {
        return Err(GraphError::TooLarge { cap });
    }
    let mut nb = Vec::new();
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        if dv == r {
            continue;
        }
        nb.clear();
        spec.push_neighbors(&v, &mut nb);
        for u in nb.drain(..) {
            if !dist.contains_key(&u) {
                dist.insert(u.clone(), dv + 1);
                if dist.len() > cap {
                    return Err(GraphError::TooLarge { cap });
                }
                queue.push_back(u);
            }
        }
    }
    let (vertices, distance): (Vec<_>, Vec<_>) = dist.into_iter().unzip();
    Ok(FiniteTruncation::assemble(spec.clone(), vertices, distance, r))
}

impl FiniteTruncation {
    /// Window on an explicit vertex set; distances are measured inside the
    /// window from `centers` (`u32::MAX` when unreachable).
    pub fn from_vertices(
        spec: &GraphSpec,
        vertices: Vec<VertexId>,
        centers: &[VertexId],
    ) -> Result<FiniteTruncation, GraphError> {
        spec.validate()?;
        for v in &vertices {
            spec.check_vertex(v)?;
        }
        let n = vertices.len();
        if vertices.iter().collect::<std::collections::HashSet<_>>().len() != n {
            return Err(GraphError::InvalidVertex("duplicate vertex in window".into()));
        }
        let mut t = FiniteTruncation::assemble(spec.clone(), vertices, vec![u32::MAX; n], 0);
        let mut queue = VecDeque::new();
        for c in centers {
            let i = t.index_of(c)?;
            t.distance[i] = 0;
            queue.push_back(i);
        }
        while let Some(i) = queue.pop_front() {
            let di = t.distance[i];
            for k in t.adj_offsets[i]..t.adj_offsets[i + 1] {
                let j = t.adj[k as usize].0 as usize;
                if t.distance[j] == u32::MAX {
                    t.distance[j] = di + 1;
                    queue.push_back(j);
                }
            }
        }
        t.radius = t
            .distance
            .iter()
            .copied()
            .filter(|&x| x != u32::MAX)
            .max()
            .unwrap_or(0);
        Ok(t)
    }

    fn assemble(spec: GraphSpec, vertices: Vec<VertexId>, distance: Vec<u32>, radius: u32) -> Self {
        let mut keyed: Vec<(Vec<u8>, VertexId, u32)> = vertices
            .into_iter()
            .zip(distance)
            .map(|(v, d)| (v.encode(), v, d))
            .collect();
        keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut vertices = Vec::with_capacity(keyed.len());
        let mut distance = Vec::with_capacity(keyed.len());
        for (_, v, d) in keyed {
            vertices.push(v);
            distance.push(d);
        }
        let index: HashMap<VertexId, usize> =
            vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut outside = vec![0u32; vertices.len()];
        let mut nb = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            nb.clear();
            spec.push_neighbors(v, &mut nb);
            for u in &nb {
                match index.get(u) {
                    Some(&j) if j > i => edges.push((i as u32, j as u32)),
                    Some(_) => {}
                    None => outside[i] += 1,
                }
            }
        }
        edges.sort_unstable();
        let mut deg = vec![0u32; vertices.len() + 1];
        for &(a, b) in &edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut adj_offsets = vec![0u32; vertices.len() + 1];
        for i in 0..vertices.len() {
            adj_offsets[i + 1] = adj_offsets[i] + deg[i];
        }
        let mut fill = adj_offsets.clone();
        let mut adj = vec![(0u32, 0u32); 2 * edges.len()];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adj[fill[a as usize] as usize] = (b, e as u32);
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = (a, e as u32);
            fill[b as usize] += 1;
        }
        FiniteTruncation {
            spec,
            vertices,
            index,
            edges,
            outside,
            distance,
            adj_offsets,
            adj,
            radius,
        }
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &VertexId {
        &self.vertices[i]
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.index.contains_key(v)
    }

    pub fn index_of(&self, v: &VertexId) -> Result<usize, GraphError> {
        self.index
            .get(v)
            .copied()
            .ok_or_else(|| GraphError::InvalidVertex(format!("{v} is outside the truncation")))
    }

    /// Graph distance from the window's centers.
    pub fn distance(&self, i: usize) -> u32 {
        self.distance[i]
    }

    /// Number of neighbours of vertex `i` lying outside the window.
    pub fn outside_degree(&self, i: usize) -> u32 {
        self.outside[i]
    }

    /// A boundary vertex has at least one neighbour outside the window.
    pub fn is_boundary(&self, i: usize) -> bool {
        self.outside[i] > 0
    }

    pub fn boundary(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&i| self.outside[i] > 0)
    }

    /// (neighbour index, edge index) pairs of vertex `i` inside the window.
    pub fn adjacent(&self, i: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_offsets[i] as usize..self.adj_offsets[i + 1] as usize]
    }

    /// Index of the edge joining `a` and `b`, if both are in the window and adjacent.
    pub fn edge_index(&self, a: &VertexId, b: &VertexId) -> Option<usize> {
        let i = *self.index.get(a)?;
        let j = *self.index.get(b)? as u32;
        self.adjacent(i)
            .iter()
            .find(|&&(n, _)| n == j)
            .map(|&(_, e)| e as usize)
    }

    /// Plain-text edge list: a header line with the spec and radius, then one
    /// `hex(encode(u)) hex(encode(v))` pair per line.
    pub fn to_edge_list(&self) -> String {
        let hex = |v: &VertexId| {
            v.encode().iter().fold(String::new(), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
        };
        let mut out = format!("# spec={} radius={}\n", self.spec, self.radius);
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", hex(&self.vertices[a as usize]), hex(&self.vertices[b as usize]));
        }
        out
    }
}
