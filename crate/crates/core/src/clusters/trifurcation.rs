use std::collections::HashSet;

use super::ClusterError;
use crate::graphs::VertexId;
use crate::percolation::ClusterLabeling;

/// Whether removing vertex `v` splits its open cluster into at least three
/// pieces that each reach the window boundary.
pub fn is_trifurcation(label: &ClusterLabeling<'_>, v: usize) -> bool {
    let t = label.truncation();
    let starts: Vec<usize> = t
        .adjacent(v)
        .iter()
        .filter(|&&(_, e)| label.is_open(e as usize))
        .map(|&(u, _)| u as usize)
        .collect();
    if starts.len() < 3 {
        return false;
    }
    let mut seen = HashSet::from([v]);
    let mut reaching = 0;
    for s in starts {
        if !seen.insert(s) {
            continue;
        }
        let mut stack = vec![s];
        let mut hits_boundary = false;
        while let Some(x) = stack.pop() {
            hits_boundary |= t.is_boundary(x);
            for &(y, e) in t.adjacent(x) {
                if label.is_open(e as usize) && seen.insert(y as usize) {
                    stack.push(y as usize);
                }
            }
        }
        if hits_boundary {
            reaching += 1;
            if reaching >= 3 {
                return true;
            }
        }
    }
    false
}

/// Number of trifurcation points among `window`.
pub fn trifurcation_count(label: &ClusterLabeling<'_>, window: &[VertexId]) -> Result<usize, ClusterError> {
    let t = label.truncation();
    let mut count = 0;
    for v in window {
        if is_trifurcation(label, t.index_of(v)?) {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{ball, GraphSpec};
    use crate::percolation::{clusters, sample_bonds, PercolationSample};
    use crate::unionfind::UnionFind;

    /// Deletion oracle: union-find without `v`, then count distinct
    /// boundary-reaching components among v's open neighbours.
    fn oracle(label: &ClusterLabeling<'_>, v: usize) -> bool {
        let t = label.truncation();
        let mut uf = UnionFind::new(t.vertex_count());
        for (e, &(a, b)) in t.edges().iter().enumerate() {
            if label.is_open(e) && a as usize != v && b as usize != v {
                uf.union(a as usize, b as usize);
            }
        }
        let mut reach = HashSet::new();
        for i in t.boundary() {
            if i != v {
                reach.insert(uf.find(i));
            }
        }
        let mut parts = HashSet::new();
        for &(u, e) in t.adjacent(v) {
            let r = uf.find(u as usize);
            if label.is_open(e as usize) && reach.contains(&r) {
                parts.insert(r);
            }
        }
        parts.len() >= 3
    }

    #[test]
    fn closed_sample_has_none() {
        let spec = GraphSpec::Lattice { dim: 2 };
        let t = ball(&spec, &spec.origin(), 3).unwrap();
        let label = clusters(&sample_bonds(&t, 0.0, 1, 0).unwrap());
        assert_eq!(trifurcation_count(&label, t.vertices()).unwrap(), 0);
    }

    #[test]
    fn star_center() {
        // Open edges: origin to (1,0), (0,1), (-1,0): three arms to the boundary of ball(1).
        let spec = GraphSpec::Lattice { dim: 2 };
        let t = ball(&spec, &spec.origin(), 1).unwrap();
        let o = spec.origin();
        let arms = [vec![1, 0], vec![0, 1], vec![-1, 0]];
        let states: Vec<bool> = (0..t.edge_count())
            .map(|e| {
                let (a, b) = t.edges()[e];
                let other = if *t.vertex(a as usize) == o { b } else { a };
                arms.iter().any(|c| *t.vertex(other as usize) == VertexId::Plain(c.clone()))
            })
            .collect();
        let s = PercolationSample::from_states(&t, 0.5, &states).unwrap();
        let label = clusters(&s);
        assert_eq!(trifurcation_count(&label, t.vertices()).unwrap(), 1);
        assert!(is_trifurcation(&label, t.index_of(&o).unwrap()));
    }

    #[test]
    fn matches_deletion_oracle() {
        let specs = [
            GraphSpec::Lattice { dim: 2 },
            GraphSpec::RegularTree { degree: 4 },
            GraphSpec::product(GraphSpec::RegularTree { degree: 3 }),
        ];
        for spec in &specs {
            let t = ball(spec, &spec.origin(), 3).unwrap();
            for rep in 0..30 {
                let label = clusters(&sample_bonds(&t, 0.7, 8, rep).unwrap());
                for v in 0..t.vertex_count() {
                    assert_eq!(is_trifurcation(&label, v), oracle(&label, v), "{spec} rep {rep} v {v}");
                }
            }
        }
    }
}
