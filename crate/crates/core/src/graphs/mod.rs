//! Infinite graph constructions, evaluated lazily through their adjacency.
//!
//! Every family is described by a [`GraphSpec`]; vertices are addressed by
//! [`VertexId`]. Finite windows are cut out with [`ball`] and friends.

mod levels;
mod spec;
mod truncation;
mod vertex;

pub use levels::{insertion_index, level_gap, level_sequence, level_sequence_with, levels, LogBase};
pub use spec::{GraphSpec, DEFAULT_JOIN_LATTICE_DIM, DEFAULT_JOIN_TREE_DEGREE};
pub use truncation::{ball, ball_around, FiniteTruncation, DEFAULT_POPULATION_CAP};
pub use vertex::VertexId;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid graph spec: {0}")]
    InvalidSpec(String),
    #[error("invalid vertex: {0}")]
    InvalidVertex(String),
    #[error("malformed vertex encoding: {0}")]
    MalformedEncoding(String),
    #[error("truncation exceeds the population cap of {cap} vertices")]
    TooLarge { cap: usize },
}

impl GraphSpec {
    /// Distinguished base point: the tree root, or the lattice origin (for
    /// `LatticeJoinTree`, the lattice origin that carries the joining edge).
    pub fn origin(&self) -> VertexId {
        match self {
            GraphSpec::Lattice { dim } => VertexId::Plain(vec![0; *dim as usize]),
            GraphSpec::LatticeJoinTree { lattice_dim, .. } => {
                VertexId::Plain(vec![0; *lattice_dim as usize])
            }
            GraphSpec::Product(b) => VertexId::product(b.origin(), 0),
            _ => VertexId::root(),
        }
    }

    /// Exact adjacency list of `v`. Fails if `v` is not a vertex of this graph.
    pub fn neighbors(&self, v: &VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(v)?;
        let mut out = Vec::with_capacity(self.max_degree());
        self.push_neighbors(v, &mut out);
        Ok(out)
    }

    /// Appends the neighbours of an already validated vertex.
    pub(crate) fn push_neighbors(&self, v: &VertexId, out: &mut Vec<VertexId>) {
        match self {
            GraphSpec::Product(base) => {
                let (bv, z) = v.split_product();
                let start = out.len();
                base.push_neighbors(bv, out);
                for u in &mut out[start..] {
                    let inner = std::mem::replace(u, VertexId::Plain(Vec::new()));
                    *u = VertexId::product(inner, z);
                }
                out.push(VertexId::product(bv.clone(), z - 1));
                out.push(VertexId::product(bv.clone(), z + 1));
            }
            GraphSpec::Lattice { .. } => {
                if let VertexId::Plain(c) = v {
                    push_lattice(c, out, VertexId::Plain);
                }
            }
            GraphSpec::RegularTree { degree } => {
                if let VertexId::TreeNode(w) = v {
                    push_tree(w, *degree, out, |w| VertexId::TreeNode(w[..w.len() - 1].to_vec()), |w| {
                        VertexId::TreeNode(w)
                    });
                }
            }
            GraphSpec::TreeWithLatticeInsertions { d, n0 } => {
                let (d, n0) = (*d, *n0);
                match v {
                    VertexId::TreeNode(w) => {
                        let up = |w: &[u32]| match insertion_index(d, n0, w.len() as u64) {
                            Some(n) => VertexId::LatticePoint {
                                owner: w.to_vec(),
                                coords: vec![n as i64; d as usize],
                            },
                            None => VertexId::TreeNode(w[..w.len() - 1].to_vec()),
                        };
                        let child_inserted = insertion_index(d, n0, w.len() as u64 + 1).is_some();
                        let down = |child: Vec<u32>| {
                            if child_inserted {
                                VertexId::LatticePoint {
                                    owner: child,
                                    coords: vec![0; d as usize],
                                }
                            } else {
                                VertexId::TreeNode(child)
                            }
                        };
                        push_tree(w, 4 * d, out, up, down);
                    }
                    VertexId::LatticePoint { owner, coords } => {
                        let n = insertion_index(d, n0, owner.len() as u64).unwrap_or(0) as i64;
                        if coords.iter().all(|&c| c == 0) {
                            out.push(VertexId::TreeNode(owner[..owner.len() - 1].to_vec()));
                        }
                        if coords.iter().all(|&c| c == n) {
                            out.push(VertexId::TreeNode(owner.clone()));
                        }
                        push_lattice(coords, out, |c| VertexId::LatticePoint {
                            owner: owner.clone(),
                            coords: c,
                        });
                    }
                    _ => {}
                }
            }
            GraphSpec::StretchedTree { d, n0 } => {
                let (d, n0) = (*d, *n0);
                match v {
                    VertexId::TreeNode(w) => {
                        let up = |w: &[u32]| {
                            if insertion_index(d, n0, w.len() as u64).is_some() {
                                VertexId::Stretch {
                                    owner: w.to_vec(),
                                    slot: 2,
                                }
                            } else {
                                VertexId::TreeNode(w[..w.len() - 1].to_vec())
                            }
                        };
                        let child_stretched = insertion_index(d, n0, w.len() as u64 + 1).is_some();
                        let down = |child: Vec<u32>| {
                            if child_stretched {
                                VertexId::Stretch {
                                    owner: child,
                                    slot: 1,
                                }
                            } else {
                                VertexId::TreeNode(child)
                            }
                        };
                        push_tree(w, 4 * d, out, up, down);
                    }
                    VertexId::Stretch { owner, slot } => {
                        if *slot == 1 {
                            out.push(VertexId::TreeNode(owner[..owner.len() - 1].to_vec()));
                            out.push(VertexId::Stretch {
                                owner: owner.clone(),
                                slot: 2,
                            });
                        } else {
                            out.push(VertexId::Stretch {
                                owner: owner.clone(),
                                slot: 1,
                            });
                            out.push(VertexId::TreeNode(owner.clone()));
                        }
                    }
                    _ => {}
                }
            }
            GraphSpec::TreePlusRay { degree } => match v {
                VertexId::TreeNode(w) => {
                    if w.is_empty() {
                        for c in 0..degree - 1 {
                            out.push(VertexId::TreeNode(vec![c]));
                        }
                        out.push(VertexId::Plain(vec![1]));
                    } else {
                        out.push(VertexId::TreeNode(w[..w.len() - 1].to_vec()));
                        push_children(w, degree - 1, out, VertexId::TreeNode);
                    }
                }
                VertexId::Plain(c) => {
                    let k = c[0];
                    out.push(if k == 1 {
                        VertexId::root()
                    } else {
                        VertexId::Plain(vec![k - 1])
                    });
                    out.push(VertexId::Plain(vec![k + 1]));
                }
                _ => {}
            },
            GraphSpec::LatticeJoinTree { tree_degree, .. } => match v {
                VertexId::Plain(c) => {
                    if c.iter().all(|&x| x == 0) {
                        out.push(VertexId::root());
                    }
                    push_lattice(c, out, VertexId::Plain);
                }
                VertexId::TreeNode(w) => {
                    if w.is_empty() {
                        out.push(VertexId::Plain(vec![0; self.join_dim()]));
                    }
                    push_tree(w, *tree_degree, out, |w| VertexId::TreeNode(w[..w.len() - 1].to_vec()), |w| {
                        VertexId::TreeNode(w)
                    });
                }
                _ => {}
            },
        }
    }

    fn join_dim(&self) -> usize {
        match self {
            GraphSpec::LatticeJoinTree { lattice_dim, .. } => *lattice_dim as usize,
            _ => 0,
        }
    }

    /// Checks that `v` addresses a vertex of this graph.
    pub fn check_vertex(&self, v: &VertexId) -> Result<(), GraphError> {
        let bad = |why: &str| Err(GraphError::InvalidVertex(format!("{v} is not a vertex of {self}: {why}")));
        match (self, v) {
            (GraphSpec::Product(base), VertexId::ProductVertex { base: bv, .. }) => {
                base.check_vertex(bv)
            }
            (GraphSpec::Product(_), _) => bad("product graphs need product vertices"),
            (_, VertexId::ProductVertex { .. }) => bad("not a product graph"),
            (GraphSpec::Lattice { dim }, VertexId::Plain(c)) => {
                if c.len() == *dim as usize {
                    Ok(())
                } else {
                    bad("wrong coordinate count")
                }
            }
            (GraphSpec::RegularTree { degree }, VertexId::TreeNode(w)) => check_word(w, *degree, *degree)
                .or_else(|e| bad(&e)),
            (GraphSpec::TreePlusRay { degree }, VertexId::TreeNode(w)) => {
                check_word(w, degree - 1, degree - 1).or_else(|e| bad(&e))
            }
            (GraphSpec::TreePlusRay { .. }, VertexId::Plain(c)) => {
                if c.len() == 1 && c[0] >= 1 {
                    Ok(())
                } else {
                    bad("ray vertices are p(k) with k >= 1")
                }
            }
            (GraphSpec::LatticeJoinTree { tree_degree, .. }, VertexId::TreeNode(w)) => {
                check_word(w, *tree_degree, *tree_degree).or_else(|e| bad(&e))
            }
            (GraphSpec::LatticeJoinTree { lattice_dim, .. }, VertexId::Plain(c)) => {
                if c.len() == *lattice_dim as usize {
                    Ok(())
                } else {
                    bad("wrong coordinate count")
                }
            }
            (
                GraphSpec::TreeWithLatticeInsertions { d, .. } | GraphSpec::StretchedTree { d, .. },
                VertexId::TreeNode(w),
            ) => check_word(w, 4 * d, 4 * d).or_else(|e| bad(&e)),
            (GraphSpec::TreeWithLatticeInsertions { d, n0 }, VertexId::LatticePoint { owner, coords }) => {
                check_word(owner, 4 * d, 4 * d).or_else(|e| bad(&e))?;
                if insertion_index(*d, *n0, owner.len() as u64).is_none() {
                    return bad("owner level is not an insertion level l_n with n >= n0");
                }
                if coords.len() != *d as usize {
                    return bad("wrong coordinate count");
                }
                Ok(())
            }
            (GraphSpec::StretchedTree { d, n0 }, VertexId::Stretch { owner, slot }) => {
                check_word(owner, 4 * d, 4 * d).or_else(|e| bad(&e))?;
                if insertion_index(*d, *n0, owner.len() as u64).is_none() {
                    return bad("owner level is not a stretched level");
                }
                if *slot != 1 && *slot != 2 {
                    return bad("slot must be 1 or 2");
                }
                Ok(())
            }
            _ => bad("variant not used by this graph family"),
        }
    }
}

fn check_word(w: &[u32], root_children: u32, children: u32) -> Result<(), String> {
    for (i, &c) in w.iter().enumerate() {
        let limit = if i == 0 { root_children } else { children };
        if c >= limit {
            return Err(format!("child index {c} at depth {} exceeds {limit}", i + 1));
        }
    }
    Ok(())
}

fn push_lattice(c: &[i64], out: &mut Vec<VertexId>, make: impl Fn(Vec<i64>) -> VertexId) {
    for i in 0..c.len() {
        for delta in [-1, 1] {
            let mut n = c.to_vec();
            n[i] += delta;
            out.push(make(n));
        }
    }
}

fn push_children(w: &[u32], count: u32, out: &mut Vec<VertexId>, make: impl Fn(Vec<u32>) -> VertexId) {
    for c in 0..count {
        let mut child = Vec::with_capacity(w.len() + 1);
        child.extend_from_slice(w);
        child.push(c);
        out.push(make(child));
    }
}

/// Parent (unless root) then children of a rooted regular tree vertex.
fn push_tree(
    w: &[u32],
    degree: u32,
    out: &mut Vec<VertexId>,
    up: impl Fn(&[u32]) -> VertexId,
    down: impl Fn(Vec<u32>) -> VertexId,
) {
    if w.is_empty() {
        push_children(w, degree, out, down);
    } else {
        out.push(up(w));
        push_children(w, degree - 1, out, down);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn set(vs: Vec<VertexId>) -> HashSet<VertexId> {
        vs.into_iter().collect()
    }

    #[test]
    fn square_lattice_origin() {
        let spec = GraphSpec::Lattice { dim: 2 };
        let nb = spec.neighbors(&VertexId::Plain(vec![0, 0])).unwrap();
        assert_eq!(nb.len(), 4);
        let expect = set(vec![
            VertexId::Plain(vec![1, 0]),
            VertexId::Plain(vec![-1, 0]),
            VertexId::Plain(vec![0, 1]),
            VertexId::Plain(vec![0, -1]),
        ]);
        assert_eq!(set(nb), expect);
    }

    #[test]
    fn insertion_root_with_n0_one() {
        let spec = GraphSpec::TreeWithLatticeInsertions { d: 2, n0: 1 };
        let nb = spec.neighbors(&VertexId::root()).unwrap();
        assert_eq!(nb.len(), 8);
        for (i, u) in nb.iter().enumerate() {
            assert_eq!(
                *u,
                VertexId::LatticePoint {
                    owner: vec![i as u32],
                    coords: vec![0, 0]
                }
            );
        }
    }

    #[test]
    fn insertion_attachment_points() {
        let spec = GraphSpec::TreeWithLatticeInsertions { d: 2, n0: 1 };
        // level 1 = l_1 so the child [3] hangs off (1,1) of its copy
        let y = VertexId::TreeNode(vec![3]);
        let nb = spec.neighbors(&y).unwrap();
        assert_eq!(nb.len(), 8);
        assert_eq!(
            nb[0],
            VertexId::LatticePoint {
                owner: vec![3],
                coords: vec![1, 1]
            }
        );
        let top = VertexId::LatticePoint {
            owner: vec![3],
            coords: vec![1, 1],
        };
        let nb = spec.neighbors(&top).unwrap();
        assert_eq!(nb.len(), 5);
        assert!(nb.contains(&y));
        let bottom = VertexId::LatticePoint {
            owner: vec![3],
            coords: vec![0, 0],
        };
        assert!(spec.neighbors(&bottom).unwrap().contains(&VertexId::root()));
        // l_2 = 4: level-3 vertices attach to copies with n = 2
        let x = VertexId::TreeNode(vec![0, 0, 0]);
        let nb = spec.neighbors(&x).unwrap();
        assert!(matches!(&nb[1], VertexId::LatticePoint { coords, .. } if coords == &vec![0, 0]));
        let deep = VertexId::TreeNode(vec![0, 0, 0, 5]);
        assert_eq!(
            spec.neighbors(&deep).unwrap()[0],
            VertexId::LatticePoint {
                owner: vec![0, 0, 0, 5],
                coords: vec![2, 2]
            }
        );
    }

    #[test]
    fn n0_leaves_early_edges_alone() {
        let spec = GraphSpec::TreeWithLatticeInsertions { d: 2, n0: 2 };
        let nb = spec.neighbors(&VertexId::root()).unwrap();
        assert!(nb.iter().all(|u| matches!(u, VertexId::TreeNode(_))));
    }

    #[test]
    fn product_of_line_is_square_lattice() {
        let spec = GraphSpec::product(GraphSpec::Lattice { dim: 1 });
        let v = VertexId::product(VertexId::Plain(vec![0]), 0);
        let nb = spec.neighbors(&v).unwrap();
        assert_eq!(nb.len(), 4);
    }

    #[test]
    fn stretched_edges_are_paths_of_three() {
        let spec = GraphSpec::StretchedTree { d: 1, n0: 1 };
        let nb = spec.neighbors(&VertexId::root()).unwrap();
        assert_eq!(nb.len(), 4);
        let s1 = nb[0].clone();
        let next = spec.neighbors(&s1).unwrap();
        assert_eq!(next, vec![VertexId::root(), VertexId::Stretch { owner: vec![0], slot: 2 }]);
        let s2 = next[1].clone();
        assert_eq!(
            spec.neighbors(&s2).unwrap(),
            vec![s1, VertexId::TreeNode(vec![0])]
        );
    }

    #[test]
    fn ray_and_join() {
        let spec = GraphSpec::TreePlusRay { degree: 3 };
        let nb = spec.neighbors(&VertexId::root()).unwrap();
        assert_eq!(nb.len(), 3);
        assert!(nb.contains(&VertexId::Plain(vec![1])));
        assert_eq!(spec.neighbors(&VertexId::Plain(vec![4])).unwrap().len(), 2);
        assert!(spec.check_vertex(&VertexId::Plain(vec![0])).is_err());

        let spec = GraphSpec::LatticeJoinTree {
            lattice_dim: 3,
            tree_degree: 4,
        };
        assert_eq!(spec.neighbors(&VertexId::root()).unwrap().len(), 5);
        assert_eq!(spec.neighbors(&VertexId::Plain(vec![0, 0, 0])).unwrap().len(), 7);
        assert_eq!(spec.neighbors(&VertexId::Plain(vec![1, 0, 0])).unwrap().len(), 6);
    }

    #[test]
    fn non_root_tree_vertices_see_their_parent() {
        for spec in [
            GraphSpec::RegularTree { degree: 3 },
            GraphSpec::LatticeJoinTree {
                lattice_dim: 2,
                tree_degree: 3,
            },
        ] {
            let nb = spec.neighbors(&VertexId::TreeNode(vec![1, 0])).unwrap();
            assert!(nb.contains(&VertexId::TreeNode(vec![1])), "{spec}");
            assert!(!nb.contains(&VertexId::TreeNode(vec![1, 0])), "{spec}");
            assert_eq!(nb.len(), 3);
        }
    }

    #[test]
    fn invalid_vertices_are_rejected() {
        let spec = GraphSpec::TreeWithLatticeInsertions { d: 2, n0: 1 };
        assert!(spec.neighbors(&VertexId::Plain(vec![0, 0])).is_err());
        assert!(spec.neighbors(&VertexId::TreeNode(vec![8])).is_err());
        assert!(spec.neighbors(&VertexId::TreeNode(vec![0, 7])).is_ok());
        assert!(spec.neighbors(&VertexId::TreeNode(vec![0, 8])).is_err());
        let wrong_level = VertexId::LatticePoint {
            owner: vec![0, 0],
            coords: vec![0, 0],
        };
        assert!(spec.neighbors(&wrong_level).is_err());
        let prod = GraphSpec::product(GraphSpec::Lattice { dim: 2 });
        assert!(prod.neighbors(&VertexId::Plain(vec![0, 0])).is_err());
    }
}
