use std::collections::VecDeque;

use perclab_core::clusters::{find_bounded_cutset, verify_cutset, CutsetVerdict};
use perclab_core::graphs::{ball_around, DEFAULT_POPULATION_CAP};
use perclab_core::{GraphSpec, VertexId};

/// Smallest number of edges (window edges plus edges leaving the window)
/// whose removal disconnects every target vertex from the outside, by
/// exhaustive search over edge subsets in increasing size.
fn brute_force_min_cut(spec: &GraphSpec, target: &[VertexId], radius: u32) -> Option<usize> {
    let w = ball_around(spec, target, radius, DEFAULT_POPULATION_CAP).unwrap();
    let n = w.vertex_count();
    let sink = n;
    let mut edges: Vec<(usize, usize)> = w.edges().iter().map(|&(a, b)| (a as usize, b as usize)).collect();
    for i in 0..n {
        for _ in 0..w.outside_degree(i) {
            edges.push((i, sink));
        }
    }
    let m = edges.len();
    if m > 20 {
        return None;
    }
    let sources: Vec<usize> = target.iter().map(|v| w.index_of(v).unwrap()).collect();
    let escapes = |removed: u32| {
        let mut adj = vec![Vec::new(); n + 1];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if removed >> e & 1 == 0 {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n + 1];
        let mut q: VecDeque<usize> = sources.iter().copied().collect();
        for &s in &sources {
            seen[s] = true;
        }
        while let Some(i) = q.pop_front() {
            if i == sink {
                return true;
            }
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    q.push_back(j);
                }
            }
        }
        false
    };
    let mut best = m;
    for mask in 0u32..(1 << m) {
        let k = mask.count_ones() as usize;
        if k < best && !escapes(mask) {
            best = k;
        }
    }
    Some(best)
}

fn instances() -> Vec<(GraphSpec, Vec<VertexId>, u32)> {
    let specs = [
        GraphSpec::Lattice { dim: 1 },
        GraphSpec::Lattice { dim: 2 },
        GraphSpec::RegularTree { degree: 3 },
        GraphSpec::RegularTree { degree: 4 },
        GraphSpec::TreePlusRay { degree: 3 },
        GraphSpec::TreeWithLatticeInsertions { d: 1, n0: 1 },
        GraphSpec::StretchedTree { d: 1, n0: 1 },
        GraphSpec::LatticeJoinTree { lattice_dim: 1, tree_degree: 3 },
        GraphSpec::product(GraphSpec::Lattice { dim: 1 }),
    ];
    let mut out = Vec::new();
    for spec in specs {
        let o = spec.origin();
        let first = spec.neighbors(&o).unwrap()[0].clone();
        for r in 0..4 {
            out.push((spec.clone(), vec![o.clone()], r));
            out.push((spec.clone(), vec![first.clone()], r));
            out.push((spec.clone(), vec![o.clone(), first.clone()], r));
        }
    }
    out
}

#[test]
fn min_cut_equals_brute_force_on_small_instances() {
    let mut checked = 0;
    for (spec, target, r) in instances() {
        let Some(brute) = brute_force_min_cut(&spec, &target, r) else {
            continue;
        };
        let search = find_bounded_cutset(&spec, &target, 64, r).unwrap();
        assert_eq!(search.min_cut, brute, "{spec} target {target:?} radius {r}");
        checked += 1;
    }
    assert!(checked >= 40, "only {checked} instances under the edge limit");
}

#[test]
fn certificates_verify() {
    for (spec, target, r) in instances() {
        let search = find_bounded_cutset(&spec, &target, 6, r).unwrap();
        if let Some(cert) = search.certificate {
            assert_eq!(cert.cut_edges.len(), search.min_cut);
            let verdict = verify_cutset(&spec, &target, &cert.cut_edges, cert.verify_radius).unwrap();
            assert_eq!(verdict, CutsetVerdict::Confined, "{spec}");
        }
    }
}
