use std::collections::{HashMap, HashSet, VecDeque};

use perclab_core::graphs::{ball, FiniteTruncation};
use perclab_core::percolation::{clusters, sample_bonds, EdgeWeights};
use perclab_core::rng;
use perclab_core::{GraphSpec, VertexId};
use proptest::prelude::*;
use rand::Rng;

fn specs() -> Vec<GraphSpec> {
    vec![
        GraphSpec::RegularTree { degree: 3 },
        GraphSpec::Lattice { dim: 2 },
        GraphSpec::Lattice { dim: 3 },
        GraphSpec::TreeWithLatticeInsertions { d: 1, n0: 1 },
        GraphSpec::TreeWithLatticeInsertions { d: 2, n0: 1 },
        GraphSpec::StretchedTree { d: 2, n0: 1 },
        GraphSpec::TreePlusRay { degree: 3 },
        GraphSpec::LatticeJoinTree { lattice_dim: 3, tree_degree: 4 },
        GraphSpec::product(GraphSpec::TreeWithLatticeInsertions { d: 1, n0: 1 }),
        GraphSpec::product(GraphSpec::RegularTree { degree: 3 }),
    ]
}

fn spec_strategy() -> impl Strategy<Value = GraphSpec> {
    prop::sample::select(specs())
}

/// Endpoint of a seeded random walk of `steps` steps from the origin.
fn walk(spec: &GraphSpec, steps: usize, seed: u64) -> VertexId {
    let mut rng = rng::stream(&[seed, 99]);
    let mut v = spec.origin();
    for _ in 0..steps {
        let nb = spec.neighbors(&v).unwrap();
        v = nb[rng.random_range(0..nb.len())].clone();
    }
    v
}

fn arb_word() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..1000, 0..6)
}

fn arb_coords() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(any::<i64>(), 0..5)
}

fn arb_vertex() -> impl Strategy<Value = VertexId> {
    let leaf = prop_oneof![
        arb_word().prop_map(VertexId::TreeNode),
        (arb_word(), arb_coords()).prop_map(|(owner, coords)| VertexId::LatticePoint { owner, coords }),
        arb_coords().prop_map(VertexId::Plain),
        (arb_word(), 1u8..=2).prop_map(|(owner, slot)| VertexId::Stretch { owner, slot }),
    ];
    // products of products are not vertices of any spec and are refused by the decoder
    prop_oneof![
        leaf.clone(),
        (leaf, any::<i64>()).prop_map(|(b, z)| VertexId::product(b, z)),
    ]
}

/// Components of the open subgraph by breadth-first search.
fn bfs_components(t: &FiniteTruncation, open: impl Fn(usize) -> bool) -> Vec<usize> {
    let n = t.vertex_count();
    let mut label = vec![usize::MAX; n];
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(i) = q.pop_front() {
            for &(j, e) in t.adjacent(i) {
                let j = j as usize;
                if open(e as usize) && label[j] == usize::MAX {
                    label[j] = s;
                    q.push_back(j);
                }
            }
        }
    }
    label
}

/// Two labelings describe the same partition.
fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    a.iter().zip(b).all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn encoding_round_trips(v in arb_vertex()) {
        prop_assert_eq!(VertexId::decode_raw(&v.encode()).unwrap(), v);
    }

    #[test]
    fn encoding_is_injective(a in arb_vertex(), b in arb_vertex()) {
        prop_assert_eq!(a == b, a.encode() == b.encode());
    }

    #[test]
    fn adjacency_is_symmetric(spec in spec_strategy(), steps in 0usize..40, seed in any::<u64>()) {
        let v = walk(&spec, steps, seed);
        let nb = spec.neighbors(&v).unwrap();
        let distinct: HashSet<_> = nb.iter().collect();
        prop_assert_eq!(distinct.len(), nb.len());
        prop_assert!(!nb.contains(&v));
        for u in &nb {
            prop_assert!(spec.neighbors(u).unwrap().contains(&v), "{} -> {} not symmetric", v, u);
        }
    }

    #[test]
    fn balls_are_nested(spec in spec_strategy(), r in 0u32..4, steps in 0usize..10, seed in any::<u64>()) {
        let c = walk(&spec, steps, seed);
        let inner = ball(&spec, &c, r).unwrap();
        let outer = ball(&spec, &c, r + 1).unwrap();
        for (i, v) in inner.vertices().iter().enumerate() {
            let j = outer.index_of(v).unwrap();
            prop_assert_eq!(inner.distance(i), outer.distance(j));
        }
        prop_assert!(outer.vertex_count() >= inner.vertex_count());
    }

    #[test]
    fn tree_ball_formula(k in 3u32..7, r in 0u32..5) {
        let spec = GraphSpec::RegularTree { degree: k };
        let b = ball(&spec, &spec.origin(), r).unwrap();
        // 1 + k + k(k-1) + ... + k(k-1)^{r-1}
        let expected = 1 + (0..r).map(|i| k as usize * (k as usize - 1).pow(i)).sum::<usize>();
        prop_assert_eq!(b.vertex_count(), expected);
    }

    #[test]
    fn product_distance_adds_fibre(r in 1u32..5, base_idx in 0usize..4) {
        let base = [
            GraphSpec::RegularTree { degree: 3 },
            GraphSpec::TreeWithLatticeInsertions { d: 1, n0: 1 },
            GraphSpec::StretchedTree { d: 1, n0: 1 },
            GraphSpec::Lattice { dim: 1 },
        ][base_idx].clone();
        let prod = GraphSpec::product(base.clone());
        let pb = ball(&prod, &prod.origin(), r).unwrap();
        let bb = ball(&base, &base.origin(), r).unwrap();
        for (i, v) in pb.vertices().iter().enumerate() {
            let (b, z) = v.split_product();
            let j = bb.index_of(b).unwrap();
            prop_assert_eq!(pb.distance(i), bb.distance(j) + z.unsigned_abs() as u32);
        }
    }

    #[test]
    fn union_find_matches_bfs(spec in spec_strategy(), r in 1u32..4, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let t = ball(&spec, &spec.origin(), r).unwrap();
        prop_assume!(t.vertex_count() <= 50);
        let s = sample_bonds(&t, p, seed, 0).unwrap();
        let lab = clusters(&s);
        let uf: Vec<usize> = (0..t.vertex_count()).map(|i| lab.root(i)).collect();
        let bfs = bfs_components(&t, |e| s.is_open(e));
        prop_assert!(same_partition(&uf, &bfs));
        prop_assert_eq!(lab.cluster_count(), bfs.iter().collect::<HashSet<_>>().len());
    }

    #[test]
    fn coupling_is_monotone(spec in spec_strategy(), p in 0.0f64..=1.0, q in 0.0f64..=1.0, seed in any::<u64>()) {
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let t = ball(&spec, &spec.origin(), 3).unwrap();
        let w = EdgeWeights::new(&t, seed, 1);
        let a = w.at(lo).unwrap();
        let b = w.at(hi).unwrap();
        for e in 0..t.edge_count() {
            prop_assert!(!a.is_open(e) || b.is_open(e));
        }
        prop_assert!(clusters(&a).cluster_count() >= clusters(&b).cluster_count());
    }

    #[test]
    fn sampling_is_deterministic(spec in spec_strategy(), p in 0.0f64..=1.0, seed in any::<u64>(), replica in 0u64..100) {
        let t = ball(&spec, &spec.origin(), 3).unwrap();
        let a = sample_bonds(&t, p, seed, replica).unwrap();
        let b = sample_bonds(&t, p, seed, replica).unwrap();
        prop_assert_eq!(a.open_edges(), b.open_edges());
    }
}

#[test]
fn encoding_injective_over_many_ids() {
    let mut rng = rng::stream(&[2024]);
    let mut ids = HashSet::new();
    let mut codes = HashSet::new();
    let rand_word = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<u32> {
        (0..rng.random_range(0..5)).map(|_| rng.random_range(0..12)).collect()
    };
    for _ in 0..100_000 {
        let v = match rng.random_range(0..5) {
            0 => VertexId::TreeNode(rand_word(&mut rng)),
            1 => VertexId::LatticePoint {
                owner: rand_word(&mut rng),
                coords: (0..rng.random_range(1..3)).map(|_| rng.random_range(-5..5)).collect(),
            },
            2 => VertexId::Plain((0..rng.random_range(1..4)).map(|_| rng.random_range(-9..9)).collect()),
            3 => VertexId::Stretch { owner: rand_word(&mut rng), slot: rng.random_range(1..3) },
            _ => VertexId::product(VertexId::TreeNode(rand_word(&mut rng)), rng.random_range(-50..50)),
        };
        codes.insert(v.encode());
        ids.insert(v);
    }
    assert_eq!(ids.len(), codes.len());
    assert!(ids.len() > 10_000);
}
