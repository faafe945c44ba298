use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Serialize, Serializer};

use super::AnalyticsError;
use crate::graphs::{ball, insertion_index, GraphSpec, VertexId, DEFAULT_POPULATION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthMethod {
    /// Level-by-level count exploiting the symmetry of the tree families.
    SymmetricCount,
    Bfs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProfile {
    pub spec: GraphSpec,
    /// |B(r)| for r = 0..volumes.len(); shorter than r_max + 1 when truncated.
    #[serde(serialize_with = "decimal")]
    pub volumes: Vec<BigUint>,
    /// g(r) = ln |B(r)|.
    pub log_volume: Vec<f64>,
    pub truncated: bool,
    pub method: GrowthMethod,
}

fn decimal<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_str_radix(10)))
}

impl GrowthProfile {
    /// (r, g(r) / r) for r >= 1.
    pub fn per_radius(&self) -> Vec<(u32, f64)> {
        self.log_volume.iter().enumerate().skip(1).map(|(r, g)| (r as u32, g / r as f64)).collect()
    }

    /// (r, g(r) / (sqrt(r) ln r)) for r >= 2.
    pub fn normalized(&self) -> Vec<(u32, f64)> {
        self.log_volume
            .iter()
            .enumerate()
            .skip(2)
            .map(|(r, g)| {
                let rf = r as f64;
                (r as u32, g / (rf.sqrt() * rf.ln()))
            })
            .collect()
    }

    /// CSV `r,value` with the exact volumes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.volumes.iter().enumerate() {
            out.push_str(&format!("{r},{v}\n"));
        }
        out
    }
}

pub fn profile_csv(rows: &[(u32, f64)]) -> String {
    let mut out = String::from("r,value\n");
    for (r, v) in rows {
        out.push_str(&format!("{r},{v}\n"));
    }
    out
}

/// Ball volumes around the origin for r = 0..=r_max.
pub fn volume_growth_profile(spec: &GraphSpec, r_max: u32) -> Result<GrowthProfile, AnalyticsError> {
    volume_growth_profile_capped(spec, r_max, DEFAULT_POPULATION_CAP)
}

pub fn volume_growth_profile_capped(
    spec: &GraphSpec,
    r_max: u32,
    cap: usize,
) -> Result<GrowthProfile, AnalyticsError> {
    spec.validate()?;
    let (volumes, truncated, method) = match spec {
        GraphSpec::RegularTree { degree } => {
            let counts = tree_level_counts(*degree);
            let v = (0..=r_max).map(|r| (0..=r as u64).map(&counts).sum()).collect();
            (v, false, GrowthMethod::SymmetricCount)
        }
        GraphSpec::TreeWithLatticeInsertions { d, n0 } => {
            let v = (0..=r_max).map(|r| inserted_tree_volume(*d, *n0, r)).collect();
            (v, false, GrowthMethod::SymmetricCount)
        }
        _ => {
            let (v, t) = bfs_volumes(spec, r_max, cap);
            (v, t, GrowthMethod::Bfs)
        }
    };
    let log_volume = volumes.iter().map(ln_big).collect();
    Ok(GrowthProfile {
        spec: spec.clone(),
        volumes,
        log_volume,
        truncated,
        method,
    })
}

fn ln_big(x: &BigUint) -> f64 {
    match x.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => {
            let shift = x.bits().saturating_sub(60);
            ln_big(&(x >> shift)) + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// Number of vertices at depth L of a rooted tree whose root has `degree`
/// children and every other vertex `degree - 1`.
fn tree_level_counts(degree: u32) -> impl Fn(u64) -> BigUint {
    move |level| {
        if level == 0 {
            BigUint::one()
        } else {
            BigUint::from(degree) * BigUint::from(degree - 1).pow((level - 1) as u32)
        }
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// |{p in Z^d : |p|_1 <= m}| = sum_k 2^k C(d,k) C(m,k).
fn l1_ball(d: u32, m: u64) -> BigUint {
    (0..=(d as u64).min(m))
        .map(|k| (BigUint::one() << k) * binomial(d as u64, k) * binomial(m, k))
        .sum()
}

/// Every path from the root to a tree vertex at an inserted level l_n runs
/// through the copy below it, entering at (0..0) and leaving at (n..n): the
/// level costs d n + 2 instead of 1. A copy point p sits at
/// dist(l_n - 1) + 1 + |p|_1, leaving through (n..n) never being shorter.
fn inserted_tree_volume(d: u32, n0: u32, r: u32) -> BigUint {
    let counts = tree_level_counts(4 * d);
    let r = r as u64;
    let mut total = BigUint::one();
    let mut dist_prev = 0u64;
    let mut level = 1u64;
    while dist_prev < r {
        match insertion_index(d, n0, level) {
            Some(n) => {
                let entry = dist_prev + 1;
                total += counts(level) * l1_ball(d, r - entry);
                dist_prev += d as u64 * n + 2;
            }
            None => dist_prev += 1,
        }
        if dist_prev <= r {
            total += counts(level);
        }
        level += 1;
    }
    total
}

/// Layered BFS; stops at the last complete radius once `cap` is exceeded.
fn bfs_volumes(spec: &GraphSpec, r_max: u32, cap: usize) -> (Vec<BigUint>, bool) {
    let origin = spec.origin();
    let mut seen: HashSet<VertexId> = HashSet::from([origin.clone()]);
    let mut frontier = vec![origin];
    let mut volumes = vec![BigUint::one()];
    let mut nb = Vec::new();
    for _ in 0..r_max {
        let mut next = Vec::new();
        for v in &frontier {
            nb.clear();
            spec.push_neighbors(v, &mut nb);
            for u in nb.drain(..) {
                if seen.insert(u.clone()) {
                    next.push(u);
                }
            }
            if seen.len() > cap {
                return (volumes, true);
            }
        }
        volumes.push(BigUint::from(seen.len()));
        frontier = next;
    }
    (volumes, false)
}

/// |edge boundary of B(r)| / |B(r)| for each radius: a Folner-style upper
/// witness for the Cheeger constant, not the infimum itself.
pub fn cheeger_profile(spec: &GraphSpec, radii: &[u32]) -> Result<Vec<(u32, f64)>, AnalyticsError> {
    let origin = spec.origin();
    radii
        .iter()
        .map(|&r| {
            let b = ball(spec, &origin, r)?;
            let boundary: u64 = (0..b.vertex_count()).map(|i| b.outside_degree(i) as u64).sum();
            Ok((r, boundary as f64 / b.vertex_count() as f64))
        })
        .collect()
}
