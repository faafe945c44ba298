use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_probability, clusters, sample_bonds, PercolationError};
use crate::graphs::{ball_around, GraphSpec, VertexId, DEFAULT_POPULATION_CAP};

/// Monte Carlo frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub window_radius: u32,
}

impl Estimate {
    pub fn from_hits(hits: u64, replicas: u64, window_radius: u32) -> Estimate {
        let phat = if replicas == 0 { 0.0 } else { hits as f64 / replicas as f64 };
        let stderr = if replicas == 0 {
            0.0
        } else {
            (phat * (1.0 - phat) / replicas as f64).sqrt()
        };
        Estimate {
            estimate: phat,
            stderr,
            replicas,
            window_radius,
        }
    }
}

/// Frequency of `x <-> y` inside the window of radius `window_radius` around
/// both endpoints. The window is symmetric in `x` and `y`, so swapping them
/// yields the identical estimate. Truncation makes this a lower bound on the
/// infinite-volume probability.
pub fn two_point_estimate(
    spec: &GraphSpec,
    x: &VertexId,
    y: &VertexId,
    p: f64,
    window_radius: u32,
    replicas: u64,
    seed: u64,
) -> Result<Estimate, PercolationError> {
    check_probability(p)?;
    let window = ball_around(spec, &[x.clone(), y.clone()], window_radius, DEFAULT_POPULATION_CAP)?;
    let i = window.index_of(x)?;
    let j = window.index_of(y)?;
    if i == j {
        return Ok(Estimate::from_hits(replicas, replicas, window_radius));
    }
    // y must be within distance window_radius of x, measured inside the window.
    let mut dist = vec![u32::MAX; window.vertex_count()];
    let mut queue = std::collections::VecDeque::from([i]);
    dist[i] = 0;
    while let Some(v) = queue.pop_front() {
        if dist[v] == window_radius {
            continue;
        }
        for &(u, _) in window.adjacent(v) {
            if dist[u as usize] == u32::MAX {
                dist[u as usize] = dist[v] + 1;
                queue.push_back(u as usize);
            }
        }
    }
    if dist[j] == u32::MAX {
        return Err(PercolationError::OutsideWindow(format!(
            "{y} (radius {window_radius} around {x})"
        )));
    }
    let hits: u64 = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let s = sample_bonds(&window, p, seed, r).expect("probability checked");
            let c = clusters(&s);
            u64::from(c.root(i) == c.root(j))
        })
        .sum();
    Ok(Estimate::from_hits(hits, replicas, window_radius))
}

/// CSV with header `p,estimate,stderr`.
pub fn sweep_csv(rows: &[(f64, Estimate)]) -> String {
    let mut out = String::from("p,estimate,stderr\n");
    for (p, e) in rows {
        out.push_str(&format!("{p},{},{}\n", e.estimate, e.stderr));
    }
    out
}
