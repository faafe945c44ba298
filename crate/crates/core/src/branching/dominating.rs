//! Branching random walk on the 4d-regular tree that sends a particle to each
//! neighbour with probability q and keeps one in place with probability
//! `stay`. Only distances to the start matter, so particles are tracked as
//! counts per distance.

use rayon::prelude::*;
use serde::Serialize;

use super::{binomial, BranchingError};
use crate::rng::{stream, tag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominatingRun {
    /// Particles at the start summed over generations 1..=maxT.
    pub returns: u64,
    pub final_population: u64,
    pub aborted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominatingMean {
    pub mean_returns: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub aborted: u64,
}

fn check(d: u32, q: f64, stay: f64) -> Result<(), BranchingError> {
    if d < 1 || !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&stay) {
        return Err(BranchingError::InvalidParameter(format!("d={d} q={q} stay={stay}")));
    }
    Ok(())
}

pub fn simulate_dominating(
    d: u32,
    q: f64,
    stay: f64,
    max_t: u32,
    population_cap: u64,
    seed: u64,
    replica: u64,
) -> Result<DominatingRun, BranchingError> {
    check(d, q, stay)?;
    let k = 4 * d as u64;
    let mut rng = stream(&[seed, tag::WALK, replica]);
    let mut counts = vec![1u64];
    let mut returns = 0u64;
    for t in 1..=max_t {
        // particles farther than the remaining steps can never come back
        let horizon = (max_t - t) as usize;
        let mut next = vec![0u64; (counts.len() + 1).min(horizon + 1)];
        for (h, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let s = binomial(&mut rng, c, stay);
            let inward = if h > 0 { binomial(&mut rng, c, q) } else { 0 };
            let fan = if h == 0 { k } else { k - 1 };
            let outward = binomial(&mut rng, c.saturating_mul(fan), q);
            if h <= horizon {
                next[h] += s;
            }
            if h > 0 && h - 1 <= horizon {
                next[h - 1] += inward;
            }
            if h < horizon {
                next[h + 1] += outward;
            }
        }
        counts = next;
        while counts.len() > 1 && counts.last() == Some(&0) {
            counts.pop();
        }
        returns += counts[0];
        let total: u64 = counts.iter().sum();
        if total > population_cap {
            return Ok(DominatingRun {
                returns,
                final_population: total,
                aborted: true,
            });
        }
        if total == 0 {
            break;
        }
    }
    Ok(DominatingRun {
        returns,
        final_population: counts.iter().sum(),
        aborted: false,
    })
}

/// Mean returns over `replicas` independent runs.
pub fn dominating_mean_returns(
    d: u32,
    q: f64,
    stay: f64,
    max_t: u32,
    population_cap: u64,
    replicas: u64,
    seed: u64,
) -> Result<DominatingMean, BranchingError> {
    check(d, q, stay)?;
    let runs: Vec<DominatingRun> = (0..replicas)
        .into_par_iter()
        .map(|r| simulate_dominating(d, q, stay, max_t, population_cap, seed, r).expect("checked"))
        .collect();
    let n = replicas.max(1) as f64;
    let mean = runs.iter().map(|r| r.returns as f64).sum::<f64>() / n;
    let var = runs.iter().map(|r| (r.returns as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok(DominatingMean {
        mean_returns: mean,
        stderr: (var / n).sqrt(),
        replicas,
        aborted: runs.iter().filter(|r| r.aborted).count() as u64,
    })
}

/// Exact expected returns, partial sums over t = 1..=maxT, from the linear
/// recursion of expected counts per distance.
pub fn dominating_expected_returns(d: u32, q: f64, stay: f64, max_t: u32) -> Result<Vec<f64>, BranchingError> {
    check(d, q, stay)?;
    let k = 4.0 * d as f64;
    let mut e = vec![0.0; max_t as usize + 2];
    e[0] = 1.0;
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(max_t as usize);
    for _ in 0..max_t {
        let mut next = vec![0.0; e.len()];
        for h in 0..e.len() - 1 {
            next[h] += stay * e[h];
            if h > 0 {
                next[h - 1] += q * e[h];
            }
            next[h + 1] += q * e[h] * if h == 0 { k } else { k - 1.0 };
        }
        e = next;
        acc += e[0];
        out.push(acc);
    }
    Ok(out)
}
