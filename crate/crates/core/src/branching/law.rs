use rayon::prelude::*;
use serde::Serialize;

use super::{binomial, BranchingError};
use crate::rng::{stream, tag};

/// Offspring law with finite support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteLaw {
    /// (value, probability) pairs with strictly increasing values.
    points: Vec<(u64, f64)>,
}

impl DiscreteLaw {
    pub fn new(mut points: Vec<(u64, f64)>) -> Result<DiscreteLaw, BranchingError> {
        points.retain(|&(_, q)| q > 0.0);
        points.sort_by_key(|&(v, _)| v);
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(BranchingError::InvalidParameter("repeated support point".into()));
        }
        let total: f64 = points.iter().map(|&(_, q)| q).sum();
        if points.iter().any(|&(_, q)| !(0.0..=1.0).contains(&q)) || (total - 1.0).abs() > 1e-12 {
            return Err(BranchingError::InvalidParameter(format!("probabilities sum to {total}")));
        }
        Ok(DiscreteLaw { points })
    }

    pub fn point_mass(v: u64) -> DiscreteLaw {
        DiscreteLaw { points: vec![(v, 1.0)] }
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().map(|&(v, q)| v as f64 * q).sum()
    }

    /// P(X >= v).
    pub fn survival(&self, v: u64) -> f64 {
        self.points.iter().filter(|&&(x, _)| x >= v).map(|&(_, q)| q).sum()
    }

    /// Generating function E[s^X].
    pub fn pgf(&self, s: f64) -> f64 {
        self.points.iter().map(|&(v, q)| q * s.powi(v as i32)).sum()
    }

    /// Smallest fixed point of the generating function on [0, 1], by iteration from 0.
    pub fn extinction_probability(&self) -> f64 {
        let mut q = 0.0;
        for _ in 0..100_000 {
            let next = self.pgf(q);
            if (next - q).abs() < 1e-15 {
                return next;
            }
            q = next;
        }
        q
    }

    /// Total offspring of `n` independent individuals.
    pub fn sample_sum(&self, rng: &mut impl rand::Rng, n: u64) -> u64 {
        let mut left = n;
        let mut mass = 1.0;
        let mut total = 0u64;
        for &(v, q) in &self.points {
            if left == 0 {
                break;
            }
            let k = binomial(rng, left, (q / mass).min(1.0));
            total = total.saturating_add(k.saturating_mul(v));
            left -= k;
            mass -= q;
        }
        total
    }
}

/// Two-point law: 0 with probability 1 - c/2, ceil(4/c) with probability c/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffspringLawU {
    pub c: f64,
}

impl OffspringLawU {
    pub fn new(c: f64) -> Result<OffspringLawU, BranchingError> {
        if c > 0.0 && c <= 1.0 {
            Ok(OffspringLawU { c })
        } else {
            Err(BranchingError::InvalidParameter(format!("c = {c} is outside (0, 1]")))
        }
    }

    pub fn big(&self) -> u64 {
        (4.0 / self.c).ceil() as u64
    }

    /// (c/2) ceil(4/c), at least 2.
    pub fn mean(&self) -> f64 {
        self.c / 2.0 * self.big() as f64
    }

    pub fn law(&self) -> DiscreteLaw {
        DiscreteLaw::new(vec![(0, 1.0 - self.c / 2.0), (self.big(), self.c / 2.0)]).expect("valid two-point law")
    }
}

impl From<OffspringLawU> for DiscreteLaw {
    fn from(u: OffspringLawU) -> DiscreteLaw {
        u.law()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceResult {
    pub dominates: bool,
    /// min over support points v of law B of S_A(v) - S_B(v) + epsilon.
    pub margin: f64,
    pub epsilon: f64,
}

/// One-sided check that the empirical law of `samples` dominates `law`, up to
/// the band epsilon = sqrt(ln(1/(1-confidence)) / (2m)).
pub fn dominance_test(samples: &[u64], law: &DiscreteLaw, confidence: f64) -> Result<DominanceResult, BranchingError> {
    if samples.is_empty() {
        return Err(BranchingError::InvalidParameter("no samples".into()));
    }
    if !(0.0..1.0).contains(&confidence) {
        return Err(BranchingError::InvalidParameter(format!("confidence {confidence}")));
    }
    let m = samples.len() as f64;
    let epsilon = ((1.0 / (1.0 - confidence)).ln() / (2.0 * m)).sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let margin = law
        .points()
        .iter()
        .map(|&(v, _)| {
            let below = sorted.partition_point(|&x| x < v);
            let s_a = (sorted.len() - below) as f64 / m;
            s_a - law.survival(v) + epsilon
        })
        .fold(f64::INFINITY, f64::min);
    Ok(DominanceResult {
        dominates: margin >= 0.0,
        margin,
        epsilon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub replicas: u64,
    pub generations: u32,
    /// Replicas stopped at the population cap; they are counted as surviving.
    pub aborted: u64,
}

/// Fraction of Galton-Watson processes alive after `generations` steps.
pub fn survival_probability(
    law: &DiscreteLaw,
    generations: u32,
    replicas: u64,
    population_cap: u64,
    seed: u64,
) -> Result<SurvivalEstimate, BranchingError> {
    if generations < 1 {
        return Err(BranchingError::InvalidParameter("at least one generation".into()));
    }
    let outcomes: Vec<(bool, bool)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream(&[seed, tag::GALTON_WATSON, r]);
            let mut z = 1u64;
            for _ in 0..generations {
                z = law.sample_sum(&mut rng, z);
                if z == 0 {
                    return (false, false);
                }
                if z > population_cap {
                    return (true, true);
                }
            }
            (true, false)
        })
        .collect();
    let alive = outcomes.iter().filter(|o| o.0).count() as u64;
    let aborted = outcomes.iter().filter(|o| o.1).count() as u64;
    let e = crate::percolation::Estimate::from_hits(alive, replicas, 0);
    Ok(SurvivalEstimate {
        estimate: e.estimate,
        stderr: e.stderr,
        replicas,
        generations,
        aborted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_u_shape() {
        let u = OffspringLawU::new(0.5).unwrap();
        assert_eq!(u.big(), 8);
        assert_eq!(u.law().points(), &[(0, 0.75), (8, 0.25)]);
        for k in 1..=1000 {
            let c = k as f64 / 1000.0;
            assert!(OffspringLawU::new(c).unwrap().mean() >= 2.0 - 1e-12, "c = {c}");
        }
        assert!(OffspringLawU::new(0.0).is_err());
        assert!(OffspringLawU::new(1.5).is_err());
    }

    #[test]
    fn extinction_fixed_point() {
        let q = OffspringLawU::new(1.0).unwrap().law().extinction_probability();
        assert!((q - (0.5 + q.powi(4) / 2.0)).abs() < 1e-12);
        assert!((q - 0.5437).abs() < 1e-4);
    }

    #[test]
    fn self_domination() {
        let law = OffspringLawU::new(0.5).unwrap().law();
        let mut rng = stream(&[1]);
        let samples: Vec<u64> = (0..10_000).map(|_| law.sample_sum(&mut rng, 1)).collect();
        assert!(dominance_test(&samples, &law, 0.99).unwrap().dominates);
        let zeros = vec![0u64; 10_000];
        assert!(!dominance_test(&zeros, &law, 0.99).unwrap().dominates);
        let shifted: Vec<u64> = samples.iter().map(|x| x + 1).collect();
        let res = dominance_test(&shifted, &law, 0.99).unwrap();
        assert!(res.dominates && res.margin > 0.0);
    }

    #[test]
    fn degenerate_survival() {
        let dead = survival_probability(&DiscreteLaw::point_mass(0), 5, 100, 1000, 1).unwrap();
        assert_eq!(dead.estimate, 0.0);
        let two = survival_probability(&DiscreteLaw::point_mass(2), 5, 100, 1000, 1).unwrap();
        assert_eq!(two.estimate, 1.0);
        assert_eq!(two.aborted, 0);
    }

    #[test]
    fn sample_sum_mean() {
        let law = DiscreteLaw::new(vec![(0, 0.2), (1, 0.3), (5, 0.5)]).unwrap();
        let mut rng = stream(&[2]);
        let n = 200_000;
        let total = law.sample_sum(&mut rng, n) as f64;
        let var_one = 0.3 + 0.5 * 25.0 - law.mean().powi(2);
        assert!((total / n as f64 - law.mean()).abs() < 4.0 * (var_one / n as f64).sqrt());
    }
}
