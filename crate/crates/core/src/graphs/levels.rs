//! The level sequence l_1 = 1, l_{n+1} = l_n + ceil(d^2 log(n+1)) that places
//! the lattice insertions.

use serde::{Deserialize, Serialize};

/// Base of the logarithm in the level recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

/// Gap l_{n+1} - l_n.
pub fn level_gap(d: u32, n: u64, base: LogBase) -> u64 {
    let d2 = (d as f64) * (d as f64);
    (d2 * base.log((n + 1) as f64)).ceil() as u64
}

/// Returns l_1, ..., l_{n_max} with the natural logarithm.
pub fn level_sequence(d: u32, n_max: usize) -> Vec<u64> {
    level_sequence_with(d, n_max, LogBase::Natural)
}

pub fn level_sequence_with(d: u32, n_max: usize, base: LogBase) -> Vec<u64> {
    let mut out = Vec::with_capacity(n_max);
    let mut l = 1u64;
    for n in 1..=n_max as u64 {
        out.push(l);
        l += level_gap(d, n, base);
    }
    out
}

/// Iterator over (n, l_n) pairs, n = 1, 2, ...
pub fn levels(d: u32) -> impl Iterator<Item = (u64, u64)> {
    let mut n = 0u64;
    let mut l = 1u64;
    std::iter::from_fn(move || {
        n += 1;
        let cur = (n, l);
        l += level_gap(d, n, LogBase::Natural);
        Some(cur)
    })
}

/// If `level` equals l_n for some n >= n0, returns that n.
pub fn insertion_index(d: u32, n0: u32, level: u64) -> Option<u64> {
    for (n, l) in levels(d) {
        if l > level {
            return None;
        }
        if l == level {
            return (n >= n0 as u64).then_some(n);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case() {
        assert_eq!(level_sequence(3, 1), vec![1]);
    }

    #[test]
    fn d3_first_four() {
        // ceil(9 ln 2) = 7, ceil(9 ln 3) = 10, ceil(9 ln 4) = 13
        assert_eq!(level_sequence(3, 4), vec![1, 8, 18, 31]);
    }

    #[test]
    fn d1_first_three() {
        assert_eq!(level_sequence(1, 3), vec![1, 2, 4]);
    }

    #[test]
    fn strictly_increasing_with_exact_gaps() {
        for d in 1..6 {
            let ls = level_sequence(d, 40);
            for (i, w) in ls.windows(2).enumerate() {
                let n = (i + 1) as f64;
                let expect = ((d * d) as f64 * (n + 1.0).ln()).ceil() as u64;
                assert_eq!(w[1] - w[0], expect);
            }
        }
    }

    #[test]
    fn other_bases() {
        // ceil(4 log2 2) = 4, ceil(4 log2 3) = 7
        assert_eq!(level_sequence_with(2, 3, LogBase::Two), vec![1, 5, 12]);
        assert_eq!(level_sequence_with(1, 2, LogBase::Ten), vec![1, 2]);
    }

    #[test]
    fn insertion_lookup() {
        // d = 2: 1, 4, 9, 15
        assert_eq!(insertion_index(2, 1, 1), Some(1));
        assert_eq!(insertion_index(2, 1, 4), Some(2));
        assert_eq!(insertion_index(2, 1, 5), None);
        assert_eq!(insertion_index(2, 3, 4), None);
        assert_eq!(insertion_index(2, 3, 9), Some(3));
        assert_eq!(insertion_index(2, 1, 0), None);
    }
}
