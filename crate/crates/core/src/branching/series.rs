use serde::Serialize;

use super::BranchingError;

/// Partial sums of sum_t sum_{s <= t, s even} (4d)^{s/2} d^{-s} 2^{-(t-s)}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnsSeries {
    pub d: u32,
    /// Entry t-1 is the sum over 1..=t.
    pub partial_sums: Vec<f64>,
    /// sqrt(4d)/d = 2/sqrt(d).
    pub ratio: f64,
    /// Bound on the remainder after the last term; infinite when ratio >= 1.
    pub tail_bound: f64,
    pub converged: bool,
}

impl ReturnsSeries {
    /// CSV with header `t,partialSum`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,partialSum\n");
        for (i, s) in self.partial_sums.iter().enumerate() {
            out.push_str(&format!("{},{s}\n", i + 1));
        }
        out
    }
}

/// Convergence threshold for the remainder bound.
pub const SERIES_TAIL_TOLERANCE: f64 = 1e-9;

pub fn expected_returns_series(d: u32, t_max: u32) -> Result<ReturnsSeries, BranchingError> {
    if d < 1 || t_max < 1 {
        return Err(BranchingError::InvalidParameter(format!("d = {d}, tMax = {t_max}")));
    }
    let ratio = 2.0 / (d as f64).sqrt();
    // term_t = term_{t-1} / 2 + [t even] ratio^t
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut partial_sums = Vec::with_capacity(t_max as usize);
    for t in 1..=t_max {
        term /= 2.0;
        if t % 2 == 0 {
            term += ratio.powi(t as i32);
        }
        sum += term;
        partial_sums.push(sum);
    }
    // term_t <= (t/2 + 1) m^t <= (t + 1) m^t with m = max(ratio, 1/2)
    let tail_bound = if ratio < 1.0 {
        let m = ratio.max(0.5);
        let big_t = t_max as f64;
        m.powf(big_t + 1.0) * ((big_t + 2.0) - (big_t + 1.0) * m) / (1.0 - m).powi(2)
    } else {
        f64::INFINITY
    };
    Ok(ReturnsSeries {
        d,
        partial_sums,
        ratio,
        tail_bound,
        converged: ratio < 1.0 && tail_bound < SERIES_TAIL_TOLERANCE,
    })
}
