//! Order-zero modified Bessel function of the first kind.

/// Below this argument the power series is used, above it the asymptotic expansion.
pub const SWITCHOVER: f64 = 15.0;

/// sum_k (x^2/4)^k / (k!)^2; all terms positive, so no cancellation.
pub fn bessel_i0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        term *= q / (k as f64 * k as f64);
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// e^{-x} I0(x) from the asymptotic expansion
/// (2 pi x)^{-1/2} sum_k ((2k-1)!!)^2 / (k! (8x)^k), summed to its smallest term.
pub fn bessel_i0_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let next = term * (2.0 * kf - 1.0).powi(2) / (kf * 8.0 * x);
        if next >= term {
            break;
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// e^{-x} I0(x) for x >= 0.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x < SWITCHOVER {
        (-x).exp() * bessel_i0_series(x)
    } else {
        bessel_i0_asymptotic(x)
    }
}

pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x < SWITCHOVER {
        bessel_i0_series(x)
    } else {
        bessel_i0_asymptotic(x) * x.exp()
    }
}

/// Coefficients a_k of the asymptotic series in powers of 1/x.
pub(crate) fn asymptotic_coefficients(terms: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    for k in 1..terms {
        let kf = k as f64;
        let prev = a[k - 1];
        a.push(prev * (2.0 * kf - 1.0).powi(2) / (8.0 * kf));
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin() {
        assert_eq!(bessel_i0(0.0), 1.0);
    }

    #[test]
    fn at_one() {
        // 40-term series evaluated independently, term by term with factorials
        let mut s = 0.0;
        let mut fact = 1.0f64;
        for k in 0..40 {
            if k > 0 {
                fact *= k as f64;
            }
            s += 0.25f64.powi(k) / (fact * fact);
        }
        assert!((bessel_i0(1.0) - s).abs() < 1e-15);
        assert!((bessel_i0(1.0) - 1.2660658778).abs() < 1e-10);
    }

    #[test]
    fn switchover_continuity() {
        let x = SWITCHOVER;
        let series = (-x).exp() * bessel_i0_series(x);
        let asym = bessel_i0_asymptotic(x);
        assert!(((series - asym) / series).abs() < 1e-10, "{series} vs {asym}");
    }

    #[test]
    fn asymptotic_recurrence_matches_coefficients() {
        let a = asymptotic_coefficients(4);
        assert_eq!(a, vec![1.0, 1.0 / 8.0, 9.0 / 128.0, 225.0 / 3072.0]);
    }

    #[test]
    fn reference_values() {
        // I0(5) and I0(20) to 13 significant digits
        assert!((bessel_i0(5.0) / 27.239871823604442 - 1.0).abs() < 1e-13);
        assert!((bessel_i0(20.0) / 43558282.55955634 - 1.0).abs() < 1e-12);
    }
}
