use std::collections::BinaryHeap;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Non-negative; includes quadrature, tail and rounding contributions.
    pub abs_error_estimate: f64,
    /// Upper limit of the numerical part; the remainder is handled analytically.
    pub t_cut: f64,
    pub panels: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Kronrod rule on [a, b] with the embedded 7-point Gauss rule;
/// returns (Kronrod value, |Kronrod - Gauss|).
pub fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod: the panel with the largest error is
/// bisected until the summed error meets max(abs_tol, rel_tol |value|).
pub fn integrate_adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> QuadratureResult {
    let (value, error) = gauss_kronrod_15(f, a, b);
    let mut heap = BinaryHeap::from([Panel { a, b, value, error }]);
    let (mut total, mut err) = (value, error);
    while err > abs_tol.max(rel_tol * total.abs()) && heap.len() < max_panels {
        let p = heap.pop().expect("nonempty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gauss_kronrod_15(f, p.a, m);
        let (v2, e2) = gauss_kronrod_15(f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
    }
    // re-sum from the panels to shed accumulated rounding
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    QuadratureResult {
        value,
        abs_error_estimate: error + 4.0 * f64::EPSILON * value.abs() * panels.len() as f64,
        t_cut: b,
        panels: panels.len(),
    }
}

/// Gauss-Kronrod on `panels` equal subintervals.
pub fn integrate_uniform(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> QuadratureResult {
    let h = (b - a) / panels as f64;
    let (mut value, mut error) = (0.0, 0.0);
    for i in 0..panels {
        let (v, e) = gauss_kronrod_15(f, a + i as f64 * h, a + (i + 1) as f64 * h);
        value += v;
        error += e;
    }
    QuadratureResult {
        value,
        abs_error_estimate: error,
        t_cut: b,
        panels,
    }
}
