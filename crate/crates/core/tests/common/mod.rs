//! Reference computations shared by the integration tests: adaptive
//! Gauss–Kronrod quadrature and Monte Carlo summaries.
#![allow(dead_code)]

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XK[1], XK[3], XK[5], XK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - r * XK[i]) + f(c + r * XK[i]);
        k += WK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
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
        self.err.total_cmp(&other.err)
    }
}

fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let (value, err) = gk15(f, a, b);
    Panel { a, b, value, err }
}

/// Globally adaptive Gauss–Kronrod (7/15) integral over the panels given
/// by consecutive `edges`: the panel with the largest error estimate is
/// bisected until the summed error falls below `rel_tol · |total|`.
pub fn integrate(f: &dyn Fn(f64) -> f64, edges: &[f64], rel_tol: f64) -> f64 {
    let mut heap: std::collections::BinaryHeap<Panel> = edges.windows(2).map(|w| panel(f, w[0], w[1])).collect();
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.err).sum();
    for step in 0..20_000 {
        if step % 512 == 511 {
            // refresh the running sums against drift
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
        if err <= rel_tol * total.abs() {
            break;
        }
        let worst = heap.pop().expect("at least one panel");
        let m = 0.5 * (worst.a + worst.b);
        let (left, right) = (panel(f, worst.a, m), panel(f, m, worst.b));
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    heap.iter().map(|p| p.value).sum()
}

/// `(∫_{-∞}^0, ∫_0^∞)` of `xⁱ (τ/2) e^{−τ|x|} φ_ν(x − h) dx`, integrated
/// directly from the definition. The integrand is rescaled by its value at
/// the peak so that no intermediate overflows; the returned values are
/// `(ln scale, scaled integral)` per side.
pub fn slab_integral_sides(i: i32, h: f64, tau: f64, nu: f64) -> [(f64, f64); 2] {
    let side = |sign: f64| {
        // ∫_0^∞ (sign·y)^i ξ_τ(y) φ_ν(sign·y − h) dy
        let log_g = |y: f64| {
            (0.5 * tau).ln() - tau * y
                - 0.5 * ((sign * y - h) / nu).powi(2)
                - nu.ln()
                - 0.5 * (2.0 * std::f64::consts::PI).ln()
        };
        // locate the peak of log_g on [0, ∞) by golden search
        let (mut lo, mut hi) = (0.0f64, h.abs() + 50.0 * nu + 50.0 / tau);
        for _ in 0..200 {
            let a = lo + 0.382 * (hi - lo);
            let b = lo + 0.618 * (hi - lo);
            if log_g(a) < log_g(b) {
                lo = a;
            } else {
                hi = b;
            }
        }
        let peak = 0.5 * (lo + hi);
        let scale = log_g(peak);
        let f = |y: f64| sign.powi(i) * y.powi(i) * (log_g(y) - scale).exp();
        let width = nu.min(1.0 / tau).max(1e-3 * nu);
        let start = (peak - 60.0 * nu).max(0.0);
        let end = peak + 60.0 * nu + 60.0 / tau;
        let mut edges = vec![start];
        let mut x = start;
        while x < end {
            x = (x + width).min(end);
            edges.push(x);
        }
        let total = integrate(&f, &edges, 1e-13);
        (scale, total)
    };
    [side(-1.0), side(1.0)]
}

/// `Qⁱ(h)` by quadrature, as plain numbers.
pub fn q_by_quadrature(i: i32, h: f64, tau: f64, nu: f64) -> f64 {
    slab_integral_sides(i, h, tau, nu).iter().map(|(s, v)| s.exp() * v).sum()
}

/// Relative error of closed-form side integrals, each given as
/// `(ln scale, value)`, against quadrature. Measured against `Σ |side|` so
/// sign cancellation (e.g. `Q¹(0) = 0`) is judged by the size of the
/// contributions, and entirely in scaled form so that values far below the
/// smallest double still compare.
pub fn relative_error(i: i32, h: f64, tau: f64, nu: f64, closed: [(f64, f64); 2]) -> f64 {
    let sides = slab_integral_sides(i, h, tau, nu);
    let top = sides[0].0.max(sides[1].0);
    let scaled = |(s, v): (f64, f64)| (s - top).exp() * v;
    let reference: f64 = sides.iter().map(|&p| scaled(p)).sum();
    let magnitude: f64 = sides.iter().map(|&p| scaled(p).abs()).sum();
    let approx: f64 = closed.iter().map(|&p| scaled(p)).sum();
    (approx - reference).abs() / magnitude
}

pub struct Summary {
    pub mean: f64,
    pub var: f64,
    pub m4: f64,
    pub n: usize,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Summary { mean, var, m4, n: xs.len() }
}

impl Summary {
    pub fn mean_se(&self) -> f64 {
        (self.var / self.n as f64).sqrt()
    }

    /// Standard error of the sample variance.
    pub fn var_se(&self) -> f64 {
        ((self.m4 - self.var * self.var).max(0.0) / self.n as f64).sqrt()
    }
}
