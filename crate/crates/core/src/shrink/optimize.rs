//! Box-constrained quasi-Newton minimization (projected BFGS with Armijo
//! backtracking along the projection arc).

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub max_iter: usize,
    pub grad_tol: f64,
    pub value_tol: f64,
    /// Largest allowed change of any coordinate in one step.
    pub max_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_iter: 200,
            grad_tol: 1e-7,
            value_tol: 1e-12,
            max_step: 2.0,
        }
    }
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

fn projected_gradient(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            if (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0) {
                0.0
            } else {
                g[i]
            }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` over the box `[lo, hi]` starting from `x0`. `f` returns the
/// value and gradient; non-finite values are treated as `+∞`. The returned
/// point is always the best iterate seen.
pub fn minimize_box<F>(f: F, x0: &[f64], lo: &[f64], hi: &[f64], opts: Options) -> Minimum
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let (mut fx, mut g) = f(&x);
    if !fx.is_finite() {
        fx = f64::INFINITY;
    }
    let identity = |n: usize| {
        let mut h = vec![vec![0.0; n]; n];
        (0..n).for_each(|i| h[i][i] = 1.0);
        h
    };
    let mut hinv = identity(n);
    let mut fresh = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let pg = projected_gradient(&x, &g, lo, hi);
        if pg.iter().all(|v| v.abs() <= opts.grad_tol) {
            converged = true;
            break;
        }
        let free: Vec<bool> = (0..n).map(|i| pg[i] != 0.0 || (x[i] > lo[i] && x[i] < hi[i])).collect();
        let mut d: Vec<f64> = (0..n)
            .map(|i| {
                if !free[i] {
                    return 0.0;
                }
                -(0..n).filter(|&k| free[k]).map(|k| hinv[i][k] * g[k]).sum::<f64>()
            })
            .collect();
        if dot(&d, &pg) >= 0.0 {
            hinv = identity(n);
            fresh = true;
            d = pg.iter().map(|v| -v).collect();
        }
        let longest = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut t = if longest > opts.max_step { opts.max_step / longest } else { 1.0 };

        let mut accepted = None;
        for _ in 0..60 {
            let mut xn: Vec<f64> = (0..n).map(|i| x[i] + t * d[i]).collect();
            project(&mut xn, lo, hi);
            let step: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
            if step.iter().all(|s| *s == 0.0) {
                break;
            }
            let (fxn, gn) = f(&xn);
            if fxn.is_finite() && fxn <= fx + 1e-4 * dot(&g, &step) {
                accepted = Some((xn, fxn, gn, step));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fxn, gn, s)) = accepted else {
            if fresh {
                // Steepest descent made no progress either.
                converged = pg.iter().all(|v| v.abs() <= opts.grad_tol.sqrt());
                break;
            }
            hinv = identity(n);
            fresh = true;
            continue;
        };

        let y: Vec<f64> = (0..n).map(|i| gn[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            // H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for k in 0..n {
                    hinv[i][k] += -rho * (hy[i] * s[k] + s[i] * hy[k]) + (rho * rho * yhy + rho) * s[i] * s[k];
                }
            }
            fresh = false;
        }
        let improvement = fx - fxn;
        x = xn;
        fx = fxn;
        g = gn;
        if improvement <= opts.value_tol * (1.0 + fx.abs()) && s.iter().all(|v| v.abs() < 1e-9) {
            converged = true;
            break;
        }
    }
    Minimum {
        x,
        value: fx,
        iterations,
        converged,
    }
}
