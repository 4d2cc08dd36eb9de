//! Limited-memory BFGS with a strong-Wolfe line search.

use std::collections::VecDeque;

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const MAX_LINE_EVALS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfgsOptions {
    pub history: usize,
    pub max_iters: usize,
    /// Stop when `(f_{k-w} − f_k) / |f_{k-w}| < rel_decrease` over `window` iterations.
    pub rel_decrease: f64,
    pub window: usize,
    /// Stop when `‖g‖∞ ≤ grad_tol · max(1, ‖g₀‖∞)`.
    pub grad_tol: f64,
}

impl Default for LbfgsOptions {
    fn default() -> Self {
        Self { history: 10, max_iters: 500, rel_decrease: 1e-12, window: 10, grad_tol: 1e-14 }
    }
}

#[derive(Debug, Clone)]
pub struct LbfgsOutcome {
    pub x: Vec<f64>,
    pub cost: f64,
    /// Cost at the start and after every accepted step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub line_search_failed: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + alpha * b).collect()
}

/// Minimizes `f`, which returns the cost and its gradient.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, opts: &LbfgsOptions) -> LbfgsOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let (mut fx, mut g) = f(&x0);
    let mut x = x0;
    let mut trace = vec![fx];
    let mut hist: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut failed = false;
    let mut iterations = 0;
    let gmax = |g: &[f64]| g.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let gstop = opts.grad_tol * gmax(&g).max(1.0);

    while iterations < opts.max_iters {
        if fx == 0.0 || gmax(&g) <= gstop || !fx.is_finite() {
            break;
        }
        let mut d = direction(&g, &hist);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            hist.clear();
            d = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let alpha0 = if hist.is_empty() {
            (1.0 / d.iter().map(|v| v.abs()).fold(0.0, f64::max)).min(1.0)
        } else {
            1.0
        };
        let Some((alpha, fnew, gnew)) = line_search(&mut f, &x, fx, slope, &d, alpha0) else {
            failed = true;
            break;
        };
        let xnew = axpy(&x, alpha, &d);
        let s: Vec<f64> = xnew.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if hist.len() == opts.history {
                hist.pop_front();
            }
            hist.push_back((s, y, 1.0 / sy));
        }
        x = xnew;
        fx = fnew;
        g = gnew;
        iterations += 1;
        trace.push(fx);
        if trace.len() > opts.window {
            let old = trace[trace.len() - 1 - opts.window];
            if old > 0.0 && (old - fx) / old < opts.rel_decrease {
                break;
            }
        }
    }
    LbfgsOutcome { x, cost: fx, trace, iterations, line_search_failed: failed }
}

/// Two-loop recursion for `−H g`.
fn direction(g: &[f64], hist: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(hist.len());
    for (s, y, rho) in hist.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = hist.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in hist.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Strong-Wolfe bracketing and zoom (Nocedal & Wright, Alg. 3.5/3.6).
fn line_search<F>(
    f: &mut F,
    x: &[f64],
    f0: f64,
    slope0: f64,
    d: &[f64],
    alpha0: f64,
) -> Option<(f64, f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let mut phi = |a: f64| {
        let (v, g) = f(&axpy(x, a, d));
        let s = dot(&g, d);
        (v, s, g)
    };
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    let keep_best = |a: f64, v: f64, g: &Vec<f64>, best: &mut Option<(f64, f64, Vec<f64>)>| {
        if v < f0 && best.as_ref().is_none_or(|b| v < b.1) {
            *best = Some((a, v, g.clone()));
        }
    };

    let (mut a_prev, mut f_prev, mut s_prev) = (0.0, f0, slope0);
    let mut a = alpha0;
    let mut evals = 0;
    loop {
        let (fa, sa, ga) = phi(a);
        evals += 1;
        keep_best(a, fa, &ga, &mut best);
        if !fa.is_finite() || fa > f0 + C1 * a * slope0 || (evals > 1 && fa >= f_prev) {
            return zoom(&mut phi, f0, slope0, (a_prev, f_prev, s_prev), (a, fa, sa), evals, best);
        }
        if sa.abs() <= -C2 * slope0 {
            return Some((a, fa, ga));
        }
        if sa >= 0.0 {
            return zoom(&mut phi, f0, slope0, (a, fa, sa), (a_prev, f_prev, s_prev), evals, best);
        }
        if evals >= MAX_LINE_EVALS {
            return best;
        }
        a_prev = a;
        f_prev = fa;
        s_prev = sa;
        a *= 2.0;
    }
}

fn zoom<P>(
    phi: &mut P,
    f0: f64,
    slope0: f64,
    mut lo: (f64, f64, f64),
    mut hi: (f64, f64, f64),
    mut evals: usize,
    mut best: Option<(f64, f64, Vec<f64>)>,
) -> Option<(f64, f64, Vec<f64>)>
where
    P: FnMut(f64) -> (f64, f64, Vec<f64>),
{
    while evals < MAX_LINE_EVALS {
        let a = interpolate(lo, hi);
        let (fa, sa, ga) = phi(a);
        evals += 1;
        if fa < f0 && best.as_ref().is_none_or(|b| fa < b.1) {
            best = Some((a, fa, ga.clone()));
        }
        if !fa.is_finite() || fa > f0 + C1 * a * slope0 || fa >= lo.1 {
            hi = (a, fa, sa);
        } else {
            if sa.abs() <= -C2 * slope0 {
                return Some((a, fa, ga));
            }
            if sa * (hi.0 - lo.0) >= 0.0 {
                hi = lo;
            }
            lo = (a, fa, sa);
        }
        if (hi.0 - lo.0).abs() <= 1e-16 * lo.0.abs().max(1e-300) {
            break;
        }
    }
    best
}

/// Cubic minimizer of the bracket, safeguarded towards the midpoint.
fn interpolate(lo: (f64, f64, f64), hi: (f64, f64, f64)) -> f64 {
    let (a0, f0, s0) = lo;
    let (a1, f1, s1) = hi;
    let (left, right) = (a0.min(a1), a0.max(a1));
    let mid = 0.5 * (a0 + a1);
    if !f1.is_finite() || !s1.is_finite() {
        return mid;
    }
    let d1 = s0 + s1 - 3.0 * (f0 - f1) / (a0 - a1);
    let disc = d1 * d1 - s0 * s1;
    if disc < 0.0 {
        return mid;
    }
    let d2 = (a1 - a0).signum() * disc.sqrt();
    let a = a1 - (a1 - a0) * (s1 + d2 - d1) / (s1 - s0 + 2.0 * d2);
    let margin = 0.1 * (right - left);
    if a.is_finite() && a > left + margin && a < right - margin {
        a
    } else {
        mid
    }
}
