//! Derivative-free Nelder–Mead minimisation with dimension-adaptive coefficients
//! (Gao and Han), which behaves much better than the textbook values beyond a few
//! dimensions.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptions {
    pub max_iters: usize,
    pub max_evals: usize,
    /// Converged once every vertex is within `x_tol` (max-norm) of the best one...
    pub x_tol: f64,
    /// ...and every value within `f_tol` of the best value.
    pub f_tol: f64,
    /// Relative size of the initial simplex along non-zero coordinates.
    pub relative_step: f64,
    /// Initial step along coordinates that start at zero.
    pub zero_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iters: 6000,
            max_evals: 6000,
            x_tol: 1e-9,
            f_tol: 1e-12,
            relative_step: 0.05,
            zero_step: 2.5e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after every `HISTORY_STRIDE`-th iteration, plus the final one.
    pub history: Vec<f64>,
}

pub const HISTORY_STRIDE: usize = 100;

/// Minimises `f` starting from `x0`. Non-finite values are treated as `+∞`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    if n == 0 {
        let value = eval(x0, &mut evals);
        return SimplexResult { x: vec![], value, iterations: 0, evaluations: evals, converged: true, history: vec![value] };
    }

    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] = if p[i] != 0.0 { p[i] * (1.0 + opts.relative_step) } else { opts.zero_step };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect() };

    while iterations < opts.max_iters && evals < opts.max_evals {
        // stable sort keeps ties in insertion order, so runs are reproducible
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if iterations % HISTORY_STRIDE == 0 {
            history.push(vals[0]);
        }
        let spread_x = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread_f = vals[1..].iter().map(|v| (v - vals[0]).abs()).fold(0.0, f64::max);
        if spread_x <= opts.x_tol && spread_f <= opts.f_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / nf;
            }
        }
        let worst = pts[n].clone();
        let xr = lerp(&centroid, &worst, -alpha);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = lerp(&centroid, &worst, -alpha * beta);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        // contraction, outside if the reflection improved on the worst point
        let (xc, fc) = if fr < vals[n] {
            let xc = lerp(&centroid, &worst, -alpha * gamma);
            let fc = eval(&xc, &mut evals);
            (xc, if fc <= fr { fc } else { f64::NAN })
        } else {
            let xc = lerp(&centroid, &worst, gamma);
            let fc = eval(&xc, &mut evals);
            (xc, if fc < vals[n] { fc } else { f64::NAN })
        };
        if !fc.is_nan() {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        let best = pts[0].clone();
        for i in 1..=n {
            pts[i] = lerp(&best, &pts[i], delta);
            vals[i] = eval(&pts[i], &mut evals);
        }
    }

    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    history.push(vals[best]);
    SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        iterations,
        evaluations: evals,
        converged,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = minimize(
            |x| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 1.0).powi(2)).sum(),
            &[0.0; 6],
            &SimplexOptions { max_iters: 20_000, max_evals: 20_000, ..Default::default() },
        );
        assert!(r.converged);
        assert!(r.x.iter().all(|v| (v - 1.0).abs() < 1e-6), "{:?}", r.x);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = minimize(f, &[-1.2, 1.0], &SimplexOptions::default());
        assert!(r.value < 1e-10, "{r:?}");
    }

    #[test]
    fn nan_is_avoided() {
        let f = |x: &[f64]| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) };
        let r = minimize(f, &[2.0], &SimplexOptions::default());
        assert!((r.x[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] + x[0]).cos();
        let a = minimize(f, &[1.0, 2.0], &SimplexOptions::default());
        let b = minimize(f, &[1.0, 2.0], &SimplexOptions::default());
        assert_eq!(a, b);
    }
}
