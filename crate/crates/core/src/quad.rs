//! Gauss–Legendre rules and nested quadrature over ordered times inside windows.

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `∫ f(t_1, …, t_k)` over `t_1 ≥ … ≥ t_k` with `t_j` in window `windows[j]`
/// (1-based, descending) of width `tau`, by nested Gauss–Legendre with `n` points
/// per dimension.
pub fn ordered_window_integral<F: FnMut(&[f64]) -> f64>(
    windows: &[usize],
    tau: f64,
    n: usize,
    mut f: F,
) -> f64 {
    let (x, w) = gauss_legendre(n);
    let mut times = vec![0.0; windows.len()];
    nest(windows, tau, &x, &w, 0, f64::INFINITY, &mut times, &mut f)
}

#[allow(clippy::too_many_arguments)]
fn nest<F: FnMut(&[f64]) -> f64>(
    windows: &[usize],
    tau: f64,
    x: &[f64],
    w: &[f64],
    depth: usize,
    upper_prev: f64,
    times: &mut [f64],
    f: &mut F,
) -> f64 {
    if depth == windows.len() {
        return f(times);
    }
    let lo = (windows[depth] - 1) as f64 * tau;
    let hi = (windows[depth] as f64 * tau).min(upper_prev);
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut acc = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let t = mid + half * xi;
        times[depth] = t;
        acc += wi * nest(windows, tau, x, w, depth + 1, t, times, f);
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1, 2, 5, 12] {
            let (x, w) = gauss_legendre(n);
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            let deg = 2 * n - 1;
            let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let expect = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert_abs_diff_eq!(v, expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn simplex_volume() {
        // three ordered times in one window of width 2: 2³/3!
        let v = ordered_window_integral(&[2, 2, 2], 2.0, 4, |_| 1.0);
        assert_abs_diff_eq!(v, 8.0 / 6.0, epsilon = 1e-13);
        let v = ordered_window_integral(&[3, 1], 0.5, 3, |_| 1.0);
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-14);
    }
}
