//! Gauss-Legendre rules and Lagrange cardinal functions.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]` (exact for degree `2n - 1`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(x, w)| (mid + half * x, half * w)).collect()
}

/// Lagrange cardinal function of `nodes[i]` evaluated at `x`.
pub fn lagrange(nodes: &[f64], i: usize, x: f64) -> f64 {
    let xi = nodes[i];
    nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .fold(1.0, |acc, (_, &xk)| acc * (x - xk) / (xi - xk))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_monomials_exactly() {
        for n in 1..=12 {
            let rule = gauss_legendre_on(n, 0.0, 2.0);
            for d in 0..2 * n {
                let approx: f64 = rule.iter().map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = 2f64.powi(d as i32 + 1) / (d + 1) as f64;
                assert!((approx - exact).abs() <= 1e-13 * exact.max(1.0), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn cardinal_property() {
        let nodes = [0.0, 0.5, 1.5, 2.0];
        for i in 0..4 {
            for (k, &x) in nodes.iter().enumerate() {
                assert_eq!(lagrange(&nodes, i, x), if i == k { 1.0 } else { 0.0 });
            }
        }
    }
}
