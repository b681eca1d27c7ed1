//! Small numerical kernels shared by the integrators: deterministic
//! summation, Gauss-Legendre rules and central finite differences.

use nalgebra::{Point3, Vector3};

/// Pairwise (cascade) summation with a fixed recursion tree.
///
/// The split points depend only on the slice length, so the result is
/// bit-identical regardless of how the terms were produced.
pub fn pairwise_sum(terms: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if terms.len() <= LEAF {
        let mut acc = 0.0;
        for t in terms {
            acc += *t;
        }
        return acc;
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

pub fn pairwise_sum_vec3(terms: &[Vector3<f64>]) -> Vector3<f64> {
    let xs: Vec<f64> = terms.iter().map(|v| v.x).collect();
    let ys: Vec<f64> = terms.iter().map(|v| v.y).collect();
    let zs: Vec<f64> = terms.iter().map(|v| v.z).collect();
    Vector3::new(pairwise_sum(&xs), pairwise_sum(&ys), pairwise_sum(&zs))
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending in the node.
///
/// Newton iteration on the three-term Legendre recurrence; nodes are
/// mirrored so the rule is exactly symmetric.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|t| half * t).collect(),
    )
}

/// Central-difference gradient of a scalar function of position.
///
/// Truncation error is O(step²); the callers pick `step` as a fixed
/// fraction (1e-4) of a characteristic length.
pub fn central_gradient<F>(f: F, x: &Point3<f64>, step: f64) -> Vector3<f64>
where
    F: Fn(&Point3<f64>) -> f64,
{
    let mut g = Vector3::zeros();
    for k in 0..3 {
        let mut e = Vector3::zeros();
        e[k] = step;
        g[k] = (f(&(x + e)) - f(&(x - e))) / (2.0 * step);
    }
    g
}

/// Central-difference directional derivative along `dir`.
pub fn central_directional<F>(f: F, x: &Point3<f64>, dir: &Vector3<f64>, step: f64) -> f64
where
    F: Fn(&Point3<f64>) -> f64,
{
    (f(&(x + dir * step)) - f(&(x - dir * step))) / (2.0 * step)
}

/// Finite-difference step for a problem of characteristic length `scale`.
pub fn fd_step(scale: f64) -> f64 {
    1e-4 * scale.max(f64::MIN_POSITIVE)
}
