//! Expected orientation similarity under Gaussian yaw noise.

/// Composite Simpson's rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// `E[(1 + cos 2e) / 2]` for `e ~ N(0, sigma^2)`, integrated over `+-12 sigma`.
pub fn expected_orientation_similarity(sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 1.0;
    }
    let pdf = |e: f64| (-0.5 * (e / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    simpson(|e| pdf(e) * 0.5 * (1.0 + (2.0 * e).cos()), -12.0 * sigma, 12.0 * sigma, 20_000)
}
