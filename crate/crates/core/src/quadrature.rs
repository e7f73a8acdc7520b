/// Composite Simpson rule on a (possibly non-uniform) increasing grid.
///
/// Pairs of intervals use the three-point quadratic rule; when the number of
/// intervals is odd the last one is closed with the quadratic through the
/// final three nodes. Two nodes fall back to the trapezoid.
pub fn simpson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "grid and samples differ in length");
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]);
    }
    let intervals = n - 1;
    let paired = intervals - intervals % 2;
    let mut total = 0.0;
    let mut i = 0;
    while i < paired {
        let h0 = xs[i + 1] - xs[i];
        let h1 = xs[i + 2] - xs[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0 * ((2.0 - h1 / h0) * ys[i] + hs * hs / (h0 * h1) * ys[i + 1] + (2.0 - h0 / h1) * ys[i + 2]);
        i += 2;
    }
    if intervals % 2 == 1 {
        let h0 = xs[n - 2] - xs[n - 3];
        let h1 = xs[n - 1] - xs[n - 2];
        let alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
        let beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
        let eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
        total += alpha * ys[n - 1] + beta * ys[n - 2] - eta * ys[n - 3];
    }
    total
}

/// `n` evenly spaced points covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (n - 1) as f64;
            (0..n).map(|k| if k == n - 1 { b } else { a + step * k as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let f = |x: f64| 2.0 * x * x * x - x * x + 3.0;
        let exact = |x: f64| 0.5 * x.powi(4) - x.powi(3) / 3.0 + 3.0 * x;
        for n in [3, 7, 11] {
            let xs = linspace(-1.0, 2.0, n);
            let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            assert!((simpson(&xs, &ys) - (exact(2.0) - exact(-1.0))).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn odd_interval_count_exact_for_quadratics() {
        let xs = [0.0, 0.3, 1.0, 1.2, 2.0];
        for n in [4, 5] {
            let ys: Vec<f64> = xs[..n].iter().map(|&x| 3.0 * x * x - x + 1.0).collect();
            let b: f64 = xs[n - 1];
            assert!((simpson(&xs[..n], &ys) - (b.powi(3) - 0.5 * b * b + b)).abs() < 1e-12);
        }
    }

    #[test]
    fn non_uniform_grid() {
        let xs: Vec<f64> = (0..=400).map(|k| (k as f64 / 400.0).powi(2) * std::f64::consts::PI).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        assert!((simpson(&xs, &ys) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.0, 1.0, 11);
        assert_eq!(v.len(), 11);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[10], 1.0);
        assert!((v[3] - 0.3).abs() < 1e-15);
    }
}
