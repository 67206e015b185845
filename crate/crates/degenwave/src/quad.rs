//! Adaptive quadrature (Simpson with Richardson acceptance) and small helpers.

/// Adaptive Simpson on [a, b] to the given relative/absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, 52)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let tol = abs_tol.max(rel_tol * (left + right).abs());
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, rel_tol, abs_tol * 0.5, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, rel_tol, abs_tol * 0.5, depth - 1)
}

/// Prefix integrals of `f` over sorted breakpoints: out[i] = int_{xs[0]}^{xs[i]} f.
pub fn cumulative<F: Fn(f64) -> f64>(f: &F, xs: &[f64], rel_tol: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in xs.windows(2) {
        acc += adaptive_simpson(f, w[0], w[1], rel_tol, 1e-300);
        out.push(acc);
    }
    out
}

/// Fixed-order Gauss-Legendre (5 point) on [a, b]; used for per-cell phase sums.
pub fn gauss5<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [
        -0.906179845938663993,
        -0.538469310105683091,
        0.0,
        0.538469310105683091,
        0.906179845938663993,
    ];
    const W: [f64; 5] = [
        0.236926885056189088,
        0.478628670499366468,
        0.568888888888888889,
        0.478628670499366468,
        0.236926885056189088,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..5 {
        acc += W[i] * f(c + h * X[i]);
    }
    acc * h
}

/// Trapezoid rule over a (possibly nonuniform) sorted grid of samples.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_exact_on_smooth() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12, 1e-14);
        assert_relative_eq!(v, 2.0, max_relative = 1e-11);
    }

    #[test]
    fn cumulative_is_consistent() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let cum = cumulative(&|x: f64| x * x, &xs, 1e-12);
        assert_relative_eq!(cum[10], 1.0 / 3.0, max_relative = 1e-11);
        assert_relative_eq!(cum[5], 0.5f64.powi(3) / 3.0, max_relative = 1e-11);
    }

    #[test]
    fn gauss5_high_order() {
        // exact through degree 9
        let v = gauss5(&|x: f64| x.powi(9) + x.powi(4), 0.0, 1.0);
        assert_relative_eq!(v, 0.1 + 0.2, max_relative = 1e-14);
    }
}
