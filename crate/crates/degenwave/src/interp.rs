//! Piecewise cubic Hermite interpolation over a strictly increasing grid,
//! with exact segment integrals and inversion for monotone data. Slopes are
//! either supplied exactly (the phase pipeline knows them from the h-variable)
//! or estimated with the Fritsch-Carlson shape-preserving rule.

#[derive(Clone, Debug)]
pub struct CubicHermite {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub ds: Vec<f64>,
}

impl CubicHermite {
    /// Build with exact derivatives at the nodes.
    pub fn with_derivatives(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> CubicHermite {
        assert!(xs.len() >= 2 && xs.len() == ys.len() && ys.len() == ds.len());
        debug_assert!(xs.windows(2).all(|w| w[1] > w[0]), "grid must increase");
        CubicHermite { xs, ys, ds }
    }

    /// Build with Fritsch-Carlson (PCHIP) slopes: monotone data stays monotone.
    pub fn pchip(xs: Vec<f64>, ys: Vec<f64>) -> CubicHermite {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        let mut d = vec![0.0; n];
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
            return CubicHermite { xs, ys, ds: d };
        }
        for i in 1..n - 1 {
            if del[i - 1] * del[i] <= 0.0 {
                d[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
        d[0] = edge_slope(h[0], h[1], del[0], del[1]);
        d[n - 1] = edge_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        CubicHermite { xs, ys, ds: d }
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0;
        }
        if x >= self.xs[n - 1] {
            return n - 2;
        }
        match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1
    }

    pub fn eval_derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        let dh00 = 6.0 * t * (t - 1.0);
        let dh10 = (1.0 - t) * (1.0 - 3.0 * t);
        let dh01 = -dh00;
        let dh11 = t * (3.0 * t - 2.0);
        (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1
    }

    /// Exact integral of the piecewise cubic from xs[0] to x.
    pub fn integral_from_start(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let mut acc = 0.0;
        for j in 0..i {
            acc += self.segment_integral(j, 1.0);
        }
        let h = self.xs[i + 1] - self.xs[i];
        let t = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        acc + self.segment_integral(i, t)
    }

    fn segment_integral(&self, i: usize, t: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let (y0, y1, d0, d1) = (self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1]);
        // antiderivatives of the Hermite basis on [0, t]
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let ih00 = t - t3 + 0.5 * t4;
        let ih10 = 0.5 * t2 - (2.0 / 3.0) * t3 + 0.25 * t4;
        let ih01 = t3 - 0.5 * t4;
        let ih11 = 0.25 * t4 - t3 / 3.0;
        h * (ih00 * y0 + h * ih10 * d0 + ih01 * y1 + h * ih11 * d1)
    }

    /// Invert y -> x for strictly monotone increasing node values.
    pub fn invert_monotone(&self, y: f64) -> f64 {
        let n = self.ys.len();
        debug_assert!(self.ys.windows(2).all(|w| w[1] > w[0]));
        if y <= self.ys[0] {
            return self.xs[0];
        }
        if y >= self.ys[n - 1] {
            return self.xs[n - 1];
        }
        let i = match self.ys.partition_point(|&v| v <= y) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let (mut lo, mut hi) = (self.xs[i], self.xs[i + 1]);
        let mut x = lo + (hi - lo) * (y - self.ys[i]) / (self.ys[i + 1] - self.ys[i]);
        for _ in 0..60 {
            let fy = self.eval(x) - y;
            if fy <= 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let d = self.eval_derivative(x);
            let next = if d > 0.0 { x - fy / d } else { 0.5 * (lo + hi) };
            x = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                break;
            }
        }
        x
    }
}

fn edge_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    // one-sided three-point estimate, clipped for shape preservation
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 < 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sin_hermite(n: usize) -> CubicHermite {
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64 * 2.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let ds: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        CubicHermite::with_derivatives(xs, ys, ds)
    }

    #[test]
    fn hermite_accuracy() {
        let h = sin_hermite(33);
        for i in 0..100 {
            let x = 2.0 * i as f64 / 99.0;
            assert_relative_eq!(h.eval(x), x.sin(), epsilon = 1e-7);
        }
    }

    #[test]
    fn exact_integral() {
        let h = sin_hermite(129);
        let v = h.integral_from_start(2.0);
        assert_relative_eq!(v, 1.0 - 2f64.cos(), epsilon = 1e-9);
    }

    #[test]
    fn inversion_roundtrip() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x + x * x).collect();
        let h = CubicHermite::pchip(xs, ys);
        for i in 0..30 {
            let x = 0.02 + 0.96 * i as f64 / 29.0;
            let y = h.eval(x);
            assert_relative_eq!(h.invert_monotone(y), x, epsilon = 1e-10);
        }
    }
}
