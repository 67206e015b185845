//! Grid/FFT conventions shared by the wave-packet and linear-operator
//! modules. The circle is [0, 2*pi) sampled at x_j = 2 pi j / N; coefficient
//! conventions are u(x) = sum_k uhat_k e^{ikx} with k running over
//! (-N/2, N/2] (bin N/2 holds the Nyquist mode; all multipliers used here are
//! even in k, so the sign convention of that bin is immaterial).

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Wavenumber of FFT bin m for grid size n.
#[inline]
pub fn wavenumber(m: usize, n: usize) -> f64 {
    if m <= n / 2 {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// Grid point x_j.
#[inline]
pub fn grid_point(j: usize, n: usize) -> f64 {
    TWO_PI * j as f64 / n as f64
}

pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| grid_point(j, n)).collect()
}

/// Samples -> Fourier coefficients (normalized by 1/N).
pub fn to_coeffs(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    plans(n).fwd.process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    buf
}

/// Fourier coefficients -> samples.
pub fn to_samples(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    plans(buf.len()).inv.process(&mut buf);
    buf
}

/// In-place diagonal multiplier m(k) on a coefficient vector.
pub fn apply_multiplier<F: Fn(f64) -> f64>(coeffs: &mut [Complex64], m: F) {
    let n = coeffs.len();
    for (i, c) in coeffs.iter_mut().enumerate() {
        *c *= m(wavenumber(i, n));
    }
}

/// ||u||_{L2(0, 2 pi)}^2 from coefficients: 2 pi sum |uhat_k|^2.
pub fn l2_sq_from_coeffs(coeffs: &[Complex64]) -> f64 {
    TWO_PI * coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// ||u||_{L2(0, 2 pi)}^2 from samples: (2 pi / N) sum |u_j|^2.
pub fn l2_sq_from_samples(samples: &[Complex64]) -> f64 {
    TWO_PI / samples.len() as f64 * samples.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// L2(0, 2 pi) inner product <u, v> = (2 pi / N) sum u_j conj(v_j).
pub fn inner_from_samples(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    debug_assert_eq!(u.len(), v.len());
    let s: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
    s * (TWO_PI / u.len() as f64)
}

/// Pointwise product of a coefficient-space field with a real coefficient
/// function given by its exact modes, computed alias-free on a 2x padded grid
/// and truncated back to the original band.
pub fn padded_product(field: &[Complex64], coeff_samples_2n: &[Complex64]) -> Vec<Complex64> {
    let n = field.len();
    let n2 = 2 * n;
    debug_assert_eq!(coeff_samples_2n.len(), n2);
    // embed the band (-N/2, N/2] into the 2N layout
    let mut big = vec![Complex64::new(0.0, 0.0); n2];
    for m in 0..n {
        let k = wavenumber(m, n);
        let mm = if k >= 0.0 { k as usize } else { (k + n2 as f64) as usize };
        big[mm] = field[m];
    }
    let mut samples = to_samples(&big);
    for (s, c) in samples.iter_mut().zip(coeff_samples_2n) {
        *s *= c;
    }
    let big_c = to_coeffs(&samples);
    // truncate back
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, o) in out.iter_mut().enumerate() {
        let k = wavenumber(m, n);
        let mm = if k >= 0.0 { k as usize } else { (k + n2 as f64) as usize };
        *o = big_c[mm];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn roundtrip_and_parseval() {
        let n = 256;
        let samples: Vec<Complex64> = (0..n)
            .map(|j| {
                let x = grid_point(j, n);
                Complex64::new((3.0 * x).sin() + 0.2, (x).cos())
            })
            .collect();
        let coeffs = to_coeffs(&samples);
        let back = to_samples(&coeffs);
        for (a, b) in samples.iter().zip(&back) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_relative_eq!(
            l2_sq_from_coeffs(&coeffs),
            l2_sq_from_samples(&samples),
            max_relative = 1e-12
        );
    }

    #[test]
    fn padded_product_is_exact_convolution() {
        let n = 64;
        // field occupying a band, coefficient = cos(x) (modes +-1)
        let mut field = vec![Complex64::new(0.0, 0.0); n];
        field[3] = Complex64::new(1.0, 0.5);
        field[n - 5] = Complex64::new(0.25, 0.0);
        let coeff: Vec<Complex64> = (0..2 * n)
            .map(|j| Complex64::new(grid_point(j, 2 * n).cos(), 0.0))
            .collect();
        let out = padded_product(&field, &coeff);
        // cos shifts each mode by +-1 with weight 1/2
        let mut expect = vec![Complex64::new(0.0, 0.0); n];
        expect[2] = field[3] * 0.5;
        expect[4] = field[3] * 0.5;
        expect[n - 4] = field[n - 5] * 0.5;
        expect[n - 6] = field[n - 5] * 0.5;
        for (a, b) in out.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-13, "{a} vs {b}");
        }
    }
}
