//! Wave-packet assembly psi = a e^{i Phi} on the circle grid, the sharp
//! main/small frequency decomposition at the cutoff mu(t), weighted Sobolev
//! norms of the lambda0-mode, and binary snapshot files.
//!
//! Normalization: the physical 2D packet is Re(e^{i lambda0 x1} psi(x2)) on
//! the 2*pi-periodic square, whose L2 norm equals sqrt(pi) ||psi||_{L2(x2)}.
//! All `*_2d` quantities fold in that factor; pairings carry pi Re<u, v>.

use crate::amplitude::AmplitudeField;
use crate::error::{Error, Result};
use crate::fft;
use crate::phase::PhaseField;
use crate::symbols::Symbol;
use num_complex::Complex64;
use std::io::{Read, Write};

/// One x1-mode wave packet sampled on the uniform circle grid.
#[derive(Clone, Debug)]
pub struct WavePacket {
    pub t: f64,
    pub lambda0: u32,
    pub lambda_t: f64,
    pub mu_t: f64,
    pub psi: Vec<Complex64>,
    pub window_image: (f64, f64),
    pub support_image: (f64, f64),
}

/// Assemble the packet at time t on an n-point circle grid.
pub fn packet_at(field: &PhaseField, amp: &AmplitudeField<'_>, t: f64, n: usize) -> Result<WavePacket> {
    let grid = fft::grid(n);
    let snap = field.phase_on_grid(t, &grid)?;
    let a = amp.on_grid(t, &grid)?;
    assemble(&snap, &a)
}

/// Pointwise product a e^{i Phi}; fails if the support wraps the circle.
pub fn assemble(snap: &crate::phase::PhaseSnapshot, amp: &[f64]) -> Result<WavePacket> {
    if snap.grid.len() != amp.len() {
        return Err(Error::Parameter("phase/amplitude grids differ".into()));
    }
    let (lo, hi) = snap.window_image;
    if !(0.0 < lo && hi < fft::TWO_PI && hi - lo < fft::TWO_PI) {
        return Err(Error::Periodization(format!(
            "window image ({lo}, {hi}) does not fit one fundamental domain"
        )));
    }
    let psi: Vec<Complex64> = snap
        .grid
        .iter()
        .enumerate()
        .map(|(j, _)| Complex64::from_polar(1.0, snap.phi[j]) * amp[j])
        .collect();
    Ok(WavePacket {
        t: snap.t,
        lambda0: 0, // set by the caller-aware wrapper below
        lambda_t: snap.lambda_t,
        mu_t: snap.mu_t,
        psi,
        window_image: snap.window_image,
        support_image: snap.support_image,
    })
}

impl WavePacket {
    pub fn with_lambda0(mut self, lambda0: u32) -> WavePacket {
        self.lambda0 = lambda0;
        self
    }

    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn coeffs(&self) -> Vec<Complex64> {
        fft::to_coeffs(&self.psi)
    }

    /// ||psi||_{L2(x2)} on the circle.
    pub fn l2(&self) -> f64 {
        fft::l2_sq_from_samples(&self.psi).sqrt()
    }

    /// L2 norm of the physical 2D packet Re(e^{i lambda0 x1} psi).
    pub fn l2_2d(&self) -> f64 {
        std::f64::consts::PI.sqrt() * self.l2()
    }

    /// Sharp Fourier split at the cutoff mu(t): small = modes |k| < mu,
    /// main = the rest. main + small = psi exactly.
    pub fn decompose(&self) -> Result<(WavePacket, WavePacket)> {
        let n = self.n();
        if (n as f64 / 2.0) < 4.0 * self.lambda_t {
            return Err(Error::Resolution(format!(
                "grid of {n} points does not resolve 4 lambda_t = {}",
                4.0 * self.lambda_t
            )));
        }
        let coeffs = self.coeffs();
        let mut main_c = coeffs.clone();
        let mut small_c = coeffs;
        for m in 0..n {
            let k = fft::wavenumber(m, n).abs();
            if k < self.mu_t {
                main_c[m] = Complex64::new(0.0, 0.0);
            } else {
                small_c[m] = Complex64::new(0.0, 0.0);
            }
        }
        let mut main = self.clone();
        main.psi = fft::to_samples(&main_c);
        let mut small = self.clone();
        small.psi = fft::to_samples(&small_c);
        Ok((main, small))
    }

    /// Weighted norm of the lambda0-mode of the 2D field:
    /// sqrt(pi) (sum_k <k>_{lambda0}^{2s} gamma(lambda0,k)^{2 sigma} |psi_k|^2 * 2 pi)^{1/2}
    /// with <k>_{lambda0}^2 = lambda0^2 + k^2. s = sigma = 0 recovers l2_2d.
    pub fn weighted_norm(&self, s: f64, sigma: f64, gamma: &Symbol) -> f64 {
        let n = self.n();
        let coeffs = self.coeffs();
        let l0sq = (self.lambda0 as f64).powi(2);
        let mut acc = 0.0;
        for (m, c) in coeffs.iter().enumerate() {
            let k = fft::wavenumber(m, n);
            let w = (l0sq + k * k).powf(s)
                * if sigma == 0.0 {
                    1.0
                } else {
                    gamma.value(self.lambda0 as f64, k).powf(2.0 * sigma)
                };
            acc += w * c.norm_sqr();
        }
        (std::f64::consts::PI * fft::TWO_PI * acc).sqrt()
    }

    /// Spectral centroid of |psi_k|^2 over |k|.
    pub fn spectral_centroid(&self) -> f64 {
        let n = self.n();
        let coeffs = self.coeffs();
        let mut num = 0.0;
        let mut den = 0.0;
        for (m, c) in coeffs.iter().enumerate() {
            let k = fft::wavenumber(m, n).abs();
            num += k * c.norm_sqr();
            den += c.norm_sqr();
        }
        num / den
    }

    /// Fraction of ||psi||^2 carried by the band m0^{-1} lambda0 < |k| < m0 lambda0.
    pub fn band_energy_fraction(&self, m0: f64) -> f64 {
        let n = self.n();
        let coeffs = self.coeffs();
        let l0 = self.lambda0 as f64;
        let mut inside = 0.0;
        let mut total = 0.0;
        for (m, c) in coeffs.iter().enumerate() {
            let k = fft::wavenumber(m, n).abs();
            total += c.norm_sqr();
            if k > l0 / m0 && k < m0 * l0 {
                inside += c.norm_sqr();
            }
        }
        inside / total
    }

    /// Resolution watchdog: energy fraction in the top 1/8 of the spectrum.
    pub fn top_band_fraction(&self) -> f64 {
        let n = self.n();
        let coeffs = self.coeffs();
        let cut = 7.0 / 8.0 * (n as f64 / 2.0);
        let mut top = 0.0;
        let mut total = 0.0;
        for (m, c) in coeffs.iter().enumerate() {
            let k = fft::wavenumber(m, n).abs();
            total += c.norm_sqr();
            if k >= cut {
                top += c.norm_sqr();
            }
        }
        top / total.max(1e-300)
    }

    const MAGIC: &'static [u8; 8] = b"DGWPK001";

    /// Binary snapshot: magic, u64 grid size, f64 {t, lambda0, lambda_t, mu_t},
    /// then interleaved little-endian f64 (re, im) samples.
    pub fn write_snapshot<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        for v in [self.t, self.lambda0 as f64, self.lambda_t, self.mu_t] {
            w.write_all(&v.to_le_bytes())?;
        }
        for c in &self.psi {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: Read>(r: &mut R) -> Result<WavePacket> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::Config("bad snapshot magic".into()));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let mut header = [0.0f64; 4];
        for h in header.iter_mut() {
            r.read_exact(&mut b8)?;
            *h = f64::from_le_bytes(b8);
        }
        let mut psi = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            let im = f64::from_le_bytes(b8);
            psi.push(Complex64::new(re, im));
        }
        Ok(WavePacket {
            t: header[0],
            lambda0: header[1] as u32,
            lambda_t: header[2],
            mu_t: header[3],
            psi,
            window_image: (0.0, 0.0),
            support_image: (0.0, 0.0),
        })
    }
}
