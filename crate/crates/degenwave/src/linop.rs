//! Pseudo-spectral realization of the conjugated linearized operator on a
//! fixed x1-mode, time stepping of the linear (and dissipative) flow, and the
//! residual / energy / duality diagnostics.
//!
//! The reduced operator on the lambda0 mode is
//!   P(psi) = i lambda0 [ gamma^{1/2}( f' * gamma^{1/2} psi )
//!                      - gamma^{1/2}( (Gamma f)' * gamma^{-1/2} psi ) ],
//! with gamma^{±1/2} acting diagonally as gamma(lambda0, k)^{±1/2}; the
//! evolution is d_t psi = -P(psi) (- kappa Upsilon psi in the dissipative
//! case). Products with the coefficient fields are computed alias-free on a
//! 2x zero-padded grid.

use crate::amplitude::AmplitudeField;
use crate::error::{Error, Result};
use crate::fft;
use crate::growth::GrowthPlan;
use crate::phase::PhaseField;
use crate::shear::{ModeView, ShearProfile};
use crate::symbols::Symbol;
use crate::wavepacket::{packet_at, WavePacket};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// One x1-mode state, held in coefficient space.
#[derive(Clone, Debug)]
pub struct SpectralField {
    pub lambda0: u32,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn from_samples(lambda0: u32, samples: &[Complex64]) -> SpectralField {
        SpectralField {
            lambda0,
            coeffs: fft::to_coeffs(samples),
        }
    }

    pub fn from_packet(wp: &WavePacket) -> SpectralField {
        SpectralField {
            lambda0: wp.lambda0,
            coeffs: wp.coeffs(),
        }
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn samples(&self) -> Vec<Complex64> {
        fft::to_samples(&self.coeffs)
    }

    pub fn l2(&self) -> f64 {
        fft::l2_sq_from_coeffs(&self.coeffs).sqrt()
    }

    pub fn l2_2d(&self) -> f64 {
        std::f64::consts::PI.sqrt() * self.l2()
    }

    /// Weighted 2D norm with weights <k>_{lambda0}^s gamma(lambda0,k)^sigma.
    pub fn weighted_norm(&self, s: f64, sigma: f64, gamma: &Symbol) -> f64 {
        weighted_norm_coeffs(self.lambda0, &self.coeffs, s, sigma, gamma)
    }

    /// Largest |k| carrying more than `rel` of the peak coefficient magnitude.
    pub fn k_max_active(&self, rel: f64) -> f64 {
        let n = self.n();
        let peak = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut kmax = 1.0f64;
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.norm() > rel * peak {
                kmax = kmax.max(fft::wavenumber(m, n).abs());
            }
        }
        kmax
    }

    /// Energy fraction in the top 1/8 of the spectrum.
    pub fn top_band_fraction(&self) -> f64 {
        let n = self.n();
        let cut = 7.0 / 8.0 * (n as f64 / 2.0);
        let mut top = 0.0;
        let mut total = 0.0;
        for (m, c) in self.coeffs.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            if fft::wavenumber(m, n).abs() >= cut {
                top += e;
            }
        }
        top / total.max(1e-300)
    }
}

pub fn weighted_norm_coeffs(
    lambda0: u32,
    coeffs: &[Complex64],
    s: f64,
    sigma: f64,
    gamma: &Symbol,
) -> f64 {
    let n = coeffs.len();
    let l0sq = (lambda0 as f64).powi(2);
    let mut acc = 0.0;
    for (m, c) in coeffs.iter().enumerate() {
        let k = fft::wavenumber(m, n);
        let mut w = (l0sq + k * k).powf(s);
        if sigma != 0.0 {
            w *= gamma.value(lambda0 as f64, k).powf(2.0 * sigma);
        }
        acc += w * c.norm_sqr();
    }
    (std::f64::consts::PI * fft::TWO_PI * acc).sqrt()
}

/// Pairing of two reduced states as 2D fields: pi Re <u, v>_{L2(x2)}.
pub fn pairing_2d(u: &[Complex64], v: &[Complex64]) -> f64 {
    let s: Complex64 = u.iter().zip(v).map(|(a, b)| a * b.conj()).sum();
    std::f64::consts::PI * fft::TWO_PI * s.re
}

/// The reduced linearized operator with cached multipliers and coefficient
/// fields (per-mode decay factors handle the dissipative background exactly).
pub struct LinOp {
    pub gamma: Symbol,
    pub shear: ShearProfile,
    pub lambda0: u32,
    pub n: usize,
    pub kappa: f64,
    pub cfl_safety: f64,
    g_half: Vec<f64>,
    g_ihalf: Vec<f64>,
    /// kappa * upsilon(lambda0, k) per bin (empty when kappa = 0)
    ups_diag: Vec<f64>,
    /// f'(t, x) = sum_m exp(rate_m t) fp[m](x) on the working grid
    fp_parts: Vec<(f64, Vec<f64>)>,
    gfp_parts: Vec<(f64, Vec<f64>)>,
    /// products run on a 2x zero-padded grid; skipped when the coefficient
    /// bandwidth plus the watchdog-enforced headroom already rules out aliasing
    pad: bool,
}

impl LinOp {
    pub fn new(
        gamma: &Symbol,
        shear: &ShearProfile,
        upsilon: Option<&Symbol>,
        kappa: f64,
        lambda0: u32,
        n: usize,
    ) -> Result<LinOp> {
        if !n.is_power_of_two() {
            return Err(Error::Parameter(format!("grid size {n} is not a power of two")));
        }
        let l0 = lambda0 as f64;
        let g_half: Vec<f64> = (0..n)
            .map(|m| gamma.value(l0, fft::wavenumber(m, n)).sqrt())
            .collect();
        let g_ihalf: Vec<f64> = g_half.iter().map(|g| 1.0 / g).collect();
        let ups_diag: Vec<f64> = if kappa > 0.0 {
            let u = upsilon.ok_or_else(|| {
                Error::Parameter("kappa > 0 requires an upsilon symbol".into())
            })?;
            (0..n)
                .map(|m| kappa * u.value(l0, fft::wavenumber(m, n)))
                .collect()
        } else {
            Vec::new()
        };

        // coefficient bandwidth decides whether padding is needed: with the
        // resolution watchdog keeping the top 1/8 of the spectrum empty,
        // products with a narrow-band coefficient are alias-free as they are
        let bandwidth = match shear.form_view() {
            ModeView::Uniform(_) => 0usize,
            ModeView::Modes(modes) => modes
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .map(|(k, _)| k)
                .max()
                .unwrap_or(0),
        };
        let pad = bandwidth > n / 16;
        let nw = if pad { 2 * n } else { n };
        let grid2 = fft::grid(nw);
        let mut fp_parts = Vec::new();
        let mut gfp_parts = Vec::new();
        match shear.form_view() {
            ModeView::Uniform(c) => {
                fp_parts.push((0.0, vec![c; nw]));
                let g00 = gamma.value(0.0, 0.0);
                gfp_parts.push((0.0, vec![g00 * c; nw]));
            }
            ModeView::Modes(modes) => {
                for (k, ck) in modes.iter().enumerate() {
                    if k == 0 || ck.norm_sqr() == 0.0 {
                        continue;
                    }
                    let rate = if kappa > 0.0 {
                        -kappa * upsilon.unwrap().value(0.0, k as f64)
                    } else {
                        0.0
                    };
                    let ik = Complex64::new(0.0, k as f64);
                    let gk = gamma.value(0.0, k as f64);
                    let fp: Vec<f64> = grid2
                        .iter()
                        .map(|&x| 2.0 * (ck * ik * Complex64::from_polar(1.0, k as f64 * x)).re)
                        .collect();
                    let gfp: Vec<f64> = fp.iter().map(|v| gk * v).collect();
                    fp_parts.push((rate, fp));
                    gfp_parts.push((rate, gfp));
                }
            }
        }
        Ok(LinOp {
            gamma: gamma.clone(),
            shear: shear.clone(),
            lambda0,
            n,
            kappa,
            cfl_safety: 0.5,
            g_half,
            g_ihalf,
            ups_diag,
            fp_parts,
            gfp_parts,
            pad,
        })
    }

    fn working_len(&self) -> usize {
        if self.pad {
            2 * self.n
        } else {
            self.n
        }
    }

    fn coeff_fields(&self, t: f64) -> (Vec<Complex64>, Vec<Complex64>) {
        let nw = self.working_len();
        let mut fp = vec![Complex64::new(0.0, 0.0); nw];
        let mut gfp = vec![Complex64::new(0.0, 0.0); nw];
        for (rate, part) in &self.fp_parts {
            let d = (rate * t).exp();
            for (o, v) in fp.iter_mut().zip(part) {
                o.re += d * v;
            }
        }
        for (rate, part) in &self.gfp_parts {
            let d = (rate * t).exp();
            for (o, v) in gfp.iter_mut().zip(part) {
                o.re += d * v;
            }
        }
        (fp, gfp)
    }

    /// P(psi): the inviscid spatial operator, so that d_t psi = -P(psi).
    pub fn apply_l(&self, t: f64, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        debug_assert_eq!(coeffs.len(), n);
        let (fp, gfp) = self.coeff_fields(t);
        // u = gamma^{1/2} psi, v = gamma^{-1/2} psi
        let mut u = coeffs.to_vec();
        let mut v = coeffs.to_vec();
        for m in 0..n {
            u[m] *= self.g_half[m];
            v[m] *= self.g_ihalf[m];
        }
        // physical products, combined before transforming back
        let a = self.working_samples(&u);
        let b = self.working_samples(&v);
        let nw = self.working_len();
        let mut prod = vec![Complex64::new(0.0, 0.0); nw];
        for m in 0..nw {
            prod[m] = a[m] * fp[m] - b[m] * gfp[m];
        }
        let mut out = self.working_coeffs(&fft::to_coeffs(&prod));
        let il0 = Complex64::new(0.0, self.lambda0 as f64);
        for m in 0..n {
            out[m] *= il0 * self.g_half[m];
        }
        out
    }

    /// Principal part only: i lambda0 gamma^{1/2}(f' gamma^{1/2} psi).
    pub fn apply_principal(&self, t: f64, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let (fp, _) = self.coeff_fields(t);
        let mut u = coeffs.to_vec();
        for m in 0..n {
            u[m] *= self.g_half[m];
        }
        let a = self.working_samples(&u);
        let prod: Vec<Complex64> = a.iter().zip(&fp).map(|(x, c)| x * c).collect();
        let mut out = self.working_coeffs(&fft::to_coeffs(&prod));
        let il0 = Complex64::new(0.0, self.lambda0 as f64);
        for m in 0..n {
            out[m] *= il0 * self.g_half[m];
        }
        out
    }

    /// P(psi) + kappa Upsilon psi (the dissipative multiplier acts diagonally).
    pub fn apply_l_diss(&self, t: f64, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.apply_l(t, coeffs);
        if self.kappa > 0.0 {
            for (m, o) in out.iter_mut().enumerate() {
                *o += self.ups_diag[m] * coeffs[m];
            }
        }
        out
    }

    /// The dissipative diagonal alone, kappa Upsilon psi.
    pub fn apply_diss_part(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        if self.kappa == 0.0 {
            return vec![Complex64::new(0.0, 0.0); coeffs.len()];
        }
        coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * self.ups_diag[m])
            .collect()
    }

    /// CFL time step for the active band.
    pub fn cfl_dt(&self, k_max_active: f64) -> f64 {
        let l0 = self.lambda0 as f64;
        self.cfl_safety / (l0 * self.gamma.value(l0, k_max_active))
    }

    /// Classical RK4 step of d_t psi = -P(t, psi); the dissipative diagonal is
    /// split off exactly (Strang) when kappa > 0.
    pub fn step(&self, t: f64, dt: f64, coeffs: &mut Vec<Complex64>) {
        let n = self.n;
        if self.kappa > 0.0 {
            for (m, c) in coeffs.iter_mut().enumerate() {
                *c *= (-0.5 * dt * self.ups_diag[m]).exp();
            }
        }
        let k1 = self.apply_l(t, coeffs);
        let mut y = coeffs.clone();
        axpy(&mut y, -0.5 * dt, &k1);
        let k2 = self.apply_l(t + 0.5 * dt, &y);
        y.copy_from_slice(coeffs);
        axpy(&mut y, -0.5 * dt, &k2);
        let k3 = self.apply_l(t + 0.5 * dt, &y);
        y.copy_from_slice(coeffs);
        axpy(&mut y, -dt, &k3);
        let k4 = self.apply_l(t + dt, &y);
        for m in 0..n {
            coeffs[m] -= dt / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        }
        if self.kappa > 0.0 {
            for (m, c) in coeffs.iter_mut().enumerate() {
                *c *= (-0.5 * dt * self.ups_diag[m]).exp();
            }
        }
    }

    /// Operator norm of the symmetric commutator combination
    /// [G^{1/2}, m] G^{-1/2} + G^{-1/2} [G^{1/2}, m], m = -i lambda0 (Gamma f)'(t=0, x),
    /// by power iteration (the combination is self-adjoint).
    pub fn commutator_norm_probe(&self, seed: u64, iters: usize) -> f64 {
        let n = self.n;
        let (_, gfp) = self.coeff_fields(0.0);
        let il0 = Complex64::new(0.0, -(self.lambda0 as f64));
        let mult = |coeffs: &[Complex64]| -> Vec<Complex64> {
            let a = self.working_samples(coeffs);
            let prod: Vec<Complex64> = a.iter().zip(&gfp).map(|(x, c)| x * c * il0).collect();
            self.working_coeffs(&fft::to_coeffs(&prod))
        };
        let diag = |coeffs: &[Complex64], d: &[f64]| -> Vec<Complex64> {
            coeffs.iter().enumerate().map(|(m, c)| c * d[m]).collect()
        };
        let comm = |v: &[Complex64]| -> Vec<Complex64> {
            // K v = gamma^{1/2}(m v) - m(gamma^{1/2} v)
            let mut a = mult(v);
            for m in 0..n {
                a[m] *= self.g_half[m];
            }
            let b = mult(&diag(v, &self.g_half));
            for m in 0..n {
                a[m] -= b[m];
            }
            a
        };
        let apply_c = |v: &[Complex64]| -> Vec<Complex64> {
            let mut out = comm(&diag(v, &self.g_ihalf));
            let kv = comm(v);
            for m in 0..n {
                out[m] += self.g_ihalf[m] * kv[m];
            }
            out
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut norm_est = 0.0;
        for _ in 0..iters {
            let w = apply_c(&v);
            let nw = (fft::l2_sq_from_coeffs(&w)).sqrt();
            let nv = (fft::l2_sq_from_coeffs(&v)).sqrt();
            norm_est = nw / nv;
            if nw == 0.0 {
                break;
            }
            v = w;
            let s = 1.0 / nw;
            for c in v.iter_mut() {
                *c *= s;
            }
        }
        norm_est
    }
}

impl LinOp {
    /// Transform an n-band coefficient vector to samples on the working grid.
    fn working_samples(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        if self.pad {
            pad_samples(coeffs)
        } else {
            fft::to_samples(coeffs)
        }
    }

    /// Truncate working-grid coefficients back to the n band.
    fn working_coeffs(&self, big: &[Complex64]) -> Vec<Complex64> {
        if self.pad {
            unpad_coeffs(big, self.n)
        } else {
            big.to_vec()
        }
    }
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Embed an n-band coefficient vector into the 2n layout and transform to samples.
fn pad_samples(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let n2 = 2 * n;
    let mut big = vec![Complex64::new(0.0, 0.0); n2];
    for (m, &c) in coeffs.iter().enumerate() {
        let k = fft::wavenumber(m, n);
        let mm = if k >= 0.0 { k as usize } else { (k + n2 as f64) as usize };
        big[mm] = c;
    }
    fft::to_samples(&big)
}

/// Truncate a 2n coefficient vector back to the n band.
fn unpad_coeffs(big: &[Complex64], n: usize) -> Vec<Complex64> {
    let n2 = big.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (m, o) in out.iter_mut().enumerate() {
        let k = fft::wavenumber(m, n);
        let mm = if k >= 0.0 { k as usize } else { (k + n2 as f64) as usize };
        *o = big[mm];
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyLedger {
    /// 1.5 x probed commutator norm
    pub c_hat: f64,
    /// max of ||psi(t)|| / (||psi0|| exp(c_hat t / 2)) over the run
    pub worst_quotient: f64,
    pub ok: bool,
    pub samples: Vec<(f64, f64)>,
}

pub struct EvolveOutcome {
    pub records: Vec<(f64, SpectralField)>,
    pub ledger: EnergyLedger,
    pub steps: usize,
}

/// Evolve psi0 on [0, t_end], recording the state at the requested times.
/// Enforces the CFL rule, the resolution watchdog, and the Gronwall energy
/// ledger with c_hat = 1.5 x the probed commutator norm.
pub fn evolve(
    op: &LinOp,
    psi0: &SpectralField,
    t_end: f64,
    record_times: &[f64],
    probe_seed: u64,
) -> Result<EvolveOutcome> {
    let c_hat = 1.5 * op.commutator_norm_probe(probe_seed, 40);
    let mut coeffs = psi0.coeffs.clone();
    let l2_0 = fft::l2_sq_from_coeffs(&coeffs).sqrt();
    let mut records = Vec::new();
    let mut ledger_samples = Vec::new();
    let mut worst: f64 = 0.0;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut times: Vec<f64> = record_times.to_vec();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let check = |t: f64, coeffs: &[Complex64], worst: &mut f64| -> Result<f64> {
        let field = SpectralField {
            lambda0: psi0.lambda0,
            coeffs: coeffs.to_vec(),
        };
        let frac = field.top_band_fraction();
        if frac > 1e-8 {
            return Err(Error::Resolution(format!(
                "top-band energy fraction {frac:.2e} at t = {t}"
            )));
        }
        let l2 = field.l2();
        // the Gronwall bound from the energy identity: d/dt ||psi|| <= (C/2)||psi||
        let bound = l2_0 * (0.5 * c_hat * t).exp();
        *worst = worst.max(l2 / bound);
        Ok(l2)
    };

    for &t_rec in &times {
        while t < t_rec - 1e-15 * t_end.max(1.0) {
            let kmax = if steps % 64 == 0 {
                SpectralField {
                    lambda0: psi0.lambda0,
                    coeffs: coeffs.clone(),
                }
                .k_max_active(1e-13)
            } else {
                f64::NAN
            };
            static_dt_cache(&mut coeffs, op, kmax, t_rec - t, &mut t, &mut steps);
            if steps % 128 == 0 {
                let l2 = check(t, &coeffs, &mut worst)?;
                ledger_samples.push((t, l2));
            }
            if steps > 50_000_000 {
                return Err(Error::Integration {
                    what: "step budget exhausted".into(),
                    t,
                });
            }
        }
        let l2 = check(t, &coeffs, &mut worst)?;
        ledger_samples.push((t, l2));
        records.push((
            t,
            SpectralField {
                lambda0: psi0.lambda0,
                coeffs: coeffs.clone(),
            },
        ));
    }
    Ok(EvolveOutcome {
        records,
        ledger: EnergyLedger {
            c_hat,
            worst_quotient: worst,
            ok: worst <= 1.0 + 1e-9,
            samples: ledger_samples,
        },
        steps,
    })
}

// the CFL dt is refreshed every 64 steps; between refreshes the cached value
// is reused (thread-local keyed by nothing: evolve is sequential)
fn static_dt_cache(
    coeffs: &mut Vec<Complex64>,
    op: &LinOp,
    kmax_or_nan: f64,
    remaining: f64,
    t: &mut f64,
    steps: &mut usize,
) {
    use std::cell::Cell;
    thread_local! {
        static DT: Cell<f64> = const { Cell::new(f64::NAN) };
    }
    DT.with(|dt_cell| {
        if kmax_or_nan.is_finite() || dt_cell.get().is_nan() {
            let kmax = if kmax_or_nan.is_finite() { kmax_or_nan } else { 16.0 };
            dt_cell.set(op.cfl_dt(kmax));
        }
        let dt = dt_cell.get().min(remaining);
        op.step(*t, dt, coeffs);
        *t += dt;
        *steps += 1;
    });
}

/// Dense convolution-matrix oracle built from the exact Fourier modes of the
/// coefficient fields; O(n^2), for small n only.
pub fn dense_apply_oracle(
    gamma: &Symbol,
    shear: &ShearProfile,
    lambda0: u32,
    t: f64,
    coeffs: &[Complex64],
) -> Vec<Complex64> {
    let n = coeffs.len();
    let l0 = lambda0 as f64;
    // exact modes of f' and (Gamma f)': fhat'(k) = ik fhat(k) with decay
    let mut fp = std::collections::HashMap::new();
    let mut gfp = std::collections::HashMap::new();
    if let ModeView::Modes(modes) = shear.form_view() {
        for (k, ck) in modes.iter().enumerate() {
            if k == 0 || ck.norm_sqr() == 0.0 {
                continue;
            }
            let decay = if shear.is_steady() {
                1.0
            } else {
                (-shear.kappa * shear.upsilon.as_ref().unwrap().value(0.0, k as f64) * t).exp()
            };
            let ik = Complex64::new(0.0, k as f64);
            let gk = gamma.value(0.0, k as f64);
            fp.insert(k as i64, ck * ik * decay);
            fp.insert(-(k as i64), (ck * ik * decay).conj());
            gfp.insert(k as i64, ck * ik * decay * gk);
            gfp.insert(-(k as i64), (ck * ik * decay * gk).conj());
        }
    }
    let wave = |m: usize| fft::wavenumber(m, n) as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    let il0 = Complex64::new(0.0, l0);
    for mo in 0..n {
        let k = wave(mo);
        let gk_half = gamma.value(l0, k as f64).sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for mi in 0..n {
            let kp = wave(mi);
            let diff = k - kp;
            let gkp = gamma.value(l0, kp as f64);
            let mut w = Complex64::new(0.0, 0.0);
            if let Some(c) = fp.get(&diff) {
                w += c * gkp.sqrt();
            }
            if let Some(c) = gfp.get(&diff) {
                w -= c / gkp.sqrt();
            }
            acc += w * coeffs[mi];
        }
        out[mo] = il0 * gk_half * acc;
    }
    out
}

/// Full 2D application of the conjugated operator on an n1 x n2 grid
/// (row-major, index i1 * n2 + i2); used as a coarse cross-check that the
/// x1-modes are exactly preserved and agree with the reduced operator.
pub fn apply_l_2d(
    gamma: &Symbol,
    shear: &ShearProfile,
    t: f64,
    n1: usize,
    n2: usize,
    phi: &[Complex64],
) -> Vec<Complex64> {
    assert_eq!(phi.len(), n1 * n2);
    let fft2 = |data: &[Complex64], inverse: bool| -> Vec<Complex64> {
        // rows (x2) then columns (x1)
        let mut rows: Vec<Complex64> = Vec::with_capacity(n1 * n2);
        for i1 in 0..n1 {
            let row = &data[i1 * n2..(i1 + 1) * n2];
            let tr = if inverse {
                fft::to_samples(row)
            } else {
                fft::to_coeffs(row)
            };
            rows.extend(tr);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n1 * n2];
        let mut col = vec![Complex64::new(0.0, 0.0); n1];
        for i2 in 0..n2 {
            for i1 in 0..n1 {
                col[i1] = rows[i1 * n2 + i2];
            }
            let tr = if inverse {
                fft::to_samples(&col)
            } else {
                fft::to_coeffs(&col)
            };
            for i1 in 0..n1 {
                out[i1 * n2 + i2] = tr[i1];
            }
        }
        out
    };
    let mult = |data: &[Complex64], f: &dyn Fn(f64, f64) -> f64| -> Vec<Complex64> {
        let c = fft2(data, false);
        let mut out = c;
        for i1 in 0..n1 {
            let k1 = fft::wavenumber(i1, n1);
            for i2 in 0..n2 {
                let k2 = fft::wavenumber(i2, n2);
                out[i1 * n2 + i2] *= f(k1, k2);
            }
        }
        fft2(&out, true)
    };
    let g_half = |k1: f64, k2: f64| gamma.value(k1, k2).sqrt();
    let g_ihalf = |k1: f64, k2: f64| 1.0 / gamma.value(k1, k2).sqrt();
    let dx1 = |data: &[Complex64]| -> Vec<Complex64> {
        let c = fft2(data, false);
        let mut out = c;
        for i1 in 0..n1 {
            let k1 = fft::wavenumber(i1, n1);
            for i2 in 0..n2 {
                out[i1 * n2 + i2] *= Complex64::new(0.0, k1);
            }
        }
        fft2(&out, true)
    };
    // physical coefficient profiles along x2
    let grid2 = fft::grid(n2);
    let fp: Vec<f64> = grid2
        .iter()
        .map(|&x| shear.eval_derivative(t, 1, x).unwrap())
        .collect();
    let gfp: Vec<f64> = grid2
        .iter()
        .map(|&x| shear.eval_multiplier_image(gamma, t, 1, x).unwrap())
        .collect();

    // L phi = G^{1/2}( f' dx1 G^{1/2} phi ) - G^{1/2}( (Gf)' dx1 G^{-1/2} phi )
    let a = dx1(&mult(phi, &g_half));
    let b = dx1(&mult(phi, &g_ihalf));
    let mut combined = vec![Complex64::new(0.0, 0.0); n1 * n2];
    for i1 in 0..n1 {
        for i2 in 0..n2 {
            let idx = i1 * n2 + i2;
            combined[idx] = fp[i2] * a[idx] - gfp[i2] * b[idx];
        }
    }
    mult(&combined, &g_half)
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub lambda0: u32,
    pub times: Vec<f64>,
    /// || d_t phi + P phi ||_{L2} (2D normalization) per time
    pub residual: Vec<f64>,
    /// additional dissipative forcing || kappa Upsilon phi || per time
    pub diss_extra: Vec<f64>,
    /// residual restricted to a unit window around the packet center
    pub localized: Vec<f64>,
    /// trapezoid of `residual` over the times
    pub integral: f64,
    pub integral_with_diss: f64,
    /// max over times of the relative half-step derivative discrepancy
    pub dt_check: f64,
    pub packet_l2_0: f64,
}

/// Measure the residual of the wave packet under the full operator by central
/// differences in time at half-cadence (Richardson-extrapolated) plus the
/// pseudo-spectral application of P.
pub fn residual(
    field: &PhaseField,
    amp: &AmplitudeField<'_>,
    op: &LinOp,
    times: &[f64],
    n: usize,
) -> Result<ResidualReport> {
    let lambda0 = field.lambda0;
    let t_star = field.t_star;
    // the phase rotates at |E| lambda0; resolve it comfortably
    let omega = (field.window.e_const.abs() * lambda0 as f64).max(1.0);
    let delta = (2e-3 / omega).min(0.05 * t_star);
    let packet = |t: f64| -> Result<Vec<Complex64>> {
        Ok(packet_at(field, amp, t, n)?.with_lambda0(lambda0).coeffs())
    };
    let mut residual_series = Vec::new();
    let mut diss_series = Vec::new();
    let mut localized_series = Vec::new();
    let mut dt_check: f64 = 0.0;
    let mut packet_l2_0 = 0.0;
    for (i, &t) in times.iter().enumerate() {
        // clamp the stencil inside [0, t_star]
        let tc = t.clamp(delta, t_star - delta);
        let base = packet(tc)?;
        let d_full = central_dt(&packet, tc, delta)?;
        let d_half = central_dt(&packet, tc, 0.5 * delta)?;
        // Richardson: (4 D_{d/2} - D_d)/3
        let mut ddt: Vec<Complex64> = d_half
            .iter()
            .zip(&d_full)
            .map(|(h, f)| (4.0 * h - f) / 3.0)
            .collect();
        let diff_sq: f64 = d_half
            .iter()
            .zip(&d_full)
            .map(|(h, f)| (h - f).norm_sqr())
            .sum();
        let p = op.apply_l(tc, &base);
        for (m, d) in ddt.iter_mut().enumerate() {
            *d += p[m];
        }
        let r_l2 = std::f64::consts::PI.sqrt() * fft::l2_sq_from_coeffs(&ddt).sqrt();
        let rel_dt = (std::f64::consts::PI * fft::TWO_PI * diff_sq).sqrt() / r_l2.max(1e-300);
        dt_check = dt_check.max(rel_dt);
        if i == 0 {
            packet_l2_0 = std::f64::consts::PI.sqrt() * fft::l2_sq_from_coeffs(&base).sqrt();
        }
        // localized norm: restrict the residual to |x - center| <= 1/2
        let samples = fft::to_samples(&ddt);
        let (sup_lo, sup_hi) = packet_at(field, amp, tc, 16)?.support_image;
        let center = 0.5 * (sup_lo + sup_hi);
        let mut acc = 0.0;
        for (j, s) in samples.iter().enumerate() {
            let x = fft::grid_point(j, n);
            if (x - center).abs() <= 0.5 {
                acc += s.norm_sqr();
            }
        }
        let loc = std::f64::consts::PI.sqrt() * (fft::TWO_PI / n as f64 * acc).sqrt();
        localized_series.push(loc);
        residual_series.push(r_l2);
        diss_series.push(if op.kappa > 0.0 {
            let d = op.apply_diss_part(&base);
            std::f64::consts::PI.sqrt() * fft::l2_sq_from_coeffs(&d).sqrt()
        } else {
            0.0
        });
    }
    if dt_check > 0.10 {
        return Err(Error::Cadence(format!(
            "time-derivative uncertainty {dt_check:.2} exceeds 10% of the residual"
        )));
    }
    let with_diss: Vec<f64> = residual_series
        .iter()
        .zip(&diss_series)
        .map(|(r, d)| r + d)
        .collect();
    Ok(ResidualReport {
        lambda0,
        times: times.to_vec(),
        integral: crate::quad::trapezoid(times, &residual_series),
        integral_with_diss: crate::quad::trapezoid(times, &with_diss),
        residual: residual_series,
        diss_extra: diss_series,
        localized: localized_series,
        dt_check,
        packet_l2_0,
    })
}

fn central_dt<F: Fn(f64) -> Result<Vec<Complex64>>>(
    packet: &F,
    t: f64,
    d: f64,
) -> Result<Vec<Complex64>> {
    let plus = packet(t + d)?;
    let minus = packet(t - d)?;
    Ok(plus
        .iter()
        .zip(&minus)
        .map(|(p, m)| (p - m) / (2.0 * d))
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub lambda0: u32,
    pub m_factor: f64,
    pub s: f64,
    pub s_prime: f64,
    pub t_star: f64,
    /// (t, <psi, packet>, ||psi||_2d, ||packet||_2d)
    pub pairing_series: Vec<(f64, f64, f64, f64)>,
    pub pairing_final: f64,
    pub pairing_lower_bound: f64,
    /// ||small part(t*)||_2d, the correction in the pairing argument
    pub small_correction: f64,
    /// <psi, main>(t*) / ||Gamma^{1/2} main||_{H^{-s'}}: a lower bound for
    /// ||Gamma^{-1/2} psi(t*)||_{H^{s'}}
    pub hs_lower_bound: f64,
    /// hs_lower_bound / ||Gamma^{-1/2} psi0||_{H^{s'}}
    pub duality_growth_ratio: f64,
    /// sup_t ||Gamma^{-1/2} psi(t)||_{H^{s'}} / ||Gamma^{-1/2} psi0||_{H^{s'}}
    pub direct_growth_ratio: f64,
    /// M^{s'} (gamma(l0,l0)/gamma(l0,M l0))^{1/2}
    pub predicted_growth: f64,
    /// lambda0^{s'-s} prefactor separating the two-exponent statement
    pub lambda0_shift: f64,
    pub ledger: EnergyLedger,
}

/// Duality experiment: evolve the packet's initial data with the true flow,
/// pair against the packet, and extract the H^{s'} growth lower bound.
/// `extend_factor >= 1` prolongs the evolution beyond t_star for the direct
/// norm measurement (the pairing needs the packet and stops at t_star).
#[allow(clippy::too_many_arguments)]
pub fn duality_experiment(
    plan: &GrowthPlan,
    field: &PhaseField,
    amp: &AmplitudeField<'_>,
    op: &LinOp,
    s: f64,
    s_prime: f64,
    n: usize,
    samples: usize,
    probe_seed: u64,
    extend_factor: f64,
) -> Result<DualityReport> {
    let lambda0 = field.lambda0;
    let gamma = &op.gamma;
    let t_star = field.t_star;
    let extend = extend_factor.max(1.0);
    let total = (samples as f64 * extend).ceil() as usize;
    let times: Vec<f64> = (0..=total)
        .map(|i| t_star * extend * i as f64 / total as f64)
        .collect();
    let wp0 = packet_at(field, amp, 0.0, n)?.with_lambda0(lambda0);
    let psi0 = SpectralField::from_packet(&wp0);
    let phi0_hs = weighted_norm_coeffs(lambda0, &psi0.coeffs, s_prime, -0.5, gamma);

    let outcome = evolve(op, &psi0, t_star * extend, &times, probe_seed)?;
    let mut pairing_series = Vec::new();
    let mut direct_sup: f64 = 1.0;
    let mut last_paired = 0usize;
    for (i, (t, state)) in outcome.records.iter().enumerate() {
        if *t <= t_star * (1.0 + 1e-12) {
            let wp = packet_at(field, amp, *t, n)?.with_lambda0(lambda0);
            let pk = wp.coeffs();
            let pairing = pairing_2d(&state.coeffs, &pk);
            pairing_series.push((
                *t,
                pairing,
                state.l2_2d(),
                std::f64::consts::PI.sqrt() * fft::l2_sq_from_coeffs(&pk).sqrt(),
            ));
            last_paired = i;
        }
        let hs = weighted_norm_coeffs(lambda0, &state.coeffs, s_prime, -0.5, gamma);
        direct_sup = direct_sup.max(hs / phi0_hs);
    }
    let (tf, last) = &outcome.records[last_paired];
    let wp_final = packet_at(field, amp, *tf, n)?.with_lambda0(lambda0);
    let (main, small) = wp_final.decompose()?;
    let pairing_main = pairing_2d(&last.coeffs, &fft::to_coeffs(&main.psi));
    let denom = main.weighted_norm(-s_prime, 0.5, gamma);
    let hs_lower = pairing_main / denom;
    let l0 = lambda0 as f64;
    let predicted = plan.m_factor.powf(s_prime)
        * (gamma.value(l0, l0) / gamma.value(l0, plan.m_factor * l0)).sqrt();
    Ok(DualityReport {
        lambda0,
        m_factor: plan.m_factor,
        s,
        s_prime,
        t_star,
        pairing_final: pairing_series.last().unwrap().1,
        pairing_lower_bound: 0.25 * psi0.l2_2d() * wp0.l2_2d(),
        small_correction: std::f64::consts::PI.sqrt()
            * fft::l2_sq_from_coeffs(&fft::to_coeffs(&small.psi)).sqrt(),
        hs_lower_bound: hs_lower,
        duality_growth_ratio: hs_lower / phi0_hs,
        direct_growth_ratio: direct_sup,
        predicted_growth: predicted,
        lambda0_shift: l0.powf(s_prime - s),
        pairing_series,
        ledger: outcome.ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::{check_conditions, AsymptoticParameters};
    use crate::phase::{build_phase_field, Window};
    use approx::assert_relative_eq;

    fn random_band_field(n: usize, band: f64, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in coeffs.iter_mut().enumerate() {
            if fft::wavenumber(m, n).abs() <= band {
                *c = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        coeffs
    }

    #[test]
    fn zero_background_gives_zero_operator() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::uniform_slope(0.0);
        let op = LinOp::new(&g, &f, None, 0.0, 64, 256).unwrap();
        let psi = random_band_field(256, 64.0, 7);
        let out = op.apply_l(0.0, &psi);
        let norm: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        assert!(norm < 1e-26);
    }

    #[test]
    fn principal_part_is_skew() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let op = LinOp::new(&g, &f, None, 0.0, 64, 512).unwrap();
        for seed in 0..5u64 {
            let psi = random_band_field(512, 128.0, seed);
            let p1 = op.apply_principal(0.0, &psi);
            let re = pairing_2d(&p1, &psi);
            let bound = 1e-11
                * fft::l2_sq_from_coeffs(&psi).sqrt()
                * fft::l2_sq_from_coeffs(&p1).sqrt()
                * std::f64::consts::PI;
            assert!(re.abs() <= bound.max(1e-18), "Re<P1 psi, psi> = {re}");
        }
    }

    #[test]
    fn matches_dense_convolution_oracle() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let n = 256;
        let op = LinOp::new(&g, &f, None, 0.0, 64, n).unwrap();
        for seed in 0..20u64 {
            let psi = random_band_field(n, 100.0, seed);
            let fast = op.apply_l(0.0, &psi);
            let slow = dense_apply_oracle(&g, &f, 64, 0.0, &psi);
            let scale: f64 = slow.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let err: f64 = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-10 * scale, "seed {seed}: err {err} scale {scale}");
        }
    }

    #[test]
    fn dissipative_parts() {
        let g = Symbol::log(1.0);
        let u = Symbol::power(0.5);
        let fd = ShearProfile::cosine(1)
            .with_dissipation(1.0, u.clone())
            .unwrap();
        let n = 256;
        let op0 = LinOp::new(&g, &fd, Some(&u), 0.0, 64, n).unwrap();
        let op1 = LinOp::new(&g, &fd, Some(&u), 1.0, 64, n).unwrap();
        let psi = random_band_field(n, 90.0, 3);
        // kappa = 0 reduces apply_l_diss to apply_l
        let a = op0.apply_l_diss(0.3, &psi);
        let b = op0.apply_l(0.3, &psi);
        assert_eq!(a, b);
        // single mode: dissipative part acts diagonally
        let mut single = vec![Complex64::new(0.0, 0.0); n];
        single[10] = Complex64::new(1.0, 0.0);
        let d = op1.apply_diss_part(&single);
        let expect = u.value(64.0, 10.0);
        assert_relative_eq!(d[10].re, expect, max_relative = 1e-14);
        assert_eq!(d[11], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn step_matches_diagonal_rotation_oracle() {
        // RK4 on a synthetic diagonal operator p(k): one step approximates
        // e^{-i p(k) dt} to O(dt^5)
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let op = LinOp::new(&g, &f, None, 0.0, 8, 64).unwrap();
        // emulate a diagonal operator by evolving a single mode of the real
        // operator with f' frozen: use the uniform-slope stub instead
        let fu = ShearProfile::uniform_slope(-1.0);
        let opu = LinOp::new(&g, &fu, None, 0.0, 8, 64).unwrap();
        let _ = op;
        let mut psi = vec![Complex64::new(0.0, 0.0); 64];
        psi[5] = Complex64::new(1.0, 0.0);
        // uniform slope: P psi = i lambda0 [f' gamma(k) - gamma(0,0) f'] psi
        let pk = 8.0 * (-1.0) * (g.value(8.0, 5.0) - g.value(0.0, 0.0));
        for &dt in &[1e-3, 5e-4, 2.5e-4] {
            let mut y = psi.clone();
            opu.step(0.0, dt, &mut y);
            let exact = psi[5] * Complex64::from_polar(1.0, -pk * dt);
            let err = (y[5] - exact).norm();
            // O(dt^5): phase error (pk dt)^5 / 120
            let bound = (pk * dt).abs().powi(5) / 120.0 * 1.5 + 1e-15;
            assert!(err <= bound, "dt = {dt}: err {err} vs bound {bound}");
        }
    }

    #[test]
    fn commutator_probe_stable_across_resolution() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let op_a = LinOp::new(&g, &f, None, 0.0, 64, 1 << 12).unwrap();
        let op_b = LinOp::new(&g, &f, None, 0.0, 64, 1 << 14).unwrap();
        let na = op_a.commutator_norm_probe(11, 60);
        let nb = op_b.commutator_norm_probe(11, 60);
        assert!(
            (na - nb).abs() <= 0.10 * na.max(nb),
            "norms {na} vs {nb} differ by more than 10%"
        );
        assert!(na > 0.0);
    }

    #[test]
    fn commutator_probe_sublinear_in_lambda0() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let mut norms = Vec::new();
        for l0 in [32u32, 64, 128] {
            let op = LinOp::new(&g, &f, None, 0.0, l0, 1 << 12).unwrap();
            norms.push(op.commutator_norm_probe(5, 60));
        }
        // boundedness proxy: growth from one lambda0 to the next stays well
        // below the linear factor 2
        assert!(norms[1] / norms[0] < 1.6, "{norms:?}");
        assert!(norms[2] / norms[1] < 1.6, "{norms:?}");
    }

    #[test]
    fn zero_shear_probe_vanishes() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::uniform_slope(0.0);
        let op = LinOp::new(&g, &f, None, 0.0, 64, 512).unwrap();
        assert!(op.commutator_norm_probe(1, 30) < 1e-12);
    }

    #[test]
    fn mode_invariance_2d_cross_check() {
        // the 2D operator maps e^{i lambda0 x1} psi(x2) to e^{i lambda0 x1}
        // times the reduced application, leaving other x1-modes at round-off
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let lambda0 = 3u32;
        let (n1, n2) = (16usize, 128usize);
        let psi = random_band_field(n2, 30.0, 9);
        let psi_x = fft::to_samples(&psi);
        let mut phi = vec![Complex64::new(0.0, 0.0); n1 * n2];
        for i1 in 0..n1 {
            let x1 = fft::grid_point(i1, n1);
            let e = Complex64::from_polar(1.0, lambda0 as f64 * x1);
            for i2 in 0..n2 {
                phi[i1 * n2 + i2] = e * psi_x[i2];
            }
        }
        let out2d = apply_l_2d(&g, &f, 0.0, n1, n2, &phi);
        let op = LinOp::new(&g, &f, None, 0.0, lambda0, n2).unwrap();
        let reduced = fft::to_samples(&op.apply_l(0.0, &psi));
        let mut worst_other = 0.0f64;
        let mut worst_match = 0.0f64;
        let scale = reduced.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // project out2d onto x1-modes
        for i2 in 0..n2 {
            let mut col = vec![Complex64::new(0.0, 0.0); n1];
            for i1 in 0..n1 {
                col[i1] = out2d[i1 * n2 + i2];
            }
            let modes = fft::to_coeffs(&col);
            for (m1, c) in modes.iter().enumerate() {
                let k1 = fft::wavenumber(m1, n1);
                if (k1 - lambda0 as f64).abs() < 0.5 {
                    worst_match = worst_match.max((c - reduced[i2]).norm());
                } else {
                    worst_other = worst_other.max(c.norm());
                }
            }
        }
        assert!(worst_other <= 1e-11 * scale, "other modes at {worst_other}");
        assert!(worst_match <= 1e-10 * scale, "reduced mismatch {worst_match}");
    }

    #[test]
    fn energy_ledger_holds_on_a_short_run() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let params = AsymptoticParameters::default().validated().unwrap();
        let plan = check_conditions(&g, None, &f, &params, 32, 4.0).unwrap();
        let w = Window::desk(&g, &f, 32, 0.7, 1.2).unwrap();
        let field = build_phase_field(&g, &f, &plan, &params, w, 129, false).unwrap();
        let amp = crate::amplitude::evolve_amplitude(&field);
        let n = 4096;
        let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(32);
        let psi0 = SpectralField::from_packet(&wp0);
        let op = LinOp::new(&g, &f, None, 0.0, 32, n).unwrap();
        let t_end = 0.3 * field.t_star;
        let out = evolve(&op, &psi0, t_end, &[0.5 * t_end, t_end], 17).unwrap();
        assert!(out.ledger.ok, "ledger violated: {:?}", out.ledger.worst_quotient);
        assert!(out.steps > 10);
        // the flow is nearly unitary on this horizon
        let l2_end = out.records.last().unwrap().1.l2_2d();
        assert_relative_eq!(l2_end, psi0.l2_2d(), max_relative = 0.05);
    }
}
