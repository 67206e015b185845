//! Background shear states f(t, x2) on the 2*pi circle: cosine series with an
//! optional dissipative decay law, their x2-derivatives, multiplier images
//! Gamma f^(n), time derivatives of both, and the reparametrized time t_f.

use crate::error::{Error, Result};
use crate::quad;
use crate::roots;
use crate::symbols::Symbol;
use num_complex::Complex64;

pub const MAX_X2_DERIVATIVE: u32 = 6;
pub const MAX_IMAGE_DERIVATIVE: u32 = 4;

#[derive(Clone, Debug)]
enum Form {
    /// Fourier modes c_k for k >= 0 of a real field: f = c_0 + sum 2 Re(c_k e^{ikx}).
    Modes(Vec<Complex64>),
    /// Test stub with f' = c constant and all higher derivatives zero.
    UniformSlope(f64),
}

/// Borrowed view of the profile's representation.
pub enum ModeView<'a> {
    Modes(&'a [Complex64]),
    Uniform(f64),
}

/// A shear profile with quadratic degeneracy at x2 = 0.
#[derive(Clone, Debug)]
pub struct ShearProfile {
    form: Form,
    /// dissipation strength; 0 = steady
    pub kappa: f64,
    /// dissipation multiplier (unused when kappa = 0)
    pub upsilon: Option<Symbol>,
    spec: String,
}

impl ShearProfile {
    /// f0(x2) = cos(k x2).
    pub fn cosine(k: u32) -> ShearProfile {
        let mut modes = vec![Complex64::new(0.0, 0.0); k as usize + 1];
        modes[k as usize] = Complex64::new(0.5, 0.0);
        ShearProfile {
            form: Form::Modes(modes),
            kappa: 0.0,
            upsilon: None,
            spec: format!("cos:{k}"),
        }
    }

    /// Arbitrary modes c_k, k >= 0 (c_0 must be real).
    pub fn from_modes(modes: Vec<Complex64>) -> Result<ShearProfile> {
        if modes.is_empty() || modes[0].im.abs() > 1e-14 * modes[0].re.abs().max(1.0) {
            return Err(Error::Parameter("mode 0 of a real field must be real".into()));
        }
        Ok(ShearProfile {
            form: Form::Modes(modes),
            kappa: 0.0,
            upsilon: None,
            spec: "coeffs".into(),
        })
    }

    /// Test stub: f'(t, x2) = c for all t, f'' = 0.
    pub fn uniform_slope(c: f64) -> ShearProfile {
        ShearProfile {
            form: Form::UniformSlope(c),
            kappa: 0.0,
            upsilon: None,
            spec: format!("uniform:{c}"),
        }
    }

    /// Attach the dissipative evolution law (d_t + kappa Upsilon) f = 0.
    /// Requires an even profile (real coefficients) so the degeneracy stays put.
    pub fn with_dissipation(mut self, kappa: f64, upsilon: Symbol) -> Result<ShearProfile> {
        if kappa < 0.0 {
            return Err(Error::Parameter("kappa must be nonnegative".into()));
        }
        if kappa > 0.0 {
            if let Form::Modes(modes) = &self.form {
                for (k, c) in modes.iter().enumerate() {
                    if c.im.abs() > 1e-14 * c.norm().max(1.0) {
                        return Err(Error::Parameter(format!(
                            "dissipative profile must be even (mode {k} not real)"
                        )));
                    }
                }
            }
        }
        self.kappa = kappa;
        self.upsilon = Some(upsilon);
        Ok(self)
    }

    /// Parse `cos:1` or `coeffs:<path>` (CSV rows `k,re,im`).
    pub fn parse(s: &str) -> Result<ShearProfile> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("shear spec `{s}` missing `:`")))?;
        match kind {
            "cos" => {
                let k: u32 = arg
                    .parse()
                    .map_err(|_| Error::Config(format!("bad mode number `{arg}`")))?;
                Ok(ShearProfile::cosine(k))
            }
            "uniform" => {
                let c: f64 = arg
                    .parse()
                    .map_err(|_| Error::Config(format!("bad slope `{arg}`")))?;
                Ok(ShearProfile::uniform_slope(c))
            }
            "coeffs" => {
                let text = std::fs::read_to_string(arg)?;
                let mut modes: Vec<Complex64> = Vec::new();
                for line in text.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    let parts: Vec<&str> = line.split(',').map(|p| p.trim()).collect();
                    if parts.len() != 3 {
                        return Err(Error::Config(format!("bad coeff row `{line}`")));
                    }
                    let k: usize = parts[0]
                        .parse()
                        .map_err(|_| Error::Config(format!("bad wavenumber `{}`", parts[0])))?;
                    let re: f64 = parts[1]
                        .parse()
                        .map_err(|_| Error::Config(format!("bad real part `{}`", parts[1])))?;
                    let im: f64 = parts[2]
                        .parse()
                        .map_err(|_| Error::Config(format!("bad imag part `{}`", parts[2])))?;
                    if modes.len() <= k {
                        modes.resize(k + 1, Complex64::new(0.0, 0.0));
                    }
                    modes[k] = Complex64::new(re, im);
                }
                ShearProfile::from_modes(modes)
            }
            other => Err(Error::Config(format!("unknown shear kind `{other}`"))),
        }
    }

    pub fn spec_string(&self) -> &str {
        &self.spec
    }

    pub fn is_steady(&self) -> bool {
        self.kappa == 0.0
    }

    /// Structural view of the profile for operator assembly.
    pub fn form_view(&self) -> ModeView<'_> {
        match &self.form {
            Form::Modes(m) => ModeView::Modes(m),
            Form::UniformSlope(c) => ModeView::Uniform(*c),
        }
    }

    /// Per-mode decay factor exp(-kappa upsilon(0,k) t).
    fn decay(&self, k: usize, t: f64) -> f64 {
        if self.kappa == 0.0 {
            return 1.0;
        }
        let ups = self
            .upsilon
            .as_ref()
            .expect("kappa > 0 requires an upsilon symbol");
        (-self.kappa * ups.value(0.0, k as f64) * t).exp()
    }

    /// Per-mode time-derivative factor -kappa upsilon(0,k).
    fn decay_rate(&self, k: usize) -> f64 {
        if self.kappa == 0.0 {
            return 0.0;
        }
        let ups = self.upsilon.as_ref().unwrap();
        -self.kappa * ups.value(0.0, k as f64)
    }

    fn mode_sum<W: Fn(usize) -> f64>(&self, t: f64, n: u32, x2: f64, weight: W) -> f64 {
        match &self.form {
            Form::UniformSlope(c) => match n {
                0 => weight(0) * c * x2, // formal antiderivative; only n >= 1 is meaningful
                1 => weight(0) * c,
                _ => 0.0,
            },
            Form::Modes(modes) => {
                let mut acc = 0.0;
                if n == 0 {
                    acc += weight(0) * modes[0].re * self.decay(0, t);
                }
                for (k, c) in modes.iter().enumerate().skip(1) {
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    let ik_n = Complex64::new(0.0, k as f64).powu(n);
                    let e = Complex64::from_polar(1.0, k as f64 * x2);
                    acc += 2.0 * (c * ik_n * e).re * self.decay(k, t) * weight(k);
                }
                acc
            }
        }
    }

    /// d^n/dx2^n f(t, x2), n <= 6, from the (decayed) Fourier series.
    pub fn eval_derivative(&self, t: f64, n: u32, x2: f64) -> Result<f64> {
        if n > MAX_X2_DERIVATIVE {
            return Err(Error::Capability(format!(
                "x2-derivative order {n} exceeds {MAX_X2_DERIVATIVE}"
            )));
        }
        Ok(self.mode_sum(t, n, x2, |_| 1.0))
    }

    /// d^n/dx2^n (Gamma f)(t, x2) with Gamma evaluated at (0, k) per mode.
    pub fn eval_multiplier_image(&self, gamma: &Symbol, t: f64, n: u32, x2: f64) -> Result<f64> {
        if n > MAX_IMAGE_DERIVATIVE {
            return Err(Error::Capability(format!(
                "multiplier-image derivative order {n} exceeds {MAX_IMAGE_DERIVATIVE}"
            )));
        }
        Ok(self.mode_sum(t, n, x2, |k| gamma.value(0.0, k as f64)))
    }

    /// d/dt of d^n/dx2^n f: each mode picks up -kappa upsilon(0,k).
    pub fn eval_derivative_dt(&self, t: f64, n: u32, x2: f64) -> Result<f64> {
        if n > MAX_X2_DERIVATIVE {
            return Err(Error::Capability(format!("order {n} exceeds cap")));
        }
        Ok(self.mode_sum(t, n, x2, |k| self.decay_rate(k)))
    }

    /// d/dt of d^n/dx2^n (Gamma f).
    pub fn eval_multiplier_image_dt(
        &self,
        gamma: &Symbol,
        t: f64,
        n: u32,
        x2: f64,
    ) -> Result<f64> {
        if n > MAX_IMAGE_DERIVATIVE {
            return Err(Error::Capability(format!("order {n} exceeds cap")));
        }
        Ok(self.mode_sum(t, n, x2, |k| self.decay_rate(k) * gamma.value(0.0, k as f64)))
    }

    /// Curvature at the degenerate point, f''(t, 0).
    pub fn curvature_at_origin(&self, t: f64) -> f64 {
        self.eval_derivative(t, 2, 0.0).unwrap_or(0.0)
    }

    /// Validate the quadratic degeneracy at x2 = 0 and return sign of f''(0,0).
    pub fn degeneracy_sign(&self) -> Result<f64> {
        let fpp = self.curvature_at_origin(0.0);
        if fpp == 0.0 || !fpp.is_finite() {
            return Err(Error::Parameter(
                "profile is not quadratically degenerate at x2 = 0 (f''(0,0) = 0)".into(),
            ));
        }
        let fp = self.eval_derivative(0.0, 1, 0.0)?;
        if fp.abs() > 1e-12 * fpp.abs() {
            return Err(Error::Parameter(format!(
                "f'(0,0) = {fp} does not vanish at the degenerate point"
            )));
        }
        Ok(fpp.signum())
    }

    /// Solve int_0^t |f''(t',0)| dt' = tau for t (relative tolerance 1e-10).
    /// The steady case reduces to tau / |f''(0)|.
    pub fn tf_of_tau(&self, tau: f64) -> Result<f64> {
        if tau < 0.0 {
            return Err(Error::Parameter("tau must be nonnegative".into()));
        }
        if tau == 0.0 {
            return Ok(0.0);
        }
        let g0 = self.curvature_at_origin(0.0).abs();
        if g0 == 0.0 {
            return Err(Error::Parameter("f''(0,0) = 0".into()));
        }
        if self.is_steady() {
            return Ok(tau / g0);
        }
        let g = |t: f64| self.curvature_at_origin(t).abs();
        let cum = |t: f64| quad::adaptive_simpson(&g, 0.0, t, 1e-12, 1e-300);
        // expand until the target integral is bracketed; give up once the
        // integrand has decayed to numerical zero
        let mut hi = tau / g0;
        let mut hits = 0;
        loop {
            if cum(hi) >= tau {
                break;
            }
            if g(hi) < 1e-13 * g0 {
                return Err(Error::Horizon {
                    what: format!("tau = {tau} unreachable before f'' decays away"),
                    t: hi,
                });
            }
            hi *= 2.0;
            hits += 1;
            if hits > 200 {
                return Err(Error::Horizon {
                    what: format!("tau = {tau} unreachable"),
                    t: hi,
                });
            }
        }
        roots::bisect_newton(&|t| cum(t) - tau, &g, 0.0, hi, 1e-12, 6)
    }
}
