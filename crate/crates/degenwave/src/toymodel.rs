//! Exact characteristic solver for the Fourier-side toy model: a transport
//! equation in xi with speed lambda0 gamma(Lambda(xi)), an explicit amplitude
//! factor, and (optionally) a dissipative damping factor accumulated along
//! the flow. The model is the cleanest oracle for degeneration and H^s growth.

use crate::error::{Error, Result};
use crate::ode::{self, OdeOpts, OdeStatus};
use crate::quad;
use crate::symbols::Symbol;
use num_complex::Complex64;
use serde::Serialize;

pub const XI_HORIZON: f64 = 1e12;

/// Radial evaluation of a catalog symbol: gamma(Lambda) with Lambda = |xi|.
fn radial(sym: &Symbol, r: f64) -> f64 {
    sym.value(0.0, r)
}

/// One-mode toy state: flowed abscissae, amplitudes and the flow Jacobian.
#[derive(Clone, Debug)]
pub struct ToyState {
    pub t: f64,
    pub lambda0: f64,
    pub xi0_grid: Vec<f64>,
    pub xi_t: Vec<f64>,
    pub values: Vec<Complex64>,
    /// d xi_t / d xi0 = gamma(Lambda(xi_t)) / gamma(Lambda(xi0)), stored for quadrature
    pub jacobian: Vec<f64>,
}

impl ToyState {
    pub fn lambda_of(&self, xi: f64) -> f64 {
        self.lambda0.hypot(xi)
    }

    /// Conserved energy int gamma(Lambda(xi)) |phi|^2 d xi on the flowed grid.
    pub fn energy(&self, gamma: &Symbol) -> f64 {
        let g: Vec<f64> = self
            .xi_t
            .iter()
            .zip(&self.values)
            .map(|(&xi, v)| radial(gamma, self.lambda_of(xi)) * v.norm_sqr())
            .collect();
        quad::trapezoid(&self.xi_t, &g)
    }

    pub fn l2_norm(&self) -> f64 {
        let g: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        quad::trapezoid(&self.xi_t, &g).sqrt()
    }

    /// Weighted norm || |xi|^s phi ||_{L^2}.
    pub fn hs_norm(&self, s: f64) -> f64 {
        let g: Vec<f64> = self
            .xi_t
            .iter()
            .zip(&self.values)
            .map(|(&xi, v)| xi.abs().powf(2.0 * s) * v.norm_sqr())
            .collect();
        quad::trapezoid(&self.xi_t, &g).sqrt()
    }

    /// Abscissa of the amplitude peak.
    pub fn peak_xi(&self) -> f64 {
        let mut best = 0usize;
        for (i, v) in self.values.iter().enumerate() {
            if v.norm_sqr() > self.values[best].norm_sqr() {
                best = i;
            }
        }
        self.xi_t[best]
    }
}

/// Flow map xi(t; xi0) of xi' = lambda0 gamma(Lambda(xi)), by adaptive RK.
pub fn flow(gamma: &Symbol, lambda0: f64, xi0: f64, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Parameter("flow time must be nonnegative".into()));
    }
    if t == 0.0 {
        return Ok(xi0);
    }
    let sol = ode::integrate(
        |_t, y, dy| dy[0] = lambda0 * radial(gamma, lambda0.hypot(y[0])),
        0.0,
        &[xi0],
        t,
        &OdeOpts::default(),
        |_, y| y[0].abs() < XI_HORIZON,
    );
    match sol.status {
        OdeStatus::Complete => Ok(sol.sample(t)[0]),
        OdeStatus::Truncated { t, .. } => Err(Error::Horizon {
            what: format!("toy flow exceeded |xi| = {XI_HORIZON}"),
            t,
        }),
        OdeStatus::Failed { t, .. } => Err(Error::Integration {
            what: "toy flow".into(),
            t,
        }),
    }
}

/// Time for the flow started at xi0 to reach xi_target (exact quadrature).
pub fn time_to_reach(gamma: &Symbol, lambda0: f64, xi0: f64, xi_target: f64) -> f64 {
    quad::adaptive_simpson(
        &|xi: f64| 1.0 / (lambda0 * radial(gamma, lambda0.hypot(xi))),
        xi0,
        xi_target,
        1e-11,
        1e-300,
    )
}

/// Default initial data: Gaussian bump of width lambda0/20 centered at lambda0.
pub fn gaussian_data(lambda0: f64, n: usize) -> (Vec<f64>, Vec<Complex64>) {
    let w = lambda0 / 20.0;
    let lo = lambda0 - 8.0 * w;
    let hi = lambda0 + 8.0 * w;
    let grid: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let vals = grid
        .iter()
        .map(|&xi| {
            let z = (xi - lambda0) / w;
            Complex64::new((-0.5 * z * z).exp(), 0.0)
        })
        .collect();
    (grid, vals)
}

/// Characteristic solution of the toy model at time t.
pub fn solve(
    gamma: &Symbol,
    lambda0: f64,
    xi0_grid: &[f64],
    initial: &[Complex64],
    t: f64,
) -> Result<ToyState> {
    solve_dissipative(gamma, None, 0.0, lambda0, xi0_grid, initial, t)
}

/// Dissipative variant: amplitudes additionally carry
/// exp(-kappa lambda0 int_0^t upsilon(Lambda(xi(t'))) dt').
pub fn solve_dissipative(
    gamma: &Symbol,
    upsilon: Option<&Symbol>,
    kappa: f64,
    lambda0: f64,
    xi0_grid: &[f64],
    initial: &[Complex64],
    t: f64,
) -> Result<ToyState> {
    if xi0_grid.len() != initial.len() {
        return Err(Error::Parameter("grid/data length mismatch".into()));
    }
    if initial.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Domain("initial data must be finite".into()));
    }
    if kappa > 0.0 && upsilon.is_none() {
        return Err(Error::Parameter("kappa > 0 needs an upsilon symbol".into()));
    }
    let mut xi_t = Vec::with_capacity(xi0_grid.len());
    let mut values = Vec::with_capacity(xi0_grid.len());
    let mut jac = Vec::with_capacity(xi0_grid.len());
    for (&xi0, &v0) in xi0_grid.iter().zip(initial) {
        let (xit, damp) = if t == 0.0 {
            (xi0, 0.0)
        } else {
            let sol = ode::integrate(
                |_t, y, dy| {
                    dy[0] = lambda0 * radial(gamma, lambda0.hypot(y[0]));
                    dy[1] = match upsilon {
                        Some(u) if kappa > 0.0 => kappa * lambda0 * radial(u, lambda0.hypot(y[0])),
                        _ => 0.0,
                    };
                },
                0.0,
                &[xi0, 0.0],
                t,
                &OdeOpts::default(),
                |_, y| y[0].abs() < XI_HORIZON,
            );
            match sol.status {
                OdeStatus::Complete => {
                    let y = sol.sample(t);
                    (y[0], y[1])
                }
                OdeStatus::Truncated { t, .. } => {
                    return Err(Error::Horizon {
                        what: format!("toy flow exceeded |xi| = {XI_HORIZON}"),
                        t,
                    })
                }
                OdeStatus::Failed { t, .. } => {
                    return Err(Error::Integration {
                        what: "toy flow".into(),
                        t,
                    })
                }
            }
        };
        let g0 = radial(gamma, lambda0.hypot(xi0));
        let gt = radial(gamma, lambda0.hypot(xit));
        xi_t.push(xit);
        values.push(v0 * (g0 / gt) * (-damp).exp());
        jac.push(gt / g0);
    }
    // the flow preserves ordering of abscissae
    if xi_t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::FocalPoint(t));
    }
    Ok(ToyState {
        t,
        lambda0,
        xi0_grid: xi0_grid.to_vec(),
        xi_t,
        values,
        jacobian: jac,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyReportRow {
    pub t: f64,
    pub xi_peak: f64,
    pub l2: f64,
    pub hs: f64,
    pub hsp: f64,
    /// [|xi_peak|^{2s}/gamma(xi_peak)] / [lambda0^{2s}/gamma(lambda0)]
    pub illposedness_ratio: f64,
    /// measured growth ||xi^s phi(t)|| / ||xi^s phi(0)||
    pub hs_growth: f64,
    /// losing exponent s(t) solving the equal-ratio equation (log-type gammas)
    pub losing_exponent: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyReport {
    pub s: f64,
    pub s_prime: f64,
    pub lambda0: f64,
    pub rows: Vec<ToyReportRow>,
    /// least-squares slope of (s - s(t))/t, the loss rate of the exponent
    pub loss_rate: f64,
}

/// Weighted-norm growth report across a sequence of states sharing xi0_grid.
pub fn hs_growth_report(states: &[ToyState], gamma: &Symbol, s: f64, s_prime: f64) -> Result<ToyReport> {
    let first = states
        .first()
        .ok_or_else(|| Error::Parameter("empty state sequence".into()))?;
    for st in states {
        if st.xi0_grid != first.xi0_grid {
            return Err(Error::Parameter("states do not share the grid".into()));
        }
    }
    let lambda0 = first.lambda0;
    let hs0 = first.hs_norm(s);
    let g_l0 = radial(gamma, lambda0);
    let mut rows = Vec::new();
    let mut num = 0.0;
    let mut den = 0.0;
    for st in states {
        let xi_peak = st.peak_xi();
        let hs = st.hs_norm(s);
        let ratio = (xi_peak.abs() / lambda0).powf(2.0 * s) * g_l0 / radial(gamma, xi_peak.abs());
        // s(t): |xi|^{2 s(t)} / gamma(xi) = lambda0^{2s} / gamma(lambda0)
        let losing = if xi_peak.abs() > lambda0 * (1.0 + 1e-9) {
            (2.0 * s * lambda0.ln() - g_l0.ln() + radial(gamma, xi_peak.abs()).ln())
                / (2.0 * xi_peak.abs().ln())
        } else {
            s
        };
        if st.t > 0.0 {
            num += (s - losing) * st.t;
            den += st.t * st.t;
        }
        rows.push(ToyReportRow {
            t: st.t,
            xi_peak,
            l2: st.l2_norm(),
            hs,
            hsp: st.hs_norm(s_prime),
            illposedness_ratio: ratio,
            hs_growth: hs / hs0,
            losing_exponent: losing,
        });
    }
    Ok(ToyReport {
        s,
        s_prime,
        lambda0,
        rows,
        loss_rate: if den > 0.0 { num / den } else { 0.0 },
    })
}
