//! Amplitude transport along the characteristic fan. The advection term is
//! absorbed by riding the rays, so each ray carries the closed-form initial
//! profile times the accumulated zeroth-order factor exp(-amp_log); support
//! in the launch coordinate is preserved exactly.

use crate::error::{Error, Result};
use crate::interp::CubicHermite;
use crate::phase::{bump, PhaseField, Window};
use crate::quad;
use std::sync::OnceLock;

/// L2 norm of the bump profile on (0,1); the initial amplitude is divided by
/// it so that ||a0||_{L2} = 1 exactly.
fn bump_l2() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    // absolute floor matters: the bump's flat tails stall a purely relative
    // tolerance
    *NORM.get_or_init(|| {
        quad::adaptive_simpson(&|u: f64| bump(u) * bump(u), 0.0, 1.0, 1e-13, 1e-16).sqrt()
    })
}

/// Normalized initial amplitude on the inner window (x0', x1'):
/// a0(x) = (x1'-x0')^{-1/2} chi((x - x0')/(x1'-x0')) with ||a0||_{L2} = 1.
#[derive(Clone, Debug)]
pub struct InitialAmplitude {
    pub x0p: f64,
    pub x1p: f64,
}

impl InitialAmplitude {
    pub fn new(window: &Window) -> InitialAmplitude {
        InitialAmplitude {
            x0p: window.x0_prime(),
            x1p: window.x1_prime(),
        }
    }

    pub fn width(&self) -> f64 {
        self.x1p - self.x0p
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = self.width();
        let v = (x - self.x0p) / w;
        bump(v) / (bump_l2() * w.sqrt())
    }
}

/// Amplitude along the fan: values a(t, X(t; xbar)) per ray plus the
/// accumulated zeroth-order exponents, resampled to grids on demand.
pub struct AmplitudeField<'a> {
    pub field: &'a PhaseField,
    pub a0: InitialAmplitude,
}

/// Build the amplitude field for a phase fan (the per-ray transport exponents
/// were integrated together with the rays).
pub fn evolve_amplitude(field: &PhaseField) -> AmplitudeField<'_> {
    AmplitudeField {
        a0: InitialAmplitude::new(&field.window),
        field,
    }
}

impl AmplitudeField<'_> {
    /// Per-ray (position, value) samples at time t.
    pub fn ray_values(&self, t: f64) -> Vec<(f64, f64)> {
        self.field
            .rays
            .iter()
            .map(|r| {
                let s = r.state_at(&self.field.psym, t);
                (s.x, self.a0.eval(r.x_launch) * (-s.amp_log).exp())
            })
            .collect()
    }

    /// Resample a(t, .) to an arbitrary grid. The launch coordinate is
    /// recovered by inverting the ray map, the initial profile is evaluated in
    /// closed form there, and only the transport exponent is interpolated, so
    /// the support is exactly the image of (x0', x1').
    pub fn on_grid(&self, t: f64, grid: &[f64]) -> Result<Vec<f64>> {
        let states = self.field.ray_states(t);
        let xs: Vec<f64> = states.iter().map(|s| s.x).collect();
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::FocalPoint(t));
        }
        let launches: Vec<f64> = self.field.rays.iter().map(|r| r.x_launch).collect();
        let logs: Vec<f64> = states.iter().map(|s| s.amp_log).collect();
        let launch_of_x = CubicHermite::pchip(xs.clone(), launches.clone());
        let log_of_launch = CubicHermite::pchip(launches.clone(), logs);
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        Ok(grid
            .iter()
            .map(|&x| {
                if x <= lo || x >= hi {
                    return 0.0;
                }
                let xbar = launch_of_x.eval(x);
                if xbar <= self.a0.x0p || xbar >= self.a0.x1p {
                    return 0.0;
                }
                self.a0.eval(xbar) * (-log_of_launch.eval(xbar)).exp()
            })
            .collect())
    }

    /// ||a(t)||_{L2} by trapezoid over the fan (the ray-map Jacobian enters
    /// through the nonuniform spacing of the ray positions).
    pub fn l2_norm(&self, t: f64) -> f64 {
        let vals = self.ray_values(t);
        let xs: Vec<f64> = vals.iter().map(|v| v.0).collect();
        let ys: Vec<f64> = vals.iter().map(|v| v.1 * v.1).collect();
        quad::trapezoid(&xs, &ys).sqrt()
    }

    /// Time series of the L2 norm on a uniform t-grid.
    pub fn l2_budget(&self, samples: usize) -> Vec<(f64, f64)> {
        (0..=samples)
            .map(|i| {
                let t = self.field.t_star * i as f64 / samples as f64;
                (t, self.l2_norm(t))
            })
            .collect()
    }

    /// The Gronwall budget int_0^t max_ray |H| dt' with
    /// H = -(1/2) Gamma f'' (gamma'/gamma)(Xi) lambda0, the non-conservative
    /// part of the transport operator.
    pub fn gronwall_budget(&self, t: f64, samples: usize) -> f64 {
        let f = &self.field.psym;
        let l0 = f.lambda0;
        let ts: Vec<f64> = (0..=samples).map(|i| t * i as f64 / samples as f64).collect();
        let maxima: Vec<f64> = ts
            .iter()
            .map(|&tt| {
                self.field
                    .rays
                    .iter()
                    .map(|r| {
                        let s = r.state_at(f, tt);
                        let gf2 = f
                            .shear
                            .eval_multiplier_image(&f.gamma, tt, 2, s.x)
                            .unwrap();
                        let g0 = f.gamma.value(l0, s.xi);
                        let g1 = f.gamma.eval_partial(0, 1, l0, s.xi).unwrap();
                        (0.5 * gf2 * (g1 / g0) * l0).abs()
                    })
                    .fold(0.0f64, f64::max)
            })
            .collect();
        quad::trapezoid(&ts, &maxima)
    }

    /// max |d_x a| at time t by finite differences across the fan.
    pub fn max_dx(&self, t: f64) -> f64 {
        let vals = self.ray_values(t);
        let mut worst = 0.0f64;
        for w in vals.windows(2) {
            let d = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            worst = worst.max(d.abs());
        }
        worst
    }
}
