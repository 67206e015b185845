//! Hamilton-Jacobi phase construction: the launch window and
//! separation-of-variables initial slope, bicharacteristic fans carrying the
//! renormalized curvature variable h and the integrating factor I, the
//! wave-packet scale mu(t), and the global extension of the phase to a grid.
//!
//! Sign convention: the reduced symbol of the conjugated linearized operator
//! on the lambda0 mode is
//!     p(t, x, xi) = f'(t, x) lambda0 gamma_{lambda0}(xi) - (Gamma f)'(t, x) lambda0,
//! so the bicharacteristics obey Xdot = p_xi, Xidot = -p_x, and the
//! sub-principal transport coefficient is
//!     s(t, x, xi) = (1/2) f'' lambda0 gamma' - (1/2) (Gamma f)'' (gamma'/gamma) lambda0.

use crate::error::{Error, Result};
use crate::growth::{AsymptoticParameters, ComparisonFrequencies, GrowthPlan};
use crate::interp::CubicHermite;
use crate::ode::{self, OdeOpts, OdeSolution, OdeStatus};
use crate::quad;
use crate::shear::ShearProfile;
use crate::symbols::Symbol;

/// Smooth bump profile exp(1 - 1/(1 - (2u-1)^2)) on (0,1), zero outside.
pub fn bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        return 0.0;
    }
    let z = 2.0 * u - 1.0;
    (1.0 - 1.0 / (1.0 - z * z)).exp()
}

/// C-infinity step rising from 0 at u <= 0 to 1 at u >= 1.
pub fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

/// All the p-derivatives needed by the ray and h dynamics at one point.
#[derive(Clone, Copy, Debug)]
pub struct PDerivs {
    pub p: f64,
    pub p_x: f64,
    pub p_xi: f64,
    pub p_xx: f64,
    pub p_xixi: f64,
    pub p_xxi: f64,
    pub p_tx: f64,
    pub p_txi: f64,
    /// sub-principal transport coefficient s(t, x, xi)
    pub s_sub: f64,
}

/// The reduced Hamiltonian p(t, x, xi) for a fixed x1-mode.
#[derive(Clone)]
pub struct PSymbol {
    pub gamma: Symbol,
    pub shear: ShearProfile,
    pub lambda0: f64,
}

impl PSymbol {
    pub fn new(gamma: &Symbol, shear: &ShearProfile, lambda0: u32) -> PSymbol {
        PSymbol {
            gamma: gamma.clone(),
            shear: shear.clone(),
            lambda0: lambda0 as f64,
        }
    }

    pub fn eval(&self, t: f64, x: f64, xi: f64) -> PDerivs {
        let l0 = self.lambda0;
        let f1 = self.shear.eval_derivative(t, 1, x).unwrap();
        let f2 = self.shear.eval_derivative(t, 2, x).unwrap();
        let f3 = self.shear.eval_derivative(t, 3, x).unwrap();
        let gf1 = self.shear.eval_multiplier_image(&self.gamma, t, 1, x).unwrap();
        let gf2 = self.shear.eval_multiplier_image(&self.gamma, t, 2, x).unwrap();
        let gf3 = self.shear.eval_multiplier_image(&self.gamma, t, 3, x).unwrap();
        let (ft1, ft2, gft2) = if self.shear.is_steady() {
            (0.0, 0.0, 0.0)
        } else {
            (
                self.shear.eval_derivative_dt(t, 1, x).unwrap(),
                self.shear.eval_derivative_dt(t, 2, x).unwrap(),
                self.shear
                    .eval_multiplier_image_dt(&self.gamma, t, 2, x)
                    .unwrap(),
            )
        };
        let g0 = self.gamma.value(l0, xi);
        let g1 = self.gamma.eval_partial(0, 1, l0, xi).unwrap();
        let g2 = self.gamma.eval_partial(0, 2, l0, xi).unwrap();
        PDerivs {
            p: f1 * l0 * g0 - gf1 * l0,
            p_x: f2 * l0 * g0 - gf2 * l0,
            p_xi: f1 * l0 * g1,
            p_xx: f3 * l0 * g0 - gf3 * l0,
            p_xixi: f1 * l0 * g2,
            p_xxi: f2 * l0 * g1,
            p_tx: ft2 * l0 * g0 - gft2 * l0,
            p_txi: ft1 * l0 * g1,
            s_sub: 0.5 * f2 * l0 * g1 - 0.5 * gf2 * (g1 / g0) * l0,
        }
    }
}

/// Right-hand side of the h evolution: s - (q + r + s) h + q h^2 with
/// s = -p_txi/p_xi + p_tx/p_x, r = p_xx p_xi/p_x, q = -p_xixi p_x/p_xi.
pub fn h_rhs(
    gamma: &Symbol,
    shear: &ShearProfile,
    lambda0: u32,
    t: f64,
    x: f64,
    xi: f64,
    h: f64,
) -> Result<f64> {
    let d = PSymbol::new(gamma, shear, lambda0).eval(t, x, xi);
    if d.p_x == 0.0 || d.p_xi == 0.0 {
        return Err(Error::Singularity("h dynamics: p_x or p_xi vanished".into()));
    }
    let s = -d.p_txi / d.p_xi + d.p_tx / d.p_x;
    let r = d.p_xx * d.p_xi / d.p_x;
    let q = -d.p_xixi * d.p_x / d.p_xi;
    Ok(s - (q + r + s) * h + q * h * h)
}

/// Launch window (x0, x1) with the separation constant E anchored so the
/// initial slope brackets stay inside [lambda0, (1 + eps_slope) lambda0].
#[derive(Clone, Debug)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    /// separation constant of the steady ansatz Phi = E lambda0 t + G(x)
    pub e_const: f64,
    /// relative slope spread attained on the window
    pub eps_slope: f64,
}

impl Window {
    pub fn x0_prime(&self) -> f64 {
        (2.0 * self.x0 + self.x1) / 3.0
    }
    pub fn x1_prime(&self) -> f64 {
        (self.x0 + 2.0 * self.x1) / 3.0
    }
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x0 + self.x1)
    }
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    /// Cutoff chi_{(x0,x1)}: 1 on [x0', x1'], smooth transitions outside.
    pub fn chi(&self, x: f64) -> f64 {
        if x <= self.x0 || x >= self.x1 {
            0.0
        } else if x < self.x0_prime() {
            smooth_step((x - self.x0) / (self.x0_prime() - self.x0))
        } else if x > self.x1_prime() {
            smooth_step((self.x1 - x) / (self.x1 - self.x1_prime()))
        } else {
            1.0
        }
    }

    /// The paper-scaled window: x0 = c_x0 eps, Delta x0 / x0 from the explicit
    /// gamma-ratio formula, E anchored at slope(x1) = (1 + eps/2) lambda0.
    pub fn asymptotic(
        gamma: &Symbol,
        shear: &ShearProfile,
        lambda0: u32,
        eps: f64,
        c_x0: f64,
    ) -> Result<Window> {
        let l0 = lambda0 as f64;
        let x0 = c_x0 * eps;
        let ratio = gamma.value(l0, (1.0 + 0.75 * eps) * l0) / gamma.value(l0, (1.0 + 0.5 * eps) * l0);
        let dx0 = x0 * 0.1 * (ratio - 1.0);
        if dx0 <= 0.0 {
            return Err(Error::Parameter(
                "gamma-ratio window formula produced a non-positive width".into(),
            ));
        }
        let x1 = x0 + dx0;
        let anchor = (1.0 + 0.5 * eps) * l0;
        Window::with_anchor(gamma, shear, lambda0, x0, x1, anchor, (1.0 + eps) * l0)
    }

    /// Desk-scale window: x1 is prescribed, the anchor sits just above
    /// lambda0, and x0 is solved so the slope tops out at (1 + spread) lambda0.
    /// Wider than the asymptotic recipe; used by the packet experiments where
    /// the uncertainty principle demands width * lambda0 >> 1.
    pub fn desk(
        gamma: &Symbol,
        shear: &ShearProfile,
        lambda0: u32,
        spread: f64,
        x1: f64,
    ) -> Result<Window> {
        let l0 = lambda0 as f64;
        let anchor = (1.0 + spread / 8.0) * l0;
        let top = (1.0 + spread) * l0;
        let e_const = e_for_anchor(gamma, shear, lambda0, x1, anchor)?;
        let rho = |x: f64| rho_of(gamma, shear, lambda0, e_const, x);
        let target = gamma.value(l0, top);
        // rho decreases in x; find where the slope hits the top of the bracket
        let lo_search = 1e-9_f64.max(1e-6 * x1);
        if rho(lo_search)? < target {
            return Err(Error::Parameter(
                "slope never reaches the requested spread; shrink x1 or spread".into(),
            ));
        }
        let f = |x: f64| rho(x).unwrap_or(f64::NAN) - target;
        let x0 = crate::roots::bisect_newton(&|x| -f(x), &|_| f64::NAN, lo_search, x1, 1e-12, 0)?;
        Window::with_anchor(gamma, shear, lambda0, x0 * (1.0 + 1e-9), x1, anchor, top)
    }

    fn with_anchor(
        gamma: &Symbol,
        shear: &ShearProfile,
        lambda0: u32,
        x0: f64,
        x1: f64,
        anchor: f64,
        top: f64,
    ) -> Result<Window> {
        let l0 = lambda0 as f64;
        if !(0.0 < x0 && x0 < x1) {
            return Err(Error::Parameter(format!("bad window ({x0}, {x1})")));
        }
        // f' must be strictly negative on (0, x1]
        for i in 1..=64 {
            let x = x1 * i as f64 / 64.0;
            if shear.eval_derivative(0.0, 1, x)? >= 0.0 {
                return Err(Error::Parameter(format!(
                    "f'(0, {x}) >= 0 inside the window (x1 too large)"
                )));
            }
        }
        let e_const = e_for_anchor(gamma, shear, lambda0, x1, anchor)?;
        let win = Window {
            x0,
            x1,
            e_const,
            eps_slope: top / l0 - 1.0,
        };
        // validate the slope bracket on a dense window grid
        let slope = SlopeFormula::new(gamma, shear, lambda0, &win);
        for i in 0..=256 {
            let x = x0 + (x1 - x0) * i as f64 / 256.0;
            let s = slope.eval(x)?;
            if s < l0 * (1.0 - 1e-9) {
                return Err(Error::Parameter(format!(
                    "initial slope {s} below lambda0 at window endpoint x1 side (x = {x})"
                )));
            }
            if s > top * (1.0 + 1e-6) {
                return Err(Error::Parameter(format!(
                    "initial slope {s} above bracket at window endpoint x0 side (x = {x})"
                )));
            }
        }
        Ok(win)
    }
}

fn e_for_anchor(
    gamma: &Symbol,
    shear: &ShearProfile,
    lambda0: u32,
    x1: f64,
    anchor: f64,
) -> Result<f64> {
    let l0 = lambda0 as f64;
    let f1 = shear.eval_derivative(0.0, 1, x1)?;
    let gf1 = shear.eval_multiplier_image(gamma, 0.0, 1, x1)?;
    Ok(-f1 * gamma.value(l0, anchor) + gf1)
}

fn rho_of(
    gamma: &Symbol,
    shear: &ShearProfile,
    lambda0: u32,
    e_const: f64,
    x: f64,
) -> Result<f64> {
    let _ = lambda0;
    let _ = gamma;
    let f1 = shear.eval_derivative(0.0, 1, x)?;
    let gf1 = shear.eval_multiplier_image(gamma, 0.0, 1, x)?;
    if f1 >= 0.0 {
        return Err(Error::Singularity(format!("f'(0, {x}) >= 0")));
    }
    Ok((e_const - gf1) / (-f1))
}

/// The steady separation-of-variables slope
/// d_x Phi(0, x) = gamma_{lambda0}^{-1}((E - Gamma f'(x)) / (-f'(x))).
pub struct SlopeFormula {
    gamma: Symbol,
    shear: ShearProfile,
    lambda0: u32,
    pub e_const: f64,
}

impl SlopeFormula {
    pub fn new(gamma: &Symbol, shear: &ShearProfile, lambda0: u32, window: &Window) -> SlopeFormula {
        SlopeFormula {
            gamma: gamma.clone(),
            shear: shear.clone(),
            lambda0,
            e_const: window.e_const,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let rho = rho_of(&self.gamma, &self.shear, self.lambda0, self.e_const, x)?;
        self.gamma.restricted(self.lambda0).inverse(rho)
    }

    /// d^2 Phi(0, x) via the h = 0 identity: -p_x / p_xi at (0, x, slope(x)).
    pub fn curvature(&self, x: f64) -> Result<f64> {
        let xi = self.eval(x)?;
        let d = PSymbol::new(&self.gamma, &self.shear, self.lambda0).eval(0.0, x, xi);
        if d.p_xi == 0.0 {
            return Err(Error::Singularity("p_xi = 0 in curvature".into()));
        }
        Ok(-d.p_x / d.p_xi)
    }

    /// d^2 Phi(0, x) by differentiating the defining relation
    /// gamma_{lambda0}(slope) = (E - Gamma f')/(-f') with the inverse-function
    /// theorem; an independent route used to verify h(0) = 0.
    pub fn curvature_via_rho(&self, x: f64) -> Result<f64> {
        let xi = self.eval(x)?;
        let f1 = self.shear.eval_derivative(0.0, 1, x)?;
        let f2 = self.shear.eval_derivative(0.0, 2, x)?;
        let gf1 = self.shear.eval_multiplier_image(&self.gamma, 0.0, 1, x)?;
        let gf2 = self.shear.eval_multiplier_image(&self.gamma, 0.0, 2, x)?;
        let rho_prime = gf2 / f1 + (self.e_const - gf1) * f2 / (f1 * f1);
        let g1 = self
            .gamma
            .eval_partial(0, 1, self.lambda0 as f64, xi)
            .unwrap();
        Ok(rho_prime / g1)
    }
}

/// One bicharacteristic with its diagnostics, integrated on [0, t_star].
/// State layout: [X, Xi, h, I, amp_log, Phi].
pub struct Ray {
    pub x_launch: f64,
    pub xi0: f64,
    pub t_star: f64,
    sol: OdeSolution,
}

/// Ray state at a sampled time.
#[derive(Clone, Copy, Debug)]
pub struct RayState {
    pub t: f64,
    pub x: f64,
    pub xi: f64,
    pub h: f64,
    /// integrating factor exponent I(t)
    pub i_factor: f64,
    /// accumulated zeroth-order transport exponent (amplitude = a0 e^{-amp_log})
    pub amp_log: f64,
    pub phi: f64,
    /// Hamiltonian p(t, X, Xi)
    pub hamiltonian: f64,
    /// d^2 Phi recovered from h
    pub ddphi: f64,
}

impl Ray {
    pub fn state_at(&self, psym: &PSymbol, t: f64) -> RayState {
        let y = self.sol.sample(t);
        let d = psym.eval(t, y[0], y[1]);
        RayState {
            t,
            x: y[0],
            xi: y[1],
            h: y[2],
            i_factor: y[3],
            amp_log: y[4],
            phi: y[5],
            hamiltonian: d.p,
            ddphi: (y[2] - 1.0) * d.p_x / d.p_xi,
        }
    }
}

/// Integrate one bicharacteristic with the coupled h, I, amplitude-exponent
/// and phase ODEs. Truncation by the guards produces a horizon error carrying
/// the last valid time.
pub fn integrate_bicharacteristic(
    gamma: &Symbol,
    shear: &ShearProfile,
    lambda0: u32,
    x_launch: f64,
    xi0: f64,
    phi0: f64,
    t_star: f64,
) -> Result<Ray> {
    let psym = PSymbol::new(gamma, shear, lambda0);
    let rhs = {
        let psym = psym.clone();
        // 0/0 arises only for stub backgrounds where the numerators vanish too
        let div0 = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a / b };
        move |t: f64, y: &[f64], dy: &mut [f64]| {
            let d = psym.eval(t, y[0], y[1]);
            let h = y[2];
            let s_h = -div0(d.p_txi, d.p_xi) + div0(d.p_tx, d.p_x);
            let r_c = div0(d.p_xx * d.p_xi, d.p_x);
            let q_c = -div0(d.p_xixi * d.p_x, d.p_xi);
            let ddphi = (h - 1.0) * div0(d.p_x, d.p_xi);
            dy[0] = d.p_xi;
            dy[1] = -d.p_x;
            dy[2] = s_h - (q_c + r_c + s_h) * h + q_c * h * h;
            dy[3] = -d.p_xxi + div0(d.p_xixi * d.p_x, d.p_xi) * (1.0 - h);
            dy[4] = 0.5 * d.p_xixi * ddphi + d.s_sub;
            dy[5] = y[1] * d.p_xi - d.p;
        }
    };
    let guard = |_t: f64, y: &[f64]| {
        y.iter().all(|v| v.is_finite()) && y[0] > 1e-13 && y[1] > 0.0 && y[1] < 1e12
    };
    let sol = ode::integrate(
        rhs,
        0.0,
        &[x_launch, xi0, 0.0, 0.0, 0.0, phi0],
        t_star,
        &OdeOpts::default(),
        guard,
    );
    match &sol.status {
        OdeStatus::Complete => Ok(Ray {
            x_launch,
            xi0,
            t_star,
            sol,
        }),
        OdeStatus::Truncated { t, .. } => Err(Error::Horizon {
            what: format!("bicharacteristic from x = {x_launch} left the admissible region"),
            t: *t,
        }),
        OdeStatus::Failed { t, reason } => Err(Error::Integration {
            what: format!("bicharacteristic from x = {x_launch}: {reason}"),
            t: *t,
        }),
    }
}

/// The wave-packet scale
/// mu = lambda0^{2 delta3 N0} / (x0 eps) * [gamma(lambda_t)/gamma(lambda0)] * [gamma'(lambda0)/gamma'(lambda_t)].
pub fn mu_of_t(
    gamma: &Symbol,
    params: &AsymptoticParameters,
    lambda0: u32,
    x0: f64,
    eps: f64,
    lambda_t: f64,
) -> f64 {
    let l0 = lambda0 as f64;
    let g = |xi: f64| gamma.value(l0, xi);
    let gp = |xi: f64| gamma.eval_partial(0, 1, l0, xi).unwrap();
    l0.powf(2.0 * params.delta3 * params.n0 as f64) / (x0 * eps) * (g(lambda_t) / g(l0))
        * (gp(l0) / gp(lambda_t))
}

/// A phase field: the full characteristic fan plus the comparison frequencies.
pub struct PhaseField {
    pub psym: PSymbol,
    pub lambda0: u32,
    pub eps: f64,
    pub window: Window,
    pub t_star: f64,
    pub rays: Vec<Ray>,
    pub cmp: ComparisonFrequencies,
    pub params: AsymptoticParameters,
}

/// Grid snapshot of the globally extended phase.
#[derive(Clone, Debug)]
pub struct PhaseSnapshot {
    pub t: f64,
    pub grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub ddphi: Vec<f64>,
    /// image of [x0, x1] under the flow
    pub window_image: (f64, f64),
    /// image of [x0', x1'] (the amplitude support)
    pub support_image: (f64, f64),
    pub lambda_t: f64,
    pub mu_t: f64,
}

/// Build the characteristic fan for a plan: `fan_size` rays launched uniformly
/// over [x0, x1] with the separation-formula slope, each carrying (h, I,
/// amplitude exponent, phase) as extra state.
pub fn build_phase_field(
    gamma: &Symbol,
    shear: &ShearProfile,
    plan: &GrowthPlan,
    params: &AsymptoticParameters,
    window: Window,
    fan_size: usize,
    force: bool,
) -> Result<PhaseField> {
    plan.require_admissible(force)?;
    let fan_size = fan_size.max(9) | 1; // odd, so the midpoint ray is exact
    let slope = SlopeFormula::new(gamma, shear, plan.lambda0, &window);
    let xs: Vec<f64> = (0..fan_size)
        .map(|i| window.x0 + window.width() * i as f64 / (fan_size - 1) as f64)
        .collect();
    let slopes: Vec<f64> = xs.iter().map(|&x| slope.eval(x)).collect::<Result<_>>()?;
    // Phi(0, x): integrate the slope, normalized to zero at the midpoint ray
    let cums = quad::cumulative(&|x: f64| slope.eval(x).unwrap_or(f64::NAN), &xs, 1e-12);
    let mid = fan_size / 2;
    let cmp = crate::growth::solve_comparison_frequencies(gamma, shear, plan, force)?;
    let mut rays = Vec::with_capacity(fan_size);
    for i in 0..fan_size {
        let ray = integrate_bicharacteristic(
            gamma,
            shear,
            plan.lambda0,
            xs[i],
            slopes[i],
            cums[i] - cums[mid],
            plan.t_star,
        )?;
        rays.push(ray);
    }
    Ok(PhaseField {
        psym: PSymbol::new(gamma, shear, plan.lambda0),
        lambda0: plan.lambda0,
        eps: plan.eps,
        window,
        t_star: plan.t_star,
        rays,
        cmp,
        params: params.clone(),
    })
}

impl PhaseField {
    pub fn ray_states(&self, t: f64) -> Vec<RayState> {
        self.rays.iter().map(|r| r.state_at(&self.psym, t)).collect()
    }

    pub fn lambda(&self, t: f64) -> f64 {
        self.cmp.lambda(t)
    }

    pub fn mu(&self, t: f64) -> f64 {
        mu_of_t(
            &self.psym.gamma,
            &self.params,
            self.lambda0,
            self.window.x0,
            self.eps,
            self.lambda(t),
        )
    }

    /// Images of the launch window and the amplitude support at time t.
    pub fn images(&self, t: f64) -> ((f64, f64), (f64, f64)) {
        let states = self.ray_states(t);
        let xs: Vec<f64> = states.iter().map(|s| s.x).collect();
        let x_of = |xbar: f64| -> f64 {
            // launch positions are uniform; interpolate the image linearly in
            // between rays (only used for reporting)
            let w = (xbar - self.window.x0) / self.window.width();
            let pos = w * (xs.len() - 1) as f64;
            let i = (pos.floor() as usize).min(xs.len() - 2);
            let frac = pos - i as f64;
            xs[i] * (1.0 - frac) + xs[i + 1] * frac
        };
        (
            (xs[0], xs[xs.len() - 1]),
            (x_of(self.window.x0_prime()), x_of(self.window.x1_prime())),
        )
    }

    /// Extend the phase globally and sample (Phi, dPhi, d2Phi) on a uniform
    /// grid. Monotone-cubic interpolation inside the window image (with exact
    /// nodal slopes from h), boundary-ray constants outside, blended through
    /// smooth cutoffs at the thirds of the launch window.
    pub fn phase_on_grid(&self, t: f64, grid: &[f64]) -> Result<PhaseSnapshot> {
        let states = self.ray_states(t);
        let n = states.len();
        let xs: Vec<f64> = states.iter().map(|s| s.x).collect();
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::FocalPoint(t));
        }
        let xis: Vec<f64> = states.iter().map(|s| s.xi).collect();
        let dds: Vec<f64> = states.iter().map(|s| s.ddphi).collect();
        let phis: Vec<f64> = states.iter().map(|s| s.phi).collect();
        let launches: Vec<f64> = self.rays.iter().map(|r| r.x_launch).collect();

        let xi_interp = CubicHermite::with_derivatives(xs.clone(), xis.clone(), dds.clone());
        let launch_interp = CubicHermite::pchip(xs.clone(), launches.clone());
        let (x_left, x_right) = (xs[0], xs[n - 1]);
        let (xi_left, xi_right) = (xis[0], xis[n - 1]);
        let (x0p, x1p) = (self.window.x0_prime(), self.window.x1_prime());

        // globally extended slope
        let dphi_global = |x: f64| -> f64 {
            if x <= x_left {
                xi_left
            } else if x >= x_right {
                xi_right
            } else {
                let xbar = launch_interp.eval(x).clamp(self.window.x0, self.window.x1);
                let chi = self.window.chi(xbar);
                if chi >= 1.0 {
                    xi_interp.eval(x)
                } else {
                    let boundary = if xbar < x0p { xi_left } else { xi_right };
                    chi * xi_interp.eval(x) + (1.0 - chi) * boundary
                }
            }
        };

        // cumulative integration of the global slope, anchored at the midpoint ray
        let mid = n / 2;
        let (x_mid, phi_mid) = (xs[mid], phis[mid]);
        let m = grid.len();
        let mut phi = vec![0.0; m];
        let dphi: Vec<f64> = grid.iter().map(|&x| dphi_global(x)).collect();
        // locate the grid cell holding x_mid
        let j0 = grid.partition_point(|&x| x <= x_mid).saturating_sub(1);
        // integrate outward from x_mid
        phi[j0] = phi_mid - quad::gauss5(&dphi_global, grid[j0], x_mid);
        for j in (0..j0).rev() {
            phi[j] = phi[j + 1] - quad::gauss5(&dphi_global, grid[j], grid[j + 1]);
        }
        for j in j0 + 1..m {
            phi[j] = phi[j - 1] + quad::gauss5(&dphi_global, grid[j - 1], grid[j]);
        }

        let ddphi: Vec<f64> = grid
            .iter()
            .map(|&x| {
                if x <= x_left || x >= x_right {
                    0.0
                } else {
                    let xbar = launch_interp.eval(x).clamp(self.window.x0, self.window.x1);
                    if xbar >= x0p && xbar <= x1p {
                        xi_interp.eval_derivative(x)
                    } else {
                        let hh = 1e-6 * (x_right - x_left);
                        (dphi_global(x + hh) - dphi_global(x - hh)) / (2.0 * hh)
                    }
                }
            })
            .collect();

        let (win_img, sup_img) = self.images(t);
        Ok(PhaseSnapshot {
            t,
            grid: grid.to_vec(),
            phi,
            dphi,
            ddphi,
            window_image: win_img,
            support_image: sup_img,
            lambda_t: self.lambda(t),
            mu_t: self.mu(t),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::{check_conditions, AsymptoticParameters};
    use approx::assert_relative_eq;

    fn setup(lambda0: u32) -> (Symbol, ShearProfile, GrowthPlan, AsymptoticParameters) {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let params = AsymptoticParameters::default().validated().unwrap();
        let plan = check_conditions(&g, None, &f, &params, lambda0, 4.0).unwrap();
        (g, f, plan, params)
    }

    #[test]
    fn slope_bracket_and_anchor() {
        let (g, f, plan, params) = setup(64);
        let w = Window::asymptotic(&g, &f, 64, plan.eps, params.c_x0).unwrap();
        let slope = SlopeFormula::new(&g, &f, 64, &w);
        // E cancels at x1: slope(x1) = (1 + eps/2) lambda0 exactly
        assert_relative_eq!(
            slope.eval(w.x1).unwrap(),
            (1.0 + 0.5 * plan.eps) * 64.0,
            max_relative = 1e-10
        );
        // monotone decreasing and inside [lambda0, (1+eps) lambda0] on 1024 points
        let mut prev = f64::INFINITY;
        for i in 0..=1024 {
            let x = w.x0 + w.width() * i as f64 / 1024.0;
            let s = slope.eval(x).unwrap();
            assert!(s <= prev + 1e-9);
            assert!(s >= 64.0 * (1.0 - 1e-10) && s <= 64.0 * (1.0 + plan.eps) * (1.0 + 1e-9));
            prev = s;
        }
    }

    #[test]
    fn initial_h_vanishes_on_fan() {
        // h(0) = (p_xi/p_x) d2Phi + 1 = 0 for the separation-formula slope,
        // with d2Phi from the independent inverse-function-theorem route
        let (g, f, plan, params) = setup(64);
        let w = Window::asymptotic(&g, &f, 64, plan.eps, params.c_x0).unwrap();
        let slope = SlopeFormula::new(&g, &f, 64, &w);
        let psym = PSymbol::new(&g, &f, 64);
        for i in 1..16 {
            let x = w.x0 + w.width() * i as f64 / 16.0;
            let xi = slope.eval(x).unwrap();
            let dd = slope.curvature_via_rho(x).unwrap();
            let d = psym.eval(0.0, x, xi);
            let h0 = d.p_xi / d.p_x * dd + 1.0;
            assert!(h0.abs() < 1e-10, "h(0) = {h0} at x = {x}");
            // finite-difference cross-check of the curvature at FD accuracy
            let hh = 1e-4 * w.width();
            let fd = (slope.eval(x + hh).unwrap() - slope.eval(x - hh).unwrap()) / (2.0 * hh);
            assert_relative_eq!(dd, fd, max_relative = 1e-4);
            assert_relative_eq!(slope.curvature(x).unwrap(), dd, max_relative = 1e-9);
        }
    }

    #[test]
    fn steady_h_nullity_and_hamiltonian() {
        for lambda0 in [32u32, 64, 128, 256] {
            let (g, f, plan, params) = setup(lambda0);
            let w = Window::asymptotic(&g, &f, lambda0, plan.eps, params.c_x0).unwrap();
            let field = build_phase_field(&g, &f, &plan, &params, w, 33, false).unwrap();
            for ray in &field.rays {
                let s0 = ray.state_at(&field.psym, 0.0);
                for i in 0..=16 {
                    let t = field.t_star * i as f64 / 16.0;
                    let s = ray.state_at(&field.psym, t);
                    assert!(s.h.abs() < 1e-6, "|h| = {} at t = {t}", s.h.abs());
                    let drift = (s.hamiltonian - s0.hamiltonian).abs() / s0.hamiltonian.abs();
                    assert!(drift < 1e-8, "hamiltonian drift {drift}");
                }
            }
        }
    }

    #[test]
    fn sign_structure_and_sandwich() {
        let (g, f, plan, params) = setup(64);
        let w = Window::asymptotic(&g, &f, 64, plan.eps, params.c_x0).unwrap();
        let field = build_phase_field(&g, &f, &plan, &params, w, 17, false).unwrap();
        for ray in &field.rays {
            let mut prev_x = f64::INFINITY;
            let mut prev_xi = 0.0;
            for i in 0..=24 {
                let t = field.t_star * i as f64 / 24.0;
                let s = ray.state_at(&field.psym, t);
                assert!(s.x > 0.0 && s.x < prev_x);
                assert!(s.xi > prev_xi);
                let l = field.lambda(t);
                assert!(l <= s.xi * (1.0 + 1e-9), "lambda {l} > Xi {}", s.xi);
                assert!(s.xi <= 2.0 * l, "Xi {} > 2 lambda {l}", s.xi);
                prev_x = s.x;
                prev_xi = s.xi;
            }
        }
    }

    #[test]
    fn x_position_bound() {
        let (g, f, plan, params) = setup(64);
        let w = Window::asymptotic(&g, &f, 64, plan.eps, params.c_x0).unwrap();
        let field = build_phase_field(&g, &f, &plan, &params, w, 17, false).unwrap();
        let l0 = 64.0;
        let fac = 2f64.powf(g.beta0 + 1.0);
        for ray in &field.rays {
            let x_start = ray.state_at(&field.psym, 0.0).x;
            for i in 1..=16 {
                let t = field.t_star * i as f64 / 16.0;
                let s = ray.state_at(&field.psym, t);
                let reference = x_start * g.value(l0, l0) / g.value(l0, field.lambda(t));
                assert!(
                    s.x >= reference / fac && s.x <= reference * fac,
                    "X = {} outside [{}, {}]",
                    s.x,
                    reference / fac,
                    reference * fac
                );
            }
        }
    }

    #[test]
    fn h_rhs_steady_is_zero_and_matches_fd_oracle() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        // steady: s = 0, so rhs vanishes at h = 0
        let v = h_rhs(&g, &f, 64, 0.3, 0.04, 80.0, 0.0).unwrap();
        assert!(v.abs() < 1e-12, "steady h-rhs {v}");

        // dissipative f = e^{-ct} cos x: compare against a finite-difference
        // oracle built from p(t, x, xi) alone
        let ups = Symbol::power(1.0);
        let fd = ShearProfile::cosine(1).with_dissipation(1.0, ups).unwrap();
        let lambda0 = 64u32;
        let psym = PSymbol::new(&g, &fd, lambda0);
        let (t, x, xi, h) = (0.0, 0.05, 70.0, 0.01);
        let p = |t: f64, x: f64, xi: f64| psym.eval(t, x, xi).p;
        let fd1 = |f: &dyn Fn(f64) -> f64, v: f64, h: f64| (f(v + h) - f(v - h)) / (2.0 * h);
        let (ht, hx, hxi) = (1e-6, 1e-7, 1e-3);
        let p_x = fd1(&|v| p(t, v, xi), x, hx);
        let p_xi = fd1(&|v| p(t, x, v), xi, hxi);
        let p_xx = (p(t, x + hx, xi) - 2.0 * p(t, x, xi) + p(t, x - hx, xi)) / (hx * hx);
        let p_xixi = (p(t, x, xi + hxi) - 2.0 * p(t, x, xi) + p(t, x, xi - hxi)) / (hxi * hxi);
        let p_tx = fd1(&|v| fd1(&|w| p(v, w, xi), x, hx), t + ht, ht);
        let p_txi = fd1(&|v| fd1(&|w| p(v, x, w), xi, hxi), t + ht, ht);
        let s = -p_txi / p_xi + p_tx / p_x;
        let r = p_xx * p_xi / p_x;
        let q = -p_xixi * p_x / p_xi;
        let oracle = s - (q + r + s) * h + q * h * h;
        let exact = h_rhs(&g, &fd, lambda0, t, x, xi, h).unwrap();
        // the t-offset in the oracle's mixed differences costs some accuracy
        assert_relative_eq!(exact, oracle, max_relative = 1e-4);
    }

    #[test]
    fn mu_monotone_and_t0_value() {
        let (g, _f, plan, params) = setup(64);
        let x0 = 0.05;
        let mu0 = mu_of_t(&g, &params, 64, x0, plan.eps, 64.0);
        // ratios equal 1 at lambda_t = lambda0; delta3 N0 is tiny
        assert_relative_eq!(mu0, 64f64.powf(2.0 * params.delta3 * 4.0) / (x0 * plan.eps));
        let mut prev = mu0;
        for m in [1.5, 2.0, 3.0, 4.0] {
            let mu = mu_of_t(&g, &params, 64, x0, plan.eps, m * 64.0);
            assert!(mu >= prev, "mu not nondecreasing");
            prev = mu;
        }
    }

    #[test]
    fn phase_on_grid_reproduces_slope_at_t0() {
        let (g, f, plan, params) = setup(64);
        let w = Window::asymptotic(&g, &f, 64, plan.eps, params.c_x0).unwrap();
        let slope = SlopeFormula::new(&g, &f, 64, &w);
        let field = build_phase_field(&g, &f, &plan, &params, w.clone(), 257, false).unwrap();
        // on the amplitude support [x0', x1'] the extension is the phase itself
        let (x0p, x1p) = (w.x0_prime(), w.x1_prime());
        let grid: Vec<f64> = (0..512)
            .map(|i| x0p + (x1p - x0p) * i as f64 / 511.0)
            .collect();
        let snap = field.phase_on_grid(0.0, &grid).unwrap();
        for (j, &x) in grid.iter().enumerate() {
            let expect = slope.eval(x).unwrap();
            assert!(
                (snap.dphi[j] - expect).abs() <= 1e-8 * expect,
                "dphi mismatch {} vs {expect} at x = {x}",
                snap.dphi[j]
            );
            // d2Phi stays within the mu lambda envelope with slack
            assert!(snap.ddphi[j].abs() <= 10.0 * snap.mu_t * snap.lambda_t);
        }
    }

    #[test]
    fn steady_dphi_is_time_independent_on_images() {
        // separation of variables: d_x Phi(t, x) = G'(x); check via the fan
        let (g, f, plan, params) = setup(64);
        let w = Window::asymptotic(&g, &f, 64, plan.eps, params.c_x0).unwrap();
        let slope = SlopeFormula::new(&g, &f, 64, &w);
        let field = build_phase_field(&g, &f, &plan, &params, w, 65, false).unwrap();
        let t = 0.7 * field.t_star;
        for ray in field.rays.iter().step_by(8) {
            let s = ray.state_at(&field.psym, t);
            let expect = slope.eval(s.x).unwrap();
            assert_relative_eq!(s.xi, expect, max_relative = 1e-7);
        }
        // and Phi itself advances by E lambda0 t along the separation ansatz
        let mid = field.rays.len() / 2;
        let s0 = field.rays[mid].state_at(&field.psym, 0.0);
        let st = field.rays[mid].state_at(&field.psym, t);
        // Phi(t, X(t)) - Phi(0, X(0)) = E lambda0 t + [G(X(t)) - G(X(0))]
        let g_diff = quad::adaptive_simpson(
            &|x: f64| slope.eval(x).unwrap(),
            s0.x,
            st.x,
            1e-12,
            1e-300,
        );
        assert_relative_eq!(
            st.phi - s0.phi,
            field.window.e_const * 64.0 * t + g_diff,
            max_relative = 1e-7
        );
    }
}
