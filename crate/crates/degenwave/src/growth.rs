//! Frequency growth time tau_M, the linear and dissipative growth conditions,
//! the localization scale epsilon(lambda0), and the comparison frequency ODEs
//! lambda(t) <= Xi(t) <= lambda_bar(t).

use crate::error::{Error, Result};
use crate::ode::{self, OdeOpts, OdeSolution, OdeStatus};
use crate::quad;
use crate::shear::ShearProfile;
use crate::symbols::Symbol;
use serde::Serialize;

/// How the localization scale epsilon(lambda0) is chosen.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum EpsMode {
    /// Practical desk-scale mode: a fixed value (default 0.1). Violated
    /// theoretical bounds are recorded on the plan.
    Fixed(f64),
    /// Geometric mean of the lower and upper bounds of the admissible window.
    WindowGeometricMean,
}

/// The small-parameter ledger of the construction. Only orderings are given
/// by the theory; the defaults here are desk-scale choices.
#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticParameters {
    pub delta0: f64,
    pub delta1: f64,
    pub sigma0: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub delta5: f64,
    pub n0: u32,
    pub eps_mode: EpsMode,
    /// when set, a plan whose epsilon violates the admissible window is an error
    pub enforce_eps_window: bool,
    pub c_x0: f64,
    /// minimal admissible lambda0
    pub lambda_min: f64,
    /// maximal admissible tau_M
    pub tau_max: f64,
    /// pass threshold for the o_{lambda0}(1) dissipative condition
    pub diss_threshold: f64,
}

impl Default for AsymptoticParameters {
    fn default() -> Self {
        let delta0: f64 = 0.009;
        let n0 = 4u32;
        let delta2 = delta0.powi(10);
        let delta3 = delta2 / (10.0 * n0 as f64);
        let delta5 = delta0 * delta3 / 100.0;
        AsymptoticParameters {
            delta0,
            delta1: delta0,
            sigma0: 0.2,
            delta2,
            delta3,
            delta4: 10.0 * delta5,
            delta5,
            n0,
            eps_mode: EpsMode::Fixed(0.1),
            enforce_eps_window: false,
            c_x0: 0.5,
            lambda_min: 32.0,
            tau_max: 1.0,
            diss_threshold: 0.1,
        }
    }
}

impl AsymptoticParameters {
    /// Assert the required small-parameter ordering at construction.
    pub fn validated(self) -> Result<AsymptoticParameters> {
        if !(self.delta0 > 0.0 && self.delta0 < 0.01) {
            return Err(Error::Parameter("delta0 must lie in (0, 1/100)".into()));
        }
        if !(self.delta1 > 0.0 && self.delta1 <= self.delta0) {
            return Err(Error::Parameter("need 0 < delta1 <= delta0".into()));
        }
        if !(self.sigma0 >= 0.0 && self.sigma0 <= (1.0 - 2.0 * self.delta0) / 3.0) {
            return Err(Error::Parameter("sigma0 outside [0, (1-2 delta0)/3]".into()));
        }
        let ok = self.delta5 > 0.0
            && self.delta5 < self.delta0 * self.delta3
            && self.delta0 * self.delta3 < self.delta2 / self.n0 as f64;
        if !ok {
            return Err(Error::Parameter(
                "need 0 < delta5 << delta0 delta3 << delta2 / N0".into(),
            ));
        }
        Ok(self)
    }
}

/// tau_M = int_{lambda0}^{M lambda0} d lambda / (lambda0 gamma(lambda0, lambda)).
pub fn tau_m(gamma: &Symbol, lambda0: f64, m: f64) -> f64 {
    if m <= 1.0 {
        return 0.0;
    }
    let f = |l: f64| 1.0 / (lambda0 * gamma.value(lambda0, l));
    quad::adaptive_simpson(&f, lambda0, m * lambda0, 1e-10, 1e-300)
}

/// Admissible window for epsilon(lambda0) given the plan's sup statistic.
/// Returns (lower, upper); they may cross at desk scale.
pub fn eps_window(
    gamma: &Symbol,
    params: &AsymptoticParameters,
    lambda0: f64,
    sup_cond1: f64,
) -> (f64, f64) {
    let g00 = gamma.value(lambda0, lambda0);
    let lo = (lambda0.powf(-(params.sigma0 + params.delta0 / 6.0)))
        .max(g00.powf(-(1.0 - 0.5 * params.delta0)));
    let cap = (10.0 + 2f64.powf(2.0 * gamma.beta0)) * sup_cond1;
    let hi = (0.01f64).min(if cap > 0.0 { 1.0 / cap } else { 0.01 });
    (lo, hi)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// rhs - lhs (positive = slack)
    pub margin: f64,
    pub note: Option<String>,
}

/// A resolved experiment plan for one (lambda0, M).
#[derive(Clone, Debug, Serialize)]
pub struct GrowthPlan {
    pub gamma: String,
    pub upsilon: Option<String>,
    pub shear: String,
    pub lambda0: u32,
    pub m_factor: f64,
    pub tau_m: f64,
    /// t_f(tau_M) / (1 - eps)
    pub t_star: f64,
    pub eps: f64,
    pub eps_window: (f64, f64),
    pub eps_violations: Vec<String>,
    pub conditions: Vec<ConditionReport>,
    /// growth conditions (1)-(3) all pass
    pub admissible: bool,
    /// dissipative conditions also pass (when upsilon present)
    pub diss_admissible: Option<bool>,
    /// epsilon sits inside its theoretical window (rarely true at desk scale)
    pub asymptotic_regime: bool,
}

impl GrowthPlan {
    pub fn require_admissible(&self, force: bool) -> Result<()> {
        if self.admissible || force {
            Ok(())
        } else {
            let failing: Vec<&str> = self
                .conditions
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str())
                .collect();
            Err(Error::Parameter(format!(
                "plan (lambda0 = {}, M = {}) fails growth conditions: {}",
                self.lambda0,
                self.m_factor,
                failing.join(", ")
            )))
        }
    }
}

/// Geometric grid of M' in [1, M]: 64 interior points plus endpoints.
fn m_grid(m: f64) -> Vec<f64> {
    let n = 64usize;
    (0..=n).map(|i| m.powf(i as f64 / n as f64)).collect()
}

/// Evaluate the growth conditions (and the dissipative pair when `upsilon`
/// is given) and package everything a downstream experiment needs.
pub fn check_conditions(
    gamma: &Symbol,
    upsilon: Option<&Symbol>,
    shear: &ShearProfile,
    params: &AsymptoticParameters,
    lambda0: u32,
    m: f64,
) -> Result<GrowthPlan> {
    if m < 1.0 {
        return Err(Error::Parameter("M must be >= 1".into()));
    }
    let l0 = lambda0 as f64;
    let tau = tau_m(gamma, l0, m);

    // cumulative tau over the geometric M' grid
    let grid = m_grid(m);
    let breaks: Vec<f64> = grid.iter().map(|mp| mp * l0).collect();
    let taus = quad::cumulative(&|l: f64| 1.0 / (l0 * gamma.value(l0, l)), &breaks, 1e-10);

    let mut sup1 = 0.0f64;
    for (i, mp) in grid.iter().enumerate() {
        let v = gamma.value(l0, mp * l0) / mp * taus[i];
        sup1 = sup1.max(v);
    }
    let g00 = gamma.value(l0, l0);
    let rhs1 = g00.powf(1.0 - params.delta0).min(l0.powf(params.sigma0));
    let rhs2 = (l0.powf(1.0 - params.delta0 - 3.0 * params.sigma0) / g00).min(1.0);
    let rhs3 = l0.powf(1.0 / params.delta0);

    let mut conditions = vec![
        ConditionReport {
            name: "growth condition 1 (sup gamma tau / M')".into(),
            lhs: sup1,
            rhs: rhs1,
            pass: sup1 <= rhs1,
            margin: rhs1 - sup1,
            note: None,
        },
        ConditionReport {
            name: "growth condition 2 (tau_M cap)".into(),
            lhs: tau,
            rhs: rhs2,
            pass: tau <= rhs2,
            margin: rhs2 - tau,
            note: None,
        },
        ConditionReport {
            name: "growth condition 3 (M cap)".into(),
            lhs: m,
            rhs: rhs3,
            pass: m <= rhs3,
            margin: rhs3 - m,
            note: None,
        },
    ];
    let admissible =
        conditions.iter().all(|c| c.pass) && l0 >= params.lambda_min && tau <= params.tau_max;

    let mut diss_admissible = None;
    if let Some(ups) = upsilon {
        // dissipative condition 1: the o_{lambda0}(1) integral
        let d1 = quad::adaptive_simpson(
            &|l: f64| ups.value(l0, l) / (gamma.value(l0, l) * l0),
            l0,
            m * l0,
            1e-10,
            1e-300,
        );
        conditions.push(ConditionReport {
            name: "dissipative condition 1 (int upsilon/gamma)".into(),
            lhs: d1,
            rhs: params.diss_threshold,
            pass: d1 <= params.diss_threshold,
            margin: params.diss_threshold - d1,
            note: Some(
                "theory only requires o_{lambda0}(1); the 0.1 pass threshold is an artifact choice"
                    .into(),
            ),
        });
        // dissipative condition 2: sup over M' of the gamma'-weighted integral
        let gp = |l: f64| gamma.eval_partial(0, 1, l0, l).unwrap_or(f64::NAN);
        let mut sup2 = 0.0f64;
        for mp in grid.iter().skip(1) {
            let denom = gp(mp * l0);
            let v = quad::adaptive_simpson(
                &|l: f64| {
                    (gp(l) / denom).powf(1.0 - params.delta1) * g00
                        / (gamma.value(l0, l).powi(2) * l0)
                },
                l0,
                mp * l0,
                1e-8,
                1e-300,
            );
            sup2 = sup2.max(v);
        }
        conditions.push(ConditionReport {
            name: "dissipative condition 2 (time dependence)".into(),
            lhs: sup2,
            rhs: 1.0,
            pass: sup2 <= 1.0,
            margin: 1.0 - sup2,
            note: None,
        });
        diss_admissible = Some(conditions[3].pass && conditions[4].pass && admissible);
    }

    let window = eps_window(gamma, params, l0, sup1);
    let eps = match params.eps_mode {
        EpsMode::Fixed(v) => v,
        EpsMode::WindowGeometricMean => (window.0 * window.1).sqrt(),
    };
    let mut eps_violations = Vec::new();
    if eps < window.0 {
        eps_violations.push(format!("eps = {eps} below theoretical lower bound {}", window.0));
    }
    if eps > window.1 {
        eps_violations.push(format!("eps = {eps} above theoretical upper bound {}", window.1));
    }
    if params.enforce_eps_window && !eps_violations.is_empty() {
        return Err(Error::Parameter(eps_violations.join("; ")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!("eps = {eps} outside (0, 1)")));
    }

    let t_star = shear.tf_of_tau(tau)? / (1.0 - eps);

    Ok(GrowthPlan {
        gamma: gamma.spec_string().to_string(),
        upsilon: upsilon.map(|u| u.spec_string().to_string()),
        shear: shear.spec_string().to_string(),
        lambda0,
        m_factor: m,
        tau_m: tau,
        t_star,
        eps,
        eps_window: window,
        eps_violations,
        conditions,
        admissible,
        diss_admissible,
        asymptotic_regime: window.0 <= window.1 && eps >= window.0 && eps <= window.1,
    })
}

/// The comparison frequencies lambda(t) (lower) and lambda_bar(t) (upper),
/// solved on [0, t_star].
pub struct ComparisonFrequencies {
    pub lambda0: f64,
    pub eps: f64,
    /// time at which lambda(t) = M lambda0; equals t_f(tau_M)/(1 - eps)
    pub t_m: f64,
    lower: OdeSolution,
    upper: OdeSolution,
}

impl ComparisonFrequencies {
    pub fn lambda(&self, t: f64) -> f64 {
        self.lower.sample(t)[0]
    }
    pub fn lambda_bar(&self, t: f64) -> f64 {
        self.upper.sample(t)[0]
    }
}

/// Integrate the comparison ODEs for a plan. `force` skips the admissibility gate.
pub fn solve_comparison_frequencies(
    gamma: &Symbol,
    shear: &ShearProfile,
    plan: &GrowthPlan,
    force: bool,
) -> Result<ComparisonFrequencies> {
    plan.require_admissible(force)?;
    let l0 = plan.lambda0 as f64;
    let eps = plan.eps;
    let t_end = plan.t_star;
    let opts = OdeOpts::default();
    let guard = |_t: f64, y: &[f64]| y[0].is_finite() && y[0] < 1e12;

    let rate = |fac: f64| {
        let gamma = gamma.clone();
        let shear = shear.clone();
        move |t: f64, y: &[f64], dy: &mut [f64]| {
            let fpp = shear.curvature_at_origin(t);
            dy[0] = -fac * fpp * l0 * gamma.value(l0, y[0]);
        }
    };
    let lower = ode::integrate(rate(1.0 - eps), 0.0, &[l0], t_end, &opts, guard);
    let upper = ode::integrate(rate(1.0 + eps), 0.0, &[(1.0 + eps) * l0], t_end, &opts, guard);
    for sol in [&lower, &upper] {
        match &sol.status {
            OdeStatus::Complete => {}
            OdeStatus::Truncated { t, .. } | OdeStatus::Failed { t, .. } => {
                return Err(Error::Integration {
                    what: "comparison frequency ODE stopped early".into(),
                    t: *t,
                })
            }
        }
    }
    Ok(ComparisonFrequencies {
        lambda0: l0,
        eps,
        t_m: t_end,
        lower,
        upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> AsymptoticParameters {
        AsymptoticParameters::default().validated().unwrap()
    }

    #[test]
    fn tau_trivial_and_monotone() {
        let g = Symbol::power(1.0);
        assert_eq!(tau_m(&g, 64.0, 1.0), 0.0);
        for cat in [Symbol::power(1.0), Symbol::power(0.5), Symbol::log(1.0)] {
            assert!(tau_m(&cat, 64.0, 8.0) > tau_m(&cat, 64.0, 4.0));
        }
    }

    #[test]
    fn tau_matches_composite_simpson_oracle() {
        let g = Symbol::power(1.0);
        let (l0, m) = (64.0, 4.0);
        let v = tau_m(&g, l0, m);
        // dense composite Simpson with 2^20 panels
        let n = 1 << 20;
        let h = (m * l0 - l0) / n as f64;
        let f = |l: f64| 1.0 / (l0 * g.value(l0, l));
        let mut acc = f(l0) + f(m * l0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(l0 + i as f64 * h);
        }
        let oracle = acc * h / 3.0;
        assert_relative_eq!(v, oracle, max_relative = 1e-9);
    }

    #[test]
    fn tau_additivity() {
        let g = Symbol::log(1.0);
        let l0 = 128.0;
        let (m1, m2) = (3.0, 2.5);
        let a = tau_m(&g, l0, m1);
        let b = quad::adaptive_simpson(
            &|l: f64| 1.0 / (l0 * g.value(l0, l)),
            m1 * l0,
            m1 * m2 * l0,
            1e-10,
            1e-300,
        );
        assert_relative_eq!(a + b, tau_m(&g, l0, m1 * m2), max_relative = 1e-9);
    }

    #[test]
    fn desk_plans_pass_growth_conditions() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        for l0 in [32u32, 64, 128, 256] {
            let plan = check_conditions(&g, None, &f, &params(), l0, 4.0).unwrap();
            assert!(plan.admissible, "lambda0 = {l0}: {:#?}", plan.conditions);
            // desk scale: eps bounds are incompatible, violations recorded
            assert!(!plan.eps_violations.is_empty());
        }
    }

    #[test]
    fn trivial_m_one_passes() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let plan = check_conditions(&g, None, &f, &params(), 64, 1.0).unwrap();
        assert!(plan.admissible);
        assert_eq!(plan.tau_m, 0.0);
    }

    #[test]
    fn corollary_power_half_scaling() {
        // gamma = <xi>^(1/2), M = lambda0^(1/2) passes (1)-(3) for large lambda0
        let g = Symbol::power(0.5);
        let f = ShearProfile::cosine(1);
        let l0 = 4096u32;
        let m = (l0 as f64).sqrt();
        let plan = check_conditions(&g, None, &f, &params(), l0, m).unwrap();
        assert!(plan.admissible, "{:#?}", plan.conditions);
    }

    #[test]
    fn corollary_log_pair_dissipative() {
        // gamma = log, upsilon = log^(1/2), M = log^{sigma (beta-alpha)} lambda0
        // with a small sigma passes the dissipative conditions at large lambda0
        let g = Symbol::log(1.0);
        let u = Symbol::log(0.5);
        let f = ShearProfile::cosine(1)
            .with_dissipation(1.0, u.clone())
            .unwrap();
        let l0 = 1u32 << 30;
        let sigma = 0.1;
        let m = (l0 as f64).ln().powf(sigma * 0.5);
        let plan = check_conditions(&g, Some(&u), &f, &params(), l0, m).unwrap();
        assert_eq!(plan.diss_admissible, Some(true), "{:#?}", plan.conditions);
    }

    #[test]
    fn halving_m_keeps_condition1() {
        let f = ShearProfile::cosine(1);
        for g in [Symbol::power(1.0), Symbol::power(0.5), Symbol::log(1.0)] {
            for l0 in [64u32, 256] {
                for m in [4.0, 8.0] {
                    let a = check_conditions(&g, None, &f, &params(), l0, m).unwrap();
                    let b = check_conditions(&g, None, &f, &params(), l0, m / 2.0).unwrap();
                    if a.conditions[0].pass {
                        assert!(b.conditions[0].pass);
                    }
                }
            }
        }
    }

    #[test]
    fn comparison_frequencies_hit_m_lambda0() {
        let g = Symbol::power(1.0);
        let f = ShearProfile::cosine(1);
        let plan = check_conditions(&g, None, &f, &params(), 64, 4.0).unwrap();
        let cmp = solve_comparison_frequencies(&g, &f, &plan, false).unwrap();
        // lambda(t_M) = M lambda0 with t_M = t_f(tau_M)/(1-eps)
        assert_relative_eq!(cmp.lambda(cmp.t_m), 4.0 * 64.0, max_relative = 1e-6);
        // strictly increasing; upper envelope dominates; ratio below 2
        let mut prev = 0.0;
        for i in 0..=32 {
            let t = cmp.t_m * i as f64 / 32.0;
            let l = cmp.lambda(t);
            let lb = cmp.lambda_bar(t);
            assert!(l > prev);
            assert!(lb >= l);
            assert!(lb / l <= 2.0, "ratio {} at t = {t}", lb / l);
            prev = l;
        }
    }

    #[test]
    fn constant_gamma_stub_linear_growth() {
        // gamma_{lambda0} == g0: lambda(t) = lambda0 + (1-eps) lambda0 g0 t
        let g0 = 3.0;
        let g = Symbol::constant(g0);
        let f = ShearProfile::cosine(1);
        let mut p = params();
        p.eps_mode = EpsMode::Fixed(0.1);
        let plan = check_conditions(&g, None, &f, &p, 64, 2.0).unwrap();
        let cmp = solve_comparison_frequencies(&g, &f, &plan, true).unwrap();
        let t = 0.5 * cmp.t_m;
        let expect = 64.0 + 0.9 * 64.0 * g0 * t;
        assert_relative_eq!(cmp.lambda(t), expect, max_relative = 1e-9);
    }
}
