//! Fourier multiplier catalog: the singular symbol gamma, the dissipation
//! symbol upsilon, their analytic partial derivatives, the restricted branch
//! gamma_{lambda0} with its inverse, and numerical validation of the
//! structural assumptions (ellipticity, growth, slow variance, almost
//! comparability of xi2 d_xi2 gamma with gamma).

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::roots;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Closed-form symbol supplied by the caller; partials up to order (4,4).
pub trait CustomSymbol: Send + Sync {
    fn value(&self, xi1: f64, xi2: f64) -> f64;
    /// Partial d^i_xi1 d^j_xi2; `None` when the order is not supplied.
    fn partial(&self, i: u32, j: u32, xi1: f64, xi2: f64) -> Option<f64>;
    fn describe(&self) -> String;
}

#[derive(Clone)]
pub enum SymbolKind {
    /// <xi>^beta = (1 + |xi|^2)^(beta/2)
    Power(f64),
    /// log^beta(10 + |xi|)
    Log(f64),
    /// log^beta(10 + log(10 + |xi|))
    LogLog(f64),
    /// exp(beta log^alpha(10 + |xi|)), 0 < alpha < 1
    ExpLog { beta: f64, alpha: f64 },
    /// constant positive value (test stub; violates the growth assumption)
    Constant(f64),
    Custom(Arc<dyn CustomSymbol>),
}

/// An even, positive, slowly varying multiplier together with its estimated
/// slow-variance order `beta0` and the threshold `xi0` above which the
/// structural assumptions are checked.
#[derive(Clone)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub beta0: f64,
    pub xi0: f64,
    spec: String,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.spec)
    }
}

pub const MAX_PARTIAL_ORDER: u32 = 4;

impl Symbol {
    pub fn new(kind: SymbolKind) -> Symbol {
        let spec = match &kind {
            SymbolKind::Power(b) => format!("power:{b}"),
            SymbolKind::Log(b) => format!("log:{b}"),
            SymbolKind::LogLog(b) => format!("loglog:{b}"),
            SymbolKind::ExpLog { beta, alpha } => format!("explog:{beta},{alpha}"),
            SymbolKind::Constant(c) => format!("const:{c}"),
            SymbolKind::Custom(c) => format!("custom:{}", c.describe()),
        };
        let mut sym = Symbol {
            kind,
            beta0: 0.0,
            xi0: 10.0,
            spec,
        };
        sym.beta0 = sym.estimate_beta0();
        sym
    }

    pub fn power(beta: f64) -> Symbol {
        Symbol::new(SymbolKind::Power(beta))
    }
    pub fn log(beta: f64) -> Symbol {
        Symbol::new(SymbolKind::Log(beta))
    }
    pub fn loglog(beta: f64) -> Symbol {
        Symbol::new(SymbolKind::LogLog(beta))
    }
    pub fn explog(beta: f64, alpha: f64) -> Symbol {
        Symbol::new(SymbolKind::ExpLog { beta, alpha })
    }
    pub fn constant(c: f64) -> Symbol {
        Symbol::new(SymbolKind::Constant(c))
    }

    /// Parse the CLI grammar `kind ':' comma-separated reals`,
    /// e.g. `power:2.0`, `log:1.0`, `explog:1.0,0.5`, `const:1.0`.
    pub fn parse(s: &str) -> Result<Symbol> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("symbol spec `{s}` missing `:`")))?;
        let vals: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number `{a}` in symbol spec `{s}`")))
                })
                .collect::<Result<_>>()?
        };
        let need = |n: usize| -> Result<()> {
            if vals.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "symbol spec `{s}`: expected {n} parameter(s), got {}",
                    vals.len()
                )))
            }
        };
        let sym = match kind {
            "power" => {
                need(1)?;
                Symbol::power(vals[0])
            }
            "log" => {
                need(1)?;
                Symbol::log(vals[0])
            }
            "loglog" => {
                need(1)?;
                Symbol::loglog(vals[0])
            }
            "explog" => {
                need(2)?;
                Symbol::explog(vals[0], vals[1])
            }
            "const" => {
                need(1)?;
                Symbol::constant(vals[0])
            }
            other => return Err(Error::Config(format!("unknown symbol kind `{other}`"))),
        };
        Ok(sym)
    }

    pub fn spec_string(&self) -> &str {
        &self.spec
    }

    /// gamma(xi1, xi2). Even in each variable and strictly positive.
    pub fn value(&self, xi1: f64, xi2: f64) -> f64 {
        let r = xi1.hypot(xi2);
        match &self.kind {
            SymbolKind::Power(b) => (1.0 + r * r).powf(b / 2.0),
            SymbolKind::Log(b) => (10.0 + r).ln().powf(*b),
            SymbolKind::LogLog(b) => (10.0 + (10.0 + r).ln()).ln().powf(*b),
            SymbolKind::ExpLog { beta, alpha } => (beta * (10.0 + r).ln().powf(*alpha)).exp(),
            SymbolKind::Constant(c) => *c,
            SymbolKind::Custom(c) => c.value(xi1, xi2),
        }
    }

    /// Checked evaluation: rejects non-finite input.
    pub fn eval(&self, xi1: f64, xi2: f64) -> Result<f64> {
        if !xi1.is_finite() || !xi2.is_finite() {
            return Err(Error::Domain(format!("non-finite frequency ({xi1}, {xi2})")));
        }
        Ok(self.value(xi1, xi2))
    }

    /// Jet (order-8 Taylor data) of the radial profile h(r) at r > 0.
    fn profile_jet(&self, r: f64) -> Result<Jet> {
        let rj = Jet::variable(r);
        match &self.kind {
            SymbolKind::Power(b) => rj.mul(&rj).add_scalar(1.0).powf(b / 2.0),
            SymbolKind::Log(b) => rj.add_scalar(10.0).ln()?.powf(*b),
            SymbolKind::LogLog(b) => rj.add_scalar(10.0).ln()?.add_scalar(10.0).ln()?.powf(*b),
            SymbolKind::ExpLog { beta, alpha } => {
                let mut p = rj.add_scalar(10.0).ln()?.powf(*alpha)?;
                for c in p.c.iter_mut() {
                    *c *= beta;
                }
                Ok(p.exp())
            }
            SymbolKind::Constant(c) => Ok(Jet::constant(*c)),
            SymbolKind::Custom(_) => Err(Error::Capability(
                "custom symbols supply partials directly".into(),
            )),
        }
    }

    /// Exact analytic partial derivative d^i_xi1 d^j_xi2 gamma at (xi1, xi2),
    /// for multi-indices up to (4,4).
    pub fn eval_partial(&self, i: u32, j: u32, xi1: f64, xi2: f64) -> Result<f64> {
        if i > MAX_PARTIAL_ORDER || j > MAX_PARTIAL_ORDER {
            return Err(Error::Capability(format!(
                "partial order ({i},{j}) exceeds supported (4,4)"
            )));
        }
        if !xi1.is_finite() || !xi2.is_finite() {
            return Err(Error::Domain(format!("non-finite frequency ({xi1}, {xi2})")));
        }
        if i == 0 && j == 0 {
            return Ok(self.value(xi1, xi2));
        }
        match &self.kind {
            SymbolKind::Constant(_) => Ok(0.0),
            SymbolKind::Custom(c) => c.partial(i, j, xi1, xi2).ok_or_else(|| {
                Error::Capability(format!("custom symbol lacks partial of order ({i},{j})"))
            }),
            SymbolKind::Power(b) => Ok(self.partial_power(*b, i, j, xi1, xi2)),
            _ => {
                let r = xi1.hypot(xi2);
                if r < 1e-150 {
                    // Evenness forces odd-order derivatives to vanish at the
                    // origin; even orders of the |xi|-based kinds do not exist
                    // there classically.
                    if (i + j) % 2 == 1 {
                        return Ok(0.0);
                    }
                    return Err(Error::Domain(format!(
                        "derivative order ({i},{j}) of `{}` undefined at the origin",
                        self.spec
                    )));
                }
                let jet = self.profile_jet(r)?;
                let terms = radial_terms(i as usize, j as usize);
                let mut acc = 0.0;
                for t in terms {
                    acc += t.coef
                        * xi1.powi(t.a)
                        * xi2.powi(t.b)
                        * r.powi(-t.m)
                        * jet.derivative(t.k);
                }
                Ok(acc)
            }
        }
    }

    /// Power kind through the representation in u = |xi|^2; smooth everywhere
    /// including the origin.
    fn partial_power(&self, beta: f64, i: u32, j: u32, xi1: f64, xi2: f64) -> f64 {
        let u = xi1 * xi1 + xi2 * xi2;
        let terms = quadratic_terms(i as usize, j as usize);
        // g(u) = (1+u)^(beta/2); g^(k)(u) = (beta/2)_falling_k (1+u)^(beta/2-k)
        let mut gk = [0.0f64; 9];
        let mut fall = 1.0;
        for (k, g) in gk.iter_mut().enumerate() {
            *g = fall * (1.0 + u).powf(beta / 2.0 - k as f64);
            fall *= beta / 2.0 - k as f64;
        }
        let mut acc = 0.0;
        for t in terms {
            acc += t.coef * xi1.powi(t.a) * xi2.powi(t.b) * gk[t.k];
        }
        acc
    }

    /// Grid supremum of log2(gamma(2 xi)/gamma(xi)) plus a 0.01 safety margin.
    fn estimate_beta0(&self) -> f64 {
        let mut sup: f64 = 0.0;
        let angles = [0.0, 0.35, 0.79, 1.15, std::f64::consts::FRAC_PI_2];
        let mut r = self.xi0.max(1.0);
        while r <= (1u64 << 20) as f64 {
            for &th in &angles {
                let (x1, x2) = (r * th.cos(), r * th.sin());
                let ratio = self.value(2.0 * x1, 2.0 * x2) / self.value(x1, x2);
                if ratio > 0.0 {
                    sup = sup.max(ratio.log2());
                }
            }
            r *= 2f64.powf(0.25);
        }
        sup + 0.01
    }

    pub fn restricted(&self, lambda0: u32) -> RestrictedSymbol {
        RestrictedSymbol {
            parent: self.clone(),
            lambda0,
        }
    }
}

#[derive(Clone, Copy)]
struct RTerm {
    a: i32,
    b: i32,
    m: i32,
    k: usize,
    coef: f64,
}

type TermTable = Vec<Vec<RTerm>>;

fn idx(i: usize, j: usize) -> usize {
    i * (MAX_PARTIAL_ORDER as usize + 1) + j
}

/// Terms of d^i_xi1 d^j_xi2 applied to h(r): sum coef xi1^a xi2^b r^-m h^(k)(r).
fn radial_terms(i: usize, j: usize) -> &'static [RTerm] {
    static TABLE: OnceLock<TermTable> = OnceLock::new();
    &TABLE.get_or_init(|| build_table(diff_radial))[idx(i, j)]
}

/// Terms of d^i_xi1 d^j_xi2 applied to g(u), u = |xi|^2: sum coef xi1^a xi2^b g^(k)(u).
fn quadratic_terms(i: usize, j: usize) -> &'static [RTerm] {
    static TABLE: OnceLock<TermTable> = OnceLock::new();
    &TABLE.get_or_init(|| build_table(diff_quadratic))[idx(i, j)]
}

fn build_table(diff: fn(&[RTerm], usize) -> Vec<RTerm>) -> TermTable {
    let n = MAX_PARTIAL_ORDER as usize + 1;
    let mut table = vec![Vec::new(); n * n];
    table[idx(0, 0)] = vec![RTerm {
        a: 0,
        b: 0,
        m: 0,
        k: 0,
        coef: 1.0,
    }];
    for i in 0..n {
        for j in 0..n {
            if i == 0 && j == 0 {
                continue;
            }
            let src = if j > 0 { idx(i, j - 1) } else { idx(i - 1, j) };
            let var = if j > 0 { 1 } else { 0 };
            table[idx(i, j)] = diff(&table[src], var);
        }
    }
    table
}

fn collect(terms: Vec<RTerm>) -> Vec<RTerm> {
    let mut map: HashMap<(i32, i32, i32, usize), f64> = HashMap::new();
    for t in terms {
        *map.entry((t.a, t.b, t.m, t.k)).or_insert(0.0) += t.coef;
    }
    let mut out: Vec<RTerm> = map
        .into_iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|((a, b, m, k), coef)| RTerm { a, b, m, k, coef })
        .collect();
    out.sort_by_key(|t| (t.k, t.m, t.a, t.b));
    out
}

/// d/d xi_var of coef xi1^a xi2^b r^-m h^(k)(r), with dr/dxi = xi/r.
fn diff_radial(terms: &[RTerm], var: usize) -> Vec<RTerm> {
    let mut out = Vec::new();
    for t in terms {
        let (p, da, db) = if var == 0 {
            (t.a, 1, 0)
        } else {
            (t.b, 0, 1)
        };
        if p > 0 {
            out.push(RTerm {
                a: t.a - da,
                b: t.b - db,
                m: t.m,
                k: t.k,
                coef: t.coef * p as f64,
            });
        }
        if t.m != 0 {
            out.push(RTerm {
                a: t.a + da,
                b: t.b + db,
                m: t.m + 2,
                k: t.k,
                coef: -t.coef * t.m as f64,
            });
        }
        out.push(RTerm {
            a: t.a + da,
            b: t.b + db,
            m: t.m + 1,
            k: t.k + 1,
            coef: t.coef,
        });
    }
    collect(out)
}

/// d/d xi_var of coef xi1^a xi2^b g^(k)(u), with du/dxi = 2 xi.
fn diff_quadratic(terms: &[RTerm], var: usize) -> Vec<RTerm> {
    let mut out = Vec::new();
    for t in terms {
        let (p, da, db) = if var == 0 {
            (t.a, 1, 0)
        } else {
            (t.b, 0, 1)
        };
        if p > 0 {
            out.push(RTerm {
                a: t.a - da,
                b: t.b - db,
                m: 0,
                k: t.k,
                coef: t.coef * p as f64,
            });
        }
        out.push(RTerm {
            a: t.a + da,
            b: t.b + db,
            m: 0,
            k: t.k + 1,
            coef: 2.0 * t.coef,
        });
    }
    collect(out)
}

/// The restricted branch gamma_{lambda0}(xi) = gamma(lambda0, xi) on
/// [lambda0, infinity), strictly increasing for the catalog kinds.
#[derive(Clone, Debug)]
pub struct RestrictedSymbol {
    pub parent: Symbol,
    pub lambda0: u32,
}

impl RestrictedSymbol {
    pub fn value(&self, xi2: f64) -> f64 {
        self.parent.value(self.lambda0 as f64, xi2)
    }

    /// d^k/dxi2^k gamma(lambda0, xi2).
    pub fn deriv(&self, k: u32, xi2: f64) -> f64 {
        self.parent
            .eval_partial(0, k, self.lambda0 as f64, xi2)
            .unwrap_or(f64::NAN)
    }

    /// Inverse of the monotone branch: the xi2 >= lambda0 with
    /// gamma(lambda0, xi2) = y, to relative tolerance 1e-10.
    /// Bracketed bisection (doubling bracket, capped) then Newton polish.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let l0 = self.lambda0 as f64;
        let base = self.value(l0);
        if !(y >= base * (1.0 - 1e-12)) {
            return Err(Error::Domain(format!(
                "inverse target {y} below gamma_lambda0(lambda0) = {base}"
            )));
        }
        if y <= base {
            return Ok(l0);
        }
        let cap = l0 * 2f64.powi(64);
        let (lo, hi) = roots::expand_upper(&|x| self.value(x), l0, l0.max(1.0), y, cap)?;
        let x = roots::bisect_newton(
            &|x| self.value(x) - y,
            &|x| self.deriv(1, x),
            lo,
            hi,
            1e-12,
            5,
        )?;
        let check = self.value(x);
        if (check - y).abs() > 1e-10 * y.abs().max(1e-300) {
            return Err(Error::Integration {
                what: format!("inverse residual {} for target {y}", check - y),
                t: x,
            });
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub pass: bool,
    /// worst measured value of the check's figure of merit
    pub worst: f64,
    pub threshold: f64,
    /// frequency at which the worst case occurred
    pub witness: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub symbol: String,
    pub beta0: f64,
    pub xi0: f64,
    pub checks: Vec<AssumptionCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SamplePlan {
    pub xi_max: f64,
    pub steps_per_octave: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            xi_max: (1u64 << 20) as f64,
            steps_per_octave: 4,
        }
    }
}

/// Validate the structural assumptions on a geometric sample grid and report
/// worst-case ratios; violations carry the witnessing frequency.
pub fn validate_assumptions(sym: &Symbol, plan: &SamplePlan) -> ValidationReport {
    let xi0 = sym.xi0;
    let mut checks = Vec::new();

    let radii: Vec<f64> = {
        let mut v = Vec::new();
        let mut r = xi0;
        let fac = 2f64.powf(1.0 / plan.steps_per_octave as f64);
        while r <= plan.xi_max {
            v.push(r);
            r *= fac;
        }
        v
    };
    let angles = [0.0, 0.3, 0.6, 0.9, 1.2, std::f64::consts::FRAC_PI_2];

    // Assumption 2: growth at infinity, value(2 xi) > value(xi).
    {
        let mut worst = f64::INFINITY;
        let mut witness = (0.0, 0.0);
        for &r in &radii {
            for &th in &angles {
                let (x1, x2) = (r * th.cos(), r * th.sin());
                let ratio = sym.value(2.0 * x1, 2.0 * x2) / sym.value(x1, x2);
                if ratio < worst {
                    worst = ratio;
                    witness = (x1, x2);
                }
            }
        }
        checks.push(AssumptionCheck {
            name: "growth (value(2 xi) > value(xi))".into(),
            pass: worst > 1.0,
            worst,
            threshold: 1.0,
            witness,
        });
    }

    // Slow variance: sup over |xi'| in [|xi|, 2|xi|] of value(xi') <= 2^beta0 value(xi).
    {
        let bound = 2f64.powf(sym.beta0);
        let mut worst: f64 = 0.0;
        let mut witness = (0.0, 0.0);
        for &r in &radii {
            for &th in &angles {
                let (x1, x2) = (r * th.cos(), r * th.sin());
                let v = sym.value(x1, x2);
                let mut sup: f64 = 0.0;
                for &fac in &[1.0, 1.25, 1.5, 1.75, 2.0] {
                    for &th2 in &angles {
                        let rr = r * fac;
                        sup = sup.max(sym.value(rr * th2.cos(), rr * th2.sin()));
                    }
                }
                let ratio = sup / v;
                if ratio > worst {
                    worst = ratio;
                    witness = (x1, x2);
                }
            }
        }
        checks.push(AssumptionCheck {
            name: "slow variance (doubling ratio <= 2^beta0)".into(),
            pass: worst <= bound * (1.0 + 1e-12),
            worst,
            threshold: bound,
            witness,
        });
    }

    // Assumptions 3 and 4 live on xi0 <= |xi1| <= |xi2|.
    let t = |x1: f64, x2: f64| -> f64 {
        x2 * sym.eval_partial(0, 1, x1, x2).unwrap_or(f64::NAN)
    };
    {
        // Assumption 3 (ellipticity part): xi2 d_xi2 gamma > 0 on the region.
        let mut worst = f64::INFINITY;
        let mut witness = (0.0, 0.0);
        for &r2 in &radii {
            let mut r1 = xi0;
            while r1 <= r2 {
                let v = t(r1, r2);
                if v < worst {
                    worst = v;
                    witness = (r1, r2);
                }
                r1 *= 2.0;
            }
        }
        checks.push(AssumptionCheck {
            name: "xi2 d_xi2 gamma elliptic (positive)".into(),
            pass: worst > 0.0,
            worst,
            threshold: 0.0,
            witness,
        });
    }
    {
        // Assumption 4: xi2 d_xi2 gamma >= gamma / (log |xi2|)^2.
        let mut worst = f64::INFINITY;
        let mut witness = (0.0, 0.0);
        for &r2 in &radii {
            let mut r1 = xi0;
            while r1 <= r2 {
                let lhs = t(r1, r2);
                let rhs = sym.value(r1, r2) / r2.ln().powi(2);
                let ratio = lhs / rhs;
                if ratio < worst {
                    worst = ratio;
                    witness = (r1, r2);
                }
                r1 *= 2.0;
            }
        }
        checks.push(AssumptionCheck {
            name: "almost comparable (xi2 d_xi2 gamma >= gamma / log^2 |xi2|)".into(),
            pass: worst >= 1.0,
            worst,
            threshold: 1.0,
            witness,
        });
    }

    ValidationReport {
        symbol: sym.spec_string().to_string(),
        beta0: sym.beta0,
        xi0,
        checks,
    }
}
