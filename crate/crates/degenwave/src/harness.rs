//! Experiment orchestration: configuration, the per-point pipeline
//! (plan -> phase -> amplitude -> packet -> evolve -> diagnostics), sweeps
//! across lambda0, the symbolic instability tables, and persistence of
//! reports, series and packet snapshots.

use crate::amplitude::{evolve_amplitude, AmplitudeField};
use crate::error::{Error, Result};
use crate::growth::{check_conditions, AsymptoticParameters, EpsMode, GrowthPlan};
use crate::linop::{duality_experiment, residual, DualityReport, LinOp, ResidualReport};
use crate::phase::{build_phase_field, PhaseField, Window};
use crate::shear::ShearProfile;
use crate::symbols::{Symbol, SymbolKind};
use crate::wavepacket::packet_at;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Everything one experiment needs; parses from flat key = value text.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub gamma: String,
    pub upsilon: Option<String>,
    pub shear: String,
    pub kappa: f64,
    pub lambda0_list: Vec<u32>,
    pub m_factor: f64,
    pub s: f64,
    pub s_prime: f64,
    pub sigma: f64,
    /// fixed localization scale for the plan (None = geometric-mean default)
    pub eps: Option<f64>,
    /// desk packet geometry: relative slope spread and the window top
    pub window_spread: f64,
    pub window_x1: f64,
    pub fan_size: usize,
    /// grid size override (power of two); chosen by the watchdog when absent
    pub resolution: Option<usize>,
    pub snapshots: usize,
    /// evolve the true flow to extend_factor * t_star for the direct norm sup
    pub extend_factor: f64,
    pub seed: u64,
    pub force: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            gamma: "power:1.0".into(),
            upsilon: None,
            shear: "cos:1".into(),
            kappa: 0.0,
            lambda0_list: vec![64],
            m_factor: 4.0,
            s: 1.0,
            s_prime: 1.0,
            sigma: 0.0,
            eps: Some(0.1),
            window_spread: 0.7,
            window_x1: 1.2,
            fan_size: 257,
            resolution: None,
            snapshots: 32,
            extend_factor: 1.0,
            seed: 7,
            force: false,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    /// Parse the flat key = value format (a TOML-compatible subset:
    /// scalars, strings and one-line arrays; `#` comments).
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: missing `=`", lineno + 1)))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            let bad = |what: &str| Error::Config(format!("line {}: bad {what}", lineno + 1));
            match key {
                "gamma" => cfg.gamma = value.to_string(),
                "upsilon" => cfg.upsilon = Some(value.to_string()),
                "shear" => cfg.shear = value.to_string(),
                "kappa" => cfg.kappa = value.parse().map_err(|_| bad("kappa"))?,
                "lambda0" => {
                    let inner = value.trim_start_matches('[').trim_end_matches(']');
                    cfg.lambda0_list = inner
                        .split(',')
                        .map(|v| v.trim().parse::<u32>().map_err(|_| bad("lambda0")))
                        .collect::<Result<_>>()?;
                }
                "m" | "m_factor" => cfg.m_factor = value.parse().map_err(|_| bad("m"))?,
                "s" => cfg.s = value.parse().map_err(|_| bad("s"))?,
                "s_prime" => cfg.s_prime = value.parse().map_err(|_| bad("s_prime"))?,
                "sigma" => cfg.sigma = value.parse().map_err(|_| bad("sigma"))?,
                "eps" => {
                    cfg.eps = if value == "window" {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad("eps"))?)
                    }
                }
                "window_spread" => {
                    cfg.window_spread = value.parse().map_err(|_| bad("window_spread"))?
                }
                "window_x1" => cfg.window_x1 = value.parse().map_err(|_| bad("window_x1"))?,
                "fan_size" => cfg.fan_size = value.parse().map_err(|_| bad("fan_size"))?,
                "resolution" => {
                    cfg.resolution = Some(value.parse().map_err(|_| bad("resolution"))?)
                }
                "snapshots" => cfg.snapshots = value.parse().map_err(|_| bad("snapshots"))?,
                "extend_factor" => {
                    cfg.extend_factor = value.parse().map_err(|_| bad("extend_factor"))?
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                "force" => cfg.force = value.parse().map_err(|_| bad("force"))?,
                "out_dir" => cfg.out_dir = Some(PathBuf::from(value)),
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        Symbol::parse(&self.gamma)?;
        if let Some(u) = &self.upsilon {
            Symbol::parse(u)?;
        }
        ShearProfile::parse(&self.shear)?;
        if self.lambda0_list.is_empty() {
            return Err(Error::Config("empty lambda0 list".into()));
        }
        if self.lambda0_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("lambda0 list must be sorted ascending".into()));
        }
        if let Some(n) = self.resolution {
            if !n.is_power_of_two() {
                return Err(Error::Config(format!("resolution {n} is not a power of two")));
            }
        }
        Ok(())
    }

    pub fn build_inputs(&self) -> Result<(Symbol, Option<Symbol>, ShearProfile, AsymptoticParameters)> {
        let gamma = Symbol::parse(&self.gamma)?;
        let upsilon = self.upsilon.as_deref().map(Symbol::parse).transpose()?;
        let mut shear = ShearProfile::parse(&self.shear)?;
        if self.kappa > 0.0 {
            let ups = upsilon
                .clone()
                .ok_or_else(|| Error::Config("kappa > 0 requires upsilon".into()))?;
            shear = shear.with_dissipation(self.kappa, ups)?;
        }
        let mut params = AsymptoticParameters::default();
        if let Some(e) = self.eps {
            params.eps_mode = EpsMode::Fixed(e);
        } else {
            params.eps_mode = EpsMode::WindowGeometricMean;
        }
        Ok((gamma, upsilon, shear, params.validated()?))
    }
}

/// Per-lambda0 results of the full pipeline.
#[derive(Debug, Serialize)]
pub struct PointReport {
    pub plan: GrowthPlan,
    pub window_x0: f64,
    pub window_x1: f64,
    pub eps_slope: f64,
    pub resolution: usize,
    pub band_fraction_t0: f64,
    pub packet_l2_2d_t0: f64,
    pub amp_l2_ratio: f64,
    /// ||main(t*)||_{H^{-1}} / ||main(0)||_{H^{-1}}
    pub degeneration_hminus1: f64,
    pub spectral_centroid_t0: f64,
    pub spectral_centroid_tstar: f64,
    pub max_abs_h: f64,
    pub hamiltonian_drift: f64,
    pub residual: ResidualReport,
    pub duality: DualityReport,
}

/// The combined sweep verdict.
#[derive(Debug, Serialize)]
pub struct IllposednessReport {
    pub config: ExperimentConfig,
    pub points: Vec<PointReport>,
    /// least-squares slope of log(residual integral) against log(lambda0)
    pub residual_slope: Option<f64>,
    pub residual_strictly_decreasing: bool,
    pub duality_ratios: Vec<f64>,
    pub duality_nondecreasing: bool,
    pub degeneration_max: f64,
    pub all_ledgers_ok: bool,
}

/// Install a rayon pool honoring DEGENWAVE_THREADS and run `f` inside it.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let threads = std::env::var("DEGENWAVE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    match threads {
        Some(k) if k > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

/// Grid size for a packet run: start from the carrier estimate and double
/// until the resolution watchdog clears at both ends of the run.
pub fn auto_resolution(
    field: &PhaseField,
    amp: &AmplitudeField<'_>,
    lambda0: u32,
    m_factor: f64,
    spread: f64,
) -> Result<usize> {
    let carrier = 6.0 * m_factor * lambda0 as f64 * (1.0 + spread);
    let mut n = (carrier as usize).next_power_of_two().max(4096);
    loop {
        let ok = |t: f64| -> Result<bool> {
            let wp = packet_at(field, amp, t, n)?.with_lambda0(lambda0);
            Ok(wp.top_band_fraction() < 1e-9)
        };
        if ok(0.0)? && ok(field.t_star)? {
            return Ok(n);
        }
        n *= 2;
        if n > (1 << 19) {
            return Err(Error::Resolution(
                "packet does not fit any affordable grid".into(),
            ));
        }
    }
}

/// Run the full pipeline for a single lambda0.
pub fn run_point(config: &ExperimentConfig, lambda0: u32) -> Result<PointReport> {
    let (gamma, upsilon, shear, params) = config.build_inputs()?;
    let stage = |e: Error, name: &str| e.in_stage(name);

    let plan = check_conditions(
        &gamma,
        upsilon.as_ref(),
        &shear,
        &params,
        lambda0,
        config.m_factor,
    )
    .map_err(|e| stage(e, "plan"))?;

    let window = Window::desk(&gamma, &shear, lambda0, config.window_spread, config.window_x1)
        .map_err(|e| stage(e, "window"))?;
    let field = build_phase_field(
        &gamma,
        &shear,
        &plan,
        &params,
        window.clone(),
        config.fan_size,
        config.force,
    )
    .map_err(|e| stage(e, "phase"))?;
    let amp = evolve_amplitude(&field);

    let n = match config.resolution {
        Some(n) => n,
        None => auto_resolution(&field, &amp, lambda0, config.m_factor, config.window_spread)
            .map_err(|e| stage(e, "resolution"))?,
    };

    // packet diagnostics at both ends
    let wp0 = packet_at(&field, &amp, 0.0, n)
        .map_err(|e| stage(e, "packet"))?
        .with_lambda0(lambda0);
    let wp1 = packet_at(&field, &amp, field.t_star, n)
        .map_err(|e| stage(e, "packet"))?
        .with_lambda0(lambda0);
    let (main0, _) = wp0.decompose().map_err(|e| stage(e, "packet"))?;
    let (main1, _) = wp1.decompose().map_err(|e| stage(e, "packet"))?;
    let degeneration =
        main1.weighted_norm(-1.0, 0.0, &gamma) / main0.weighted_norm(-1.0, 0.0, &gamma);

    // ray diagnostics
    let mut max_h: f64 = 0.0;
    let mut ham_drift: f64 = 0.0;
    for ray in &field.rays {
        let h0 = ray.state_at(&field.psym, 0.0).hamiltonian;
        for i in 0..=16 {
            let t = field.t_star * i as f64 / 16.0;
            let s = ray.state_at(&field.psym, t);
            max_h = max_h.max(s.h.abs());
            if shear.is_steady() {
                ham_drift = ham_drift.max((s.hamiltonian - h0).abs() / h0.abs());
            }
        }
    }

    let op = LinOp::new(&gamma, &shear, upsilon.as_ref(), config.kappa, lambda0, n)
        .map_err(|e| stage(e, "linop"))?;
    let times: Vec<f64> = (0..=config.snapshots)
        .map(|i| field.t_star * i as f64 / config.snapshots as f64)
        .collect();
    let resid = residual(&field, &amp, &op, &times, n).map_err(|e| stage(e, "residual"))?;
    let duality = duality_experiment(
        &plan,
        &field,
        &amp,
        &op,
        config.s,
        config.s_prime,
        n,
        config.snapshots,
        config.seed,
        config.extend_factor,
    )
    .map_err(|e| stage(e, "duality"))?;

    let report = PointReport {
        plan,
        window_x0: window.x0,
        window_x1: window.x1,
        eps_slope: window.eps_slope,
        resolution: n,
        band_fraction_t0: wp0.band_energy_fraction(8.0),
        packet_l2_2d_t0: wp0.l2_2d(),
        amp_l2_ratio: amp.l2_norm(field.t_star) / amp.l2_norm(0.0),
        degeneration_hminus1: degeneration,
        spectral_centroid_t0: wp0.spectral_centroid(),
        spectral_centroid_tstar: wp1.spectral_centroid(),
        max_abs_h: max_h,
        hamiltonian_drift: ham_drift,
        residual: resid,
        duality,
    };

    if let Some(dir) = &config.out_dir {
        persist_point(dir, config, &report, &wp0, &wp1)?;
    }
    Ok(report)
}

fn persist_point(
    dir: &Path,
    config: &ExperimentConfig,
    report: &PointReport,
    wp0: &crate::wavepacket::WavePacket,
    wp1: &crate::wavepacket::WavePacket,
) -> Result<()> {
    let point_dir = dir.join(format!("lambda0_{}", report.plan.lambda0));
    std::fs::create_dir_all(&point_dir)?;
    std::fs::write(
        point_dir.join("report.json"),
        serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    let mut pairing = String::from("t,pairing,psi_l2,packet_l2\n");
    for (t, p, a, b) in &report.duality.pairing_series {
        let _ = writeln!(pairing, "{t},{p},{a},{b}");
    }
    std::fs::write(point_dir.join("pairing.csv"), pairing)?;
    let mut res = String::from("t,residual,diss_extra,localized\n");
    for (i, t) in report.residual.times.iter().enumerate() {
        let _ = writeln!(
            res,
            "{t},{},{},{}",
            report.residual.residual[i], report.residual.diss_extra[i], report.residual.localized[i]
        );
    }
    std::fs::write(point_dir.join("residual.csv"), res)?;
    let mut f0 = std::fs::File::create(point_dir.join("packet_t0.bin"))?;
    wp0.write_snapshot(&mut f0)?;
    let mut f1 = std::fs::File::create(point_dir.join("packet_tstar.bin"))?;
    wp1.write_snapshot(&mut f1)?;
    let _ = config;
    Ok(())
}

/// Execute the sweep: independent pipelines per lambda0 on a work-stealing
/// pool, then the combined verdicts.
pub fn run(config: &ExperimentConfig) -> Result<IllposednessReport> {
    config.validate()?;
    if let Some(dir) = &config.out_dir {
        std::fs::create_dir_all(dir)?;
    }
    let points: Result<Vec<PointReport>> = with_thread_cap(|| {
        config
            .lambda0_list
            .par_iter()
            .map(|&l0| run_point(config, l0))
            .collect()
    });
    let points = points?;

    let mut residual_slope = None;
    let mut strictly_decreasing = true;
    if points.len() >= 2 {
        let xs: Vec<f64> = points.iter().map(|p| (p.plan.lambda0 as f64).ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.residual.integral.ln()).collect();
        for w in ys.windows(2) {
            if w[1] >= w[0] {
                strictly_decreasing = false;
            }
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        residual_slope = Some(sxy / sxx);
    }
    let duality_ratios: Vec<f64> = points.iter().map(|p| p.duality.duality_growth_ratio).collect();
    let duality_nondecreasing = duality_ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
    let degeneration_max = points
        .iter()
        .map(|p| p.degeneration_hminus1)
        .fold(0.0f64, f64::max);
    let all_ledgers_ok = points.iter().all(|p| p.duality.ledger.ok);

    let report = IllposednessReport {
        config: config.clone(),
        points,
        residual_slope,
        residual_strictly_decreasing: strictly_decreasing,
        duality_ratios,
        duality_nondecreasing,
        degeneration_max,
        all_ledgers_ok,
    };
    if let Some(dir) = &config.out_dir {
        std::fs::write(
            dir.join("sweep.json"),
            serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?,
        )?;
    }
    Ok(report)
}

/// A row of the symbolic instability tables.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub gamma: String,
    pub upsilon: Option<String>,
    pub s: f64,
    pub s_prime: f64,
    pub condition: String,
    pub unstable: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Linear instability verdict for the nondissipative table
/// (power beta > 1 | power 1 | power beta < 1 | log | loglog).
pub fn linear_table_row(gamma: &Symbol, s: f64, s_prime: f64) -> Result<TableRow> {
    let (condition, unstable) = match &gamma.kind {
        SymbolKind::Power(beta) if *beta > 1.0 => (
            format!("s' = s > 3 + 3 beta/2 = {}", 3.0 + 1.5 * beta),
            close(s, s_prime) && s > 3.0 + 1.5 * beta,
        ),
        SymbolKind::Power(beta) if close(*beta, 1.0) => {
            ("s' > 9/2".to_string(), s_prime > 4.5)
        }
        SymbolKind::Power(beta) if *beta > 0.0 => {
            let b = *beta;
            let lhs = s_prime / (1.0 - b);
            let rhs = (s + b * b / (2.0 * (1.0 - b))).max(1.5 * (2.0 + b) / (1.0 - b));
            (
                "s'/(1-beta) > max(s + beta^2/(2(1-beta)), (3/2)(2+beta)/(1-beta))".to_string(),
                lhs > rhs,
            )
        }
        SymbolKind::Log(_) | SymbolKind::LogLog(_) => {
            ("s' = s > 3".to_string(), close(s, s_prime) && s > 3.0)
        }
        _ => {
            return Err(Error::Capability(format!(
                "no nondissipative table row for `{}`",
                gamma.spec_string()
            )))
        }
    };
    Ok(TableRow {
        gamma: gamma.spec_string().to_string(),
        upsilon: None,
        s,
        s_prime,
        condition,
        unstable,
    })
}

/// Dissipative instability verdict (the table rows are in addition to the
/// nondissipative restrictions; each row is evaluated as stated).
pub fn dissipative_table_row(
    gamma: &Symbol,
    upsilon: &Symbol,
    s: f64,
    s_prime: f64,
) -> Result<TableRow> {
    let (condition, unstable) = match (&gamma.kind, &upsilon.kind) {
        (SymbolKind::Power(beta), SymbolKind::Power(alpha)) if close(*beta, 1.0) => {
            if !(*alpha < 1.0) {
                return Err(Error::Capability("need alpha < 1".into()));
            }
            let a = *alpha;
            (
                "s'/alpha > s + (1-alpha)/(2 alpha)".to_string(),
                s_prime / a > s + (1.0 - a) / (2.0 * a),
            )
        }
        (SymbolKind::Power(beta), SymbolKind::Power(alpha)) => {
            if !(*alpha < *beta) {
                return Err(Error::Capability("need alpha < beta".into()));
            }
            let d = beta - alpha;
            if d >= 1.0 {
                return Err(Error::Capability(
                    "table row requires beta - alpha < 1".into(),
                ));
            }
            (
                "s'/(1-(beta-alpha)) > s + beta(beta-alpha)/(2(1-(beta-alpha)))".to_string(),
                s_prime / (1.0 - d) > s + beta * d / (2.0 * (1.0 - d)),
            )
        }
        (SymbolKind::Log(beta), SymbolKind::Log(alpha)) => {
            if !(*alpha < *beta) {
                return Err(Error::Capability("need alpha < beta".into()));
            }
            ("s' = s".to_string(), close(s, s_prime))
        }
        _ => {
            return Err(Error::Capability(format!(
                "no dissipative table row for ({}, {})",
                gamma.spec_string(),
                upsilon.spec_string()
            )))
        }
    };
    Ok(TableRow {
        gamma: gamma.spec_string().to_string(),
        upsilon: Some(upsilon.spec_string().to_string()),
        s,
        s_prime,
        condition,
        unstable,
    })
}

/// Evaluate a list of (gamma, optional upsilon, s, s') rows.
pub fn table_check(rows: &[(Symbol, Option<Symbol>, f64, f64)]) -> Result<Vec<TableRow>> {
    rows.iter()
        .map(|(g, u, s, sp)| match u {
            Some(u) => dissipative_table_row(g, u, *s, *sp),
            None => linear_table_row(g, *s, *sp),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parse_roundtrip() {
        let text = r#"
            # sweep configuration
            gamma = "power:1.0"
            shear = "cos:1"
            lambda0 = [32, 64, 128]
            m = 4.0
            s_prime = 1.0
            eps = 0.1
            seed = 42
        "#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.lambda0_list, vec![32, 64, 128]);
        assert_eq!(cfg.seed, 42);
        assert!(ExperimentConfig::parse("nonsense = 1").is_err());
        assert!(ExperimentConfig::parse("lambda0 = [64, 32]").is_err());
    }

    #[test]
    fn linear_table_all_rows() {
        // power beta > 1: s' = s > 3 + 3 beta / 2
        let g = Symbol::power(2.0);
        assert!(linear_table_row(&g, 6.1, 6.1).unwrap().unstable);
        assert!(!linear_table_row(&g, 5.9, 5.9).unwrap().unstable);
        assert!(!linear_table_row(&g, 6.1, 6.2).unwrap().unstable);
        // power 1: s' > 9/2
        let g = Symbol::power(1.0);
        assert!(linear_table_row(&g, 1.0, 4.6).unwrap().unstable);
        assert!(!linear_table_row(&g, 1.0, 4.4).unwrap().unstable);
        // power beta < 1
        let g = Symbol::power(0.5);
        assert!(linear_table_row(&g, 1.0, 4.0).unwrap().unstable); // 8 > 7.5
        assert!(!linear_table_row(&g, 1.0, 3.7).unwrap().unstable); // 7.4 < 7.5
        // log and loglog: s' = s > 3
        for g in [Symbol::log(1.0), Symbol::loglog(1.0)] {
            assert!(linear_table_row(&g, 3.1, 3.1).unwrap().unstable);
            assert!(!linear_table_row(&g, 2.9, 2.9).unwrap().unstable);
            assert!(!linear_table_row(&g, 3.1, 3.2).unwrap().unstable);
        }
    }

    #[test]
    fn dissipative_table_all_rows() {
        // beta = 1.5, alpha = 1.0: 2 s' > s + 0.75
        let g = Symbol::power(1.5);
        let u = Symbol::power(1.0);
        let row = dissipative_table_row(&g, &u, 4.0, 4.0).unwrap();
        assert!(row.unstable);
        assert!(!dissipative_table_row(&g, &u, 4.0, 2.3).unwrap().unstable);
        // beta = 1 row
        let g = Symbol::power(1.0);
        let u = Symbol::power(0.5);
        // 2 s' > s + 0.5
        assert!(dissipative_table_row(&g, &u, 1.0, 0.8).unwrap().unstable);
        assert!(!dissipative_table_row(&g, &u, 1.0, 0.7).unwrap().unstable);
        // beta < 1 row
        let g = Symbol::power(0.5);
        let u = Symbol::power(0.25);
        // s'/0.75 > s + 0.5*0.25/(2*0.75) = s + 1/12
        assert!(dissipative_table_row(&g, &u, 1.0, 0.82).unwrap().unstable);
        assert!(!dissipative_table_row(&g, &u, 1.0, 0.80).unwrap().unstable);
        // log pair: s' = s
        let g = Symbol::log(1.0);
        let u = Symbol::log(0.5);
        assert!(dissipative_table_row(&g, &u, 2.0, 2.0).unwrap().unstable);
        assert!(!dissipative_table_row(&g, &u, 2.0, 2.1).unwrap().unstable);
        // invalid pairs are capability errors
        assert!(dissipative_table_row(&Symbol::power(0.5), &Symbol::power(0.7), 1.0, 1.0).is_err());
    }

    #[test]
    fn enormous_s_prime_unstable_on_power_rows() {
        // inequalities monotone in s': huge s' is unstable for fixed s
        for g in [Symbol::power(1.0), Symbol::power(0.5), Symbol::power(1.5)] {
            let row = linear_table_row(&g, 4.0, 1e6).unwrap();
            if !matches!(g.kind, SymbolKind::Power(b) if b > 1.0) {
                assert!(row.unstable, "{:?}", row);
            }
        }
        // equality-type rows need s' = s; take both enormous
        assert!(linear_table_row(&Symbol::log(1.0), 1e6, 1e6).unwrap().unstable);
    }
}
