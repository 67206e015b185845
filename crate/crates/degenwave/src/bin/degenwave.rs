//! Thin command-line front end over the library. Each subcommand wraps one
//! library entry point; all heavy lifting lives in `degenwave::*`.
//! Exit code 0 only if every asserted invariant of the run passes.

use clap::{Args, Parser, Subcommand};
use degenwave::amplitude::evolve_amplitude;
use degenwave::growth::check_conditions;
use degenwave::harness::{self, ExperimentConfig};
use degenwave::linop::{duality_experiment, residual, LinOp};
use degenwave::phase::{build_phase_field, Window};
use degenwave::symbols::{validate_assumptions, SamplePlan, Symbol};
use degenwave::toymodel;
use degenwave::wavepacket::packet_at;
use degenwave::Result;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "degenwave",
    about = "Degenerating wave packets for generalized SQG shear states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PlanArgs {
    /// symbol spec, e.g. power:1.0, log:1.0, explog:1.0,0.5
    #[arg(long, default_value = "power:1.0")]
    gamma: String,
    /// dissipation symbol spec
    #[arg(long)]
    upsilon: Option<String>,
    /// shear spec, e.g. cos:1 or coeffs:<path>
    #[arg(long, default_value = "cos:1")]
    shear: String,
    #[arg(long, default_value_t = 0.0)]
    kappa: f64,
    #[arg(long, default_value_t = 64)]
    lambda0: u32,
    #[arg(long, default_value_t = 4.0)]
    m: f64,
    /// fixed localization scale (eps)
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// desk window: relative slope spread
    #[arg(long, default_value_t = 0.7)]
    window_spread: f64,
    /// desk window: outer endpoint x1
    #[arg(long, default_value_t = 1.2)]
    window_x1: f64,
    /// run even if the growth conditions fail
    #[arg(long)]
    force: bool,
}

impl PlanArgs {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            gamma: self.gamma.clone(),
            upsilon: self.upsilon.clone(),
            shear: self.shear.clone(),
            kappa: self.kappa,
            lambda0_list: vec![self.lambda0],
            m_factor: self.m,
            eps: Some(self.eps),
            window_spread: self.window_spread,
            window_x1: self.window_x1,
            force: self.force,
            ..ExperimentConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the growth conditions and emit a JSON GrowthPlan
    Plan(PlanArgs),
    /// Exact toy-model solve; emits CSV (t, xi_peak, L2, Hs, ratio)
    Toy {
        #[arg(long, default_value = "power:1.0")]
        gamma: String,
        #[arg(long)]
        upsilon: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        kappa: f64,
        #[arg(long, default_value_t = 64.0)]
        lambda0: f64,
        /// final time; defaults to the time for the peak to reach 4 lambda0
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        s_prime: f64,
        #[arg(long, default_value_t = 17)]
        steps: usize,
    },
    /// Integrate the bicharacteristic fan; emits per-ray CSV (t, X, Xi, h, I, p)
    Phase {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, default_value_t = 65)]
        t_samples: usize,
        #[arg(long, default_value_t = 33)]
        rays: usize,
    },
    /// Assemble the wave packet; writes snapshots and prints norms
    Packet {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve the packet data under the true flow and report duality growth
    Evolve {
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 1.0)]
        s_prime: f64,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long, default_value_t = 32)]
        snapshots: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full lambda0 sweep from a key = value config file
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the symbolic instability tables at (s, s')
    TableCheck {
        #[arg(long, default_value_t = 4.0)]
        s: f64,
        #[arg(long, default_value_t = 4.0)]
        s_prime: f64,
    },
    /// Validate the structural assumptions of a symbol on a sample grid
    ValidateSymbol {
        spec: String,
        #[arg(long, default_value_t = 1048576.0)]
        xi_max: f64,
    },
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serialize")
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(all_pass) => std::process::exit(if all_pass { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Plan(args) => {
            let cfg = args.config();
            let (gamma, upsilon, shear, params) = cfg.build_inputs()?;
            let plan = check_conditions(
                &gamma,
                upsilon.as_ref(),
                &shear,
                &params,
                args.lambda0,
                args.m,
            )?;
            println!("{}", json(&plan));
            Ok(plan.admissible || args.force)
        }
        Command::Toy {
            gamma,
            upsilon,
            kappa,
            lambda0,
            t_final,
            s,
            s_prime,
            steps,
        } => {
            let g = Symbol::parse(&gamma)?;
            let u = upsilon.as_deref().map(Symbol::parse).transpose()?;
            let (grid, data) = toymodel::gaussian_data(lambda0, 1601);
            let t_end = t_final
                .unwrap_or_else(|| toymodel::time_to_reach(&g, lambda0, lambda0, 4.0 * lambda0));
            let mut states = Vec::new();
            for i in 0..=steps {
                let t = t_end * i as f64 / steps as f64;
                states.push(toymodel::solve_dissipative(
                    &g,
                    u.as_ref(),
                    kappa,
                    lambda0,
                    &grid,
                    &data,
                    t,
                )?);
            }
            let report = toymodel::hs_growth_report(&states, &g, s, s_prime)?;
            println!("t,xi_peak,l2,hs,illposedness_ratio,hs_growth,losing_exponent");
            for r in &report.rows {
                println!(
                    "{},{},{},{},{},{},{}",
                    r.t, r.xi_peak, r.l2, r.hs, r.illposedness_ratio, r.hs_growth, r.losing_exponent
                );
            }
            let e0 = states[0].energy(&g);
            let drift = states
                .iter()
                .map(|st| (st.energy(&g) - e0).abs() / e0)
                .fold(0.0f64, f64::max);
            eprintln!("energy drift (kappa = 0 invariant): {drift:.3e}");
            Ok(kappa > 0.0 || drift < 1e-6)
        }
        Command::Phase { plan, t_samples, rays } => {
            let cfg = plan.config();
            let (gamma, upsilon, shear, params) = cfg.build_inputs()?;
            let gp = check_conditions(
                &gamma,
                upsilon.as_ref(),
                &shear,
                &params,
                plan.lambda0,
                plan.m,
            )?;
            // ray diagnostics live on the paper-scaled window
            let w = Window::asymptotic(&gamma, &shear, plan.lambda0, gp.eps, params.c_x0)?;
            let field = build_phase_field(&gamma, &shear, &gp, &params, w, rays, plan.force)?;
            println!("ray,t,x,xi,h,i_factor,hamiltonian");
            let mut ok = true;
            for (ri, ray) in field.rays.iter().enumerate() {
                for i in 0..t_samples {
                    let t = field.t_star * i as f64 / (t_samples - 1) as f64;
                    let st = ray.state_at(&field.psym, t);
                    println!(
                        "{ri},{t},{},{},{},{},{}",
                        st.x, st.xi, st.h, st.i_factor, st.hamiltonian
                    );
                    let l = field.lambda(t);
                    if st.xi < l * (1.0 - 1e-9) || st.xi > 2.0 * l {
                        ok = false;
                    }
                }
            }
            eprintln!("frequency sandwich lambda <= Xi <= 2 lambda: {ok}");
            Ok(ok)
        }
        Command::Packet { plan, resolution, out } => {
            let cfg = plan.config();
            let (gamma, upsilon, shear, params) = cfg.build_inputs()?;
            let gp = check_conditions(
                &gamma,
                upsilon.as_ref(),
                &shear,
                &params,
                plan.lambda0,
                plan.m,
            )?;
            let w = Window::desk(&gamma, &shear, plan.lambda0, plan.window_spread, plan.window_x1)?;
            let field = build_phase_field(&gamma, &shear, &gp, &params, w, 257, plan.force)?;
            let amp = evolve_amplitude(&field);
            let n = match resolution {
                Some(n) => n,
                None => harness::auto_resolution(&field, &amp, plan.lambda0, plan.m, plan.window_spread)?,
            };
            let mut all_ok = true;
            for (name, t) in [("t0", 0.0), ("tstar", field.t_star)] {
                let wp = packet_at(&field, &amp, t, n)?.with_lambda0(plan.lambda0);
                let (main, small) = wp.decompose()?;
                println!(
                    "{name}: t = {t:.5}, N = {n}, l2_2d = {:.6}, band8 = {:.4}, centroid = {:.1}, H^-1(main) = {:.5}, l2(small) = {:.3e}",
                    wp.l2_2d(),
                    wp.band_energy_fraction(8.0),
                    wp.spectral_centroid(),
                    main.weighted_norm(-1.0, 0.0, &gamma),
                    std::f64::consts::PI.sqrt() * small.l2(),
                );
                all_ok &= wp.top_band_fraction() < 1e-8;
                if let Some(dir) = &out {
                    std::fs::create_dir_all(dir)?;
                    let mut f = std::fs::File::create(dir.join(format!("packet_{name}.bin")))?;
                    wp.write_snapshot(&mut f)?;
                }
            }
            Ok(all_ok)
        }
        Command::Evolve {
            plan,
            s,
            s_prime,
            resolution,
            snapshots,
            seed,
            out,
        } => {
            let cfg = plan.config();
            let (gamma, upsilon, shear, params) = cfg.build_inputs()?;
            let gp = check_conditions(
                &gamma,
                upsilon.as_ref(),
                &shear,
                &params,
                plan.lambda0,
                plan.m,
            )?;
            let w = Window::desk(&gamma, &shear, plan.lambda0, plan.window_spread, plan.window_x1)?;
            let field = build_phase_field(&gamma, &shear, &gp, &params, w, 257, plan.force)?;
            let amp = evolve_amplitude(&field);
            let n = match resolution {
                Some(n) => n,
                None => harness::auto_resolution(&field, &amp, plan.lambda0, plan.m, plan.window_spread)?,
            };
            let op = LinOp::new(&gamma, &shear, upsilon.as_ref(), plan.kappa, plan.lambda0, n)?;
            let times: Vec<f64> = (0..=snapshots)
                .map(|i| field.t_star * i as f64 / snapshots as f64)
                .collect();
            let resid = residual(&field, &amp, &op, &times, n)?;
            let report =
                duality_experiment(&gp, &field, &amp, &op, s, s_prime, n, snapshots, seed, 1.0)?;
            println!("{}", json(&report));
            eprintln!(
                "residual integral = {:.4e} (dt check {:.2e})",
                resid.integral, resid.dt_check
            );
            if let Some(path) = out {
                std::fs::write(path, json(&report))?;
            }
            Ok(report.ledger.ok)
        }
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            if out.is_some() {
                cfg.out_dir = out;
            }
            let report = harness::run(&cfg)?;
            println!("{}", json(&report));
            Ok(report.all_ledgers_ok)
        }
        Command::TableCheck { s, s_prime } => {
            let linear = [
                Symbol::power(2.0),
                Symbol::power(1.0),
                Symbol::power(0.5),
                Symbol::log(1.0),
                Symbol::loglog(1.0),
            ];
            println!("nondissipative table (s = {s}, s' = {s_prime}):");
            for g in &linear {
                let row = harness::linear_table_row(g, s, s_prime)?;
                println!(
                    "  {:12} {:60} -> {}",
                    row.gamma,
                    row.condition,
                    if row.unstable { "UNSTABLE" } else { "stable" }
                );
            }
            let diss = [
                (Symbol::power(1.5), Symbol::power(1.0)),
                (Symbol::power(1.0), Symbol::power(0.5)),
                (Symbol::power(0.5), Symbol::power(0.25)),
                (Symbol::log(1.0), Symbol::log(0.5)),
            ];
            println!("dissipative table (in addition to the nondissipative rows):");
            for (g, u) in &diss {
                let row = harness::dissipative_table_row(g, u, s, s_prime)?;
                println!(
                    "  {:12} + {:12} {:55} -> {}",
                    row.gamma,
                    row.upsilon.as_deref().unwrap_or(""),
                    row.condition,
                    if row.unstable { "UNSTABLE" } else { "stable" }
                );
            }
            Ok(true)
        }
        Command::ValidateSymbol { spec, xi_max } => {
            let sym = Symbol::parse(&spec)?;
            let plan = SamplePlan {
                xi_max,
                ..SamplePlan::default()
            };
            let report = validate_assumptions(&sym, &plan);
            println!("{}", json(&report));
            Ok(report.all_pass())
        }
    }
}
