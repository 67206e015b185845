//! Full lambda0 sweep: growth plans, wave packets, residual decay, duality
//! growth and degeneration, with the combined trend fits.

use degenwave::harness::{run, ExperimentConfig};

fn main() {
    let mut config = ExperimentConfig::default();
    config.lambda0_list = vec![32, 64, 128, 256];
    let t0 = std::time::Instant::now();
    let report = run(&config).expect("sweep failed");
    for p in &report.points {
        println!(
            "lambda0 = {:4}  N = {:6}  residual integral = {:10.4e}  dt_check = {:.3}  pairing(t*) = {:+.4} (bound {:.4})  duality ratio = {:7.3} (pred {:7.3})  direct ratio = {:7.3}  H^-1 ratio = {:.4}  band8 = {:.4}  ledger ok = {}",
            p.plan.lambda0,
            p.resolution,
            p.residual.integral,
            p.residual.dt_check,
            p.duality.pairing_final,
            p.duality.pairing_lower_bound,
            p.duality.duality_growth_ratio,
            p.duality.predicted_growth,
            p.duality.direct_growth_ratio,
            p.degeneration_hminus1,
            p.band_fraction_t0,
            p.duality.ledger.ok,
        );
    }
    println!(
        "residual slope = {:?} (strictly decreasing: {})",
        report.residual_slope, report.residual_strictly_decreasing
    );
    println!(
        "duality ratios nondecreasing: {} | degeneration max = {:.4} | ledgers ok: {}",
        report.duality_nondecreasing, report.degeneration_max, report.all_ledgers_ok
    );
    println!("wall clock: {:.1} s", t0.elapsed().as_secs_f64());
}
