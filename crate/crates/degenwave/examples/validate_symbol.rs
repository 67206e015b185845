//! Validate the structural assumptions (growth, slow variance, ellipticity
//! and near-comparability of xi2 d_xi2 gamma) for the symbol catalog.

use degenwave::symbols::{validate_assumptions, SamplePlan, Symbol};

fn main() {
    let catalog = [
        Symbol::power(1.0),
        Symbol::power(0.5),
        Symbol::power(2.0),
        Symbol::log(1.0),
        Symbol::loglog(1.0),
        Symbol::explog(1.0, 0.5),
        Symbol::constant(2.0), // violates growth: flagged below
    ];
    let plan = SamplePlan::default();
    for sym in &catalog {
        let report = validate_assumptions(sym, &plan);
        println!(
            "{:14} beta0 = {:.3}  all pass = {}",
            report.symbol,
            report.beta0,
            report.all_pass()
        );
        for c in &report.checks {
            println!(
                "    [{}] {:58} worst = {:+.4e} vs {:+.4e} at xi = ({:.1}, {:.1})",
                if c.pass { "ok " } else { "FAIL" },
                c.name,
                c.worst,
                c.threshold,
                c.witness.0,
                c.witness.1
            );
        }
    }
}
