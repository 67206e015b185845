//! Evaluate the growth conditions for a batch of (gamma, lambda0, M) choices
//! and print the resulting plans with their condition margins.

use degenwave::growth::{check_conditions, solve_comparison_frequencies, AsymptoticParameters};
use degenwave::shear::ShearProfile;
use degenwave::symbols::Symbol;

fn main() {
    let shear = ShearProfile::cosine(1);
    let params = AsymptoticParameters::default().validated().unwrap();
    for (spec, lambda0, m) in [
        ("power:1.0", 64u32, 4.0),
        ("power:0.5", 4096, 64.0),
        ("log:1.0", 256, 3.0),
    ] {
        let gamma = Symbol::parse(spec).unwrap();
        let plan = check_conditions(&gamma, None, &shear, &params, lambda0, m).unwrap();
        println!(
            "{spec:10} lambda0 = {lambda0:5} M = {m:5}: tau_M = {:.5e}, t* = {:.5e}, eps = {} (violations: {}), admissible = {}",
            plan.tau_m,
            plan.t_star,
            plan.eps,
            plan.eps_violations.len(),
            plan.admissible
        );
        for c in &plan.conditions {
            println!(
                "    [{}] {:45} lhs = {:10.4e}  rhs = {:10.4e}",
                if c.pass { "ok " } else { "FAIL" },
                c.name,
                c.lhs,
                c.rhs
            );
        }
        let cmp = solve_comparison_frequencies(&gamma, &shear, &plan, false).unwrap();
        println!(
            "    lambda(t_M) = {:.3} (target {}), lambda_bar/lambda at t_M = {:.4}",
            cmp.lambda(cmp.t_m),
            m * lambda0 as f64,
            cmp.lambda_bar(cmp.t_m) / cmp.lambda(cmp.t_m)
        );
    }
}
