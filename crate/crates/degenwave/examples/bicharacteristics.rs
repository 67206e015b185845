//! Bicharacteristic fan diagnostics: Hamiltonian conservation, the h-variable
//! staying at zero for steady backgrounds, the frequency sandwich
//! lambda(t) <= Xi(t) <= 2 lambda(t), and the position bound against
//! X(0) gamma(lambda0)/gamma(lambda(t)).

use degenwave::growth::{check_conditions, AsymptoticParameters};
use degenwave::phase::{build_phase_field, Window};
use degenwave::shear::ShearProfile;
use degenwave::symbols::Symbol;

fn main() {
    let gamma = Symbol::power(1.0);
    let shear = ShearProfile::cosine(1);
    let params = AsymptoticParameters::default().validated().unwrap();
    for lambda0 in [32u32, 64, 128, 256] {
        let plan = check_conditions(&gamma, None, &shear, &params, lambda0, 4.0).unwrap();
        // the paper-scaled launch window: x0 = c_x0 eps with the
        // gamma-ratio width formula
        let w = Window::asymptotic(&gamma, &shear, lambda0, plan.eps, params.c_x0).unwrap();
        let field = build_phase_field(&gamma, &shear, &plan, &params, w, 33, false).unwrap();
        let mut max_h = 0.0f64;
        let mut max_drift = 0.0f64;
        let mut sandwich = true;
        let mut xbound = true;
        let fac = 2f64.powf(gamma.beta0 + 1.0);
        for ray in &field.rays {
            let s0 = ray.state_at(&field.psym, 0.0);
            for i in 0..=32 {
                let t = field.t_star * i as f64 / 32.0;
                let s = ray.state_at(&field.psym, t);
                max_h = max_h.max(s.h.abs());
                max_drift = max_drift.max((s.hamiltonian - s0.hamiltonian).abs() / s0.hamiltonian.abs());
                let l = field.lambda(t);
                sandwich &= s.xi >= l * (1.0 - 1e-9) && s.xi <= 2.0 * l;
                let reference = s0.x * gamma.value(lambda0 as f64, lambda0 as f64)
                    / gamma.value(lambda0 as f64, l);
                xbound &= s.x >= reference / fac && s.x <= reference * fac;
            }
        }
        println!(
            "lambda0 = {lambda0:4}: window = ({:.5}, {:.5}), max |h| = {max_h:.2e}, hamiltonian drift = {max_drift:.2e}, sandwich = {sandwich}, X-bound = {xbound}",
            field.window.x0, field.window.x1
        );
    }
}
