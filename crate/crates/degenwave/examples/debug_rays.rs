//! Scratch: ray-level diagnostics for the dissipative log case.

use degenwave::amplitude::evolve_amplitude;
use degenwave::growth::check_conditions;
use degenwave::harness::ExperimentConfig;
use degenwave::phase::{build_phase_field, Window};
use degenwave::wavepacket::packet_at;

fn main() {
    let cfg = ExperimentConfig {
        gamma: "log:1.0".into(),
        upsilon: Some("log:0.5".into()),
        kappa: 1.0,
        m_factor: 3.0,
        force: true,
        ..ExperimentConfig::default()
    };
    let (gamma, upsilon, shear, params) = cfg.build_inputs().unwrap();
    let lambda0 = 1024u32;
    let plan = check_conditions(&gamma, upsilon.as_ref(), &shear, &params, lambda0, 3.0).unwrap();
    println!("tau_M = {}, t_star = {}, eps = {}", plan.tau_m, plan.t_star, plan.eps);
    let w = Window::desk(&gamma, &shear, lambda0, 0.7, 0.55).unwrap();
    println!("window = ({}, {}), spread = {}", w.x0, w.x1, w.eps_slope);
    let field = build_phase_field(&gamma, &shear, &plan, &params, w, 65, true).unwrap();
    println!("lambda(t*) = {} (M l0 = {})", field.lambda(field.t_star), 3 * lambda0);
    for idx in [0usize, 32, 64] {
        let r0 = field.rays[idx].state_at(&field.psym, 0.0);
        let r1 = field.rays[idx].state_at(&field.psym, field.t_star);
        println!(
            "ray {idx:3}: X {:.4} -> {:.4} | Xi {:.0} -> {:.0} (x{:.2}) | h(t*) = {:+.4} | amp_log(t*) = {:+.3}",
            r0.x, r1.x, r0.xi, r1.xi, r1.xi / r0.xi, r1.h, r1.amp_log
        );
    }
    let amp = evolve_amplitude(&field);
    let n = 32768;
    let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(lambda0);
    let wp1 = packet_at(&field, &amp, field.t_star, n).unwrap().with_lambda0(lambda0);
    println!(
        "centroid {:.0} -> {:.0}; top8 {:.2e} -> {:.2e}; mu {:.1} -> {:.1}",
        wp0.spectral_centroid(),
        wp1.spectral_centroid(),
        wp0.top_band_fraction(),
        wp1.top_band_fraction(),
        field.mu(0.0),
        field.mu(field.t_star),
    );
}
