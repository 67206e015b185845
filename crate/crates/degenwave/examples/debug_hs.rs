//! Scratch: inspect the H^{s'} norm series of the evolved state.

use degenwave::amplitude::evolve_amplitude;
use degenwave::growth::check_conditions;
use degenwave::harness::ExperimentConfig;
use degenwave::linop::{evolve, weighted_norm_coeffs, LinOp, SpectralField};
use degenwave::phase::{build_phase_field, Window};
use degenwave::wavepacket::packet_at;

fn main() {
    let cfg = ExperimentConfig {
        gamma: "log:1.0".into(),
        upsilon: Some("log:0.5".into()),
        kappa: 1.0,
        m_factor: 3.0,
        s: 2.0,
        s_prime: 2.0,
        force: true,
        ..ExperimentConfig::default()
    };
    let (gamma, upsilon, shear, params) = cfg.build_inputs().unwrap();
    let lambda0 = 512u32;
    let plan = check_conditions(&gamma, upsilon.as_ref(), &shear, &params, lambda0, 3.0).unwrap();
    let w = Window::desk(&gamma, &shear, lambda0, 0.7, 1.2).unwrap();
    let field = build_phase_field(&gamma, &shear, &plan, &params, w, 257, true).unwrap();
    let amp = evolve_amplitude(&field);
    let n = 16384;
    let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(lambda0);
    let psi0 = SpectralField::from_packet(&wp0);
    let op = LinOp::new(&gamma, &shear, upsilon.as_ref(), 1.0, lambda0, n).unwrap();
    let times: Vec<f64> = (0..=8).map(|i| field.t_star * i as f64 / 8.0).collect();
    let out = evolve(&op, &psi0, field.t_star, &times, 7).unwrap();
    let h0 = weighted_norm_coeffs(lambda0, &psi0.coeffs, 2.0, -0.5, &gamma);
    println!("t_star = {}, steps = {}", field.t_star, out.steps);
    for (t, st) in &out.records {
        let hs = weighted_norm_coeffs(lambda0, &st.coeffs, 2.0, -0.5, &gamma);
        let wp = packet_at(&field, &amp, *t, n).unwrap().with_lambda0(lambda0);
        let pk_hs = weighted_norm_coeffs(lambda0, &wp.coeffs(), 2.0, -0.5, &gamma);
        println!(
            "t = {t:.4}  |psi|_2d = {:.4}  Hs'(psi)/Hs'(0) = {:.4}  Hs'(packet)/Hs'(0) = {:.4}  centroid(packet) = {:.0}",
            st.l2_2d(),
            hs / h0,
            pk_hs / h0,
            wp.spectral_centroid(),
        );
    }
}
