//! Scratch: scan s' on recorded dissipative evolutions.

use degenwave::amplitude::evolve_amplitude;
use degenwave::growth::check_conditions;
use degenwave::harness::ExperimentConfig;
use degenwave::linop::{evolve, weighted_norm_coeffs, LinOp, SpectralField};
use degenwave::phase::{build_phase_field, Window};
use degenwave::wavepacket::packet_at;

fn main() {
    for ups in ["log:0.5", "power:0.5"] {
        let cfg = ExperimentConfig {
            gamma: "log:1.0".into(),
            upsilon: Some(ups.into()),
            kappa: 1.0,
            m_factor: 3.0,
            force: true,
            ..ExperimentConfig::default()
        };
        let (gamma, upsilon, shear, params) = cfg.build_inputs().unwrap();
        let lambda0 = 1024u32;
        let plan =
            check_conditions(&gamma, upsilon.as_ref(), &shear, &params, lambda0, 3.0).unwrap();
        let w = Window::desk(&gamma, &shear, lambda0, 0.7, 0.55).unwrap();
        let field = build_phase_field(&gamma, &shear, &plan, &params, w, 257, true).unwrap();
        let amp = evolve_amplitude(&field);
        let n = 65536;
        let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(lambda0);
        let psi0 = SpectralField::from_packet(&wp0);
        let op = LinOp::new(&gamma, &shear, upsilon.as_ref(), 1.0, lambda0, n).unwrap();
        let times: Vec<f64> = (0..=24).map(|i| field.t_star * i as f64 / 24.0).collect();
        let out = evolve(&op, &psi0, field.t_star, &times, 7).unwrap();
        for sp in [2.0, 3.0, 4.0, 5.0] {
            let h0 = weighted_norm_coeffs(lambda0, &psi0.coeffs, sp, -0.5, &gamma);
            let mut sup: f64 = 1.0;
            let mut sup_t = 0.0;
            for (t, st) in &out.records {
                let r = weighted_norm_coeffs(lambda0, &st.coeffs, sp, -0.5, &gamma) / h0;
                if r > sup {
                    sup = r;
                    sup_t = *t;
                }
            }
            println!("upsilon = {ups:10} s' = {sp}: sup ratio = {sup:.3} at t = {sup_t:.3} (t* = {:.3})", field.t_star);
        }
    }
}
