//! Build a degenerating wave packet, decompose it at the mu(t) cutoff, and
//! follow its weighted norms from t = 0 to t_star; writes binary snapshots.

use degenwave::amplitude::evolve_amplitude;
use degenwave::growth::{check_conditions, AsymptoticParameters};
use degenwave::harness::auto_resolution;
use degenwave::phase::{build_phase_field, Window};
use degenwave::shear::ShearProfile;
use degenwave::symbols::Symbol;
use degenwave::wavepacket::packet_at;

fn main() {
    let gamma = Symbol::power(1.0);
    let shear = ShearProfile::cosine(1);
    let params = AsymptoticParameters::default().validated().unwrap();
    let lambda0 = 64u32;
    let plan = check_conditions(&gamma, None, &shear, &params, lambda0, 4.0).unwrap();
    let window = Window::desk(&gamma, &shear, lambda0, 0.7, 1.2).unwrap();
    let field = build_phase_field(&gamma, &shear, &plan, &params, window, 257, false).unwrap();
    let amp = evolve_amplitude(&field);
    let n = auto_resolution(&field, &amp, lambda0, 4.0, 0.7).unwrap();
    println!("grid size N = {n}, t* = {:.5}", field.t_star);
    println!("t/t*, ||psi||_2d, centroid, band8, mu(t), ||main||_H^-1, ||small||_2d, Gamma^(1/2)-H^-1(main)");
    for i in 0..=8 {
        let t = field.t_star * i as f64 / 8.0;
        let wp = packet_at(&field, &amp, t, n).unwrap().with_lambda0(lambda0);
        let (main, small) = wp.decompose().unwrap();
        println!(
            "{:.3}, {:.5}, {:8.2}, {:.4}, {:8.2}, {:.5}, {:.3e}, {:.5}",
            t / field.t_star,
            wp.l2_2d(),
            wp.spectral_centroid(),
            wp.band_energy_fraction(8.0),
            field.mu(t),
            main.weighted_norm(-1.0, 0.0, &gamma),
            std::f64::consts::PI.sqrt() * small.l2(),
            main.weighted_norm(-1.0, 0.5, &gamma),
        );
    }
    let out = std::env::temp_dir().join("degenwave_packet.bin");
    let wp = packet_at(&field, &amp, field.t_star, n)
        .unwrap()
        .with_lambda0(lambda0);
    let mut f = std::fs::File::create(&out).unwrap();
    wp.write_snapshot(&mut f).unwrap();
    println!("final snapshot written to {}", out.display());
}
