//! Scratch probe for desk-scale packet geometry (calibration aid).

use degenwave::amplitude::evolve_amplitude;
use degenwave::growth::{check_conditions, AsymptoticParameters};
use degenwave::phase::{build_phase_field, Window};
use degenwave::shear::ShearProfile;
use degenwave::symbols::Symbol;
use degenwave::wavepacket::packet_at;

fn main() {
    let g = Symbol::power(1.0);
    let f = ShearProfile::cosine(1);
    let params = AsymptoticParameters::default().validated().unwrap();
    let args: Vec<String> = std::env::args().collect();
    let spread: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let x1: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let n: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1 << 14);

    println!("spread = {spread}, x1 = {x1}, N = {n}");
    for lambda0 in [32u32, 64, 128, 256] {
        let plan = check_conditions(&g, None, &f, &params, lambda0, 4.0).unwrap();
        let w = match Window::desk(&g, &f, lambda0, spread, x1) {
            Ok(w) => w,
            Err(e) => {
                println!("l0={lambda0}: window failed: {e}");
                continue;
            }
        };
        let t0 = std::time::Instant::now();
        let field = match build_phase_field(&g, &f, &plan, &params, w.clone(), 257, false) {
            Ok(fl) => fl,
            Err(e) => {
                println!("l0={lambda0}: fan failed: {e}");
                continue;
            }
        };
        let amp = evolve_amplitude(&field);
        let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(lambda0);
        let wp1 = packet_at(&field, &amp, field.t_star, n)
            .unwrap()
            .with_lambda0(lambda0);
        let (m0, _s0) = wp0.decompose().unwrap();
        let (m1, _s1) = wp1.decompose().unwrap();
        let hm1_ratio = m1.weighted_norm(-1.0, 0.0, &g) / m0.weighted_norm(-1.0, 0.0, &g);
        // sandwich along rays
        let mut sandwich_ok = true;
        let mut ximax_over_l = 0.0f64;
        for ray in field.rays.iter().step_by(16) {
            for i in 0..=16 {
                let t = field.t_star * i as f64 / 16.0;
                let s = ray.state_at(&field.psym, t);
                let l = field.lambda(t);
                if s.xi < l * (1.0 - 1e-9) || s.xi > 2.0 * l {
                    sandwich_ok = false;
                }
                ximax_over_l = ximax_over_l.max(s.xi / l);
            }
        }
        println!(
            "l0={lambda0:4} win=({:.4},{:.4}) width={:.4} eps_slope={:.3} | band8: {:.3} -> {:.3} | centroid {:.1} -> {:.1} (M l0 = {:.0}) | top8 {:.2e} -> {:.2e} | H^-1 ratio {:.3} (target <= {:.3}) | sandwich {} (max Xi/l {:.3}) | {} ms",
            w.x0,
            w.x1,
            w.width(),
            w.eps_slope,
            wp0.band_energy_fraction(8.0),
            wp1.band_energy_fraction(8.0),
            wp0.spectral_centroid(),
            wp1.spectral_centroid(),
            4.0 * lambda0 as f64,
            wp0.top_band_fraction(),
            wp1.top_band_fraction(),
            hm1_ratio,
            0.5,
            sandwich_ok,
            ximax_over_l,
            t0.elapsed().as_millis()
        );
    }
}
