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
    let plan = check_conditions(&g, None, &f, &params, 32, 4.0).unwrap();
    let w = Window::desk(&g, &f, 32, 0.7, 1.2).unwrap();
    let t0 = std::time::Instant::now();
    let field = build_phase_field(&g, &f, &plan, &params, w, 257, false).unwrap();
    eprintln!("fan: {:?}", t0.elapsed());
    let amp = evolve_amplitude(&field);
    let n = 16384;
    let t0 = std::time::Instant::now();
    let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(32);
    eprintln!("packet t=0: {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let wp1 = packet_at(&field, &amp, field.t_star, n).unwrap().with_lambda0(32);
    eprintln!("packet t=t*: {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let (m0, _) = wp0.decompose().unwrap();
    let (m1, _) = wp1.decompose().unwrap();
    eprintln!("decompose: {:?}", t0.elapsed());
    let t0 = std::time::Instant::now();
    let r = m1.weighted_norm(-1.0, 0.0, &g) / m0.weighted_norm(-1.0, 0.0, &g);
    eprintln!("weighted norms: {:?} (ratio {r})", t0.elapsed());
}
