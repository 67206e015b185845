//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (`cargo test --test acceptance -- --nocapture` shows them all).

use degenwave::amplitude::evolve_amplitude;
use degenwave::growth::{check_conditions, AsymptoticParameters};
use degenwave::harness::{self, ExperimentConfig};
use degenwave::linop::{dense_apply_oracle, evolve, pairing_2d, residual, LinOp, SpectralField};
use degenwave::phase::{build_phase_field, Window};
use degenwave::shear::ShearProfile;
use degenwave::symbols::Symbol;
use degenwave::toymodel;
use degenwave::wavepacket::packet_at;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn verdict(criterion: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{criterion} failed: {detail}");
}

fn steady_inputs() -> (Symbol, ShearProfile, AsymptoticParameters) {
    (
        Symbol::power(1.0),
        ShearProfile::cosine(1),
        AsymptoticParameters::default().validated().unwrap(),
    )
}

#[test]
fn criterion_01_toy_model_conservation() {
    let start = Instant::now();
    let gamma = Symbol::power(1.0);
    let lambda0 = 64.0;
    let (grid, data) = toymodel::gaussian_data(lambda0, 1201);
    let t_final = toymodel::time_to_reach(&gamma, lambda0, lambda0, 4.0 * lambda0);
    let s0 = toymodel::solve(&gamma, lambda0, &grid, &data, 0.0).unwrap();
    let e0 = s0.energy(&gamma);
    let mut drift = 0.0f64;
    for i in 1..=8 {
        let st = toymodel::solve(&gamma, lambda0, &grid, &data, t_final * i as f64 / 8.0).unwrap();
        drift = drift.max((st.energy(&gamma) - e0).abs() / e0);
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 1 (toy-model conservation)",
        drift < 1e-6 && elapsed < 5.0,
        &format!("drift = {drift:.2e}, runtime = {elapsed:.2} s"),
    );
}

#[test]
fn criterion_02_steady_h_nullity() {
    let (gamma, shear, params) = steady_inputs();
    let mut worst_h = 0.0f64;
    let mut worst_time = 0.0f64;
    for lambda0 in [32u32, 64, 128, 256] {
        let start = Instant::now();
        let plan = check_conditions(&gamma, None, &shear, &params, lambda0, 4.0).unwrap();
        let w = Window::asymptotic(&gamma, &shear, lambda0, plan.eps, params.c_x0).unwrap();
        let field = build_phase_field(&gamma, &shear, &plan, &params, w, 33, false).unwrap();
        for ray in &field.rays {
            for i in 0..=32 {
                let t = field.t_star * i as f64 / 32.0;
                worst_h = worst_h.max(ray.state_at(&field.psym, t).h.abs());
            }
        }
        worst_time = worst_time.max(start.elapsed().as_secs_f64());
    }
    verdict(
        "criterion 2 (steady h-nullity)",
        worst_h < 1e-6 && worst_time < 1.0,
        &format!("max |h| = {worst_h:.2e}, worst per-plan runtime = {worst_time:.2} s"),
    );
}

#[test]
fn criterion_03_hamiltonian_conservation() {
    let (gamma, shear, params) = steady_inputs();
    let mut worst = 0.0f64;
    for lambda0 in [32u32, 64, 128, 256] {
        let plan = check_conditions(&gamma, None, &shear, &params, lambda0, 4.0).unwrap();
        let w = Window::asymptotic(&gamma, &shear, lambda0, plan.eps, params.c_x0).unwrap();
        let field = build_phase_field(&gamma, &shear, &plan, &params, w, 33, false).unwrap();
        for ray in &field.rays {
            let h0 = ray.state_at(&field.psym, 0.0).hamiltonian;
            for i in 1..=32 {
                let t = field.t_star * i as f64 / 32.0;
                let h = ray.state_at(&field.psym, t).hamiltonian;
                worst = worst.max((h - h0).abs() / h0.abs());
            }
        }
    }
    verdict(
        "criterion 3 (hamiltonian conservation)",
        worst < 1e-8,
        &format!("max relative drift = {worst:.2e}"),
    );
}

#[test]
fn criterion_04_frequency_sandwich() {
    let (gamma, shear, params) = steady_inputs();
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for lambda0 in [32u32, 64, 128, 256] {
        for m in [2.0, 4.0] {
            let plan = check_conditions(&gamma, None, &shear, &params, lambda0, m).unwrap();
            assert!(plan.admissible, "plan must pass the growth conditions");
            let w = Window::asymptotic(&gamma, &shear, lambda0, plan.eps, params.c_x0).unwrap();
            let field = build_phase_field(&gamma, &shear, &plan, &params, w, 17, false).unwrap();
            for ray in &field.rays {
                for i in 0..=32 {
                    let t = field.t_star * i as f64 / 32.0;
                    let s = ray.state_at(&field.psym, t);
                    let l = field.lambda(t);
                    ok &= s.xi >= l * (1.0 - 1e-9) && s.xi <= 2.0 * l;
                    worst_ratio = worst_ratio.max(s.xi / l);
                }
            }
        }
    }
    verdict(
        "criterion 4 (frequency sandwich)",
        ok,
        &format!("max Xi/lambda = {worst_ratio:.3} (must stay in [1, 2])"),
    );
}

#[test]
fn criterion_05_position_bound() {
    let (gamma, shear, params) = steady_inputs();
    let fac = 2f64.powf(gamma.beta0 + 1.0);
    let mut ok = true;
    let mut worst = 1.0f64;
    for lambda0 in [32u32, 64, 128, 256] {
        let l0 = lambda0 as f64;
        let plan = check_conditions(&gamma, None, &shear, &params, lambda0, 4.0).unwrap();
        let w = Window::asymptotic(&gamma, &shear, lambda0, plan.eps, params.c_x0).unwrap();
        let field = build_phase_field(&gamma, &shear, &plan, &params, w, 17, false).unwrap();
        for ray in &field.rays {
            let x0 = ray.state_at(&field.psym, 0.0).x;
            for i in 1..=16 {
                let t = field.t_star * i as f64 / 16.0;
                let s = ray.state_at(&field.psym, t);
                let reference = x0 * gamma.value(l0, l0) / gamma.value(l0, field.lambda(t));
                let q = (s.x / reference).max(reference / s.x);
                worst = worst.max(q);
                ok &= q <= fac;
            }
        }
    }
    verdict(
        "criterion 5 (position bound)",
        ok,
        &format!("worst factor = {worst:.3} vs allowed 2^(beta0+1) = {fac:.3}"),
    );
}

#[test]
fn criterion_06_operator_oracle_and_skewness() {
    let (gamma, shear, _) = steady_inputs();
    let n = 256;
    let op = LinOp::new(&gamma, &shear, None, 0.0, 64, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_rel = 0.0f64;
    let mut worst_skew = 0.0f64;
    for _ in 0..20 {
        let mut psi = vec![Complex64::new(0.0, 0.0); n];
        for (m, c) in psi.iter_mut().enumerate() {
            if degenwave::fft::wavenumber(m, n).abs() <= 100.0 {
                *c = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let fast = op.apply_l(0.0, &psi);
        let slow = dense_apply_oracle(&gamma, &shear, 64, 0.0, &psi);
        let scale: f64 = slow.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let err: f64 = fast
            .iter()
            .zip(&slow)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst_rel = worst_rel.max(err / scale);
        let p1 = op.apply_principal(0.0, &psi);
        let skew = pairing_2d(&p1, &psi).abs()
            / (std::f64::consts::PI
                * degenwave::fft::l2_sq_from_coeffs(&psi).sqrt()
                * degenwave::fft::l2_sq_from_coeffs(&p1).sqrt());
        worst_skew = worst_skew.max(skew);
    }
    verdict(
        "criterion 6 (operator oracle + skewness)",
        worst_rel <= 1e-10 && worst_skew <= 1e-11,
        &format!("oracle mismatch = {worst_rel:.2e}, skewness = {worst_skew:.2e}"),
    );
}

#[test]
fn criterion_07_energy_ledger() {
    // direct evolution obeys ||psi(t)|| <= ||psi0|| exp(c_hat t) with
    // c_hat = 1.5 x the probed commutator norm
    let (gamma, shear, params) = steady_inputs();
    let lambda0 = 64u32;
    let plan = check_conditions(&gamma, None, &shear, &params, lambda0, 4.0).unwrap();
    let w = Window::desk(&gamma, &shear, lambda0, 0.7, 1.2).unwrap();
    let field = build_phase_field(&gamma, &shear, &plan, &params, w, 129, false).unwrap();
    let amp = evolve_amplitude(&field);
    let n = 8192;
    let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(lambda0);
    let psi0 = SpectralField::from_packet(&wp0);
    let op = LinOp::new(&gamma, &shear, None, 0.0, lambda0, n).unwrap();
    let times: Vec<f64> = (1..=8).map(|i| field.t_star * i as f64 / 8.0).collect();
    let out = evolve(&op, &psi0, field.t_star, &times, 99).unwrap();
    verdict(
        "criterion 7 (energy ledger)",
        out.ledger.ok,
        &format!(
            "c_hat = {:.3}, worst quotient = {:.6}",
            out.ledger.c_hat, out.ledger.worst_quotient
        ),
    );
}

#[test]
fn criterion_08_residual_decay_trend() {
    let start = Instant::now();
    let (gamma, shear, params) = steady_inputs();
    let mut integrals = Vec::new();
    for lambda0 in [32u32, 64, 128, 256] {
        let plan = check_conditions(&gamma, None, &shear, &params, lambda0, 4.0).unwrap();
        assert!((plan.eps - 0.1).abs() < 1e-12, "practical eps = 0.1");
        let w = Window::desk(&gamma, &shear, lambda0, 0.7, 1.2).unwrap();
        let field = build_phase_field(&gamma, &shear, &plan, &params, w, 257, false).unwrap();
        let amp = evolve_amplitude(&field);
        let n = harness::auto_resolution(&field, &amp, lambda0, 4.0, 0.7).unwrap();
        let op = LinOp::new(&gamma, &shear, None, 0.0, lambda0, n).unwrap();
        let times: Vec<f64> = (0..=32)
            .map(|i| field.t_star * i as f64 / 32.0)
            .collect();
        let rep = residual(&field, &amp, &op, &times, n).unwrap();
        integrals.push((lambda0, rep.integral));
    }
    let decreasing = integrals.windows(2).all(|w| w[1].1 < w[0].1);
    // least-squares slope of log integral against log lambda0
    let xs: Vec<f64> = integrals.iter().map(|(l, _)| (*l as f64).ln()).collect();
    let ys: Vec<f64> = integrals.iter().map(|(_, v)| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 8 (residual decay trend)",
        decreasing && slope <= -0.2 && elapsed < 600.0,
        &format!(
            "integrals = {:?}, slope = {slope:.3}, runtime = {elapsed:.0} s",
            integrals.iter().map(|(_, v)| *v).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_09_duality_growth() {
    let start = Instant::now();
    let config = ExperimentConfig {
        lambda0_list: vec![32, 64, 128, 256],
        ..ExperimentConfig::default()
    };
    let report = harness::run(&config).unwrap();
    let mut pairing_ok = true;
    let mut ratio_ok = true;
    for p in &report.points {
        pairing_ok &= p.duality.pairing_final >= p.duality.pairing_lower_bound;
        ratio_ok &= p.duality.duality_growth_ratio >= 0.25 * p.duality.predicted_growth;
    }
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 9 (duality growth)",
        pairing_ok && ratio_ok && report.duality_nondecreasing && elapsed < 900.0,
        &format!(
            "ratios = {:?} vs 0.25 pred = {:.3}, pairing ok = {pairing_ok}, increasing = {}, runtime = {elapsed:.0} s",
            report.duality_ratios,
            0.25 * report.points[0].duality.predicted_growth,
            report.duality_nondecreasing
        ),
    );
}

#[test]
fn criterion_10_degeneration() {
    let (gamma, shear, params) = steady_inputs();
    let m = 4.0;
    let mut worst = 0.0f64;
    for lambda0 in [32u32, 64, 128, 256] {
        let plan = check_conditions(&gamma, None, &shear, &params, lambda0, m).unwrap();
        assert!(plan.admissible);
        let w = Window::desk(&gamma, &shear, lambda0, 0.7, 1.2).unwrap();
        let field = build_phase_field(&gamma, &shear, &plan, &params, w, 257, false).unwrap();
        let amp = evolve_amplitude(&field);
        let n = harness::auto_resolution(&field, &amp, lambda0, m, 0.7).unwrap();
        let wp0 = packet_at(&field, &amp, 0.0, n).unwrap().with_lambda0(lambda0);
        let wp1 = packet_at(&field, &amp, field.t_star, n)
            .unwrap()
            .with_lambda0(lambda0);
        let (m0, _) = wp0.decompose().unwrap();
        let (m1, _) = wp1.decompose().unwrap();
        let ratio = m1.weighted_norm(-1.0, 0.0, &gamma) / m0.weighted_norm(-1.0, 0.0, &gamma);
        worst = worst.max(ratio);
    }
    let bound = 1.0 / m.sqrt();
    verdict(
        "criterion 10 (degeneration of H^-1)",
        worst <= bound,
        &format!("worst H^-1 ratio = {worst:.4} vs M^(-1/2) = {bound:.4}"),
    );
}

#[test]
fn criterion_11_dissipative_dichotomy() {
    let start = Instant::now();
    // gamma = log(10+|xi|), kappa = 1; the window sits near the degenerate
    // point because slowly varying symbols barely contract the rays
    let base = ExperimentConfig {
        gamma: "log:1.0".into(),
        kappa: 1.0,
        m_factor: 3.0,
        s: 4.0,
        s_prime: 4.0,
        window_spread: 0.7,
        window_x1: 0.55,
        snapshots: 16,
        force: true,
        ..ExperimentConfig::default()
    };
    let weak_cfg = ExperimentConfig {
        upsilon: Some("log:0.5".into()),
        extend_factor: 1.6,
        ..base.clone()
    };
    let strong_cfg = ExperimentConfig {
        upsilon: Some("power:0.5".into()),
        ..base
    };
    let weak = harness::run_point(&weak_cfg, 1024).unwrap();
    let strong = harness::run_point(&strong_cfg, 1024).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    verdict(
        "criterion 11 (dissipative dichotomy)",
        weak.duality.direct_growth_ratio > 2.0
            && strong.duality.direct_growth_ratio <= 1.2
            && elapsed < 600.0,
        &format!(
            "weak growth = {:.3} (> 2), strong growth = {:.3} (<= 1.2), runtime = {elapsed:.0} s",
            weak.duality.direct_growth_ratio, strong.duality.direct_growth_ratio
        ),
    );
}

#[test]
fn criterion_12_table_checks() {
    use degenwave::harness::{dissipative_table_row, linear_table_row};
    let mut ok = true;
    // nondissipative rows
    ok &= linear_table_row(&Symbol::power(2.0), 6.1, 6.1).unwrap().unstable;
    ok &= !linear_table_row(&Symbol::power(2.0), 5.9, 5.9).unwrap().unstable;
    ok &= linear_table_row(&Symbol::power(1.0), 1.0, 4.6).unwrap().unstable;
    ok &= !linear_table_row(&Symbol::power(1.0), 1.0, 4.4).unwrap().unstable;
    ok &= linear_table_row(&Symbol::power(0.5), 1.0, 4.0).unwrap().unstable;
    ok &= !linear_table_row(&Symbol::power(0.5), 1.0, 3.7).unwrap().unstable;
    ok &= linear_table_row(&Symbol::log(1.0), 3.1, 3.1).unwrap().unstable;
    ok &= !linear_table_row(&Symbol::log(1.0), 3.1, 3.2).unwrap().unstable;
    ok &= linear_table_row(&Symbol::loglog(2.0), 3.5, 3.5).unwrap().unstable;
    // dissipative rows
    ok &= dissipative_table_row(&Symbol::power(1.5), &Symbol::power(1.0), 4.0, 4.0)
        .unwrap()
        .unstable;
    ok &= dissipative_table_row(&Symbol::power(1.0), &Symbol::power(0.5), 1.0, 0.8)
        .unwrap()
        .unstable;
    ok &= !dissipative_table_row(&Symbol::power(1.0), &Symbol::power(0.5), 1.0, 0.7)
        .unwrap()
        .unstable;
    ok &= dissipative_table_row(&Symbol::power(0.5), &Symbol::power(0.25), 1.0, 0.82)
        .unwrap()
        .unstable;
    ok &= dissipative_table_row(&Symbol::log(1.0), &Symbol::log(0.5), 2.0, 2.0)
        .unwrap()
        .unstable;
    ok &= !dissipative_table_row(&Symbol::log(1.0), &Symbol::log(0.5), 2.0, 2.1)
        .unwrap()
        .unstable;
    verdict("criterion 12 (table checks)", ok, "all table rows reproduced");
}
