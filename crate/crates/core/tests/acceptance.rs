//! Acceptance criteria. Runs as a plain binary (no libtest harness) so that
//! one line per criterion is always printed; exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nfheat::asymptotics::{near_field_adjusted, pta_deviation, sphere_plate_total, two_spheres_total, ExpansionCoefficients};
use nfheat::constants::{rad_per_um_to_rad_per_s, stefan_boltzmann};
use nfheat::fitting::fit_beta;
use nfheat::geometry::geometric_ladder;
use nfheat::materials::{quasistatic_validity, sic};
use nfheat::oracle::{self, OracleConfig};
use nfheat::planar::{integrate_plate, lambda_extract, spectral_transfer, LambdaLadder, PlanarConfig, PlatePair};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const PAPER_BETAS: [f64; 5] = [0.774, 0.206, -0.086, -3.026, -2.156];

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

fn stefan_boltzmann_oracle() -> Outcome {
    let t = Instant::now();
    let flux = integrate_plate(&PlatePair::UnitTransmission, 300.0, 0.0, 1e-6, &PlanarConfig::default(), 1e-8).unwrap();
    let want = stefan_boltzmann() * 300f64.powi(4);
    let rel = (flux.channels.total / want - 1.0).abs();
    let el = t.elapsed();
    Outcome {
        pass: rel <= 1e-4 && within(Duration::from_secs(5), el),
        detail: format!("H={:.9e} W/m^2, sigma T^4={want:.9e}, rel error {rel:.2e}, {el:.2?}", flux.channels.total),
    }
}

fn surface_mode(pair: &PlatePair) -> f64 {
    // Hints are (omega_T, omega_sp, omega_L) for the single oscillator.
    pair.resonance_hints()[1]
}

fn inverse_square_plateau() -> Outcome {
    let t = Instant::now();
    let model = sic().model;
    let pair = PlatePair::symmetric(model.clone());
    let omega = surface_mode(&pair);
    let cfg = PlanarConfig::default();
    let gaps = geometric_ladder(1e-9, 1e-8, 10);
    let scaled: Vec<f64> = gaps
        .iter()
        .map(|&s| s * s * spectral_transfer(&pair, omega, s, &cfg).unwrap().evan_e)
        .collect();
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    let spread = hi / lo - 1.0;
    let eps = model.permittivity(omega).unwrap();
    let ratio = gaps
        .iter()
        .map(|&s| quasistatic_validity(eps, omega, s).unwrap().ratio().unwrap())
        .fold(f64::MAX, f64::min);
    let el = t.elapsed();
    Outcome {
        pass: spread <= 1e-2 && ratio > 1e2 && within(Duration::from_secs(10), el),
        detail: format!(
            "omega={:.4} rad/um, S^2 evan_E spread {spread:.2e} over 1-10 nm, min validity ratio {ratio:.3e}, {el:.2?}",
            omega / rad_per_um_to_rad_per_s(1.0)
        ),
    }
}

fn lambda_dual_computation() -> Outcome {
    let t = Instant::now();
    let pair = PlatePair::symmetric(sic().model);
    let cfg = PlanarConfig {
        rel_tol: 1e-10,
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let omega = rad_per_um_to_rad_per_s(0.55 + 0.025 * i as f64);
        let l = lambda_extract(&pair, omega, &LambdaLadder::default(), &cfg).unwrap();
        worst = worst.max((l.value / l.quasi_static - 1.0).abs());
    }
    let el = t.elapsed();
    Outcome {
        pass: worst <= 5e-3 && within(Duration::from_secs(30), el),
        detail: format!("max |extrapolated/quasi-static - 1| = {worst:.2e} at 5 frequencies in [0.55, 0.65] rad/um, {el:.2?}"),
    }
}

fn quadrature_oracle() -> Outcome {
    let cfg = OracleConfig::default();
    let (r, lambda) = (1e-5, 1.0);
    let mut parts = Vec::new();
    let mut pass = true;
    type Run = fn(f64, f64, f64, &OracleConfig) -> nfheat::Result<oracle::OracleReport>;
    let runs: [(&str, Run); 3] = [
        ("sphere", |r, l, b, c| oracle::sphere(r, l, b, c)),
        ("cylinder", |r, l, b, c| oracle::cylinder(r, l, b, c)),
        ("two-spheres", |r, l, b, c| oracle::two_spheres(r, 2.0 * r, l, b, c)),
    ];
    for (name, run) in runs {
        let t = Instant::now();
        let mut worst: f64 = 0.0;
        for beta in PAPER_BETAS {
            worst = worst.max(run(r, lambda, beta, &cfg).unwrap().max_rel_error());
        }
        let el = t.elapsed();
        pass &= worst <= 0.02 && within(Duration::from_secs(60), el);
        parts.push(format!("{name} max rel error {worst:.2e} ({el:.2?})"));
    }
    Outcome {
        pass,
        detail: format!("d/R in [1e-4, 1e-2]; {}", parts.join("; ")),
    }
}

fn fit_self_consistency() -> Outcome {
    let (r, lambda) = (1e-5, 3.0e-21);
    let model = |beta: f64, x: f64| -2.0 * PI * r * lambda / (x * r).powi(2) * (1.0 + (2.0 * beta - 1.0) * x);
    let xs: Vec<f64> = (0..20).map(|i| 0.004 + (0.1 - 0.004) * i as f64 / 19.0).collect();
    let mut noiseless: f64 = 0.0;
    let mut noisy_max: f64 = 0.0;
    let mut noisy_rms: f64 = 0.0;
    for beta in PAPER_BETAS {
        let clean: Vec<(f64, f64)> = xs.iter().map(|&x| (x * r, model(beta, x))).collect();
        noiseless = noiseless.max((fit_beta(&clean, r, lambda, false).unwrap().beta - beta).abs());
        let mut sq = 0.0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, 0.01).unwrap();
            let data: Vec<(f64, f64)> = clean.iter().map(|&(d, v)| (d, v * (1.0 + noise.sample(&mut rng)))).collect();
            let err = fit_beta(&data, r, lambda, false).unwrap().beta - beta;
            noisy_max = noisy_max.max(err.abs());
            sq += err * err;
        }
        noisy_rms = noisy_rms.max((sq / 100.0).sqrt());
    }
    Outcome {
        pass: noiseless <= 1e-6 && noisy_max <= 0.05,
        detail: format!(
            "noiseless max |dbeta| {noiseless:.2e}; 1% noise, 20 evenly spaced points, 100 seeds: max |dbeta| {noisy_max:.3}, worst rms {noisy_rms:.3}"
        ),
    }
}

fn d0_invariance() -> Outcome {
    let r = 1e-5;
    let d_ref = 0.004 * r;
    let ds = geometric_ladder(d_ref, 0.1 * r, 50);
    let mut identical = true;
    let mut worst_dev: f64 = 0.0;
    for beta in [0.5119, 0.5241, 0.774] {
        let c = ExpansionCoefficients::new(1.7e-9, beta).unwrap().with_d0(3e-8).unwrap();
        let c10 = c.with_d0(3e-7).unwrap();
        let pta = ExpansionCoefficients { beta: 0.0, ..c };
        for &d in &ds {
            let a = near_field_adjusted(d, d_ref, r, &c).unwrap();
            identical &= a == near_field_adjusted(d, d_ref, r, &c10).unwrap();
            let diff = near_field_adjusted(d, d_ref, r, &pta).unwrap() - a;
            let formula = 4.0 * PI * beta * c.lambda * (d / d_ref).ln();
            let scale = a.abs().max(formula.abs()).max(f64::MIN_POSITIVE);
            worst_dev = worst_dev
                .max((diff - formula).abs() / scale)
                .max((pta_deviation(d, d_ref, &c).unwrap() - formula).abs() / scale);
        }
    }
    Outcome {
        pass: identical && worst_dev <= 1e-12,
        detail: format!("adjusted curves bitwise identical for d0 and 10 d0: {identical}; max |PTA deviation - 4 pi beta lambda log(d/d_ref)| relative {worst_dev:.2e}"),
    }
}

fn limit_consistency() -> Outcome {
    let r1 = 1e-5;
    let mut worst: f64 = 0.0;
    for beta in PAPER_BETAS {
        let c = ExpansionCoefficients::new(2.0e-9, beta).unwrap().with_d0(5e-8).unwrap();
        for d in geometric_ladder(1e-4 * r1, 1e-1 * r1, 60) {
            let two = two_spheres_total(d, r1, 1e8 * r1, &c).unwrap();
            let one = sphere_plate_total(d, r1, &c).unwrap();
            worst = worst.max((two / one - 1.0).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("R2/R1 = 1e8, d/R1 in [1e-4, 1e-1]: max relative difference {worst:.2e}"),
    }
}

fn main() {
    // Ignore libtest-style arguments such as filters or --nocapture.
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("Stefan-Boltzmann oracle", stefan_boltzmann_oracle),
        ("S^-2 plateau", inverse_square_plateau),
        ("lambda_omega dual computation", lambda_dual_computation),
        ("closed form vs quadrature oracle", quadrature_oracle),
        ("fit self-consistency", fit_self_consistency),
        ("d0 invariance", d0_invariance),
        ("limit consistency", limit_consistency),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {} [{}] {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
