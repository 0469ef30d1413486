//! Acceptance criteria, one test per criterion. Each prints a single PASS/FAIL line.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use finite_hilbert::airfoil::{airfoil_residual, airfoil_solve};
use finite_hilbert::cheb::{node_angles, Basis, ChebSeries, GridFunction};
use finite_hilbert::circle::fht_via_circle;
use finite_hilbert::fht::{
    fht_apply, fht_coeff_map, fht_eval, fht_quadrature_oracle, fit_growth, nullspace_residual,
    parseval_check, probe_sweep, FhtInput,
};
use finite_hilbert::func::OverSqrtWeight;
use finite_hilbert::rootflow::{compare_to_empirical, FlowConfig, FlowSolver, InitialProfile};
use finite_hilbert::rootlab::{ks_to_arcsine, roots_via_jacobi, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(
    id: &str,
    name: &str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    limit_s: f64,
) -> bool {
    let in_time = elapsed.as_secs_f64() <= limit_s;
    let ok = passed && in_time;
    println!(
        "criterion {id} [{name}]: {} ({detail}; {:.2} s of {limit_s} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

/// `p(x) = Σ c_k cos(k acos x)`, evaluated without Clenshaw.
fn poly_eval(c: &[f64], x: f64) -> f64 {
    let t = x.clamp(-1.0, 1.0).acos();
    c.iter()
        .enumerate()
        .map(|(k, a)| a * (k as f64 * t).cos())
        .sum()
}

fn random_poly(rng: &mut ChaCha8Rng, max_degree: usize) -> Vec<f64> {
    let d = rng.gen_range(0..=max_degree);
    (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

#[test]
fn criterion_1_weighted_parseval_identity() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let d = rng.gen_range(1..=200);
        let mut a: Vec<f64> = (0..=d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        a[0] = 0.0;
        let input =
            FhtInput::from_weighted_series(&ChebSeries::new(Basis::FirstKind, a).unwrap(), 256)
                .unwrap();
        worst = worst.max(parseval_check(&input).unwrap().rel_gap);
    }
    let ok = report(
        "1",
        "weighted Parseval identity",
        worst <= 1e-10,
        format!("max rel gap {worst:.3e} <= 1e-10 over 100 trials"),
        start.elapsed(),
        5.0,
    );
    assert!(ok);
}

#[test]
fn criterion_2_null_space() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for c in [1.0, -1.0, 1e3, -1e3, 1e-3, -1e-3] {
        worst = worst.max(nullspace_residual(c).unwrap() / f64::abs(c));
    }
    let ok = report(
        "2",
        "null space",
        worst <= 1e-10,
        format!("max residual/|c| {worst:.3e} <= 1e-10"),
        start.elapsed(),
        1.0,
    );
    assert!(ok);
}

#[test]
fn criterion_3_coefficient_map_vs_principal_value() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let p = random_poly(&mut rng, 30);
        let f = OverSqrtWeight(|x: f64| poly_eval(&p, x));
        let input = FhtInput::from_fn(64, &f).unwrap();
        for _ in 0..20 {
            let x = rng.gen_range(-0.95..0.95);
            let spectral = fht_eval(&input, x).unwrap();
            let oracle = fht_quadrature_oracle(&f, x, 200).unwrap();
            worst = worst.max((spectral - oracle).abs());
        }
    }
    let ok = report(
        "3",
        "coefficient map vs principal-value quadrature",
        worst <= 1e-7,
        format!("max gap {worst:.3e} <= 1e-7 over 50 functions x 20 points"),
        start.elapsed(),
        30.0,
    );
    assert!(ok);
}

#[test]
fn criterion_4_circle_lift_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 256;
    let angles = node_angles(n);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for _ in 0..20 {
        let p = random_poly(&mut rng, 30);
        let f = OverSqrtWeight(|x: f64| poly_eval(&p, x));
        let hf = fht_apply(&FhtInput::from_fn(n, &f).unwrap()).unwrap();
        for (j, &psi) in angles.iter().enumerate() {
            if (PI / 6.0..=5.0 * PI / 6.0).contains(&psi) {
                worst = worst.max((fht_via_circle(&f, psi).unwrap() - hf.values()[j]).abs());
                checked += 1;
            }
        }
    }
    let ok = report(
        "4",
        "circle-lift consistency",
        worst <= 1e-8,
        format!("max gap {worst:.3e} <= 1e-8 at {checked} node angles"),
        start.elapsed(),
        10.0,
    );
    assert!(ok);
}

#[test]
fn criterion_5_airfoil_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 64;
    let mut worst: f64 = 0.0;
    let mut null_exact = true;
    for _ in 0..20 {
        let (amp, rate, freq, phase) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..6.0),
            rng.gen_range(0.0..2.0 * PI),
        );
        let p = random_poly(&mut rng, 20);
        let g = GridFunction::sample(n, |x| {
            poly_eval(&p, x) + amp * (rate * x).exp() * (freq * x + phase).sin()
        })
        .unwrap();
        let base = airfoil_solve(&g, 0.0).unwrap();
        worst = worst.max(airfoil_residual(&base, &g).unwrap());
        let c = rng.gen_range(-10.0..10.0);
        let shifted = airfoil_solve(&g, c).unwrap();
        let (a0, a1) = (base.coefficients(), shifted.coefficients());
        null_exact &= a0.coeffs()[1..] == a1.coeffs()[1..]
            && a1.coeffs()[0] - a0.coeffs()[0] == c
            && fht_coeff_map(&a0).unwrap() == fht_coeff_map(&a1).unwrap();
    }
    let ok = report(
        "5",
        "airfoil round trip",
        worst <= 1e-8 && null_exact,
        format!("max residual {worst:.3e} <= 1e-8; null direction exact: {null_exact}"),
        start.elapsed(),
        5.0,
    );
    assert!(ok);
}

#[test]
fn criterion_6_arcsine_convergence() {
    let start = Instant::now();
    let mut exact = true;
    let mut cheb = Vec::new();
    for n in [10, 100, 1000] {
        let rs = roots_via_jacobi(&Family::Chebyshev.recurrence(n).unwrap(), n).unwrap();
        let ks = ks_to_arcsine(&rs).unwrap();
        exact &= (ks - 0.5 / n as f64).abs() <= 1e-12;
        cheb.push(format!("n={n}: {ks:.6e}"));
    }
    let legendre: Vec<f64> = [25, 50, 100, 200, 400]
        .iter()
        .map(|&n| {
            ks_to_arcsine(&roots_via_jacobi(&Family::Legendre.recurrence(n).unwrap(), n).unwrap())
                .unwrap()
        })
        .collect();
    let monotone = legendre.windows(2).all(|w| w[1] <= w[0]);
    let ok = report(
        "6",
        "arcsine convergence",
        exact && monotone,
        format!(
            "Chebyshev KS = 1/(2n): {exact} [{}]; Legendre KS nonincreasing: {monotone} {legendre:?}",
            cheb.join(", ")
        ),
        start.elapsed(),
        60.0,
    );
    assert!(ok);
}

#[test]
fn criterion_7_flow_matches_derivative_roots() {
    let start = Instant::now();
    let cmp = compare_to_empirical(&Family::Chebyshev, 0.5, 400).unwrap();
    let mut solver =
        FlowSolver::from_initial(InitialProfile::Arcsine, FlowConfig::default()).unwrap();
    solver.run_to(0.3).unwrap();
    let mass = solver.profile().mass();
    let ok = report(
        "7",
        "flow vs derivative roots, mass decay",
        cmp.ks <= 0.05 && (mass - 0.7).abs() <= 0.02,
        format!(
            "KS {:.4e} <= 0.05 at t = 0.5, n = 400; mass(0.3) = {mass:.5} in 0.7 +- 0.02",
            cmp.ks
        ),
        start.elapsed(),
        120.0,
    );
    assert!(ok);
}

/// The arcsine profile is not stationary under the flow: the exact solution
/// `sqrt(1 - t^2 - x^2) / (π (1 - x^2))` already drifts by about 2.7% at `x = ±0.9`, `t = 0.1`.
/// This clause is kept at its stated threshold.
#[test]
fn criterion_7_arcsine_drift() {
    let start = Instant::now();
    let mut solver =
        FlowSolver::from_initial(InitialProfile::Arcsine, FlowConfig::default()).unwrap();
    let u0 = solver.profile().clone();
    let inner: Vec<usize> = (0..u0.cells())
        .filter(|&i| u0.grid()[i].abs() <= 0.9)
        .collect();
    let scale = inner.iter().map(|&i| u0.u()[i]).fold(0.0, f64::max);
    let mut drift: f64 = 0.0;
    for _ in 0..100 {
        solver.advance().unwrap();
        let u = solver.profile().u();
        for &i in &inner {
            drift = drift.max((u[i] - u0.u()[i]).abs() / scale);
        }
    }
    let ok = report(
        "7",
        "arcsine drift over t in [0, 0.1]",
        drift <= 0.01,
        format!(
            "sup drift {:.3}% <= 1% on |x| <= 0.9, M = 512, dt = 1e-3",
            100.0 * drift
        ),
        start.elapsed(),
        120.0,
    );
    assert!(ok);
}

#[test]
fn criterion_8_semicircle_flow() {
    let start = Instant::now();
    let cmp = compare_to_empirical(&Family::Hermite, 0.5, 200).unwrap();
    let ok = report(
        "8",
        "semicircle flow vs Hermite derivative roots",
        cmp.ks <= 0.08 && cmp.derivatives == 100,
        format!(
            "KS {:.4e} <= 0.08 against {} roots",
            cmp.ks,
            cmp.roots.degree()
        ),
        start.elapsed(),
        60.0,
    );
    assert!(ok);
}

#[test]
fn criterion_9_outer_norm_probe() {
    let start = Instant::now();
    let reports = probe_sweep(&[1.0, 0.5, 0.25, 0.125], 4096).unwrap();
    let fit = fit_growth(&reports).unwrap();
    let positive = reports.iter().all(|r| r.outer_norm > 0.0);
    let ok = report(
        "9",
        "outer-norm probe growth",
        fit.superlinear_excess <= 0.1 && positive,
        format!(
            "exponent {:.3}, super-linear excess {:.3} <= 0.1",
            fit.exponent, fit.superlinear_excess
        ),
        start.elapsed(),
        30.0,
    );
    assert!(ok);
}
