//! End-to-end acceptance suite. Each test covers one numbered criterion and
//! prints a single `[PASS] ...` line on success (run with `--nocapture` to
//! see them); a failed assertion fails that criterion alone.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex;
use rand::Rng;

use common::*;
use qnet::asymptotics::{
    asymptotic_system_state, decoherence_factor, decoherence_factor_correlated,
    project_asymptotic, Parity,
};
use qnet::attractors::{analytic_basis, analytic_count, dualize, oracle_space, verify_basis};
use qnet::channel::{Channel, ConvergenceStatus};
use qnet::entanglement::{
    classify_fragility, classify_with_diagnostic, concurrence, concurrence_psi2_asymptotic,
    n_sep, Fragility,
};
use qnet::network::NetworkSpec;
use qnet::qmat::{eye, max_abs, trace_distance, DensityMatrix, ONE};

fn pass(id: u32, what: &str, t0: Instant) {
    println!("[PASS] criterion {id}: {what} ({:.2}s)", t0.elapsed().as_secs_f64());
}

#[test]
fn criterion_01_attractor_count() {
    let t0 = Instant::now();
    for (k, n, expected) in [(1usize, 2usize, 11usize), (2, 2, 29)] {
        let spec = NetworkSpec::all_to_all(k, n, PHI);
        let basis = oracle_space(&spec, 6, 1e-8).unwrap();
        let dim = basis.block_for(ONE).map_or(0, |b| b.len());
        assert_eq!(dim, expected, "lambda=1 dimension for k={k}, n={n}");
        assert_eq!(analytic_count(k), expected);
    }
    pass(1, "oracle lambda=1 dimensions are 11 (k=1,n=2) and 29 (k=2,n=2)", t0);
}

#[test]
fn criterion_02_eigenvalue_exclusivity() {
    let t0 = Instant::now();
    for k in [1usize, 2] {
        let basis = oracle_space(&NetworkSpec::all_to_all(k, 2, PHI), 6, 1e-8).unwrap();
        let lambdas: Vec<_> = basis.blocks.iter().map(|b| b.eigenvalue).collect();
        assert_eq!(lambdas.len(), 1, "k={k}, n=2 should have a single eigenvalue");
        assert!((lambdas[0] - ONE).norm() < 1e-8, "k={k}, n=2 eigenvalue {}", lambdas[0]);
    }
    let basis = oracle_space(&NetworkSpec::all_to_all(2, 1, PHI), 6, 1e-8).unwrap();
    let mut lambdas: Vec<f64> = basis.blocks.iter().map(|b| b.eigenvalue.re).collect();
    assert!(basis.blocks.iter().all(|b| b.eigenvalue.im.abs() < 1e-8));
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(lambdas.len(), 2, "k=2, n=1 should have exactly two eigenvalues");
    assert!((lambdas[0] + 1.0).abs() < 1e-8 && (lambdas[1] - 1.0).abs() < 1e-8);
    pass(2, "oracle eigenvalues are {1} for n=2 and {1,-1} for k=2,n=1", t0);
}

#[test]
fn criterion_03_analytic_basis_residuals() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for k in 1..=2usize {
        for n in 1..=4usize {
            for phi in [PHI, PI / 5.0, 1.0] {
                let spec = NetworkSpec::all_to_all(k, n, phi);
                let report = verify_basis(&analytic_basis(k, n, phi), &spec).unwrap();
                assert!(
                    report.max_residual <= 1e-10,
                    "k={k}, n={n}, phi={phi}: residual {} at {}",
                    report.max_residual,
                    report.argmax_label
                );
                worst = worst.max(report.max_residual);
            }
        }
    }
    pass(3, &format!("analytic attractors satisfy the fixed-point relation, worst residual {worst:.2e}"), t0);
}

#[test]
fn criterion_04_figure_curve_reproduction() {
    let t0 = Instant::now();
    let expected = [(2usize, 11.0 / 32.0), (3, 17.0 / 128.0), (4, 0.0)];
    for (n, c_expected) in expected {
        let channel = Channel::new(fig2_spec(n)).unwrap();
        let rho0 = fig2_initial(n).to_density();
        let result = channel.converge(&rho0, 1e-10, 10_000).unwrap();
        assert_eq!(result.status, ConvergenceStatus::Stationary, "n={n}");
        let c = concurrence(&system_reduction(&result.states[0])).unwrap();
        assert!(
            (c - c_expected).abs() <= 1e-6,
            "n={n}: concurrence {c} vs expected {c_expected}"
        );
    }
    // n = 1 does not settle: the asymptote alternates between two states.
    let channel = Channel::new(fig2_spec(1)).unwrap();
    let rho0 = fig2_initial(1).to_density();
    let result = channel.converge(&rho0, 1e-10, 10_000).unwrap();
    assert_eq!(result.status, ConvergenceStatus::Period2);

    // Literal-caption variant: the environment state coincides with the
    // coupling eigenstate, so the curve is constant at concurrence 1.
    let channel = Channel::new(fig2_spec(2)).unwrap();
    let delta_literal = qnet::network::bloch_state(PI - DELTA_THETA);
    let env = delta_literal.tensor(&delta_literal).unwrap();
    let rho0 = psi2().tensor(&env).unwrap().to_density();
    let records = channel.iterate(&rho0, 40, (0, 1), None).unwrap();
    for rec in &records {
        assert!(
            (rec.concurrence - 1.0).abs() <= 1e-6,
            "step {}: concurrence {} should stay at 1",
            rec.step,
            rec.concurrence
        );
    }
    pass(4, "benchmark plateaus 11/32, 17/128, 0; n=1 period-2; literal-delta curve constant at 1", t0);
}

#[test]
fn criterion_05_two_path_asymptotics() {
    let t0 = Instant::now();
    let mut rng = rng(500);
    let mut basis = analytic_basis(2, 2, PHI);
    dualize(&mut basis).unwrap();
    let channel = Channel::new(fig2_spec(2)).unwrap();
    for trial in 0..20 {
        let rho_s = ginibre(4, 4, &mut rng);
        let rho_e = ginibre(4, 4, &mut rng);
        let joint = rho_s.tensor(&rho_e).unwrap();

        let projected = system_reduction(&project_asymptotic(&joint, &basis, Parity::Limit).unwrap());
        let r = decoherence_factor(&rho_e, PHI).unwrap().value;
        let closed = asymptotic_system_state(&rho_s, r).unwrap();
        let iterated = system_reduction(&channel.converge(&joint, 1e-10, 10_000).unwrap().states[0]);

        let d_pc = trace_distance(&projected, &closed).unwrap();
        let d_pi = trace_distance(&projected, &iterated).unwrap();
        let d_ci = trace_distance(&closed, &iterated).unwrap();
        assert!(
            d_pc <= 1e-6 && d_pi <= 1e-6 && d_ci <= 1e-6,
            "trial {trial}: pairwise distances {d_pc:.2e}, {d_pi:.2e}, {d_ci:.2e}"
        );
    }
    pass(5, "projection, closed form, and long iteration agree pairwise within 1e-6 on 20 product inputs", t0);
}

#[test]
fn criterion_06_psi1_closed_form() {
    let t0 = Instant::now();
    let mut rng = rng(600);
    for trial in 0..200 {
        let (a, b) = random_ab(&mut rng);
        let rho_e = ginibre(4, 4, &mut rng);
        let r = decoherence_factor(&rho_e, PHI).unwrap().value;
        let asym = asymptotic_system_state(&psi1(a, b).to_density(), r).unwrap();
        let direct = concurrence(&asym).unwrap();
        let closed = 2.0 * (a * b).norm() * r;
        assert!(
            (direct - closed).abs() <= 1e-8,
            "trial {trial}: Wootters {direct} vs closed form {closed}"
        );
    }
    pass(6, "asymptotic concurrence of a|00>+b|11> equals 2|ab|r on 200 random draws", t0);
}

#[test]
fn criterion_07_psi2_closed_form() {
    let t0 = Instant::now();
    let rho_s = psi2().to_density();
    for i in 0..=100 {
        let r = i as f64 * 0.01;
        let direct = concurrence(&asymptotic_system_state(&rho_s, r).unwrap()).unwrap();
        let closed = concurrence_psi2_asymptotic(r).unwrap();
        assert!((direct - closed).abs() <= 1e-9, "r={r}: {direct} vs {closed}");
        if r <= 1.0 / 3.0 {
            assert_eq!(direct, 0.0, "r={r} is below threshold, concurrence must vanish exactly");
        }
    }
    pass(7, "psi2 asymptotic concurrence matches max{0,(3r-1)/2} on the 0.01 grid, exact zero below 1/3", t0);
}

#[test]
fn criterion_08_critical_environment_size() {
    let t0 = Instant::now();
    assert_eq!(n_sep(0.75).unwrap(), 4);
    let mut rng = rng(800);
    for _ in 0..50 {
        let q: f64 = rng.gen_range(0.34..0.99);
        let ns = n_sep(q).unwrap() as i32;
        let at = concurrence_psi2_asymptotic(q.powi(ns)).unwrap();
        let before = concurrence_psi2_asymptotic(q.powi(ns - 1)).unwrap();
        assert!(at == 0.0 && before > 0.0, "q={q}: C(q^{ns})={at}, C(q^{}) = {before}", ns - 1);
    }
    pass(8, "n_sep(3/4)=4 and the vanishing boundary is consistent for 50 random q", t0);
}

#[test]
fn criterion_09_fragility_classifier() {
    let t0 = Instant::now();
    assert_eq!(classify_fragility(&psi2().to_density()).unwrap().class, Fragility::Fragile);
    let (a, b) = (Complex::new(0.6, 0.0), Complex::new(0.0, 0.8));
    assert_eq!(classify_fragility(&psi1(a, b).to_density()).unwrap().class, Fragility::Robust);
    assert_eq!(
        classify_fragility(&DensityMatrix::maximally_mixed(2)).unwrap().class,
        Fragility::Separable
    );

    // Bisection consistency on 500 random entangled states: mixed full-support
    // states (fragile side) and a|00>+b|11> pure states (robust side).
    let mut rng = rng(900);
    let mut checked = 0usize;
    while checked < 500 {
        let rho = if checked % 2 == 0 {
            let rank = 2 + checked % 3;
            ginibre(4, rank, &mut rng)
        } else {
            let (a, b) = random_ab(&mut rng);
            psi1(a, b).to_density()
        };
        if concurrence(&rho).unwrap() <= 0.01 {
            continue;
        }
        let report = classify_with_diagnostic(&rho).unwrap();
        let r_star = report.r_star.expect("entangled state must carry the diagnostic");
        let fragile_by_threshold = r_star > 1e-6;
        assert_eq!(
            report.class == Fragility::Fragile,
            fragile_by_threshold,
            "state {checked}: class {:?} but r* = {r_star:.3e}",
            report.class
        );
        checked += 1;
    }
    pass(9, "classifier examples hold and r* bisection agrees on 500 entangled states", t0);
}

#[test]
fn criterion_10_correlated_environment() {
    let t0 = Instant::now();
    for alpha in [0.0, PI / 6.0, PI / 3.0, PI / 2.0] {
        for n in [2usize, 3, 4] {
            let r = decoherence_factor_correlated(alpha, n, PHI).unwrap().value;
            let expected = alpha.cos().powi(2);
            assert!(
                (r - expected).abs() <= 1e-10,
                "alpha={alpha}, n={n}: r={r} vs cos^2(alpha)={expected}"
            );
        }
    }
    pass(10, "correlated-environment decoherence factor equals cos^2(alpha), independent of n", t0);
}

#[test]
fn criterion_11_weight_independence() {
    let t0 = Instant::now();
    let base = fig2_spec(2);
    let rho0 = fig2_initial(2).to_density();
    let mut limits = Vec::new();
    for seed in 0..5u64 {
        let spec = base.with_random_weights(seed);
        let channel = Channel::new(spec).unwrap();
        let result = channel.converge(&rho0, 1e-13, 100_000).unwrap();
        assert_eq!(result.status, ConvergenceStatus::Stationary, "seed {seed}");
        limits.push(result.states[0].clone());
    }
    for i in 1..limits.len() {
        let d = trace_distance(&limits[0], &limits[i]).unwrap();
        assert!(d <= 2e-10, "weight sets 0 and {i}: trace distance {d:.3e}");
    }
    pass(11, "asymptotic state is unchanged across 5 random edge-weight vectors (within 2e-10)", t0);
}

#[test]
fn criterion_12_channel_invariants() {
    let t0 = Instant::now();
    let channel = Channel::new(fig2_spec(2)).unwrap();

    // Per-step trace drift over 1000 iterations.
    let mut rho = fig2_initial(2).to_density();
    let mut prev_trace = rho.matrix().trace().re;
    for step in 1..=1000 {
        rho = channel.apply(&rho).unwrap();
        let tr = rho.matrix().trace().re;
        assert!((tr - prev_trace).abs() <= 1e-12, "step {step}: trace drift {}", tr - prev_trace);
        prev_trace = tr;
    }

    // Unitality: the maximally mixed state is a fixed point.
    let mixed = DensityMatrix::maximally_mixed(4);
    let image = channel.apply(&mixed).unwrap();
    let dev = max_abs(&(image.matrix() - eye(16).scale(1.0 / 16.0)));
    assert!(dev <= 1e-12, "unitality deviation {dev:.3e}");

    // Monte-Carlo trajectory average against the exact iterate.
    let psi0 = fig2_initial(2);
    let sampled = channel.sample_trajectories(&psi0, 60, 4000, 12).unwrap();
    let mut exact = psi0.to_density();
    for _ in 0..60 {
        exact = channel.apply(&exact).unwrap();
    }
    let d = trace_distance(&sampled, &exact).unwrap();
    assert!(d <= 0.05, "Monte-Carlo distance {d:.3} exceeds 0.05");
    pass(12, &format!("trace preserved, unital, Monte-Carlo within {d:.3} of the exact iterate"), t0);
}
