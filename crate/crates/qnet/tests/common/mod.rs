//! Shared fixtures for the integration suites: seeded random states and the
//! standard two-system-qubit benchmark setup.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qnet::network::{bloch_state, NetworkSpec};
use qnet::qmat::{CMat, DensityMatrix, PureState, C64};

pub const PHI: f64 = 2.0 * PI / 3.0;
/// Corrected environment single-qubit state for the benchmark curve:
/// cos(π/6)|0⟩ + sin(π/6)|1⟩, overlap squared with |φ⟩ equal to 3/4.
pub const DELTA_THETA: f64 = PI / 3.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen_range(0.0..2.0 * PI);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

fn gauss_c(rng: &mut ChaCha8Rng) -> C64 {
    Complex::new(gauss(rng), gauss(rng))
}

/// Random density matrix ρ = GG†/Tr(GG†) with G a dim×rank Ginibre matrix.
pub fn ginibre(dim: usize, rank: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = CMat::from_fn(dim, rank, |_, _| gauss_c(rng));
    let m = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
    DensityMatrix::new(m.scale(1.0 / tr)).expect("ginibre construction is PSD")
}

/// Haar-ish random pure state on `qubits` qubits.
pub fn random_pure(qubits: usize, rng: &mut ChaCha8Rng) -> PureState {
    let dim = 1usize << qubits;
    let mut amps: Vec<C64> = (0..dim).map(|_| gauss_c(rng)).collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a = a.unscale(norm);
    }
    PureState::from_slice(&amps).unwrap()
}

/// Random normalized amplitude pair (a, b) with both entries bounded away
/// from zero, for a|00⟩ + b|11⟩ inputs.
pub fn random_ab(rng: &mut ChaCha8Rng) -> (C64, C64) {
    let theta = rng.gen_range(0.2..PI / 2.0 - 0.2);
    let phase_a = rng.gen_range(0.0..2.0 * PI);
    let phase_b = rng.gen_range(0.0..2.0 * PI);
    let a = Complex::from_polar(theta.cos(), phase_a);
    let b = Complex::from_polar(theta.sin(), phase_b);
    (a, b)
}

pub fn psi1(a: C64, b: C64) -> PureState {
    let zero = Complex::new(0.0, 0.0);
    PureState::from_slice(&[a, zero, zero, b]).unwrap()
}

pub fn psi2() -> PureState {
    let h = Complex::new(0.5, 0.0);
    PureState::from_slice(&[-h, h, h, h]).unwrap()
}

pub fn fig2_spec(n: usize) -> NetworkSpec {
    NetworkSpec::all_to_all(2, n, PHI)
}

/// δ'^⊗n environment of the benchmark curve.
pub fn fig2_env(n: usize) -> PureState {
    let delta = bloch_state(DELTA_THETA);
    let mut env = delta.clone();
    for _ in 1..n {
        env = env.tensor(&delta).unwrap();
    }
    env
}

pub fn fig2_initial(n: usize) -> PureState {
    psi2().tensor(&fig2_env(n)).unwrap()
}

/// Reduction of a full-register state onto the two observed system qubits.
pub fn system_reduction(rho: &DensityMatrix) -> DensityMatrix {
    qnet::qmat::partial_trace(rho, &[0, 1]).unwrap()
}
