//! Interaction-graph declaration and elementary controlled-unitary gates.
//!
//! A network couples `k` system qubits (indices `0..k`) to `n` environmental
//! qubits (indices `k..k+n`) through weighted directed edges. Each edge
//! applies a controlled single-qubit reflection on its target when its
//! control qubit is |1⟩.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QnetError, Result};
use crate::qmat::{
    embed_single, eye, CMat, CVec, DensityMatrix, PureState, C64, ONE, ZERO,
};

/// One directed interaction: `control` gates a single-qubit coupling on `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub control: usize,
    pub target: usize,
    #[serde(rename = "p")]
    pub probability: f64,
}

/// The system–environment interaction graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    /// System qubit count; system qubits are register indices `0..k`.
    pub k: usize,
    /// Environment qubit count; environment qubits are indices `k..k+n`.
    pub n: usize,
    /// Coupling angle of the elementary single-qubit transformation, radians.
    pub phi: f64,
    pub edges: Vec<Edge>,
}

/// Outcome of [`NetworkSpec::validate`]: errors are fatal, warnings are not.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

/// The single-qubit coupling of the model:
/// cosφ(|0⟩⟨0| − |1⟩⟨1|) + sinφ(|0⟩⟨1| + |1⟩⟨0|), a reflection.
pub fn single_qubit_coupling(phi: f64) -> CMat {
    let c = Complex::new(phi.cos(), 0.0);
    let s = Complex::new(phi.sin(), 0.0);
    CMat::from_row_slice(2, 2, &[c, s, s, -c])
}

/// cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
pub fn bloch_state(theta: f64) -> PureState {
    let half = theta / 2.0;
    PureState::from_slice(&[Complex::new(half.cos(), 0.0), Complex::new(half.sin(), 0.0)])
        .expect("unit norm by construction")
}

/// The +1 eigenstate |φ⟩ of the coupling: cos(φ/2)|0⟩ + sin(φ/2)|1⟩.
pub fn phi_eigenstate(phi: f64) -> PureState {
    bloch_state(phi)
}

/// The state orthogonal to |φ⟩: −sin(φ/2)|0⟩ + cos(φ/2)|1⟩.
pub fn phi_perp(phi: f64) -> PureState {
    let half = phi / 2.0;
    PureState::from_slice(&[Complex::new(-half.sin(), 0.0), Complex::new(half.cos(), 0.0)])
        .expect("unit norm by construction")
}

impl NetworkSpec {
    pub fn total_qubits(&self) -> usize {
        self.k + self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.total_qubits()
    }

    /// Uniform-weight preset: every system→environment pair plus every
    /// ordered environment–environment pair, probabilities summing to 1.
    pub fn all_to_all(k: usize, n: usize, phi: f64) -> Self {
        let mut edges = Vec::new();
        for s in 0..k {
            for e in k..k + n {
                edges.push(Edge { control: s, target: e, probability: 0.0 });
            }
        }
        for a in k..k + n {
            for b in k..k + n {
                if a != b {
                    edges.push(Edge { control: a, target: b, probability: 0.0 });
                }
            }
        }
        let p = 1.0 / edges.len() as f64;
        for e in &mut edges {
            e.probability = p;
        }
        NetworkSpec { k, n, phi, edges }
    }

    /// Same topology with edge weights re-drawn uniformly at random and
    /// normalized; deterministic in `seed`.
    pub fn with_random_weights(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = self.edges.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let edges = self
            .edges
            .iter()
            .zip(raw)
            .map(|(e, w)| Edge { probability: w / total, ..e.clone() })
            .collect();
        NetworkSpec { edges, ..self.clone() }
    }

    /// Structural checks; model-class boundary conditions come back as warnings.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let m = self.total_qubits();
        if self.k < 1 {
            report.errors.push("system qubit count k must be at least 1".into());
        }
        if self.n < 1 {
            report.errors.push("environment qubit count n must be at least 1".into());
        }
        if self.edges.is_empty() {
            report.errors.push("edge list is empty".into());
        }
        let mut sum = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            if e.control == e.target {
                report.errors.push(format!("edge {i}: control equals target ({})", e.control));
            }
            if e.control >= m || e.target >= m {
                report.errors.push(format!(
                    "edge {i}: index out of range ({} -> {}, register has {m} qubits)",
                    e.control, e.target
                ));
            }
            if e.probability <= 0.0 {
                report.errors.push(format!("edge {i}: probability {} must be positive", e.probability));
            }
            if e.control < self.k && e.target < self.k {
                report.errors.push(format!(
                    "edge {i}: system-system interaction {} -> {} is forbidden by the model",
                    e.control, e.target
                ));
            }
            sum += e.probability;
        }
        if (sum - 1.0).abs() > 1e-9 {
            report.errors.push(format!("edge probabilities sum to {sum}, expected 1"));
        }
        if self.n < 2 {
            report.warnings.push(
                "environment has fewer than 2 qubits; the stationary asymptotic form may not apply"
                    .into(),
            );
        }
        let has_env_env =
            self.edges.iter().any(|e| e.control >= self.k && e.target >= self.k);
        if self.n >= 2 && !has_env_env {
            report.warnings.push(
                "no environment-environment edge; the analytic attractor list may be incomplete"
                    .into(),
            );
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.control >= self.k && e.target < self.k {
                report.warnings.push(format!(
                    "edge {i}: environment -> system direction ({} -> {}) is outside the paper's stated model",
                    e.control, e.target
                ));
            }
        }
        report
    }

    /// Full-register matrix of the controlled coupling for one edge:
    /// identity when the control is |0⟩, the single-qubit coupling on the
    /// target when the control is |1⟩.
    pub fn build_gate(&self, e: &Edge) -> Result<CMat> {
        let m = self.total_qubits();
        if e.control >= m || e.target >= m || e.control == e.target {
            return Err(QnetError::InvalidArgument(format!(
                "invalid edge {} -> {} for a {m}-qubit register",
                e.control, e.target
            )));
        }
        let p0 = CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
        let p1 = CMat::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
        let idle = embed_single(&p0, e.control, m)?;
        let fire = embed_single(&p1, e.control, m)? * embed_single(&single_qubit_coupling(self.phi), e.target, m)?;
        Ok(idle + fire)
    }

    /// All gates with their probabilities, in edge order.
    pub fn build_gates(&self) -> Result<Vec<(f64, CMat)>> {
        self.edges.iter().map(|e| Ok((e.probability, self.build_gate(e)?))).collect()
    }
}

/// Serializable network description: either an explicit edge list or a
/// named topology preset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkConfig {
    Preset { topology: Topology, k: usize, n: usize, phi: f64 },
    Explicit(NetworkSpec),
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    AllToAll,
}

impl NetworkConfig {
    pub fn to_spec(&self) -> NetworkSpec {
        match self {
            NetworkConfig::Preset { topology: Topology::AllToAll, k, n, phi } => {
                NetworkSpec::all_to_all(*k, *n, *phi)
            }
            NetworkConfig::Explicit(spec) => spec.clone(),
        }
    }
}

/// A complex parameter that deserializes from either a bare float or an
/// `[re, im]` pair.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CplxParam {
    Re(f64),
    Pair([f64; 2]),
}

impl From<CplxParam> for C64 {
    fn from(p: CplxParam) -> C64 {
        match p {
            CplxParam::Re(re) => Complex::new(re, 0.0),
            CplxParam::Pair([re, im]) => Complex::new(re, im),
        }
    }
}

/// Named initial-state families. Single-qubit presets tile across the
/// requested register size.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum StatePreset {
    /// |0...0⟩.
    Zero,
    /// |1...1⟩.
    One,
    /// |φ⟩^⊗q, the coupling eigenstate on every qubit.
    PhiEigenstate,
    /// (cos(θ/2)|0⟩ + sin(θ/2)|1⟩)^⊗q.
    Bloch { theta: f64 },
    /// a|00⟩ + b|11⟩ on two qubits.
    Psi1 { a: CplxParam, b: CplxParam },
    /// ½(−|00⟩ + |01⟩ + |10⟩ + |11⟩) on two qubits.
    Psi2,
    /// Tensor product of single-qubit factors; one factor tiles the register.
    Product { factors: Vec<StatePreset> },
    /// cos α |φ_n⟩ + sin α |φ⊥⟩⊗|φ⟩^(n−1), a correlated environment.
    Correlated { alpha: f64 },
    /// Explicit density matrix, row-major, `[re, im]` cells.
    Explicit { matrix: Vec<Vec<[f64; 2]>> },
}

fn tile(single: &PureState, qubits: usize) -> Result<PureState> {
    let mut out = single.clone();
    for _ in 1..qubits {
        out = out.tensor(single)?;
    }
    Ok(out)
}

/// Realize a preset as a pure state, when the preset is pure.
pub fn realize_pure(preset: &StatePreset, qubits: usize, phi: f64) -> Result<PureState> {
    match preset {
        StatePreset::Zero => Ok(PureState::basis(qubits, 0)),
        StatePreset::One => Ok(PureState::basis(qubits, (1 << qubits) - 1)),
        StatePreset::PhiEigenstate => tile(&phi_eigenstate(phi), qubits),
        StatePreset::Bloch { theta } => tile(&bloch_state(*theta), qubits),
        StatePreset::Psi1 { a, b } => {
            if qubits != 2 {
                return Err(QnetError::InvalidArgument("psi1 is a two-qubit preset".into()));
            }
            let a: C64 = (*a).into();
            let b: C64 = (*b).into();
            let norm = a.norm_sqr() + b.norm_sqr();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(QnetError::InvalidArgument(format!(
                    "psi1 parameters not normalized: |a|^2+|b|^2 = {norm}"
                )));
            }
            PureState::from_slice(&[a, ZERO, ZERO, b])
        }
        StatePreset::Psi2 => {
            if qubits != 2 {
                return Err(QnetError::InvalidArgument("psi2 is a two-qubit preset".into()));
            }
            let h = Complex::new(0.5, 0.0);
            PureState::from_slice(&[-h, h, h, h])
        }
        StatePreset::Product { factors } => {
            let factors = resolve_product_factors(factors, qubits)?;
            let mut out: Option<PureState> = None;
            for f in &factors {
                let s = realize_pure(f, 1, phi)?;
                out = Some(match out {
                    None => s,
                    Some(acc) => acc.tensor(&s)?,
                });
            }
            Ok(out.expect("at least one factor"))
        }
        StatePreset::Correlated { alpha } => {
            let phi_n = tile(&phi_eigenstate(phi), qubits)?;
            let nu_n = if qubits == 1 {
                phi_perp(phi)
            } else {
                phi_perp(phi).tensor(&tile(&phi_eigenstate(phi), qubits - 1)?)?
            };
            let amps: CVec = phi_n.amplitudes().scale(alpha.cos())
                + nu_n.amplitudes().scale(alpha.sin());
            PureState::new(amps)
        }
        StatePreset::Explicit { .. } => {
            Err(QnetError::InvalidArgument("explicit matrices are not pure presets".into()))
        }
    }
}

fn resolve_product_factors(factors: &[StatePreset], qubits: usize) -> Result<Vec<StatePreset>> {
    if factors.is_empty() {
        return Err(QnetError::InvalidArgument("product preset needs at least one factor".into()));
    }
    if factors.len() == 1 {
        return Ok(vec![factors[0].clone(); qubits]);
    }
    if factors.len() != qubits {
        return Err(QnetError::InvalidArgument(format!(
            "product preset has {} factors for {qubits} qubits",
            factors.len()
        )));
    }
    Ok(factors.to_vec())
}

/// Realize a preset as a density matrix on `qubits` qubits.
pub fn realize_state(preset: &StatePreset, qubits: usize, phi: f64) -> Result<DensityMatrix> {
    match preset {
        StatePreset::Explicit { matrix } => {
            let dim = matrix.len();
            if matrix.iter().any(|row| row.len() != dim) {
                return Err(QnetError::InvalidArgument("explicit matrix is not square".into()));
            }
            if dim != 1 << qubits {
                return Err(QnetError::DimensionMismatch(format!(
                    "explicit matrix is {dim}x{dim}, expected {}",
                    1 << qubits
                )));
            }
            let mut m = CMat::zeros(dim, dim);
            for (r, row) in matrix.iter().enumerate() {
                for (c, cell) in row.iter().enumerate() {
                    m[(r, c)] = Complex::new(cell[0], cell[1]);
                }
            }
            DensityMatrix::new(m)
        }
        StatePreset::Product { factors } => {
            let factors = resolve_product_factors(factors, qubits)?;
            let mut out: Option<DensityMatrix> = None;
            for f in &factors {
                let s = realize_state(f, 1, phi)?;
                out = Some(match out {
                    None => s,
                    Some(acc) => acc.tensor(&s)?,
                });
            }
            Ok(out.expect("at least one factor"))
        }
        _ => Ok(realize_pure(preset, qubits, phi)?.to_density()),
    }
}

/// Identity check helper used by gate tests: ‖G†G − I‖_max.
pub fn unitarity_deviation(g: &CMat) -> f64 {
    crate::qmat::max_abs(&(g.adjoint() * g - eye(g.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{max_abs, sigma_x, sigma_z};
    use std::f64::consts::PI;

    #[test]
    fn coupling_special_angles() {
        assert!(max_abs(&(single_qubit_coupling(0.0) - sigma_z())) < 1e-15);
        assert!(max_abs(&(single_qubit_coupling(PI / 2.0) - sigma_x())) < 1e-15);
    }

    #[test]
    fn coupling_fixes_phi_eigenstate() {
        for phi in [0.3, 2.0 * PI / 3.0, 1.0, PI / 5.0] {
            let u = single_qubit_coupling(phi);
            let e = phi_eigenstate(phi);
            let image = &u * e.amplitudes();
            assert!((image - e.amplitudes()).iter().all(|z| z.norm() < 1e-14));
            // reflection: det = -1, trace = 0
            let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
            assert!((det + ONE).norm() < 1e-14);
            assert!(u.trace().norm() < 1e-14);
        }
    }

    #[test]
    fn gate_is_cnot_at_half_pi() {
        let spec = NetworkSpec {
            k: 1,
            n: 1,
            phi: PI / 2.0,
            edges: vec![Edge { control: 0, target: 1, probability: 1.0 }],
        };
        let g = spec.build_gate(&spec.edges[0]).unwrap();
        let cnot = CMat::from_row_slice(
            4,
            4,
            &[
                ONE, ZERO, ZERO, ZERO,
                ZERO, ONE, ZERO, ZERO,
                ZERO, ZERO, ZERO, ONE,
                ZERO, ZERO, ONE, ZERO,
            ],
        );
        assert!(max_abs(&(g - cnot)) < 1e-14);
    }

    #[test]
    fn gate_fixes_all_zero_state() {
        let spec = NetworkSpec::all_to_all(2, 2, 1.1);
        let zero = PureState::basis(4, 0);
        for e in &spec.edges {
            let g = spec.build_gate(e).unwrap();
            let image = &g * zero.amplitudes();
            assert!((image - zero.amplitudes()).iter().all(|z| z.norm() < 1e-14));
        }
    }

    #[test]
    fn gate_is_involution_and_unitary() {
        let spec = NetworkSpec::all_to_all(1, 2, 0.7);
        for e in &spec.edges {
            let g = spec.build_gate(e).unwrap();
            assert!(unitarity_deviation(&g) <= 1e-12);
            assert!(max_abs(&(&g * &g - eye(g.nrows()))) < 1e-12);
        }
    }

    #[test]
    fn gate_commutes_with_disjoint_single_qubit_ops() {
        let spec = NetworkSpec::all_to_all(1, 2, 0.9);
        // edge 0 couples qubits 0 -> 1; qubit 2 is untouched
        let e = &spec.edges[0];
        assert_eq!((e.control, e.target), (0, 1));
        let g = spec.build_gate(e).unwrap();
        let op = embed_single(&sigma_x(), 2, 3).unwrap();
        assert!(max_abs(&(&g * &op - &op * &g)) < 1e-12);
    }

    #[test]
    fn preset_counts() {
        assert_eq!(NetworkSpec::all_to_all(2, 2, 1.0).edges.len(), 6);
        let k1n1 = NetworkSpec::all_to_all(1, 1, 1.0);
        assert_eq!(k1n1.edges.len(), 1);
        assert!((k1n1.edges[0].probability - 1.0).abs() < 1e-15);
        let k1n2 = NetworkSpec::all_to_all(1, 2, 1.0);
        assert_eq!(k1n2.edges.len(), 4);
        assert!(k1n2.edges.iter().all(|e| (e.probability - 0.25).abs() < 1e-15));
    }

    #[test]
    fn preset_passes_validation() {
        for (k, n) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            let report = NetworkSpec::all_to_all(k, n, 1.0).validate();
            assert!(report.is_valid(), "{report:?}");
        }
    }

    #[test]
    fn validation_catches_model_violations() {
        let mut spec = NetworkSpec::all_to_all(2, 2, 1.0);
        spec.edges.push(Edge { control: 0, target: 1, probability: 0.1 });
        let report = spec.validate();
        assert!(report.errors.iter().any(|e| e.contains("system-system")));
        assert!(report.errors.iter().any(|e| e.contains("sum")));

        let half = NetworkSpec {
            k: 1,
            n: 1,
            phi: 1.0,
            edges: vec![Edge { control: 0, target: 1, probability: 0.5 }],
        };
        assert!(!half.validate().is_valid());
    }

    #[test]
    fn validation_flags_env_to_system() {
        let spec = NetworkSpec {
            k: 1,
            n: 2,
            phi: 1.0,
            edges: vec![
                Edge { control: 1, target: 0, probability: 0.5 },
                Edge { control: 1, target: 2, probability: 0.5 },
            ],
        };
        let report = spec.validate();
        assert!(report.is_valid());
        assert!(report.warnings.iter().any(|w| w.contains("outside the paper")));
    }

    #[test]
    fn realize_psi2() {
        let rho = realize_state(&StatePreset::Psi2, 2, 1.0).unwrap();
        let h = 0.5;
        // |psi2> = (-1/2, 1/2, 1/2, 1/2); check a few outer-product entries
        assert!((rho.matrix()[(0, 0)].re - h * h).abs() < 1e-15);
        assert!((rho.matrix()[(0, 1)].re + h * h).abs() < 1e-15);
        assert!((rho.matrix()[(1, 2)].re - h * h).abs() < 1e-15);
    }

    #[test]
    fn realize_phi_eigenstate_at_two_thirds_pi() {
        let s = realize_pure(&StatePreset::PhiEigenstate, 1, 2.0 * PI / 3.0).unwrap();
        assert!((s.amplitudes()[0].re - 0.5).abs() < 1e-12);
        assert!((s.amplitudes()[1].re - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn realize_correlated_limits() {
        let phi = 2.0 * PI / 3.0;
        let zero_alpha = realize_state(&StatePreset::Correlated { alpha: 0.0 }, 3, phi).unwrap();
        let phi_n = tile(&phi_eigenstate(phi), 3).unwrap().to_density();
        assert!(max_abs(&(zero_alpha.matrix() - phi_n.matrix())) < 1e-12);
        // chi is orthogonal to phi_n at alpha = pi/2
        let perp = realize_pure(&StatePreset::Correlated { alpha: PI / 2.0 }, 3, phi).unwrap();
        let overlap: C64 = tile(&phi_eigenstate(phi), 3)
            .unwrap()
            .amplitudes()
            .iter()
            .zip(perp.amplitudes().iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm() < 1e-12);
    }

    #[test]
    fn psi1_rejects_unnormalized() {
        let bad = StatePreset::Psi1 { a: CplxParam::Re(1.0), b: CplxParam::Re(1.0) };
        assert!(realize_state(&bad, 2, 1.0).is_err());
    }

    #[test]
    fn network_config_json_round_trip() {
        let preset: NetworkConfig =
            serde_json::from_str(r#"{"topology":"all_to_all","k":2,"n":2,"phi":2.0944}"#).unwrap();
        assert_eq!(preset.to_spec().edges.len(), 6);
        let explicit: NetworkConfig = serde_json::from_str(
            r#"{"k":1,"n":1,"phi":1.5708,"edges":[{"control":0,"target":1,"p":1.0}]}"#,
        )
        .unwrap();
        assert_eq!(explicit.to_spec().edges.len(), 1);
    }

    #[test]
    fn state_preset_json() {
        let p: StatePreset = serde_json::from_str(r#"{"preset":"psi1","a":0.6,"b":0.8}"#).unwrap();
        assert!(realize_state(&p, 2, 1.0).is_ok());
        let p: StatePreset =
            serde_json::from_str(r#"{"preset":"product","factors":[{"preset":"bloch","theta":1.0471975511965976}]}"#)
                .unwrap();
        assert!(realize_state(&p, 3, 1.0).is_ok());
    }
}
