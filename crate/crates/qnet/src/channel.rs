//! The iterated random-unitary map: one application, trajectory recording,
//! convergence/period detection, superoperator export, and a Monte-Carlo
//! trajectory sampler.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entanglement::concurrence;
use crate::error::{QnetError, Result};
use crate::par;
use crate::qmat::{
    kron, partial_trace, trace_distance, CMat, CVec, DensityMatrix, PureState,
};
use crate::network::NetworkSpec;
use crate::tol::Tolerances;

/// Per-step observables of an iterated run.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    /// Concurrence of the designated system-qubit pair.
    pub concurrence: f64,
    /// Sum of |off-diagonal| entries of the reduced system state.
    pub coherence_norm: f64,
    /// Trace distance of the reduced system state to the predicted asymptote,
    /// when a prediction is available.
    pub distance_to_prediction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceStatus {
    Stationary,
    Period2,
    MaxIterReached,
}

/// Outcome of fixed-point / period-2 detection. For `Period2` the two states
/// are ordered [even-step state, odd-step state] and map into each other
/// under one application of the channel.
#[derive(Debug, Clone)]
pub struct ConvergenceResult {
    pub status: ConvergenceStatus,
    pub steps_used: usize,
    pub states: Vec<DensityMatrix>,
}

/// A network together with its cached gate matrices.
pub struct Channel {
    spec: NetworkSpec,
    gates: Vec<(f64, CMat)>,
}

impl Channel {
    pub fn new(spec: NetworkSpec) -> Result<Self> {
        let report = spec.validate();
        if !report.is_valid() {
            return Err(QnetError::InvalidArgument(format!(
                "invalid network: {}",
                report.errors.join("; ")
            )));
        }
        let gates = spec.build_gates()?;
        Ok(Channel { spec, gates })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn gates(&self) -> &[(f64, CMat)] {
        &self.gates
    }

    /// One application of the map: Σ_e p_e U_e ρ U_e†.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.spec.dim() {
            return Err(QnetError::DimensionMismatch(format!(
                "state dimension {} does not match register dimension {}",
                rho.dim(),
                self.spec.dim()
            )));
        }
        let mut out = CMat::zeros(rho.dim(), rho.dim());
        for (p, u) in &self.gates {
            out += (u * rho.matrix() * u.adjoint()).scale(*p);
        }
        Ok(DensityMatrix::new_unchecked(out))
    }

    /// Iterate the map for `steps` applications, recording observables at
    /// every step including step 0.
    pub fn iterate(
        &self,
        rho0: &DensityMatrix,
        steps: usize,
        observe: (usize, usize),
        prediction: Option<&DensityMatrix>,
    ) -> Result<Vec<TrajectoryRecord>> {
        self.check_observe(observe)?;
        let mut records = Vec::with_capacity(steps + 1);
        let mut rho = rho0.clone();
        records.push(self.observe(&rho, observe, 0, prediction)?);
        for step in 1..=steps {
            rho = self.apply(&rho)?;
            records.push(self.observe(&rho, observe, step, prediction)?);
        }
        Ok(records)
    }

    fn check_observe(&self, observe: (usize, usize)) -> Result<()> {
        let (a, b) = observe;
        if a == b || a >= self.spec.k || b >= self.spec.k {
            return Err(QnetError::InvalidArgument(format!(
                "observed qubits ({a}, {b}) must be distinct system qubits (k = {})",
                self.spec.k
            )));
        }
        Ok(())
    }

    fn observe(
        &self,
        rho: &DensityMatrix,
        observe: (usize, usize),
        step: usize,
        prediction: Option<&DensityMatrix>,
    ) -> Result<TrajectoryRecord> {
        let system: Vec<usize> = (0..self.spec.k).collect();
        let reduced_system = partial_trace(rho, &system)?;
        let mut pair = [observe.0.min(observe.1), observe.0.max(observe.1)];
        pair.sort_unstable();
        let reduced_pair = partial_trace(rho, &pair)?;
        let distance_to_prediction = match prediction {
            Some(p) => Some(trace_distance(&reduced_system, p)?),
            None => None,
        };
        Ok(TrajectoryRecord {
            step,
            concurrence: concurrence(&reduced_pair)?,
            coherence_norm: reduced_system.coherence_norm(),
            distance_to_prediction,
        })
    }

    /// Detect a stationary state or a period-2 cycle by step-pair distances.
    pub fn converge(
        &self,
        rho0: &DensityMatrix,
        tol: f64,
        max_iter: usize,
    ) -> Result<ConvergenceResult> {
        if tol <= 0.0 {
            return Err(QnetError::InvalidArgument("convergence tolerance must be positive".into()));
        }
        // A two-step match alone is not proof of oscillation: a decaying mode
        // with eigenvalue near -1 makes d(rho_{N+2}, rho_N) cross `tol` well
        // before d(rho_{N+1}, rho_N) does. A period-2 verdict therefore also
        // requires the one-step gap to persist over a confirmation window.
        const WINDOW: usize = 50;
        let mut prev = rho0.clone(); // state after `step - 1` applications
        let mut cur = self.apply(&prev)?; // state after `step` applications
        let mut armed: Option<(usize, f64)> = None; // (deadline step, gap at trigger)
        for step in 1..=max_iter {
            let gap = trace_distance(&cur, &prev)?;
            if gap <= tol {
                return Ok(ConvergenceResult {
                    status: ConvergenceStatus::Stationary,
                    steps_used: step,
                    states: vec![cur],
                });
            }
            let next = self.apply(&cur)?; // state after `step + 1` applications
            if trace_distance(&next, &prev)? <= tol {
                match armed {
                    None => armed = Some((step + WINDOW, gap)),
                    Some((deadline, gap0)) if step >= deadline => {
                        if gap0 - gap > 10.0 * tol {
                            // Still shrinking: re-arm and keep iterating.
                            armed = Some((step + WINDOW, gap));
                        } else {
                            // Persistent gap: `cur` is the state at parity step % 2.
                            let (even, odd) =
                                if step % 2 == 0 { (cur, next) } else { (next, cur) };
                            return Ok(ConvergenceResult {
                                status: ConvergenceStatus::Period2,
                                steps_used: step + 1,
                                states: vec![even, odd],
                            });
                        }
                    }
                    Some(_) => {}
                }
            } else {
                armed = None;
            }
            prev = cur;
            cur = next;
        }
        Ok(ConvergenceResult {
            status: ConvergenceStatus::MaxIterReached,
            steps_used: max_iter,
            states: vec![cur],
        })
    }

    /// Matrix form of the map under column-stacking vectorization:
    /// S vec(ρ) = vec(𝒫(ρ)) with S = Σ_e p_e conj(U_e) ⊗ U_e.
    pub fn superoperator(&self, oracle_cap: usize) -> Result<CMat> {
        let m = self.spec.total_qubits();
        if m > oracle_cap {
            return Err(QnetError::SizeCap(format!(
                "register of {m} qubits exceeds the oracle cap {oracle_cap}"
            )));
        }
        let d2 = self.spec.dim() * self.spec.dim();
        let mut s = CMat::zeros(d2, d2);
        for (p, u) in &self.gates {
            s += kron(&u.map(|z| z.conj()), u)?.scale(*p);
        }
        Ok(s)
    }

    /// Monte-Carlo estimate of the iterated state: average of `shots`
    /// pure-state trajectories with independently sampled edge sequences.
    ///
    /// The per-shot random stream is derived from `(seed, shot index)`, so
    /// the result is independent of scheduling order.
    pub fn sample_trajectories(
        &self,
        psi0: &PureState,
        steps: usize,
        shots: usize,
        seed: u64,
    ) -> Result<DensityMatrix> {
        self.sample_with(psi0, steps, shots, seed, true)
    }

    /// Sequential twin of [`Channel::sample_trajectories`]; same result,
    /// no thread pool. Kept for benchmarking and as a fallback reference.
    pub fn sample_trajectories_sequential(
        &self,
        psi0: &PureState,
        steps: usize,
        shots: usize,
        seed: u64,
    ) -> Result<DensityMatrix> {
        self.sample_with(psi0, steps, shots, seed, false)
    }

    fn sample_with(
        &self,
        psi0: &PureState,
        steps: usize,
        shots: usize,
        seed: u64,
        parallel: bool,
    ) -> Result<DensityMatrix> {
        if shots == 0 {
            return Err(QnetError::InvalidArgument("shots must be at least 1".into()));
        }
        if psi0.dim() != self.spec.dim() {
            return Err(QnetError::DimensionMismatch(format!(
                "initial state dimension {} does not match register dimension {}",
                psi0.dim(),
                self.spec.dim()
            )));
        }
        let weights: Vec<f64> = self.gates.iter().map(|(p, _)| *p).collect();
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| QnetError::InvalidArgument(format!("bad edge weights: {e}")))?;
        let shot_state = |shot: usize| -> CVec {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shot as u64 + 1);
            let mut psi = psi0.amplitudes().clone();
            for _ in 0..steps {
                let e = dist.sample(&mut rng);
                psi = &self.gates[e].1 * psi;
            }
            psi
        };
        let finals: Vec<CVec> = if parallel {
            par::map_indexed(shots, &shot_state)
        } else {
            par::map_indexed_seq(shots, &shot_state)
        };
        let dim = self.spec.dim();
        let mut acc = CMat::zeros(dim, dim);
        for psi in &finals {
            acc += psi * psi.adjoint();
        }
        Ok(DensityMatrix::new_unchecked(acc.scale(1.0 / shots as f64)))
    }
}

/// Format trajectory records as the CSV interface: header plus one row per
/// step, floats at 12 significant digits.
pub fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::from("step,concurrence,coherence_norm,distance_to_prediction\n");
    for r in records {
        let d = r
            .distance_to_prediction
            .map(|d| format!("{d:.11e}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{:.11e},{:.11e},{}\n",
            r.step, r.concurrence, r.coherence_norm, d
        ));
    }
    out
}

/// Default convergence parameters from the central tolerance record.
pub fn default_converge() -> (f64, usize) {
    let t = Tolerances::DEFAULT;
    (t.converge, t.max_iter)
}
