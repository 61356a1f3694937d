//! Asymptotic states of the iterated map, computed two independent ways:
//! spectral projection onto the attractor space, and the closed form that
//! rescales pointer-basis coherences by the decoherence factor.

use serde::Serialize;

use crate::attractors::{expand_in_block, AttractorBasis};
use crate::error::{QnetError, Result};
use crate::qmat::{CMat, DensityMatrix, ONE};
use crate::network::phi_eigenstate;
use crate::tol::Tolerances;

/// Which power of the −1 eigenvalue to take in the asymptotic expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    /// Valid only when λ = 1 is the sole eigenvalue present.
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    General,
    ProductPower,
    Correlated,
}

/// The overlap ⟨φ_n|ρ^(E)|φ_n⟩ scaling all pointer-basis coherences.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecoherenceFactor {
    pub value: f64,
    pub provenance: Provenance,
}

/// Spectral projection of a full-register input onto the attractor space:
/// Σ_λ λ^N Σ_i c_{λ,i} X_{λ,i} with dual-basis coefficients.
pub fn project_asymptotic(
    rho_in: &DensityMatrix,
    basis: &AttractorBasis,
    parity: Parity,
) -> Result<DensityMatrix> {
    let dim = rho_in.dim();
    let mut out = CMat::zeros(dim, dim);
    for block in &basis.blocks {
        if block.is_empty() {
            continue;
        }
        if block.members[0].matrix.nrows() != dim {
            return Err(QnetError::DimensionMismatch(
                "attractor basis dimension does not match the input state".into(),
            ));
        }
        let lambda = block.eigenvalue;
        let sign = if (lambda - ONE).norm() < 1e-8 {
            1.0
        } else if (lambda + ONE).norm() < 1e-8 {
            match parity {
                Parity::Even => 1.0,
                Parity::Odd => -1.0,
                Parity::Limit => return Err(QnetError::ParityRequired),
            }
        } else {
            return Err(QnetError::InvalidArgument(format!(
                "no asymptotic power is defined for eigenvalue {lambda}"
            )));
        };
        let (projection, _) = expand_in_block(block, rho_in.matrix())?;
        out += projection.scale(sign);
    }
    // the projection of a density matrix is again a density matrix up to roundoff
    let hermitized = (&out + out.adjoint()).scale(0.5);
    DensityMatrix::new(hermitized)
}

/// Closed-form asymptotic system state: pointer-basis diagonal kept exactly,
/// every off-diagonal entry multiplied by `r`.
pub fn asymptotic_system_state(rho_s: &DensityMatrix, r: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&r) {
        return Err(QnetError::InvalidArgument(format!("decoherence factor {r} outside [0, 1]")));
    }
    let dim = rho_s.dim();
    let mat = CMat::from_fn(dim, dim, |x, y| {
        if x == y {
            rho_s.matrix()[(x, y)]
        } else {
            rho_s.matrix()[(x, y)].scale(r)
        }
    });
    Ok(DensityMatrix::new_unchecked(mat))
}

/// General decoherence factor r = ⟨φ_n|ρ^(E)|φ_n⟩ for an n-qubit environment.
pub fn decoherence_factor(rho_e: &DensityMatrix, phi: f64) -> Result<DecoherenceFactor> {
    let n = rho_e.qubits();
    let mut phi_n = phi_eigenstate(phi);
    for _ in 1..n {
        phi_n = phi_n.tensor(&phi_eigenstate(phi))?;
    }
    let expectation = (phi_n.amplitudes().adjoint() * rho_e.matrix() * phi_n.amplitudes())[(0, 0)];
    if expectation.im.abs() > 1e-12 {
        return Err(QnetError::InvalidState(format!(
            "decoherence factor has imaginary part {:.3e}",
            expectation.im
        )));
    }
    clamp_factor(expectation.re, Provenance::General)
}

fn clamp_factor(raw: f64, provenance: Provenance) -> Result<DecoherenceFactor> {
    let slack = Tolerances::DEFAULT.decoherence_slack;
    if raw < -slack || raw > 1.0 + slack {
        return Err(QnetError::InvalidState(format!(
            "decoherence factor {raw} outside [0, 1] beyond tolerance"
        )));
    }
    Ok(DecoherenceFactor { value: raw.clamp(0.0, 1.0), provenance })
}

/// Product environment ξ^⊗n: r = ⟨φ|ξ|φ⟩^n.
pub fn decoherence_factor_product(xi: &DensityMatrix, n: u32, phi: f64) -> Result<DecoherenceFactor> {
    if xi.qubits() != 1 {
        return Err(QnetError::DimensionMismatch("product factor must be a single qubit".into()));
    }
    if n < 1 {
        return Err(QnetError::InvalidArgument("environment size must be at least 1".into()));
    }
    let single = decoherence_factor(xi, phi)?;
    clamp_factor(single.value.powi(n as i32), Provenance::ProductPower)
}

/// Correlated environment cos α |φ_n⟩ + sin α |ν_n⟩: evaluates the general
/// formula on the realized state; equals cos²α for every n.
pub fn decoherence_factor_correlated(alpha: f64, n: usize, phi: f64) -> Result<DecoherenceFactor> {
    if n < 1 {
        return Err(QnetError::InvalidArgument("environment size must be at least 1".into()));
    }
    let state = crate::network::realize_state(
        &crate::network::StatePreset::Correlated { alpha },
        n,
        phi,
    )?;
    let general = decoherence_factor(&state, phi)?;
    Ok(DecoherenceFactor { value: general.value, provenance: Provenance::Correlated })
}
