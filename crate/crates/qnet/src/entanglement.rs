//! Two-qubit entanglement analytics: Wootters concurrence, the closed-form
//! asymptotic concurrences, the critical environment size, and the
//! fragile/robust classifier.

use serde::Serialize;

use crate::asymptotics::asymptotic_system_state;
use crate::error::{QnetError, Result};
use crate::qmat::{kron, sigma_y, sqrt_psd, DensityMatrix, C64};
use crate::tol::Tolerances;

/// Wootters concurrence of a two-qubit state.
///
/// Computed via the Hermitian route: with B = √ρ (σy⊗σy) conj(√ρ) one has
/// B B† = √ρ ρ̃ √ρ, so the singular values of B are the Wootters λᵢ directly.
/// Taking them from an SVD instead of square-rooting eigenvalues of B B†
/// avoids the ~√ε precision loss near pure states.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(QnetError::DimensionMismatch(format!(
            "concurrence expects a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let yy = kron(&sigma_y(), &sigma_y())?;
    let root = sqrt_psd(rho.matrix())?;
    let b = &root * yy * root.map(|z| z.conj());
    let svd = b.svd(false, false);
    let mut lambdas: Vec<f64> = svd.singular_values.iter().copied().collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.max(0.0))
}

/// Asymptotic concurrence of a|00⟩ + b|11⟩ under decoherence factor `r`:
/// 2|ab| r.
pub fn concurrence_psi1_asymptotic(a: C64, b: C64, r: f64) -> Result<f64> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(QnetError::InvalidArgument(format!(
            "psi1 amplitudes not normalized: |a|^2 + |b|^2 = {norm}"
        )));
    }
    check_r(r)?;
    Ok(2.0 * (a * b).norm() * r)
}

/// Asymptotic concurrence of the maximally entangled ψ2 family:
/// ½ max{0, 3r − 1}.
pub fn concurrence_psi2_asymptotic(r: f64) -> Result<f64> {
    check_r(r)?;
    Ok(0.5 * (3.0 * r - 1.0).max(0.0))
}

fn check_r(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(QnetError::InvalidArgument(format!("decoherence factor {r} outside [0, 1]")));
    }
    Ok(())
}

/// Smallest product-environment size n at which the asymptotic ψ2
/// concurrence vanishes, i.e. the smallest n with qⁿ ≤ 1/3.
pub fn n_sep(q: f64) -> Result<u32> {
    if q <= 0.0 {
        return Err(QnetError::InvalidArgument(format!("q = {q} must be positive")));
    }
    if q >= 1.0 {
        return Err(QnetError::InvalidArgument(format!(
            "q = {q}: the asymptotic entanglement never vanishes for q >= 1"
        )));
    }
    let threshold = 1.0 / 3.0;
    // log-space candidate with an exactness guard at the boundary
    let x = (3f64).ln() / (-q.ln());
    let mut n = (x.floor() as i64 - 1).max(1) as u32;
    while q.powi(n as i32) > threshold + 1e-15 {
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Fragility {
    Fragile,
    Robust,
    Separable,
}

/// Classification of a two-qubit state by its pointer-basis diagonals.
#[derive(Debug, Clone, Serialize)]
pub struct FragilityReport {
    pub class: Fragility,
    /// Product of the four pointer-basis diagonal entries.
    pub diagonal_product: f64,
    pub initial_concurrence: f64,
    /// Bisection estimate of the smallest decoherence factor with nonzero
    /// asymptotic concurrence; filled by the diagnostic mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_star: Option<f64>,
}

/// Classify a two-qubit state as Fragile, Robust, or Separable.
///
/// Separable when the concurrence is (numerically) zero; otherwise Fragile
/// exactly when all four pointer-basis diagonals are nonzero.
pub fn classify_fragility(rho: &DensityMatrix) -> Result<FragilityReport> {
    if rho.dim() != 4 {
        return Err(QnetError::DimensionMismatch(
            "fragility classification expects a two-qubit state".into(),
        ));
    }
    let tol = Tolerances::DEFAULT;
    let diagonals: Vec<f64> = (0..4).map(|i| rho.matrix()[(i, i)].re).collect();
    let diagonal_product: f64 = diagonals.iter().product();
    let initial_concurrence = concurrence(rho)?;
    let class = if initial_concurrence <= tol.separable {
        Fragility::Separable
    } else if diagonals.iter().all(|&d| d > tol.zero_diagonal_rel) {
        Fragility::Fragile
    } else {
        Fragility::Robust
    };
    Ok(FragilityReport { class, diagonal_product, initial_concurrence, r_star: None })
}

/// Diagnostic: bisection estimate of r* = inf{r : C(ρ∞(r)) > 0} for the
/// asymptotic state family built from `rho`.
pub fn r_star_bisection(rho: &DensityMatrix, iterations: usize) -> Result<f64> {
    let entangled_at = |r: f64| -> Result<bool> {
        let asym = asymptotic_system_state(rho, r)?;
        Ok(concurrence(&asym)? > 0.0)
    };
    if !entangled_at(1.0)? {
        // never entangled on (0, 1]; report the top of the interval
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if entangled_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Classify with the bisection diagnostic attached.
pub fn classify_with_diagnostic(rho: &DensityMatrix) -> Result<FragilityReport> {
    let mut report = classify_fragility(rho)?;
    if report.class != Fragility::Separable {
        report.r_star = Some(r_star_bisection(rho, 40)?);
    }
    Ok(report)
}
