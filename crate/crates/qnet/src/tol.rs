//! Central numerical-tolerance configuration.
//!
//! Every cutoff used by the library lives here so that a run can be tightened
//! or relaxed in one place.

/// Numerical tolerances and size caps, with the library-wide defaults.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max entry-wise deviation allowed for a density matrix to count as Hermitian.
    pub hermiticity: f64,
    /// Allowed deviation of a density-matrix trace from 1.
    pub trace: f64,
    /// Negative eigenvalues above this (in magnitude) are clamped to 0 for PSD inputs.
    pub psd_clamp: f64,
    /// Eigenvalues below `-psd_reject` make an input count as genuinely non-PSD.
    pub psd_reject: f64,
    /// Hermiticity tolerance accepted by the eigensolver.
    pub eig_hermiticity: f64,
    /// Unit-norm tolerance for pure states.
    pub pure_norm: f64,
    /// Convergence tolerance for iterated-map fixed-point / period detection.
    pub converge: f64,
    /// Iteration budget for convergence detection.
    pub max_iter: usize,
    /// Hard cap on any produced matrix dimension (full register up to 2^12).
    pub dim_cap: usize,
    /// Max register size k+n for the brute-force superoperator oracle.
    pub oracle_cap: usize,
    /// Relative singular-value cutoff for null-space extraction.
    pub nullspace: f64,
    /// Arc-distance tolerance for deduplicating unit-circle eigenvalue candidates.
    pub eig_dedup_arc: f64,
    /// Gram condition numbers above this abort dualization.
    pub gram_cond_max: f64,
    /// Concurrence at or below this counts as separable.
    pub separable: f64,
    /// Relative cutoff for "pointer-basis diagonal is zero" in the fragility test.
    pub zero_diagonal_rel: f64,
    /// Slack allowed before a decoherence factor outside [0,1] is rejected.
    pub decoherence_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            trace: 1e-10,
            psd_clamp: 1e-10,
            psd_reject: 1e-8,
            eig_hermiticity: 1e-8,
            pure_norm: 1e-12,
            converge: 1e-10,
            max_iter: 10_000,
            dim_cap: 4096,
            oracle_cap: 5,
            nullspace: 1e-8,
            eig_dedup_arc: 1e-8,
            gram_cond_max: 1e12,
            separable: 1e-9,
            zero_diagonal_rel: 1e-12,
            decoherence_slack: 1e-8,
        }
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-10,
        trace: 1e-10,
        psd_clamp: 1e-10,
        psd_reject: 1e-8,
        eig_hermiticity: 1e-8,
        pure_norm: 1e-12,
        converge: 1e-10,
        max_iter: 10_000,
        dim_cap: 4096,
        oracle_cap: 5,
        nullspace: 1e-8,
        eig_dedup_arc: 1e-8,
        gram_cond_max: 1e12,
        separable: 1e-9,
        zero_diagonal_rel: 1e-12,
        decoherence_slack: 1e-8,
    };
}
