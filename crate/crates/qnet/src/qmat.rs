//! Dense complex linear-algebra kernel.
//!
//! Conventions fixed for the whole crate:
//! - qubit 0 is the most significant bit of a basis index, so a basis label
//!   |x⟩ reads left to right as qubit 0, 1, ...;
//! - `vec`/`unvec` use column stacking: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
//!
//! Storage and decompositions are backed by `nalgebra`; everything here is a
//! pure function of its inputs and safe to call from any thread.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{QnetError, Result};
use crate::tol::Tolerances;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const ZERO: C64 = Complex::new(0.0, 0.0);

/// 2x2 identity.
pub fn eye(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max entry-wise deviation from Hermiticity.
pub fn hermiticity_deviation(m: &CMat) -> f64 {
    let adj = m.adjoint();
    max_abs(&(m - adj))
}

/// Kronecker product with the crate-wide dimension cap.
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat> {
    let rows = a.nrows() * b.nrows();
    let cols = a.ncols() * b.ncols();
    let cap = Tolerances::DEFAULT.dim_cap;
    if rows > cap || cols > cap {
        return Err(QnetError::SizeCap(format!(
            "kron result {rows}x{cols} exceeds dimension cap {cap}"
        )));
    }
    Ok(a.kronecker(b))
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(factors: &[&CMat]) -> Result<CMat> {
    let mut out = eye(1);
    for f in factors {
        out = kron(&out, f)?;
    }
    Ok(out)
}

/// Embed a single-qubit operator at position `qubit` of an `m`-qubit register.
pub fn embed_single(op: &CMat, qubit: usize, qubits: usize) -> Result<CMat> {
    if op.nrows() != 2 || op.ncols() != 2 {
        return Err(QnetError::DimensionMismatch("embed_single expects a 2x2 operator".into()));
    }
    if qubit >= qubits {
        return Err(QnetError::InvalidArgument(format!(
            "qubit index {qubit} out of range for {qubits} qubits"
        )));
    }
    let left = eye(1 << qubit);
    let right = eye(1 << (qubits - qubit - 1));
    kron(&kron(&left, op)?, &right)
}

/// Hilbert–Schmidt inner product Tr(a† b).
pub fn hs_inner(a: &CMat, b: &CMat) -> Result<C64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(QnetError::DimensionMismatch(format!(
            "hs_inner: {}x{} vs {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn hs_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in descending order together with the matching
/// orthonormal eigenvector columns.
pub fn hermitian_eig(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let dev = hermiticity_deviation(m);
    let tol = Tolerances::DEFAULT.eig_hermiticity;
    if dev > tol {
        return Err(QnetError::NotHermitian { deviation: dev, tolerance: tol });
    }
    // Symmetrize first so the solver sees an exactly Hermitian input.
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Orthonormal basis of the right null space of `m`.
///
/// A singular value counts as zero when it is at most `tol * sigma_max`.
pub fn nullspace(m: &CMat, tol: f64) -> Result<Vec<CVec>> {
    if tol <= 0.0 {
        return Err(QnetError::InvalidArgument("nullspace tolerance must be positive".into()));
    }
    let cols = m.ncols();
    // Pad wide inputs with zero rows: the thin SVD would otherwise miss
    // null directions beyond the row count.
    let work = if m.nrows() < cols {
        let mut padded = CMat::zeros(cols, cols);
        padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        // zero matrix: the whole space
        return Ok((0..cols)
            .map(|i| {
                let mut v = CVec::zeros(cols);
                v[i] = ONE;
                v
            })
            .collect());
    }
    let v_t = svd.v_t.expect("requested V^H");
    let mut basis = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= tol * sigma_max {
            basis.push(v_t.row(i).map(|z| z.conj()).transpose());
        }
    }
    Ok(basis)
}

/// Principal square root of a Hermitian PSD matrix.
pub fn sqrt_psd(m: &CMat) -> Result<CMat> {
    let tol = Tolerances::DEFAULT;
    let (values, vectors) = hermitian_eig(m)?;
    if let Some(&min) = values.iter().min_by(|a, b| a.partial_cmp(b).unwrap()).as_ref() {
        if *min < -tol.psd_reject {
            return Err(QnetError::NotPsd { min_eigenvalue: *min });
        }
    }
    let n = values.len();
    let sqrt_diag = CMat::from_fn(n, n, |r, c| {
        if r == c {
            Complex::new(values[r].max(0.0).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    Ok(&vectors * sqrt_diag * vectors.adjoint())
}

/// Trace norm of `a - b`, halved: the trace distance of two Hermitian matrices.
pub fn trace_norm_half(a: &CMat, b: &CMat) -> Result<f64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(QnetError::DimensionMismatch("trace_distance on unequal dims".into()));
    }
    let diff = a - b;
    let (values, _) = hermitian_eig(&diff)?;
    Ok(0.5 * values.iter().map(|v| v.abs()).sum::<f64>())
}

/// Column-stacking vectorization.
pub fn vec_col(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

/// Inverse of [`vec_col`] for a square matrix of dimension `dim`.
pub fn unvec_col(v: &CVec, dim: usize) -> CMat {
    CMat::from_column_slice(dim, dim, v.as_slice())
}

fn is_power_of_two(d: usize) -> bool {
    d != 0 && d & (d - 1) == 0
}

/// Pure state on a qubit register, unit 2-norm.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVec,
    qubits: usize,
}

impl PureState {
    pub fn new(amplitudes: CVec) -> Result<Self> {
        let dim = amplitudes.len();
        if !is_power_of_two(dim) {
            return Err(QnetError::InvalidArgument(format!(
                "pure-state dimension {dim} is not a power of two"
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > Tolerances::DEFAULT.pure_norm {
            return Err(QnetError::InvalidState(format!("pure-state norm {norm} deviates from 1")));
        }
        Ok(PureState { amplitudes, qubits: dim.trailing_zeros() as usize })
    }

    /// Computational basis state |index⟩.
    pub fn basis(qubits: usize, index: usize) -> Self {
        let dim = 1 << qubits;
        let mut amplitudes = CVec::zeros(dim);
        amplitudes[index] = ONE;
        PureState { amplitudes, qubits }
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(CVec::from_column_slice(amps))
    }

    /// Tensor product, `self` on the more significant qubits.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let dim = self.dim() * other.dim();
        if dim > Tolerances::DEFAULT.dim_cap {
            return Err(QnetError::SizeCap(format!("pure-state dimension {dim} exceeds cap")));
        }
        let amplitudes = self.amplitudes.kronecker(&other.amplitudes);
        Ok(PureState { amplitudes, qubits: self.qubits + other.qubits })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    /// Outer product |ψ⟩⟨ψ| as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let outer = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { mat: outer, qubits: self.qubits }
    }
}

/// Density matrix on a qubit register: Hermitian, unit trace, PSD.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
    qubits: usize,
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(mat: CMat) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let dim = mat.nrows();
        if mat.ncols() != dim {
            return Err(QnetError::InvalidState("density matrix must be square".into()));
        }
        if !is_power_of_two(dim) {
            return Err(QnetError::InvalidState(format!("dimension {dim} is not a power of two")));
        }
        if dim > tol.dim_cap {
            return Err(QnetError::SizeCap(format!("dimension {dim} exceeds cap {}", tol.dim_cap)));
        }
        let dev = hermiticity_deviation(&mat);
        if dev > tol.hermiticity {
            return Err(QnetError::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(QnetError::InvalidState(format!("trace {tr} deviates from 1")));
        }
        let (values, _) = hermitian_eig(&mat)?;
        if let Some(&min) = values.last() {
            if min < -tol.psd_clamp {
                return Err(QnetError::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(DensityMatrix { mat, qubits: dim.trailing_zeros() as usize })
    }

    /// Constructor for matrices produced by trace- and positivity-preserving
    /// library code; skips the eigenvalue check.
    pub fn new_unchecked(mat: CMat) -> Self {
        let dim = mat.nrows();
        debug_assert!(is_power_of_two(dim));
        DensityMatrix { mat, qubits: dim.trailing_zeros() as usize }
    }

    /// Maximally mixed state on `qubits` qubits.
    pub fn maximally_mixed(qubits: usize) -> Self {
        let dim = 1 << qubits;
        let mat = eye(dim).scale(1.0 / dim as f64);
        DensityMatrix { mat, qubits }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Tensor product, `self` on the more significant qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let mat = kron(&self.mat, &other.mat)?;
        Ok(DensityMatrix { mat, qubits: self.qubits + other.qubits })
    }

    /// Sum of |off-diagonal| entries, the coherence left in this basis.
    pub fn coherence_norm(&self) -> f64 {
        let mut sum = 0.0;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                if r != c {
                    sum += self.mat[(r, c)].norm();
                }
            }
        }
        sum
    }
}

/// Partial trace keeping the listed qubits, in their original relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let m = rho.qubits();
    if keep.is_empty() {
        return Err(QnetError::InvalidArgument("partial_trace: empty keep list".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() || keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QnetError::InvalidArgument(
            "partial_trace: keep list must be sorted and distinct".into(),
        ));
    }
    if *sorted.last().unwrap() >= m {
        return Err(QnetError::InvalidArgument(format!(
            "partial_trace: keep index {} out of range for {m} qubits",
            sorted.last().unwrap()
        )));
    }
    let traced: Vec<usize> = (0..m).filter(|q| !sorted.contains(q)).collect();
    let kk = sorted.len();
    let kdim = 1usize << kk;
    let tdim = 1usize << traced.len();

    // Assemble a full-register index from kept and traced sub-indices.
    // Qubit q occupies bit (m-1-q) of the register index.
    let expand = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut full = 0usize;
        for (p, &q) in sorted.iter().enumerate() {
            let bit = (kept_idx >> (kk - 1 - p)) & 1;
            full |= bit << (m - 1 - q);
        }
        for (p, &q) in traced.iter().enumerate() {
            let bit = (traced_idx >> (traced.len() - 1 - p)) & 1;
            full |= bit << (m - 1 - q);
        }
        full
    };

    let mut out = CMat::zeros(kdim, kdim);
    for a in 0..kdim {
        for b in 0..kdim {
            let mut acc = ZERO;
            for t in 0..tdim {
                acc += rho.matrix()[(expand(a, t), expand(b, t))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix { mat: out, qubits: kk })
}

/// Trace distance between two density matrices; in [0, 1].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    trace_norm_half(a.matrix(), b.matrix())
}

/// Pauli matrices, used across tests and the concurrence spin flip.
pub fn sigma_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn sigma_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -Complex::i(), Complex::i(), ZERO])
}

pub fn sigma_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}
