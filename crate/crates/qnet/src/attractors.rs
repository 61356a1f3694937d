//! Attractor spaces of the iterated map: the analytic basis for the
//! stationary eigenvalue, residual verification against every edge, a
//! brute-force spectral oracle for small registers, and dual-basis data for
//! asymptotic projection.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{QnetError, Result};
use crate::par;
use crate::qmat::{
    eye, hermitian_eig, hs_inner, kron, max_abs, nullspace, unvec_col, CMat, CVec, PureState,
    C64, ONE, ZERO,
};
use crate::network::{phi_eigenstate, NetworkSpec};
use crate::tol::Tolerances;

/// One solution of the per-edge conjugation eigenvalue equations.
#[derive(Debug, Clone)]
pub struct Attractor {
    pub eigenvalue: C64,
    pub matrix: CMat,
    /// Which analytic family produced it, or "oracle".
    pub label: String,
}

/// All attractors sharing one eigenvalue, with optional dual (inverse-Gram)
/// projection data.
#[derive(Debug, Clone)]
pub struct EigBlock {
    pub eigenvalue: C64,
    pub members: Vec<Attractor>,
    pub gram: Option<CMat>,
    pub gram_inverse: Option<CMat>,
    pub gram_condition: Option<f64>,
}

impl EigBlock {
    fn new(eigenvalue: C64, members: Vec<Attractor>) -> Self {
        EigBlock { eigenvalue, members, gram: None, gram_inverse: None, gram_condition: None }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct AttractorBasis {
    pub blocks: Vec<EigBlock>,
}

impl AttractorBasis {
    pub fn block_for(&self, lambda: C64) -> Option<&EigBlock> {
        self.blocks.iter().find(|b| (b.eigenvalue - lambda).norm() < 1e-8)
    }

    pub fn total_members(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }
}

fn ket_bra(a: &PureState, b: &PureState) -> CMat {
    a.amplitudes() * b.amplitudes().adjoint()
}

/// The analytic λ=1 attractor family for a k-system / n-environment network:
/// exactly 4^k + 3·2^k + 1 matrices in a documented canonical order.
///
/// Enumeration order: pointer projectors |x⟩⟨x|⊗I over all x, then
/// |0_k⟩⟨x|⊗|0_n⟩⟨φ_n| over all x, then its adjoint family, then
/// |x⟩⟨y|⊗|φ_n⟩⟨φ_n| over all (x, y) row-major, then the single
/// |0⟩⟨0|⊗|0_n⟩⟨0_n| element. Linear independence is asserted downstream
/// via the Gram rank, which requires sin(φ/2) ≠ 0.
pub fn analytic_basis(k: usize, n: usize, phi: f64) -> AttractorBasis {
    let kdim = 1usize << k;
    let env_identity = eye(1 << n);
    let zero_k = PureState::basis(k, 0);
    let zero_n = PureState::basis(n, 0);
    let mut phi_n = phi_eigenstate(phi);
    for _ in 1..n {
        phi_n = phi_n.tensor(&phi_eigenstate(phi)).expect("within cap");
    }
    let env_zero_phi = ket_bra(&zero_n, &phi_n);
    let env_phi_zero = ket_bra(&phi_n, &zero_n);
    let env_phi_phi = ket_bra(&phi_n, &phi_n);
    let env_zero_zero = ket_bra(&zero_n, &zero_n);

    let width = k.max(1);
    let mut members = Vec::with_capacity(kdim * kdim + 3 * kdim + 1);
    for x in 0..kdim {
        let px = ket_bra(&PureState::basis(k, x), &PureState::basis(k, x));
        members.push(Attractor {
            eigenvalue: ONE,
            matrix: kron(&px, &env_identity).expect("within cap"),
            label: format!("pointer(x={x:0width$b})"),
        });
    }
    for x in 0..kdim {
        let op = ket_bra(&zero_k, &PureState::basis(k, x));
        members.push(Attractor {
            eigenvalue: ONE,
            matrix: kron(&op, &env_zero_phi).expect("within cap"),
            label: format!("to_ground(x={x:0width$b})"),
        });
    }
    for x in 0..kdim {
        let op = ket_bra(&PureState::basis(k, x), &zero_k);
        members.push(Attractor {
            eigenvalue: ONE,
            matrix: kron(&op, &env_phi_zero).expect("within cap"),
            label: format!("from_ground(x={x:0width$b})"),
        });
    }
    for x in 0..kdim {
        for y in 0..kdim {
            let op = ket_bra(&PureState::basis(k, x), &PureState::basis(k, y));
            members.push(Attractor {
                eigenvalue: ONE,
                matrix: kron(&op, &env_phi_phi).expect("within cap"),
                label: format!("phi_block(x={x:0width$b},y={y:0width$b})"),
            });
        }
    }
    members.push(Attractor {
        eigenvalue: ONE,
        matrix: kron(&ket_bra(&zero_k, &zero_k), &env_zero_zero).expect("within cap"),
        label: "ground".into(),
    });
    AttractorBasis { blocks: vec![EigBlock::new(ONE, members)] }
}

/// Per-attractor residual entry of a verification report.
#[derive(Debug, Clone, Serialize)]
pub struct AttractorResidual {
    pub eigenvalue: [f64; 2],
    pub label: String,
    pub residual_max: f64,
}

/// Residuals ‖U_e X U_e† − λX‖_max / ‖X‖_max over all attractors and edges.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub argmax_label: String,
    pub argmax_edge: usize,
    pub entries: Vec<AttractorResidual>,
}

pub fn verify_basis(basis: &AttractorBasis, spec: &NetworkSpec) -> Result<ResidualReport> {
    let gates = spec.build_gates()?;
    let all: Vec<&Attractor> = basis.blocks.iter().flat_map(|b| b.members.iter()).collect();
    let per_attractor: Vec<(f64, usize)> = par::map_indexed(all.len(), |i| {
        let a = all[i];
        let scale = max_abs(&a.matrix).max(f64::MIN_POSITIVE);
        let mut worst = (0.0f64, 0usize);
        for (edge_idx, (_, u)) in gates.iter().enumerate() {
            let image = u * &a.matrix * u.adjoint();
            let residual = max_abs(&(image - a.matrix.scale_complex(a.eigenvalue))) / scale;
            if residual > worst.0 {
                worst = (residual, edge_idx);
            }
        }
        worst
    });
    let mut report = ResidualReport {
        max_residual: 0.0,
        argmax_label: String::new(),
        argmax_edge: 0,
        entries: Vec::with_capacity(all.len()),
    };
    for (a, &(residual, edge)) in all.iter().zip(&per_attractor) {
        report.entries.push(AttractorResidual {
            eigenvalue: [a.eigenvalue.re, a.eigenvalue.im],
            label: a.label.clone(),
            residual_max: residual,
        });
        if residual > report.max_residual {
            report.max_residual = residual;
            report.argmax_label = a.label.clone();
            report.argmax_edge = edge;
        }
    }
    Ok(report)
}

trait ScaleComplex {
    fn scale_complex(&self, z: C64) -> CMat;
}

impl ScaleComplex for CMat {
    fn scale_complex(&self, z: C64) -> CMat {
        self.map(|x| x * z)
    }
}

/// Brute-force spectral oracle: all |λ|=1 conjugation eigenspaces common to
/// every edge, found from the stacked vectorized constraints.
///
/// Candidate eigenvalues are the intersection over edges of the sets
/// {μ_i conj(μ_j)} of per-gate eigenvalue products; each gate of this model
/// is a reflection, so its spectrum is real and the solver used is the
/// Hermitian one.
pub fn oracle_space(spec: &NetworkSpec, oracle_cap: usize, sv_tol: f64) -> Result<AttractorBasis> {
    let m = spec.total_qubits();
    if m > oracle_cap {
        return Err(QnetError::SizeCap(format!(
            "register of {m} qubits exceeds the oracle cap {oracle_cap}"
        )));
    }
    let gates = spec.build_gates()?;
    let arc_tol = Tolerances::DEFAULT.eig_dedup_arc;

    let mut candidates: Option<Vec<C64>> = None;
    for (_, u) in &gates {
        let (values, _) = hermitian_eig(u)?;
        let mut products: Vec<C64> = Vec::new();
        for &a in &values {
            for &b in &values {
                let p = Complex::new(a, 0.0) * Complex::new(b, 0.0).conj();
                if (p.norm() - 1.0).abs() < 1e-6
                    && !products.iter().any(|q| (q - p).norm() < arc_tol)
                {
                    products.push(p);
                }
            }
        }
        candidates = Some(match candidates {
            None => products,
            Some(prev) => prev
                .into_iter()
                .filter(|c| products.iter().any(|p| (p - c).norm() < arc_tol))
                .collect(),
        });
    }
    let candidates = candidates.unwrap_or_default();

    let dim = spec.dim();
    let d2 = dim * dim;
    let mut blocks = Vec::new();
    for lambda in candidates {
        let mut stacked = CMat::zeros(gates.len() * d2, d2);
        for (i, (_, u)) in gates.iter().enumerate() {
            let constraint = kron(&u.map(|z| z.conj()), u)? - eye(d2).scale_complex(lambda);
            stacked.view_mut((i * d2, 0), (d2, d2)).copy_from(&constraint);
        }
        let null = nullspace(&stacked, sv_tol)?;
        if null.is_empty() {
            continue;
        }
        let members = null
            .iter()
            .map(|v: &CVec| Attractor {
                eigenvalue: lambda,
                matrix: unvec_col(v, dim),
                label: "oracle".into(),
            })
            .collect();
        blocks.push(EigBlock::new(lambda, members));
    }
    // canonical order: descending real part, then imaginary
    blocks.sort_by(|a, b| {
        (b.eigenvalue.re, b.eigenvalue.im)
            .partial_cmp(&(a.eigenvalue.re, a.eigenvalue.im))
            .unwrap()
    });
    Ok(AttractorBasis { blocks })
}

/// Fill each block with its Gram matrix, inverse, and condition number, so
/// projection coefficients can reproduce the orthonormal-basis projection
/// without orthogonalizing the analytic forms.
pub fn dualize(basis: &mut AttractorBasis) -> Result<()> {
    let cond_max = Tolerances::DEFAULT.gram_cond_max;
    for block in &mut basis.blocks {
        let len = block.len();
        let mut gram = CMat::zeros(len, len);
        for i in 0..len {
            for j in 0..len {
                gram[(i, j)] = hs_inner(&block.members[i].matrix, &block.members[j].matrix)?;
            }
        }
        let (values, vectors) = hermitian_eig(&gram)?;
        let max = values.first().copied().unwrap_or(0.0);
        let min = values.last().copied().unwrap_or(0.0);
        if min <= 0.0 {
            return Err(QnetError::IllConditioned(f64::INFINITY));
        }
        let condition = max / min;
        if condition > cond_max {
            return Err(QnetError::IllConditioned(condition));
        }
        let inv_diag = CMat::from_fn(len, len, |r, c| {
            if r == c { Complex::new(1.0 / values[r], 0.0) } else { ZERO }
        });
        block.gram_inverse = Some(&vectors * inv_diag * vectors.adjoint());
        block.gram = Some(gram);
        block.gram_condition = Some(condition);
    }
    Ok(())
}

/// Expand `m` in a dualized block: returns the reconstruction within the
/// span and the Hilbert–Schmidt norm of what is left over.
pub fn expand_in_block(block: &EigBlock, m: &CMat) -> Result<(CMat, f64)> {
    let gram_inverse = block
        .gram_inverse
        .as_ref()
        .ok_or_else(|| QnetError::InvalidArgument("block is not dualized".into()))?;
    let len = block.len();
    let overlaps = CVec::from_fn(len, |i, _| {
        hs_inner(&block.members[i].matrix, m).expect("dims checked by caller")
    });
    let coeffs = gram_inverse * overlaps;
    let mut rec = CMat::zeros(m.nrows(), m.ncols());
    for (i, member) in block.members.iter().enumerate() {
        rec += member.matrix.scale_complex(coeffs[i]);
    }
    let residual = crate::qmat::hs_norm(&(m - &rec));
    Ok((rec, residual))
}

/// Count formula for the analytic λ=1 family.
pub fn analytic_count(k: usize) -> usize {
    let two_k = 1usize << k;
    two_k * two_k + 3 * two_k + 1
}
