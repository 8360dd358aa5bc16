//! Dense complex-matrix quantum state algebra.
//!
//! Everything operates on explicit density matrices. Qubit 1 is the most
//! significant bit of the computational-basis index, and in a bipartite
//! system the latent subsystem A occupies the most significant qubit
//! positions, so `rho_ab = kron(rho_a, rho_b)` for product states.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity / trace tolerance for density matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIG_CLIP, 0)` are treated as numerical zero; anything
/// below `-EIG_CLIP` signals an invalid state.
pub const EIG_CLIP: f64 = 1e-10;
/// Unitarity tolerance for `apply_unitary`.
pub const UNITARY_TOL: f64 = 1e-9;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// 2x2 Pauli X.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

/// 2x2 Pauli Y.
pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
}

/// 2x2 Pauli Z.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

/// Which subsystem `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Split of `n_a + n_b` qubits into latent subsystem A (most significant
/// qubits) and trash subsystem B (least significant qubits).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bipartition {
    n_a: usize,
    n_b: usize,
}

impl Bipartition {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a < 1 || n_b < 1 {
            return Err(Error::InvalidArgument(format!(
                "bipartition requires n_a >= 1 and n_b >= 1, got ({n_a}, {n_b})"
            )));
        }
        Ok(Self { n_a, n_b })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn n_total(&self) -> usize {
        self.n_a + self.n_b
    }

    /// Latent dimension d_A = 2^{n_A}.
    pub fn d_a(&self) -> usize {
        1 << self.n_a
    }

    /// Trash dimension d_B = 2^{n_B}.
    pub fn d_b(&self) -> usize {
        1 << self.n_b
    }

    /// Full dimension d_A * d_B.
    pub fn dim(&self) -> usize {
        1 << (self.n_a + self.n_b)
    }
}

/// Hermitian, PSD, unit-trace matrix over n qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    n_qubits: usize,
}

impl DensityMatrix {
    /// Validate and wrap a matrix: Hermitian to 1e-10, unit trace to 1e-10,
    /// min eigenvalue >= -1e-10, dimension a power of two.
    pub fn new(mat: CMatrix) -> Result<Self> {
        let n_qubits = check_square_pow2(&mat)?;
        let herm = hermiticity_deviation(&mat);
        if herm > STATE_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let (eigvals, _) = hermitian_eigen(&mat);
        let min_ev = eigvals.iter().copied().fold(f64::INFINITY, f64::min);
        if min_ev < -EIG_CLIP {
            return Err(Error::NotPositive(min_ev));
        }
        Ok(Self { mat, n_qubits })
    }

    /// Wrap a matrix known to be a valid state by construction. Debug builds
    /// still verify the Hermitian and trace invariants.
    pub(crate) fn from_valid(mat: CMatrix) -> Self {
        let n_qubits = check_square_pow2(&mat).expect("valid state dimension");
        debug_assert!(hermiticity_deviation(&mat) <= 1e-8);
        debug_assert!((trace(&mat).re - 1.0).abs() <= 1e-8);
        Self { mat, n_qubits }
    }

    /// |psi><psi| for a unit-norm state vector.
    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let dim = psi.len();
        let mat = CMatrix::from_fn(dim, dim, |i, j| psi[i] * psi[j].conj());
        check_square_pow2(&mat)?;
        Ok(Self::from_valid(mat))
    }

    /// Computational-basis projector |index><index| on `n_qubits` qubits.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let dim = 1 << n_qubits;
        assert!(index < dim, "basis index out of range");
        let mut mat = CMatrix::zeros(dim, dim);
        mat[(index, index)] = cr(1.0);
        Self { mat, n_qubits }
    }

    /// I / 2^n.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mat = CMatrix::identity(dim, dim) * cr(1.0 / dim as f64);
        Self { mat, n_qubits }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// tr(rho^2).
    pub fn purity(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                s += self.mat[(i, j)].norm_sqr();
            }
        }
        s
    }
}

/// Eigendecomposition of a density matrix with descending eigenvalues.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column j is the eigenvector of `eigenvalues[j]`.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// Number of eigenvalues above `tol` (the rank).
    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&p| p > tol).count()
    }
}

fn check_square_pow2(mat: &CMatrix) -> Result<usize> {
    let n = mat.nrows();
    if mat.ncols() != n {
        return Err(Error::NotSquare(n, mat.ncols()));
    }
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros() as usize)
}

pub fn trace(mat: &CMatrix) -> Complex64 {
    let mut tr = Complex64::default();
    for i in 0..mat.nrows() {
        tr += mat[(i, i)];
    }
    tr
}

/// max_ij |m_ij - conj(m_ji)|.
pub fn hermiticity_deviation(mat: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for j in 0..mat.ncols() {
        for i in 0..=j {
            dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    dev
}

/// max_ij |(u u† - I)_ij|.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let prod = u * u.adjoint();
    let mut dev: f64 = 0.0;
    for j in 0..prod.ncols() {
        for i in 0..prod.nrows() {
            let target = if i == j { cr(1.0) } else { Complex64::default() };
            dev = dev.max((prod[(i, j)] - target).norm());
        }
    }
    dev
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// Returns (eigenvalues, eigenvector columns).
pub fn hermitian_eigen(mat: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = mat.clone().symmetric_eigen();
    let n = mat.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Spectral decomposition with descending eigenvalues.
pub fn spectral_decomposition(rho: &DensityMatrix) -> Spectrum {
    let (vals, vecs) = hermitian_eigen(rho.matrix());
    let n = vals.len();
    let eigenvalues: Vec<f64> = vals.iter().rev().copied().collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for col in 0..n {
        eigenvectors.set_column(col, &vecs.column(n - 1 - col));
    }
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Apply f to the eigenvalues of a Hermitian matrix: V f(Λ) V†.
pub fn hermitian_function(mat: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = hermitian_eigen(mat);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = cr(f(v));
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    &scaled * vecs.adjoint()
}

/// Principal square root of a PSD Hermitian matrix. Eigenvalues in
/// `[-1e-10, 0)` are floored to zero; anything lower is an error.
pub fn sqrtmh(mat: &CMatrix) -> Result<CMatrix> {
    let (vals, vecs) = hermitian_eigen(mat);
    let min_ev = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_ev < -EIG_CLIP {
        return Err(Error::NotPositive(min_ev));
    }
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = cr(v.max(0.0).sqrt());
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    Ok(&scaled * vecs.adjoint())
}

/// Reduced state on the kept subsystem.
pub fn partial_trace(
    rho: &DensityMatrix,
    part: &Bipartition,
    keep: Subsystem,
) -> Result<DensityMatrix> {
    if rho.dim() != part.dim() {
        return Err(Error::DimensionMismatch {
            expected: part.dim(),
            got: rho.dim(),
        });
    }
    Ok(DensityMatrix::from_valid(partial_trace_matrix(
        rho.matrix(),
        part,
        keep,
    )))
}

/// Partial trace on a bare matrix; full index = a * d_B + b.
pub(crate) fn partial_trace_matrix(mat: &CMatrix, part: &Bipartition, keep: Subsystem) -> CMatrix {
    let (da, db) = (part.d_a(), part.d_b());
    match keep {
        Subsystem::A => {
            let mut out = CMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    let mut s = Complex64::default();
                    for b in 0..db {
                        s += mat[(i * db + b, j * db + b)];
                    }
                    out[(i, j)] = s;
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = CMatrix::zeros(db, db);
            for i in 0..db {
                for j in 0..db {
                    let mut s = Complex64::default();
                    for a in 0..da {
                        s += mat[(a * db + i, a * db + j)];
                    }
                    out[(i, j)] = s;
                }
            }
            out
        }
    }
}

/// Uhlmann fidelity F(rho, sigma) = (tr sqrt(sigma^{1/2} rho sigma^{1/2}))^2.
///
/// When either argument is pure this reduces to tr(rho sigma), which is
/// evaluated directly.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    const PURITY_TOL: f64 = 1e-12;
    if rho.purity() > 1.0 - PURITY_TOL || sigma.purity() > 1.0 - PURITY_TOL {
        let mut f = Complex64::default();
        for j in 0..rho.dim() {
            for i in 0..rho.dim() {
                f += rho.matrix()[(i, j)] * sigma.matrix()[(j, i)];
            }
        }
        return Ok(f.re.clamp(0.0, 1.0));
    }
    let s = sqrtmh(sigma.matrix())?;
    let inner = &s * rho.matrix() * &s;
    let (vals, _) = hermitian_eigen(&inner);
    let min_ev = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min_ev < -EIG_CLIP {
        return Err(Error::NotPositive(min_ev));
    }
    let root_sum: f64 = vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Von Neumann entropy in base 2: S = -Σ p log2 p, so n maximally mixed
/// qubits have entropy n.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(rho.matrix());
    entropy_of_spectrum(&vals)
}

/// -Σ p log2 p over clipped eigenvalues, with 0 log 0 = 0.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    let mut s = 0.0;
    for &p in eigenvalues {
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    s
}

/// Binary entropy h2(p) in base 2.
pub fn binary_entropy(p: f64) -> f64 {
    let mut s = 0.0;
    if p > 0.0 {
        s -= p * p.log2();
    }
    if p < 1.0 {
        s -= (1.0 - p) * (1.0 - p).log2();
    }
    s
}

/// U rho U† for a unitary U (checked to 1e-9).
pub fn apply_unitary(rho: &DensityMatrix, u: &CMatrix) -> Result<DensityMatrix> {
    if u.nrows() != rho.dim() || u.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: u.nrows(),
        });
    }
    let dev = unitarity_deviation(u);
    if dev > UNITARY_TOL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(DensityMatrix::from_valid(conjugate(rho.matrix(), u)))
}

/// U m U† without unitarity checks.
pub(crate) fn conjugate(m: &CMatrix, u: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

/// tr(rho obs) for a Hermitian observable; the imaginary residue must be
/// below 1e-10.
pub fn expectation(rho: &DensityMatrix, obs: &CMatrix) -> Result<f64> {
    if obs.nrows() != rho.dim() || obs.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: obs.nrows(),
        });
    }
    let herm = hermiticity_deviation(obs);
    if herm > 1e-9 {
        return Err(Error::NotHermitian(herm));
    }
    let mut val = Complex64::default();
    for j in 0..rho.dim() {
        for i in 0..rho.dim() {
            val += rho.matrix()[(i, j)] * obs[(j, i)];
        }
    }
    debug_assert!(val.im.abs() <= 1e-9);
    Ok(val.re)
}

/// Computational-basis vector |index> on `n_qubits` qubits.
pub fn basis_vector(n_qubits: usize, index: usize) -> CVector {
    let dim = 1 << n_qubits;
    assert!(index < dim, "basis index out of range");
    let mut v = CVector::zeros(dim);
    v[index] = cr(1.0);
    v
}
