//! Dense complex matrices and validated density matrices.
//!
//! Everything downstream works on the principal square root of a state, so
//! the eigendecomposition here is the numerical workhorse of the crate. Qubits
//! (d = 2) take a closed-form path that keeps tiny eigenvalues accurate, which
//! matters because `sqrt` amplifies absolute eigenvalue errors near zero;
//! larger dimensions go through `nalgebra`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hermiticity residual accepted by [`validate_density`].
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default tolerance for positivity and trace checks.
pub const DENSITY_TOL: f64 = 1e-10;

/// Trace drift below this is left alone so that re-validating a state is a no-op.
const TRACE_SNAP: f64 = 4.0 * f64::EPSILON;

// Eigenvalues this far outside [0, 1] are round-off and left alone.
const EIGEN_SNAP: f64 = 64.0 * f64::EPSILON;

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Builds a matrix from `dim²` row-major entries.
    pub fn from_row_major(entries: Vec<C64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != entries.len() {
            return Err(Error::NotSquare { entries: entries.len() });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self::from_fn(N, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|&z| f(z)).collect() }
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `max |M_ij - conj(M_ji)|`.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `Tr(A·B)` without forming the product.
    pub fn trace_of_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.entries[i * n + k] * other.entries[k * n + i];
            }
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        ComplexMatrix { dim: self.dim, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[C64]> = self.entries.chunks(self.dim).collect();
        f.debug_struct("ComplexMatrix").field("dim", &self.dim).field("rows", &rows).finish()
    }
}

// JSON layout: row-major array of rows, each entry a `[re, im]` pair.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> =
            self.entries.chunks(self.dim).map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(D::Error::custom("matrix rows must form a non-empty square array"));
        }
        let entries = rows.into_iter().flatten().map(|[re, im]| C64::new(re, im)).collect();
        Ok(Self { dim, entries })
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order
/// and eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        let n = self.vectors.dim();
        (0..n).map(|i| self.vectors[(i, j)]).collect()
    }

    /// `V · diag(f(λ)) · V†`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.vectors.dim();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition. The input is Hermitized first.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let h = m.hermitian_part();
    match h.dim() {
        1 => Ok(HermitianEigen { values: vec![h[(0, 0)].re], vectors: ComplexMatrix::identity(1) }),
        2 => Ok(eigen_2x2(&h)),
        n => {
            let eig = h.to_nalgebra().try_symmetric_eigen(1e-15, 10_000).ok_or(Error::EigenFailure)?;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
            let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let vecs = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
            let vectors = ComplexMatrix::from_fn(n, |i, j| vecs[(i, order[j])]);
            Ok(HermitianEigen { values, vectors })
        }
    }
}

fn eigen_2x2(h: &ComplexMatrix) -> HermitianEigen {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = h[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b.norm());
    if radius == 0.0 {
        return HermitianEigen { values: vec![mean, mean], vectors: ComplexMatrix::identity(2) };
    }
    let upper = mean + radius;
    // The smaller root via the determinant avoids cancellation for nearly pure states.
    let det = a * d - b.norm_sqr();
    let lower = if upper.abs() > radius { det / upper } else { mean - radius };

    let (x, y) = if half_gap >= 0.0 {
        (C64::new(half_gap + radius, 0.0), b.conj())
    } else {
        (b, C64::new(radius - half_gap, 0.0))
    };
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let (x, y) = (x / norm, y / norm);
    let vectors = ComplexMatrix::from_rows([[x, -y.conj()], [y, x.conj()]]);
    HermitianEigen { values: vec![upper, lower], vectors }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates with the default tolerance.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        validate_density(mat, DENSITY_TOL)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let mat = ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj() / norm_sqr);
        Self::new(mat)
    }

    /// `|+⟩⟨+|` on a qubit.
    pub fn plus() -> Self {
        Self { mat: ComplexMatrix::from_real_rows([[0.5, 0.5], [0.5, 0.5]]) }
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[k] = 1.0;
        Self { mat: ComplexMatrix::from_diagonal(&diag) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.mat.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        self.mat.trace_of_product(&self.mat).re
    }

    /// Skips validation; for states built from closed forms that are valid by construction.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat }
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mat = ComplexMatrix::deserialize(deserializer)?;
        DensityMatrix::new(mat).map_err(D::Error::custom)
    }
}

/// Checks the density-matrix invariants and repairs round-off.
///
/// The matrix is Hermitized, eigenvalues within `tol` below zero are clamped
/// to zero (and above one to one), and a trace drift within `tol` is
/// renormalized away. A matrix that already satisfies the invariants exactly
/// comes back unchanged.
pub fn validate_density(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    let residual = m.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let mut h = m.hermitian_part();
    let eig = hermitian_eigen(&h)?;
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min < -tol {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    let trace = h.trace().re;
    if (trace - 1.0).abs() > tol {
        return Err(Error::TraceDeviation { trace });
    }
    if min < -EIGEN_SNAP || max > 1.0 + EIGEN_SNAP {
        h = eig.reconstruct(|l| l.clamp(0.0, 1.0)).hermitian_part();
    }
    let trace = h.trace().re;
    if (trace - 1.0).abs() > TRACE_SNAP {
        h = h.scale(1.0 / trace);
    }
    Ok(DensityMatrix { mat: h })
}

/// A density matrix together with its eigendecomposition and principal square root.
#[derive(Clone, Debug)]
pub struct StateSqrt {
    rho: DensityMatrix,
    eigen: HermitianEigen,
    root: ComplexMatrix,
}

impl StateSqrt {
    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    /// Eigenvalues in descending order, clamped at zero.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigen.vectors
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    /// Principal square root √ρ.
    pub fn root(&self) -> &ComplexMatrix {
        &self.root
    }

    /// Real parts of the diagonal of √ρ.
    pub fn root_diagonal(&self) -> Vec<f64> {
        self.root.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigen.values.last().expect("non-empty spectrum")
    }
}

/// Principal square root through the eigendecomposition.
pub fn sqrt_psd(rho: &DensityMatrix) -> Result<StateSqrt> {
    let mut eigen = hermitian_eigen(rho.matrix())?;
    // Round-off eigenvalues of a rank-deficient state would otherwise enter
    // the root as spurious √ε-sized terms.
    for l in &mut eigen.values {
        if *l <= EIGEN_SNAP {
            *l = 0.0;
        }
    }
    let root = eigen.reconstruct(f64::sqrt).hermitian_part();
    Ok(StateSqrt { rho: rho.clone(), eigen, root })
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: a, found: b })
    }
}

/// `Tr(√a·√b)` from precomputed roots, clamped to `[0, 1]`.
pub fn affinity_of_roots(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.trace_of_product(b).re.clamp(0.0, 1.0))
}

/// Angle between two states given their square roots.
///
/// Square roots of unit-trace states are unit vectors in Hilbert–Schmidt
/// space, so `arccos Tr(√a√b)` equals the great-circle angle `2·asin(‖√a − √b‖/2)`.
/// The chord form is used because it keeps full precision for nearby states,
/// where `arccos` of a number close to one loses half the digits.
pub fn angle_of_roots(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    let chord = (a - b).frobenius_norm();
    Ok((2.0 * (0.5 * chord).min(1.0).asin()).min(FRAC_PI_2))
}

/// Affinity `A(a, b) = Tr(√a·√b)`.
pub fn affinity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    affinity_of_roots(sqrt_psd(a)?.root(), sqrt_psd(b)?.root())
}

/// Angle distance `Θ(a, b) = arccos A(a, b)`, in `[0, π/2]`.
pub fn angle(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    angle_of_roots(sqrt_psd(a)?.root(), sqrt_psd(b)?.root())
}

/// Qubit with excited population `sin²(θ/2)` (bottom right) and coherence
/// `sin(θ/2)cos(θ/2)·e^{i·phase}` (top right).
pub fn qubit_from_theta(theta: f64, phase: f64) -> DensityMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let excited = s * s;
    let coherence = C64::from_polar(s * c, phase);
    DensityMatrix::from_trusted(ComplexMatrix::from_rows([
        [C64::new(1.0 - excited, 0.0), coherence],
        [coherence.conj(), C64::new(excited, 0.0)],
    ]))
}

fn require_qubit(rho: &DensityMatrix) -> Result<()> {
    check_dims(2, rho.dim())
}

/// Rotates a qubit into a frame where both populations equal 1/2.
///
/// Uses `U = (1/√2)[[1, i·e^{iφ}], [1, −i·e^{iφ}]]` with `φ = Arg ρ01`
/// (`φ = 0` when `ρ01 = 0`). Returns `U` and `UρU†`.
pub fn equal_population_transform(rho: &DensityMatrix) -> Result<(ComplexMatrix, DensityMatrix)> {
    require_qubit(rho)?;
    let coherence = rho.matrix()[(0, 1)];
    let phi = if coherence.norm() == 0.0 { 0.0 } else { coherence.arg() };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let twist = C64::i() * C64::from_polar(1.0, phi);
    let u = ComplexMatrix::from_rows([[C64::new(s, 0.0), twist * s], [C64::new(s, 0.0), -twist * s]]);
    let out = &(&u * rho.matrix()) * &u.adjoint();
    Ok((u, validate_density(out, DENSITY_TOL)?))
}

/// Pauli expectation values `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    require_qubit(rho)?;
    let m = rho.matrix();
    let c = m[(0, 1)];
    Ok([2.0 * c.re, -2.0 * c.im, m[(0, 0)].re - m[(1, 1)].re])
}
