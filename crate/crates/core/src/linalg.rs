//! Dense complex linear algebra for the small operators of the model.
//!
//! Everything here is sized for qubits and qubit pairs (dimension 2 and 4,
//! occasionally 3 for correlation matrices). Matrices are stored row-major.
//! The Hermitian eigensolver uses the closed form for 2×2 and cyclic Jacobi
//! rotations otherwise.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for Hermiticity, unit trace and positivity of density operators.
pub const STATE_TOL: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square root that tolerates roundoff below zero.
///
/// Arguments in `[-1e-10, 0)` are treated as zero; anything more negative
/// is reported as an error.
pub fn sqrt_clamped(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -STATE_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand(x))
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::default(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from rows. Fails unless the rows form a square array.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::BadDimension {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real-valued rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Wraps a row-major buffer of length `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::BadDimension {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = c(v, 0.0);
        }
        m
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    /// Kronecker product `self ⊗ other`; `self` acts on the most significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `[self, other] = self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest `|M_ij − conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(M + M†)/2`, returning the symmetrized matrix and the size of the correction.
    pub fn hermitian_part(&self) -> (Self, f64) {
        let mut out = self.clone();
        let mut correction = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                correction = correction.max((avg - self[(i, j)]).norm());
                out[(i, j)] = avg;
                out[(j, i)] = avg.conj();
            }
        }
        (out, correction)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        let n = self.dim;
        let mut acc = Complex64::default();
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    fn check_square_same(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_square_same(rhs);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::default() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_square_same(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_square_same(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub mod pauli {
    //! Single-qubit operators in the basis `{|0⟩, |1⟩}` with `σ_z|0⟩ = |0⟩`.

    use super::{c, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::diag(&[1.0, -1.0])
    }

    /// `σ₊ = (σ_x + iσ_y)/2 = |0⟩⟨1|`
    pub fn plus() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]).unwrap()
    }

    /// `σ₋ = (σ_x − iσ_y)/2 = |1⟩⟨0|`
    pub fn minus() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, vec![c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.)]).unwrap()
    }

    /// `[σ_x, σ_y, σ_z]`
    pub fn xyz() -> [ComplexMatrix; 3] {
        [x(), y(), z()]
    }
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// `values` ascend; `vectors[k]` is the unit eigenvector belonging to
/// `values[k]`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl Spectrum {
    /// `Σ_k λ_k v_k v_k†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let dim = self.values.len();
        let mut m = ComplexMatrix::zeros(dim);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] += v[i] * v[j].conj() * *lambda;
                }
            }
        }
        m
    }

    /// Largest `|⟨v_i, v_j⟩ − δ_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, vi) in self.vectors.iter().enumerate() {
            for (j, vj) in self.vectors.iter().enumerate() {
                let dot: Complex64 = vi.iter().zip(vj).map(|(a, b)| a.conj() * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    /// `Σ_k f(λ_k) v_k v_k†`
    pub fn apply_fn(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let dim = self.values.len();
        let mut m = ComplexMatrix::zeros(dim);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            let w = f(*lambda);
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] += v[i] * v[j].conj() * w;
                }
            }
        }
        m
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Fails with [`Error::NonHermitian`] when `m` deviates from Hermitian by
/// more than `1e-10` in any entry.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<Spectrum> {
    let deviation = m.hermitian_deviation();
    if deviation > STATE_TOL {
        return Err(Error::NonHermitian { deviation });
    }
    let (values, vectors) = match m.dim() {
        0 => (Vec::new(), Vec::new()),
        1 => (vec![m[(0, 0)].re], vec![vec![c(1.0, 0.0)]]),
        2 => eig_2x2(m),
        _ => eig_jacobi(m),
    };
    let mut order: Vec<usize> = (0..values.len()).collect();
    // stable: degenerate clusters keep solver order
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(Spectrum {
        values: order.iter().map(|&k| values[k]).collect(),
        vectors: order.iter().map(|&k| vectors[k].clone()).collect(),
    })
}

/// Ascending eigenvalues only.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(m)?.values)
}

fn eig_2x2(m: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    // average the two off-diagonals so tiny anti-Hermitian noise is dropped
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let h = 0.5 * (a - d);
    let r = h.hypot(b.norm());
    if b.norm() == 0.0 {
        return (
            vec![a, d],
            vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0)],
            ],
        );
    }
    // eigenvector of the upper eigenvalue mean + r
    let (x, y) = if h >= 0.0 {
        (c(h + r, 0.0), b.conj())
    } else {
        (b, c(r - h, 0.0))
    };
    let norm = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let (x, y) = (x / norm, y / norm);
    let upper = vec![x, y];
    let lower = vec![-y.conj(), x.conj()];
    (vec![mean - r, mean + r], vec![lower, upper])
}

fn eig_jacobi(m: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = m.dim();
    let (mut a, _) = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let threshold = JACOBI_TOL * scale.max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= threshold * 1e-3 {
                    continue;
                }
                // phase that makes the (p, q) entry real and positive
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = P·R with P = diag(.., conj(phase) at q, ..) and the real
                // rotation R: R_pp = R_qq = c, R_pq = s, R_qp = −s.
                let j_pp = c(cs, 0.0);
                let j_pq = c(sn, 0.0);
                let j_qp = phase.conj() * (-sn);
                let j_qq = phase.conj() * cs;
                // A ← A·J (columns p, q)
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                // A ← J†·A (rows p, q)
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    let values = (0..n).map(|i| a[(i, i)].re).collect();
    let vectors = (0..n)
        .map(|k| (0..n).map(|i| v[(i, k)]).collect())
        .collect();
    (values, vectors)
}

/// Which factor of the `|b c⟩` product basis a reduction keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Battery,
    Charger,
}

/// Density operator: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates `matrix` against the density-operator invariants at `1e-10`.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermitian_deviation();
        if deviation > STATE_TOL {
            return Err(Error::NonHermitian { deviation });
        }
        let trace = matrix.trace();
        if (trace - 1.0).norm() > STATE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let min_eigenvalue = eigvals_hermitian(&matrix)?[0];
        if min_eigenvalue < -STATE_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// Skips validation. Callers guarantee the invariants by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::diag(populations))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        eig_hermitian(&self.matrix).expect("density operator is Hermitian")
    }

    /// Ascending eigenvalues with roundoff negatives clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum()
            .values
            .into_iter()
            .map(|x| x.max(0.0))
            .collect()
    }

    /// `Tr(ρ·A)`, real part.
    pub fn expectation(&self, observable: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(observable).re
    }

    /// Completely dephased state: the diagonal of `ρ`.
    pub fn dephased(&self) -> Self {
        Self::new_unchecked(ComplexMatrix::diag(&self.populations()))
    }
}

/// Reduces a two-qubit state to one factor.
pub fn partial_trace(rho: &DensityOperator, keep: Subsystem) -> Result<DensityOperator> {
    if rho.dim() != 4 {
        return Err(Error::BadDimension {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(2);
    for x in 0..2 {
        for y in 0..2 {
            out[(x, y)] = (0..2)
                .map(|k| match keep {
                    Subsystem::Battery => m[(2 * x + k, 2 * y + k)],
                    Subsystem::Charger => m[(2 * k + x, 2 * k + y)],
                })
                .sum();
        }
    }
    DensityOperator::new(out)
}

/// Trace norm `Tr|A|`, the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.dim() == 0 {
        return 0.0;
    }
    if m.hermitian_deviation() <= 1e-13 {
        let spec = eig_hermitian(m).expect("checked Hermitian");
        return spec.values.iter().map(|x| x.abs()).sum();
    }
    let gram = &m.dagger() * m;
    let (gram, _) = gram.hermitian_part();
    eigvals_hermitian(&gram)
        .expect("Gram matrix is Hermitian")
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum()
}

/// `½ Tr|ρ − σ|`
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> f64 {
    0.5 * trace_norm(&(a.matrix() - b.matrix()))
}

/// Applies the channel `ρ ↦ Σ K ρ K†`.
///
/// The Kraus set must satisfy `Σ K†K = I` within `1e-10`.
pub fn apply_kraus(rho: &DensityOperator, ks: &[ComplexMatrix]) -> Result<DensityOperator> {
    let dim = rho.dim();
    let mut completeness = ComplexMatrix::zeros(dim);
    for k in ks {
        if k.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: k.dim(),
            });
        }
        completeness = &completeness + &(&k.dagger() * k);
    }
    let deviation = completeness.max_abs_diff(&ComplexMatrix::identity(dim));
    if deviation > STATE_TOL {
        return Err(Error::NotTracePreserving { deviation });
    }
    let mut out = ComplexMatrix::zeros(dim);
    for k in ks {
        out = &out + &(&(k * rho.matrix()) * &k.dagger());
    }
    DensityOperator::new(out)
}
