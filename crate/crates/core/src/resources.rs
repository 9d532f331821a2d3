//! Quantum-resource measures: concurrence, F₃ steering, CHSH violation,
//! l₁ coherence, l₁ imaginarity and state texture, plus the Pauli
//! correlation matrix and the majorization order on spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigvals_hermitian, partial_trace, pauli, sqrt_clamped, trace_norm, ComplexMatrix,
    DensityOperator, Subsystem,
};

/// Purity below `1 − PURITY_TOL` is treated as a mixed state.
pub const PURITY_TOL: f64 = 1e-8;

const NORMALIZATION_TOL: f64 = 1e-10;
const MAJORIZATION_SLACK: f64 = 1e-12;

/// `t_ij = Tr(ρ σ_i⊗σ_j)` for `i, j ∈ {x, y, z}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub t: [[f64; 3]; 3],
}

impl CorrelationMatrix {
    /// `T Tᵀ`
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, g_ij) in row.iter_mut().enumerate() {
                *g_ij = (0..3).map(|k| self.t[i][k] * self.t[j][k]).sum();
            }
        }
        g
    }

    /// Ascending eigenvalues of `T Tᵀ`.
    pub fn gram_eigenvalues(&self) -> [f64; 3] {
        let g = self.gram();
        let rows: Vec<Vec<f64>> = g.iter().map(|r| r.to_vec()).collect();
        let m = ComplexMatrix::from_real_rows(&rows).expect("3x3");
        let v = eigvals_hermitian(&m).expect("T Tᵀ is symmetric");
        [v[0], v[1], v[2]]
    }
}

/// The six measures for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub concurrence: f64,
    pub steering: f64,
    pub bell: f64,
    pub coherence_l1: f64,
    pub imaginarity_l1: f64,
    /// Texture of the battery qubit.
    pub texture_tr: f64,
}

fn require_dim(rho: &DensityOperator, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::BadDimension {
            expected: dim,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// Concurrence of a pure two-qubit state, `√(2[1 − Tr ρ_b²])`.
///
/// The formula only holds for pure states, so mixed input is rejected with
/// [`Error::NotPure`].
pub fn concurrence(state4: &DensityOperator) -> Result<f64> {
    require_dim(state4, 4)?;
    let purity = state4.purity();
    if purity < 1.0 - PURITY_TOL {
        return Err(Error::NotPure { purity });
    }
    let battery = partial_trace(state4, Subsystem::Battery)?;
    sqrt_clamped(2.0 * (1.0 - battery.purity()))
}

pub fn correlation_matrix(state4: &DensityOperator) -> Result<CorrelationMatrix> {
    require_dim(state4, 4)?;
    let sigmas = pauli::xyz();
    let mut t = [[0.0; 3]; 3];
    for (i, si) in sigmas.iter().enumerate() {
        for (j, sj) in sigmas.iter().enumerate() {
            t[i][j] = state4.expectation(&si.kron(sj));
        }
    }
    Ok(CorrelationMatrix { t })
}

/// F₃ steering measure `Tr(T Tᵀ) − 1`.
pub fn steering_f3(state4: &DensityOperator) -> Result<f64> {
    let t = correlation_matrix(state4)?;
    let frob: f64 = t.t.iter().flatten().map(|x| x * x).sum();
    Ok(frob - 1.0)
}

/// CHSH violation `2√(ι₁+ι₂) − 2` from the two largest eigenvalues of `T Tᵀ`.
///
/// Not clamped at zero.
pub fn bell_chsh(state4: &DensityOperator) -> Result<f64> {
    let iota = correlation_matrix(state4)?.gram_eigenvalues();
    Ok(2.0 * sqrt_clamped(iota[1] + iota[2])? - 2.0)
}

/// `Σ_{i≠j} |ρ_ij|`
pub fn coherence_l1(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    let d = rho.dim();
    (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].norm())
        .sum()
}

/// `Σ_{i≠j} |Im ρ_ij|`
pub fn imaginarity_l1(rho: &DensityOperator) -> f64 {
    let m = rho.matrix();
    let d = rho.dim();
    (0..d)
        .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].im.abs())
        .sum()
}

/// The unique texture-free state `|f₁⟩⟨f₁|`, `|f₁⟩ = d^{-1/2} Σ|i⟩`.
pub fn texture_free_state(dim: usize) -> ComplexMatrix {
    let v = 1.0 / dim as f64;
    let rows = vec![vec![v; dim]; dim];
    ComplexMatrix::from_real_rows(&rows).expect("square")
}

/// Trace-distance texture `½ Tr|ρ − f₁|`.
pub fn texture_tr(rho: &DensityOperator) -> f64 {
    0.5 * trace_norm(&(rho.matrix() - &texture_free_state(rho.dim())))
}

/// True when `lam` is majorized by `eta` (`lam ≺ eta`).
///
/// Both inputs are probability vectors of equal length; order does not
/// matter. Every top-k partial sum of `eta` must weakly exceed that of `lam`.
pub fn majorizes(lam: &[f64], eta: &[f64]) -> Result<bool> {
    if lam.len() != eta.len() {
        return Err(Error::LengthMismatch {
            left: lam.len(),
            right: eta.len(),
        });
    }
    for v in [lam, eta] {
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
    }
    let descending = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    };
    let (lam, eta) = (descending(lam), descending(eta));
    let (mut acc_l, mut acc_e) = (0.0, 0.0);
    for (l, e) in lam.iter().zip(&eta) {
        acc_l += l;
        acc_e += e;
        if acc_e < acc_l - MAJORIZATION_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All six measures. Texture is taken on `battery`, the others on `state4`.
pub fn measure_all(state4: &DensityOperator, battery: &DensityOperator) -> Result<ResourceReport> {
    require_dim(battery, 2)?;
    Ok(ResourceReport {
        concurrence: concurrence(state4)?,
        steering: steering_f3(state4)?,
        bell: bell_chsh(state4)?,
        coherence_l1: coherence_l1(state4),
        imaginarity_l1: imaginarity_l1(state4),
        texture_tr: texture_tr(battery),
    })
}
