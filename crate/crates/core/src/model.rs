//! Battery–charger spin pair.
//!
//! `H = −ω_b σ_z⊗I − ω_c I⊗σ_z + J₁(σ₊⊗σ₋ + σ₋⊗σ₊) + J₂ σ_z⊗σ_z` in the
//! product basis `|b c⟩` with the battery as the most significant qubit and
//! `σ_z|0⟩ = |0⟩`, so `|0⟩` is the ground level `−ω_b` of the battery.
//! Starting from `|01⟩` (battery empty, charger full) the dynamics stay in
//! the single-excitation sector `span{|01⟩, |10⟩}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, pauli, ComplexMatrix, DensityOperator};

/// Index of `|01⟩` in the product basis.
pub const KET_01: usize = 1;
/// Index of `|10⟩` in the product basis.
pub const KET_10: usize = 2;

/// The four model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    pub omega_b: f64,
    pub omega_c: f64,
    pub j1: f64,
    pub j2: f64,
}

impl HamiltonianParams {
    /// Validated constructor: all fields finite and `ω_b > 0`.
    pub fn new(omega_b: f64, omega_c: f64, j1: f64, j2: f64) -> Result<Self> {
        let p = Self {
            omega_b,
            omega_c,
            j1,
            j2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.omega_b, self.omega_c, self.j1, self.j2];
        if fields.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite field in {self:?}"
            )));
        }
        if self.omega_b <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega_b must be positive, got {}",
                self.omega_b
            )));
        }
        Ok(())
    }

    /// `ω_c − ω_b`, the offset of `⟨01|H|01⟩ + J₂` in this basis.
    pub fn signed_detuning(&self) -> f64 {
        self.omega_c - self.omega_b
    }

    /// `Δ = |ω_b − ω_c|`
    pub fn detuning(&self) -> f64 {
        self.signed_detuning().abs()
    }

    /// `√(J₁² + Δ²)`, half the splitting of the single-excitation block.
    pub fn rabi(&self) -> f64 {
        self.j1.hypot(self.signed_detuning())
    }

    pub fn spectrum(&self) -> ModelSpectrum {
        ModelSpectrum::of(self)
    }
}

/// Closed-form spectral data of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpectrum {
    /// Upper eigenvalue of the single-excitation block.
    pub e1: f64,
    /// Lower eigenvalue of the single-excitation block.
    pub e2: f64,
    /// `|e₁⟩ ∝ ξ₁|01⟩ + |10⟩`; `None` when `J₁ = 0`.
    pub xi1: Option<f64>,
    /// `|e₂⟩ ∝ ξ₂|01⟩ + |10⟩`; `None` when `J₁ = 0`.
    pub xi2: Option<f64>,
    /// Eigenvalues of the full Hamiltonian, ascending.
    pub total_eps: [f64; 4],
}

impl ModelSpectrum {
    pub fn of(p: &HamiltonianParams) -> Self {
        let omega = p.rabi();
        let d = p.signed_detuning();
        let (xi1, xi2) = if p.j1 == 0.0 {
            (None, None)
        } else if d >= 0.0 {
            // ξ₁ξ₂ = −1; take the cancellation-free root first
            let xi1 = (d + omega) / p.j1;
            (Some(xi1), Some(-1.0 / xi1))
        } else {
            let xi2 = (d - omega) / p.j1;
            (Some(-1.0 / xi2), Some(xi2))
        };
        let mut total_eps = [
            -p.j2 + omega,
            -p.j2 - omega,
            p.j2 + (p.omega_b + p.omega_c),
            p.j2 - (p.omega_b + p.omega_c),
        ];
        total_eps.sort_by(f64::total_cmp);
        Self {
            e1: omega - p.j2,
            e2: -omega - p.j2,
            xi1,
            xi2,
            total_eps,
        }
    }

    /// `e₁ − e₂`, the angular frequency of the population oscillation.
    pub fn gap(&self) -> f64 {
        self.e1 - self.e2
    }

    /// `ε₄ − ε₁`, the capacity of any pure two-qubit state under `H`.
    pub fn total_width(&self) -> f64 {
        self.total_eps[3] - self.total_eps[0]
    }
}

/// `|ψ(t)⟩ = α|01⟩ + β|10⟩`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedState {
    pub t: f64,
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl EvolvedState {
    /// Full 4-component state vector.
    pub fn ket(&self) -> [Complex64; 4] {
        let mut v = [Complex64::default(); 4];
        v[KET_01] = self.alpha;
        v[KET_10] = self.beta;
        v
    }

    pub fn density(&self) -> DensityOperator {
        let v = self.ket();
        DensityOperator::new_unchecked(ComplexMatrix::outer(&v, &v))
    }

    /// `|α|²`, the population of the battery ground level.
    pub fn ground_population(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    /// `α β*`
    pub fn alpha_beta_conj(&self) -> Complex64 {
        self.alpha * self.beta.conj()
    }
}

/// Battery Hamiltonian `−ω_b σ_z` on the battery qubit.
pub fn battery_hamiltonian(p: &HamiltonianParams) -> ComplexMatrix {
    pauli::z().scale_real(-p.omega_b)
}

/// Charger Hamiltonian `−ω_c σ_z` on the charger qubit.
pub fn charger_hamiltonian(p: &HamiltonianParams) -> ComplexMatrix {
    pauli::z().scale_real(-p.omega_c)
}

/// `H_b ⊗ I`
pub fn battery_hamiltonian_embedded(p: &HamiltonianParams) -> ComplexMatrix {
    battery_hamiltonian(p).kron(&pauli::identity())
}

/// `I ⊗ H_c`
pub fn charger_hamiltonian_embedded(p: &HamiltonianParams) -> ComplexMatrix {
    pauli::identity().kron(&charger_hamiltonian(p))
}

/// Interaction `J₁(σ₊⊗σ₋ + σ₋⊗σ₊) + J₂ σ_z⊗σ_z`.
pub fn interaction_hamiltonian(p: &HamiltonianParams) -> ComplexMatrix {
    let flip_flop = &pauli::plus().kron(&pauli::minus()) + &pauli::minus().kron(&pauli::plus());
    let ising = pauli::z().kron(&pauli::z());
    &flip_flop.scale_real(p.j1) + &ising.scale_real(p.j2)
}

/// The 4×4 total Hamiltonian.
pub fn build_total_hamiltonian(p: &HamiltonianParams) -> ComplexMatrix {
    let local = &battery_hamiltonian_embedded(p) + &charger_hamiltonian_embedded(p);
    &local + &interaction_hamiltonian(p)
}

/// Restriction of the total Hamiltonian to `span{|01⟩, |10⟩}`, in that order:
/// `[[ω_c−ω_b−J₂, J₁], [J₁, ω_b−ω_c−J₂]]`.
pub fn effective_block(p: &HamiltonianParams) -> ComplexMatrix {
    let d = p.signed_detuning();
    ComplexMatrix::from_vec(
        2,
        vec![
            c(d - p.j2, 0.0),
            c(p.j1, 0.0),
            c(p.j1, 0.0),
            c(-d - p.j2, 0.0),
        ],
    )
    .expect("2x2 buffer")
}

/// Closed-form `|ψ(t)⟩ = e^{−iHt}|01⟩`.
pub fn evolve_closed_form(p: &HamiltonianParams, t: f64) -> EvolvedState {
    let spec = ModelSpectrum::of(p);
    let (alpha, beta) = match (spec.xi1, spec.xi2) {
        (Some(xi1), Some(xi2)) => {
            let ph1 = Complex64::from_polar(1.0, -spec.e1 * t);
            let ph2 = Complex64::from_polar(1.0, -spec.e2 * t);
            let denom = xi1 - xi2;
            ((ph1 * xi1 - ph2 * xi2) / denom, (ph1 - ph2) / denom)
        }
        _ => {
            // J₁ = 0: the block is diagonal and |01⟩ only picks up a phase
            let e01 = p.signed_detuning() - p.j2;
            (Complex64::from_polar(1.0, -e01 * t), Complex64::default())
        }
    };
    EvolvedState { t, alpha, beta }
}

/// Ground-level population `p(t)` of the battery from the reduced-state formula.
pub fn battery_ground_population(p: &HamiltonianParams, t: f64) -> f64 {
    if p.j1 == 0.0 {
        return 1.0;
    }
    let spec = ModelSpectrum::of(p);
    let ratio = 2.0 * p.signed_detuning().powi(2) / (p.j1 * p.j1);
    (1.0 + (spec.gap() * t).cos() + ratio) / (2.0 + ratio)
}

/// `ρ_b(t) = diag(p, 1−p)`
pub fn battery_state(p: &HamiltonianParams, t: f64) -> DensityOperator {
    let q = battery_ground_population(p, t);
    DensityOperator::new_unchecked(ComplexMatrix::diag(&[q, 1.0 - q]))
}

/// `ρ_c(t) = diag(1−p, p)`
pub fn charger_state(p: &HamiltonianParams, t: f64) -> DensityOperator {
    let q = battery_ground_population(p, t);
    DensityOperator::new_unchecked(ComplexMatrix::diag(&[1.0 - q, q]))
}

/// Closed form of `Re(αβ*)` along the evolution.
///
/// With the `σ_z|0⟩ = |0⟩` convention the detuning enters as `ω_c − ω_b`.
pub fn re_alpha_beta_conj(p: &HamiltonianParams, t: f64) -> f64 {
    if p.j1 == 0.0 {
        return 0.0;
    }
    let spec = ModelSpectrum::of(p);
    let omega2 = p.rabi().powi(2);
    p.signed_detuning() * p.j1 * (1.0 - (spec.gap() * t).cos()) / (2.0 * omega2)
}

/// Closed form of the l₁ imaginarity of `|ψ(t)⟩⟨ψ(t)|`:
/// `(J₁/√(J₁²+Δ²)) |sin((e₁−e₂)t)|`.
pub fn imaginarity_closed_form(p: &HamiltonianParams, t: f64) -> f64 {
    if p.j1 == 0.0 {
        return 0.0;
    }
    let spec = ModelSpectrum::of(p);
    (p.j1.abs() / p.rabi()) * (spec.gap() * t).sin().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eig_hermitian, partial_trace, Subsystem};
    use std::f64::consts::PI;

    fn fig2() -> HamiltonianParams {
        HamiltonianParams::new(1.0, 1.0, 0.1, 0.1).unwrap()
    }

    #[test]
    fn rejects_non_positive_battery_gap() {
        assert!(HamiltonianParams::new(0.0, 1.0, 0.1, 0.1).is_err());
        assert!(HamiltonianParams::new(-1.0, 1.0, 0.1, 0.1).is_err());
        assert!(HamiltonianParams::new(1.0, f64::NAN, 0.1, 0.1).is_err());
    }

    #[test]
    fn total_hamiltonian_eigenvalues_fig2() {
        let h = build_total_hamiltonian(&fig2());
        let vals = eig_hermitian(&h).unwrap().values;
        for (v, e) in vals.iter().zip([-1.9, -0.2, 0.0, 2.1]) {
            assert!((v - e).abs() < 1e-12, "{vals:?}");
        }
        let spec = fig2().spectrum();
        for (v, e) in vals.iter().zip(spec.total_eps) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_params_give_zero_matrix() {
        let p = HamiltonianParams {
            omega_b: 0.0,
            omega_c: 0.0,
            j1: 0.0,
            j2: 0.0,
        };
        assert_eq!(build_total_hamiltonian(&p), ComplexMatrix::zeros(4));
    }

    #[test]
    fn flip_flop_matrix_element() {
        let p = HamiltonianParams::new(1.3, 0.4, 0.77, -0.2).unwrap();
        let h = build_total_hamiltonian(&p);
        assert_eq!(h[(KET_01, KET_10)], c(0.77, 0.0));
        assert_eq!(h[(KET_10, KET_01)], c(0.77, 0.0));
    }

    #[test]
    fn block_is_restriction_of_total() {
        let p = HamiltonianParams::new(1.3, 0.4, 0.77, -0.2).unwrap();
        let h = build_total_hamiltonian(&p);
        let b = effective_block(&p);
        let idx = [KET_01, KET_10];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[(idx[i], idx[j])] - b[(i, j)]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn block_at_resonance() {
        let b = effective_block(&fig2());
        let expect = ComplexMatrix::from_real_rows(&[vec![-0.1, 0.1], vec![0.1, -0.1]]).unwrap();
        assert!(b.max_abs_diff(&expect) < 1e-15);
        let vals = eig_hermitian(&b).unwrap().values;
        assert!((vals[0] + 0.2).abs() < 1e-15 && vals[1].abs() < 1e-15);
    }

    #[test]
    fn block_without_flip_flop_is_diagonal() {
        let p = HamiltonianParams::new(1.0, 0.6, 0.0, 0.3).unwrap();
        let b = effective_block(&p);
        assert_eq!(b[(0, 1)], c(0.0, 0.0));
        assert_eq!(b[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn xi_product_is_minus_one() {
        for &(ob, oc, j1) in &[(1.0, 0.8, 1.0), (1.0, 3.0, 1e-9), (2.0, 0.5, -0.4)] {
            let p = HamiltonianParams::new(ob, oc, j1, 0.1).unwrap();
            let s = p.spectrum();
            let prod = s.xi1.unwrap() * s.xi2.unwrap();
            assert!((prod + 1.0).abs() < 1e-12, "{prod}");
            assert!(s.e1 >= s.e2);
            assert!((s.gap() - 2.0 * p.rabi()).abs() < 1e-14);
        }
    }

    #[test]
    fn initial_condition() {
        let s = evolve_closed_form(&HamiltonianParams::new(1.0, 0.3, 0.7, 0.2).unwrap(), 0.0);
        assert!((s.alpha - 1.0).norm() < 1e-15);
        assert!(s.beta.norm() < 1e-15);
    }

    #[test]
    fn resonance_populations() {
        let p = fig2();
        for k in 0..50 {
            let t = 0.37 * k as f64;
            let s = evolve_closed_form(&p, t);
            assert!((s.alpha.norm_sqr() - (0.1 * t).cos().powi(2)).abs() < 1e-12);
            assert!((s.beta.norm_sqr() - (0.1 * t).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn no_flip_flop_means_no_transfer() {
        let p = HamiltonianParams::new(1.0, 0.5, 0.0, 0.4).unwrap();
        for k in 0..10 {
            let s = evolve_closed_form(&p, k as f64 * 3.1);
            assert_eq!(s.beta, Complex64::default());
            assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert_eq!(battery_ground_population(&p, 12.0), 1.0);
    }

    #[test]
    fn battery_state_examples() {
        let p = fig2();
        let b0 = battery_state(&p, 0.0);
        assert!(b0.matrix().max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0])) < 1e-15);
        let full = battery_state(&p, PI / (2.0 * p.j1));
        assert!(
            full.matrix()
                .max_abs_diff(&ComplexMatrix::diag(&[0.0, 1.0]))
                < 1e-15
        );
        let ch = charger_state(&p, PI / (2.0 * p.j1));
        assert!(ch.matrix().max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0])) < 1e-15);
        let ch0 = charger_state(&p, 0.0);
        assert!(ch0.matrix().max_abs_diff(&ComplexMatrix::diag(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn population_formula_matches_amplitude() {
        let p = HamiltonianParams::new(1.0, 0.8, 1.0, 1.0).unwrap();
        let s = evolve_closed_form(&p, 1.0);
        assert!((battery_ground_population(&p, 1.0) - s.alpha.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn battery_state_is_partial_trace_of_evolved() {
        let p = HamiltonianParams::new(1.0, 1.7, 0.45, -0.3).unwrap();
        for k in 0..20 {
            let t = 0.9 * k as f64;
            let rho = evolve_closed_form(&p, t).density();
            let b = partial_trace(&rho, Subsystem::Battery).unwrap();
            assert!(b.matrix().max_abs_diff(battery_state(&p, t).matrix()) < 1e-12);
            let ch = partial_trace(&rho, Subsystem::Charger).unwrap();
            assert!(ch.matrix().max_abs_diff(charger_state(&p, t).matrix()) < 1e-12);
        }
    }

    #[test]
    fn alpha_beta_closed_forms() {
        let p = HamiltonianParams::new(1.0, 1.4, 0.6, 0.25).unwrap();
        for k in 0..40 {
            let t = 0.61 * k as f64;
            let s = evolve_closed_form(&p, t);
            let ab = s.alpha_beta_conj();
            assert!((ab.re - re_alpha_beta_conj(&p, t)).abs() < 1e-12);
            assert!((2.0 * ab.im.abs() - imaginarity_closed_form(&p, t)).abs() < 1e-12);
        }
    }
}
