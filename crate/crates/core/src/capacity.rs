//! Battery capacity: active/passive states, the spectral formula, the
//! residual capacity, and the subadditivity machinery for X-states.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, eigvals_hermitian, partial_trace, sqrt_clamped, ComplexMatrix, DensityOperator,
    Subsystem,
};
use crate::model::{
    battery_ground_population, battery_hamiltonian, build_total_hamiltonian, charger_hamiltonian,
    HamiltonianParams, ModelSpectrum,
};
use crate::resources::majorizes;

const SCHUR_SLACK: f64 = 1e-10;
const SUBADDITIVITY_SLACK: f64 = 1e-9;

/// Capacities of the battery, the charger and the pair, and the residual
/// `total − battery − charger`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub battery: f64,
    pub charger: f64,
    pub total: f64,
    pub residual: f64,
}

fn same_dim(rho: &DensityOperator, h: &ComplexMatrix) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: h.dim(),
        });
    }
    Ok(())
}

/// `C(ρ;H) = Σ_i ε_i (λ_i − λ_{d−1−i})` with both spectra ascending.
pub fn capacity_spectral(rho: &DensityOperator, h: &ComplexMatrix) -> Result<f64> {
    same_dim(rho, h)?;
    let lam = rho.eigenvalues();
    let eps = eigvals_hermitian(h)?;
    Ok(capacity_from_spectra(&lam, &eps))
}

/// Spectral formula on already sorted (ascending) spectra.
pub fn capacity_from_spectra(lam: &[f64], eps: &[f64]) -> f64 {
    let d = lam.len();
    let value: f64 = (0..d).map(|i| eps[i] * (lam[i] - lam[d - 1 - i])).sum();
    value.max(0.0)
}

/// Active and passive states of `rho` with respect to `h`, in that order.
///
/// The passive state puts the largest population on the lowest level; the
/// active state reverses that. With degenerate levels the returned pair is
/// one representative of several.
pub fn active_passive(
    rho: &DensityOperator,
    h: &ComplexMatrix,
) -> Result<(DensityOperator, DensityOperator)> {
    same_dim(rho, h)?;
    let lam = rho.eigenvalues();
    let levels = eig_hermitian(h)?;
    let d = lam.len();
    let mut active = ComplexMatrix::zeros(d);
    let mut passive = ComplexMatrix::zeros(d);
    for (i, v) in levels.vectors.iter().enumerate() {
        let proj = ComplexMatrix::outer(v, v);
        active = &active + &proj.scale_real(lam[i]);
        passive = &passive + &proj.scale_real(lam[d - 1 - i]);
    }
    Ok((
        DensityOperator::new_unchecked(active.hermitian_part().0),
        DensityOperator::new_unchecked(passive.hermitian_part().0),
    ))
}

/// Closed-form capacities along the evolution from `|01⟩`.
pub fn capacity_report(p: &HamiltonianParams, t: f64) -> Result<CapacityReport> {
    p.validate()?;
    let polarization = (1.0 - 2.0 * battery_ground_population(p, t)).abs();
    let battery = 2.0 * p.omega_b * polarization;
    let charger = 2.0 * p.omega_c.abs() * polarization;
    let total = ModelSpectrum::of(p).total_width();
    Ok(CapacityReport {
        battery,
        charger,
        total,
        residual: total - battery - charger,
    })
}

/// Capacities from the spectra of an arbitrary two-qubit state.
pub fn capacity_report_of_state(
    p: &HamiltonianParams,
    state4: &DensityOperator,
) -> Result<CapacityReport> {
    let rho_b = partial_trace(state4, Subsystem::Battery)?;
    let rho_c = partial_trace(state4, Subsystem::Charger)?;
    let battery = capacity_spectral(&rho_b, &battery_hamiltonian(p))?;
    let charger = capacity_spectral(&rho_c, &charger_hamiltonian(p))?;
    let total = capacity_spectral(state4, &build_total_hamiltonian(p))?;
    Ok(CapacityReport {
        battery,
        charger,
        total,
        residual: total - battery - charger,
    })
}

/// Battery capacity at the first charging extremum `t = π/(e₁−e₂)`.
///
/// Equals `2ω_b` at resonance and `2ω_b|J₁²−Δ²|/(J₁²+Δ²)` otherwise.
pub fn charging_peak_capacity(p: &HamiltonianParams) -> Result<f64> {
    let gap = ModelSpectrum::of(p).gap();
    if gap == 0.0 {
        return capacity_report(p, 0.0).map(|r| r.battery);
    }
    Ok(capacity_report(p, std::f64::consts::PI / gap)?.battery)
}

/// Two-qubit X-state: populations on the diagonal, `ρ₁₄` in the corner and
/// `ρ₂₃` in the center of the anti-diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub populations: [f64; 4],
    pub corner: Complex64,
    pub center: Complex64,
}

impl XState {
    pub fn new(populations: [f64; 4], corner: Complex64, center: Complex64) -> Result<Self> {
        if populations.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidXState(format!(
                "populations must be nonnegative: {populations:?}"
            )));
        }
        let sum: f64 = populations.iter().sum();
        if (sum - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidXState(format!("populations sum to {sum}")));
        }
        let [p11, p22, p33, p44] = populations;
        if corner.norm_sqr() > p11 * p44 + 1e-12 {
            return Err(Error::InvalidXState("|ρ14|² exceeds ρ11ρ44".into()));
        }
        if center.norm_sqr() > p22 * p33 + 1e-12 {
            return Err(Error::InvalidXState("|ρ23|² exceeds ρ22ρ33".into()));
        }
        Ok(Self {
            populations,
            corner,
            center,
        })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::diag(&self.populations);
        m[(0, 3)] = self.corner;
        m[(3, 0)] = self.corner.conj();
        m[(1, 2)] = self.center;
        m[(2, 1)] = self.center.conj();
        m
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::new_unchecked(self.matrix())
    }
}

/// Both sides of `C(ρ_b;H_b) + C(ρ_c;H_c) ≤ C(ρ;H)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subadditivity {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Subadditivity {
    /// `rhs − lhs`; negative values violate the bound.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

pub fn subadditivity_check(x: &XState, p: &HamiltonianParams) -> Result<Subadditivity> {
    let x = XState::new(x.populations, x.corner, x.center)?;
    subadditivity_of_state(&x.density(), p)
}

/// Subadditivity for any two-qubit state (evolved states are X-states too).
pub fn subadditivity_of_state(
    state4: &DensityOperator,
    p: &HamiltonianParams,
) -> Result<Subadditivity> {
    let r = capacity_report_of_state(p, state4)?;
    let lhs = r.battery + r.charger;
    Ok(Subadditivity {
        lhs,
        rhs: r.total,
        holds: lhs <= r.total + SUBADDITIVITY_SLACK,
    })
}

/// `C(ρ;H) ≤ C(σ;H)` for `spec(ρ) ≺ spec(σ)`.
///
/// Fails with [`Error::NotMajorized`] when the precondition does not hold.
pub fn schur_convexity_check(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    h: &ComplexMatrix,
) -> Result<bool> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    if !majorizes(&rho.eigenvalues(), &sigma.eigenvalues())? {
        return Err(Error::NotMajorized);
    }
    Ok(capacity_spectral(rho, h)? <= capacity_spectral(sigma, h)? + SCHUR_SLACK)
}

/// Battery capacity expressed through each resource along the evolution.
pub mod formulas {
    use super::*;

    /// `2ω_b √(1 − E²)`
    pub fn from_concurrence(omega_b: f64, e: f64) -> Result<f64> {
        Ok(2.0 * omega_b * sqrt_clamped(1.0 - e * e)?)
    }

    /// `2ω_b √(1 − S/2)`
    pub fn from_steering(omega_b: f64, s: f64) -> Result<f64> {
        Ok(2.0 * omega_b * sqrt_clamped(1.0 - s / 2.0)?)
    }

    /// `2ω_b √(1 − B − B²/4)`
    pub fn from_bell(omega_b: f64, b: f64) -> Result<f64> {
        Ok(2.0 * omega_b * sqrt_clamped(1.0 - b - b * b / 4.0)?)
    }

    /// `2ω_b √(1 − C₁²)`
    pub fn from_coherence(omega_b: f64, c1: f64) -> Result<f64> {
        Ok(2.0 * omega_b * sqrt_clamped(1.0 - c1 * c1)?)
    }

    /// `2ω_b √(1 − 4Re(αβ*)² − I²)`
    pub fn from_imaginarity(omega_b: f64, re_ab: f64, imag: f64) -> Result<f64> {
        Ok(2.0 * omega_b * sqrt_clamped(1.0 - 4.0 * re_ab * re_ab - imag * imag)?)
    }

    /// `2ω_b √(4T² − 1)`
    pub fn from_texture(omega_b: f64, texture: f64) -> Result<f64> {
        Ok(2.0 * omega_b * sqrt_clamped(4.0 * texture * texture - 1.0)?)
    }

    /// Residual capacity `ε₄ − ε₁ − 2(ω_b+ω_c)√(1 − E²)`.
    pub fn residual_from_concurrence(p: &HamiltonianParams, e: f64) -> Result<f64> {
        let width = ModelSpectrum::of(p).total_width();
        Ok(width - 2.0 * (p.omega_b + p.omega_c) * sqrt_clamped(1.0 - e * e)?)
    }

    /// `1 + (ε₄ − ε₁ − R)² / (4(ω_b+ω_c)²)`, which equals `4T²`.
    pub fn texture_sq4_from_residual(p: &HamiltonianParams, residual: f64) -> f64 {
        let width = ModelSpectrum::of(p).total_width();
        let sum = p.omega_b + p.omega_c;
        1.0 + (width - residual).powi(2) / (4.0 * sum * sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::model::evolve_closed_form;
    use crate::sampling::{random_density, random_x_state, rng_from_seed};
    use std::f64::consts::PI;

    fn fig2() -> HamiltonianParams {
        HamiltonianParams::new(1.0, 1.0, 0.1, 0.1).unwrap()
    }

    #[test]
    fn maximally_mixed_has_zero_capacity() {
        let h = ComplexMatrix::diag(&[-3.0, 0.1, 0.2, 5.0]);
        let cap = capacity_spectral(&DensityOperator::maximally_mixed(4), &h).unwrap();
        assert!(cap.abs() < 1e-15);
    }

    #[test]
    fn table_one_first_row() {
        let p = fig2();
        let cap = capacity_spectral(
            &crate::model::battery_state(&p, 5.005),
            &battery_hamiltonian(&p),
        )
        .unwrap();
        assert!((cap - 1.0789).abs() < 1e-4, "{cap}");
    }

    #[test]
    fn dimension_mismatch() {
        let h = ComplexMatrix::diag(&[-1.0, 1.0]);
        assert!(matches!(
            capacity_spectral(&DensityOperator::maximally_mixed(4), &h),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn active_passive_for_diagonal_state() {
        let rho = DensityOperator::diagonal(&[0.2, 0.8]).unwrap();
        let h = ComplexMatrix::diag(&[-1.0, 1.0]);
        let (active, passive) = active_passive(&rho, &h).unwrap();
        assert!(
            passive
                .matrix()
                .max_abs_diff(&ComplexMatrix::diag(&[0.8, 0.2]))
                < 1e-15
        );
        assert!(
            active
                .matrix()
                .max_abs_diff(&ComplexMatrix::diag(&[0.2, 0.8]))
                < 1e-15
        );
        let gap = active.expectation(&h) - passive.expectation(&h);
        assert!((gap - capacity_spectral(&rho, &h).unwrap()).abs() < 1e-12);

        // the passive state is its own passive state and stores nothing
        let (_, again) = active_passive(&passive, &h).unwrap();
        assert!(again.matrix().max_abs_diff(passive.matrix()) < 1e-15);
    }

    #[test]
    fn active_state_of_evolved_pair() {
        let p = HamiltonianParams::new(1.0, 0.7, 0.4, 0.3).unwrap();
        let h = build_total_hamiltonian(&p);
        let rho = evolve_closed_form(&p, 3.3).density();
        let (active, passive) = active_passive(&rho, &h).unwrap();
        let spec = p.spectrum();
        assert!((active.expectation(&h) - spec.total_eps[3]).abs() < 1e-12);
        assert!((passive.expectation(&h) - spec.total_eps[0]).abs() < 1e-12);
        let cap = capacity_spectral(&rho, &h).unwrap();
        assert!((cap - spec.total_width()).abs() < 1e-12);
    }

    #[test]
    fn energy_gap_equals_capacity_for_random_states() {
        let mut rng = rng_from_seed(11);
        for _ in 0..200 {
            let rho = random_density(&mut rng, 4);
            let g = random_density(&mut rng, 4);
            let h = g.matrix().scale_real(3.0);
            let (active, passive) = active_passive(&rho, &h).unwrap();
            let gap = active.expectation(&h) - passive.expectation(&h);
            assert!((gap - capacity_spectral(&rho, &h).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn capacity_report_examples() {
        let p = fig2();
        let r = capacity_report(&p, 0.0).unwrap();
        assert!((r.battery - 2.0).abs() < 1e-12);
        assert!((r.charger - 2.0).abs() < 1e-12);
        assert!((r.total - 4.0).abs() < 1e-12);
        assert!(r.residual.abs() < 1e-12);

        let r = capacity_report(&p, PI / (4.0 * p.j1)).unwrap();
        assert!(r.battery.abs() < 1e-12 && r.charger.abs() < 1e-12);
        assert!((r.residual - 4.0).abs() < 1e-12);
    }

    #[test]
    fn battery_and_charger_capacities_are_proportional() {
        let p = HamiltonianParams::new(1.2, 0.7, 0.5, 0.1).unwrap();
        for k in 0..30 {
            let r = capacity_report(&p, 0.53 * k as f64).unwrap();
            assert!((p.omega_c * r.battery - p.omega_b * r.charger).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_report_matches_closed_form() {
        let p = HamiltonianParams::new(1.0, 1.6, 0.8, -0.4).unwrap();
        for k in 0..30 {
            let t = 0.71 * k as f64;
            let a = capacity_report(&p, t).unwrap();
            let b = capacity_report_of_state(&p, &evolve_closed_form(&p, t).density()).unwrap();
            assert!((a.battery - b.battery).abs() < 1e-12);
            assert!((a.charger - b.charger).abs() < 1e-12);
            assert!((a.total - b.total).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_at_resonance() {
        // ε₄ − ε₁ = 2(ω_b+ω_c) here, so the bound is saturated
        let p = fig2();
        let x = XState::new([0.0, 1.0, 0.0, 0.0], c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let s = subadditivity_check(&x, &p).unwrap();
        assert!((s.lhs - 4.0).abs() < 1e-12);
        assert!(s.slack().abs() < 1e-12);
        assert!(s.holds);

        // a strongly negative Ising term lifts the single-excitation level above J₂ + ω_b + ω_c
        let strict = HamiltonianParams::new(1.0, 1.0, 0.1, -1.5).unwrap();
        let s = subadditivity_check(&x, &strict).unwrap();
        assert!((s.rhs - 5.1).abs() < 1e-12);
        assert!((s.slack() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn invalid_x_state_rejected() {
        assert!(XState::new([0.5, 0.5, 0.0, 0.0], c(0.1, 0.0), c(0.0, 0.0)).is_err());
        assert!(XState::new([0.5, 0.6, 0.0, 0.0], c(0.0, 0.0), c(0.0, 0.0)).is_err());
        let bad = XState {
            populations: [0.25; 4],
            corner: c(0.3, 0.0),
            center: c(0.0, 0.0),
        };
        assert!(matches!(
            subadditivity_check(&bad, &fig2()),
            Err(Error::InvalidXState(_))
        ));
    }

    #[test]
    fn random_x_states_are_subadditive() {
        let mut rng = rng_from_seed(5);
        let p = HamiltonianParams::new(1.3, 0.6, 0.9, 0.4).unwrap();
        for _ in 0..500 {
            let x = random_x_state(&mut rng);
            assert!(subadditivity_check(&x, &p).unwrap().holds);
        }
    }

    #[test]
    fn schur_convexity_examples() {
        let mut rng = rng_from_seed(6);
        let h = build_total_hamiltonian(&fig2());
        for _ in 0..100 {
            let sigma = random_density(&mut rng, 4);
            assert!(schur_convexity_check(&sigma.dephased(), &sigma, &h).unwrap());
            assert!(schur_convexity_check(&sigma, &sigma, &h).unwrap());
            let m = 0.37;
            let mix = &sigma.matrix().scale_real(m)
                + &ComplexMatrix::identity(4).scale_real((1.0 - m) / 4.0);
            let mix = DensityOperator::new(mix).unwrap();
            assert!(schur_convexity_check(&mix, &sigma, &h).unwrap());
        }
    }

    #[test]
    fn schur_check_requires_majorization() {
        let h = ComplexMatrix::diag(&[-1.0, 1.0]);
        let pure = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let mixed = DensityOperator::maximally_mixed(2);
        assert!(matches!(
            schur_convexity_check(&pure, &mixed, &h),
            Err(Error::NotMajorized)
        ));
    }

    #[test]
    fn degenerate_levels_do_not_change_capacity() {
        // swapping states inside the degenerate cluster leaves the value unchanged
        let rho = DensityOperator::diagonal(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let h1 = ComplexMatrix::diag(&[0.0, 1.0, 1.0, 2.0]);
        let h2 = ComplexMatrix::diag(&[0.0, 1.0, 2.0, 1.0]);
        let a = capacity_spectral(&rho, &h1).unwrap();
        let b = capacity_spectral(&rho, &h2).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn charging_peak() {
        let res = HamiltonianParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((charging_peak_capacity(&res).unwrap() - 2.0).abs() < 1e-12);
        let det = HamiltonianParams::new(1.0, 1.2, 1.0, 1.0).unwrap();
        let expect = 2.0 * (1.0 - 0.04) / (1.0 + 0.04);
        assert!((charging_peak_capacity(&det).unwrap() - expect).abs() < 1e-12);
    }
}
