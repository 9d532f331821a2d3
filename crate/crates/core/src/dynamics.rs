//! Numerical reference for the closed-form evolution: fourth-order
//! Runge–Kutta integration of `dρ/dt = −i[H, ρ]` from `ρ(0) = |01⟩⟨01|`,
//! plus the brute-force spectral propagator `e^{−iHt}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, eig_hermitian, partial_trace, ComplexMatrix, DensityOperator, Subsystem};
use crate::model::{
    battery_hamiltonian, build_total_hamiltonian, charger_hamiltonian, HamiltonianParams, KET_01,
};

/// Step-doubling target per output interval.
pub const SUBSTEP_TARGET: f64 = 1e-10;
/// Estimates above this after refinement abort the integration.
pub const STEP_ABORT: f64 = 1e-6;
const MAX_SUBSTEPS: usize = 1 << 20;

/// Uniformly sampled solution of the von Neumann equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
    /// RK4 substeps taken between consecutive samples.
    pub substeps: usize,
    /// Step-doubling estimate that fixed `substeps`.
    pub error_estimate: f64,
    /// Largest entry changed by the Hermitian symmetrization.
    pub max_symmetrization: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|Tr ρ² − 1|` along the trajectory.
    pub fn max_purity_deviation(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.purity() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|Tr ρ − 1|` along the trajectory.
    pub fn max_trace_deviation(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.matrix().trace() - 1.0).norm())
            .fold(0.0, f64::max)
    }
}

/// `d` uniformly spaced samples `t_i = i·t_max/(d−1)`.
pub fn sample_times(t_max: f64, steps: usize) -> Vec<f64> {
    let dt = t_max / (steps - 1) as f64;
    (0..steps).map(|i| i as f64 * dt).collect()
}

fn initial_state() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    m[(KET_01, KET_01)] = c(1.0, 0.0);
    m
}

/// `−i[H, ρ]`
fn generator(h: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    h.commutator(rho).scale(c(0.0, -1.0))
}

fn axpy(base: &ComplexMatrix, k: &ComplexMatrix, s: f64) -> ComplexMatrix {
    base + &k.scale_real(s)
}

fn rk4_step(h: &ComplexMatrix, rho: &ComplexMatrix, dt: f64) -> ComplexMatrix {
    let k1 = generator(h, rho);
    let k2 = generator(h, &axpy(rho, &k1, dt / 2.0));
    let k3 = generator(h, &axpy(rho, &k2, dt / 2.0));
    let k4 = generator(h, &axpy(rho, &k3, dt));
    let mut out = rho.clone();
    for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
        out = axpy(&out, k, w * dt / 6.0);
    }
    out
}

/// Advances `rho` over `interval` with `n` substeps, symmetrizing after each.
fn advance(
    h: &ComplexMatrix,
    rho: &ComplexMatrix,
    interval: f64,
    n: usize,
    max_fix: &mut f64,
) -> ComplexMatrix {
    let dt = interval / n as f64;
    let mut state = rho.clone();
    for _ in 0..n {
        let (sym, fix) = rk4_step(h, &state, dt).hermitian_part();
        *max_fix = max_fix.max(fix);
        state = sym;
    }
    state
}

/// Picks the substep count by step doubling on the first interval.
fn calibrate(h: &ComplexMatrix, rho: &ComplexMatrix, interval: f64) -> Result<(usize, f64)> {
    let mut scratch = 0.0;
    let mut n = 1;
    loop {
        let coarse = advance(h, rho, interval, n, &mut scratch);
        let fine = advance(h, rho, interval, 2 * n, &mut scratch);
        let estimate = coarse.max_abs_diff(&fine);
        if estimate < SUBSTEP_TARGET {
            return Ok((n, estimate));
        }
        if 2 * n > MAX_SUBSTEPS {
            if estimate > STEP_ABORT {
                return Err(Error::StepTooCoarse { estimate });
            }
            return Ok((2 * n, estimate));
        }
        n *= 2;
    }
}

/// Integrates from `|01⟩⟨01|` and returns `steps` samples on `[0, t_max]`.
///
/// Parameters are not validated so degenerate Hamiltonians (all zero) can be
/// integrated as well.
pub fn integrate(p: &HamiltonianParams, t_max: f64, steps: usize) -> Result<Trajectory> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if steps < 2 {
        return Err(Error::InvalidConfig(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    let h = build_total_hamiltonian(p);
    let times = sample_times(t_max, steps);
    let interval = times[1] - times[0];
    let mut rho = initial_state();
    let (substeps, error_estimate) = calibrate(&h, &rho, interval)?;

    let mut max_symmetrization = 0.0;
    let mut states = Vec::with_capacity(steps);
    states.push(DensityOperator::new_unchecked(rho.clone()));
    for _ in 1..steps {
        rho = advance(&h, &rho, interval, substeps, &mut max_symmetrization);
        states.push(DensityOperator::new_unchecked(rho.clone()));
    }
    Ok(Trajectory {
        times,
        states,
        substeps,
        error_estimate,
        max_symmetrization,
    })
}

/// `e^{−iHt}|01⟩` built from the eigen-decomposition of the full Hamiltonian.
pub fn spectral_evolution(p: &HamiltonianParams, t: f64) -> Result<DensityOperator> {
    let spec = eig_hermitian(&build_total_hamiltonian(p))?;
    let u = spec.apply_fn(|e| Complex64::from_polar(1.0, -e * t));
    let mut start = [Complex64::default(); 4];
    start[KET_01] = c(1.0, 0.0);
    let psi = u.mul_vec(&start);
    Ok(DensityOperator::new_unchecked(ComplexMatrix::outer(
        &psi, &psi,
    )))
}

/// `⟨H_b⟩ = Tr(ρ_b H_b)` at every sample.
pub fn battery_energy_series(traj: &Trajectory, p: &HamiltonianParams) -> Result<Vec<f64>> {
    let hb = battery_hamiltonian(p);
    traj.states
        .iter()
        .map(|s| Ok(partial_trace(s, Subsystem::Battery)?.expectation(&hb)))
        .collect()
}

/// `⟨H_c⟩ = Tr(ρ_c H_c)` at every sample.
pub fn charger_energy_series(traj: &Trajectory, p: &HamiltonianParams) -> Result<Vec<f64>> {
    let hc = charger_hamiltonian(p);
    traj.states
        .iter()
        .map(|s| Ok(partial_trace(s, Subsystem::Charger)?.expectation(&hc)))
        .collect()
}

/// `max − min` of a series.
pub fn spread(series: &[f64]) -> f64 {
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_distance;
    use crate::model::evolve_closed_form;
    use std::f64::consts::PI;

    #[test]
    fn zero_hamiltonian_is_static() {
        let p = HamiltonianParams {
            omega_b: 0.0,
            omega_c: 0.0,
            j1: 0.0,
            j2: 0.0,
        };
        let traj = integrate(&p, 10.0, 11).unwrap();
        for s in &traj.states {
            assert_eq!(s.matrix(), &initial_state());
        }
    }

    #[test]
    fn rejects_bad_config() {
        let p = HamiltonianParams::new(1.0, 1.0, 0.1, 0.1).unwrap();
        assert!(matches!(
            integrate(&p, 0.0, 10),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            integrate(&p, 1.0, 1),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn tracks_closed_form() {
        let p = HamiltonianParams::new(1.0, 1.3, 0.5, 0.2).unwrap();
        let traj = integrate(&p, 50.0, 1000).unwrap();
        let mut worst = 0.0f64;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            worst = worst.max(trace_distance(s, &evolve_closed_form(&p, *t).density()));
        }
        assert!(worst < 1e-6, "{worst}");
        assert!(traj.max_purity_deviation() < 1e-7);
        assert!(traj.max_trace_deviation() < 1e-10);
        assert!(traj.max_symmetrization < 1e-9);
    }

    #[test]
    fn spectral_propagator_matches_closed_form() {
        let p = HamiltonianParams::new(0.8, 2.0, 0.3, -0.6).unwrap();
        for k in 0..25 {
            let t = 1.9 * k as f64;
            let a = spectral_evolution(&p, t).unwrap();
            let b = evolve_closed_form(&p, t).density();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-10);
        }
    }

    #[test]
    fn energy_series() {
        let p = HamiltonianParams::new(1.0, 1.0, 0.1, 0.1).unwrap();
        let t_full = PI / (2.0 * p.j1);
        let traj = integrate(&p, t_full, 101).unwrap();
        let eb = battery_energy_series(&traj, &p).unwrap();
        assert!((eb[0] + p.omega_b).abs() < 1e-12);
        assert!((eb[100] - p.omega_b).abs() < 1e-8);

        let frozen = HamiltonianParams::new(1.0, 0.7, 0.0, 0.4).unwrap();
        let traj = integrate(&frozen, 50.0, 200).unwrap();
        assert!(spread(&battery_energy_series(&traj, &frozen).unwrap()) < 1e-9);
        assert!(spread(&charger_energy_series(&traj, &frozen).unwrap()) < 1e-9);
    }

    #[test]
    fn sampling_hits_table_times() {
        let times = sample_times(50.0, 1000);
        assert_eq!(times.len(), 1000);
        assert_eq!(times[0], 0.0);
        assert!((times[999] - 50.0).abs() < 1e-12);
        assert!((times[100] - 5.005).abs() < 1e-5);
    }
}
