//! Seeded random states, unitaries and parameters for the randomized checks.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::capacity::XState;
use crate::linalg::{c, ComplexMatrix, DensityOperator};
use crate::model::HamiltonianParams;

/// The generator behind every seeded check.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Flat (uniform) sample from the probability simplex of the given size.
pub fn simplex_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    // normalized unit exponentials are Dirichlet(1, …, 1)
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| x / total).collect()
}

/// Uniform point in the closed disc of radius `r` in the complex plane.
pub fn disc_point<R: Rng + ?Sized>(rng: &mut R, r: f64) -> Complex64 {
    let modulus = r * rng.random::<f64>().sqrt();
    let phase = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(modulus, phase)
}

/// X-state with flat populations and coherences uniform in the allowed discs.
pub fn random_x_state<R: Rng + ?Sized>(rng: &mut R) -> XState {
    let p = simplex_point(rng, 4);
    let corner = disc_point(rng, (p[0] * p[3]).sqrt());
    let center = disc_point(rng, (p[1] * p[2]).sqrt());
    XState::new([p[0], p[1], p[2], p[3]], corner, center).expect("sampled inside PSD discs")
}

/// Full-rank random density operator `G G† / Tr(G G†)` with Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityOperator {
    let g = ComplexMatrix::from_vec(dim, (0..dim * dim).map(|_| complex_normal(rng)).collect())
        .expect("square buffer");
    let w = &g * &g.dagger();
    let (w, _) = w.hermitian_part();
    let tr = w.trace().re;
    DensityOperator::new(w.scale_real(1.0 / tr)).expect("Wishart matrix is a state")
}

/// Haar-random 2×2 unitary from a uniformly distributed unit quaternion.
pub fn haar_unitary_2<R: Rng + ?Sized>(rng: &mut R) -> ComplexMatrix {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (a, b) = (c(q[0] / n, q[1] / n), c(q[2] / n, q[3] / n));
    ComplexMatrix::from_vec(2, vec![a, -b.conj(), b, a.conj()]).expect("2x2")
}

/// Model parameters drawn from a box: `ω_b ∈ (0.1, 3)`, `ω_c ∈ (0.1, 3)`,
/// `J₁ ∈ (−2, 2)`, `J₂ ∈ (−2, 2)`.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> HamiltonianParams {
    HamiltonianParams::new(
        rng.random_range(0.1..3.0),
        rng.random_range(0.1..3.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
    .expect("positive battery gap")
}

/// Model parameters with every constant strictly positive.
pub fn random_positive_params<R: Rng + ?Sized>(rng: &mut R) -> HamiltonianParams {
    HamiltonianParams::new(
        rng.random_range(0.05..3.0),
        rng.random_range(0.05..3.0),
        rng.random_range(0.05..2.0),
        rng.random_range(0.05..2.0),
    )
    .expect("positive battery gap")
}

/// Minimum and maximum of `Tr[UρU†h]` over `samples` Haar-random qubit unitaries.
///
/// `max − min` approaches the battery capacity from below as the sample grows.
pub fn orbit_energy_range<R: Rng + ?Sized>(
    rng: &mut R,
    rho: &DensityOperator,
    h: &ComplexMatrix,
    samples: usize,
) -> (f64, f64) {
    assert_eq!(rho.dim(), 2, "orbit sampling is implemented for qubits");
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..samples {
        let u = haar_unitary_2(rng);
        let rotated = &(&u.dagger() * h) * &u;
        let e = rho.matrix().trace_product(&rotated).re;
        lo = lo.min(e);
        hi = hi.max(e);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let u = haar_unitary_2(&mut rng);
            let uu = &u * &u.dagger();
            assert!(uu.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
        }
    }

    #[test]
    fn simplex_points_are_normalized() {
        let mut rng = rng_from_seed(4);
        for _ in 0..100 {
            let p = simplex_point(&mut rng, 4);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(p.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let a = random_density(&mut rng_from_seed(9), 4);
        let b = random_density(&mut rng_from_seed(9), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn orbit_range_brackets_capacity() {
        let mut rng = rng_from_seed(5);
        let h = ComplexMatrix::diag(&[-1.0, 1.0]);
        let rho = DensityOperator::diagonal(&[0.8, 0.2]).unwrap();
        let (lo, hi) = orbit_energy_range(&mut rng, &rho, &h, 20_000);
        let cap = crate::capacity::capacity_spectral(&rho, &h).unwrap();
        assert!(hi - lo <= cap + 1e-12);
        assert!(cap - (hi - lo) < 5e-3);
    }
}
