//! Cell-wise simulation of a Lévy basis on a grid.
//!
//! Each cell gets an independent infinitely divisible increment: a Gaussian
//! part carrying `a` plus the variance of the jumps below the cutoff `delta`,
//! and a compound-Poisson part for the jumps above `delta`. Every cell owns a
//! counter-based RNG stream keyed by `(seed, stream, cell index)`, so parallel
//! generation is deterministic and bit-exact.

use super::measure::JumpSampler;
use super::LevyTriplet;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::num::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

/// Expected total number of jumps across the grid above which simulation
/// refuses to run.
pub const DEFAULT_JUMP_BUDGET: f64 = 5e8;

/// One realization of per-cell Lévy increments.
#[derive(Clone, Debug)]
pub struct CellNoise<T> {
    pub spec: GridSpec<T>,
    pub values: Vec<T>,
    pub seed: u64,
    pub stream: u64,
    pub delta: T,
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn cell_rng(seed: u64, stream: u64, cell: u64) -> ChaCha8Rng {
    let mut s1 = stream.wrapping_mul(0xA24B_AED4_963E_E407);
    let mut s2 = cell.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    let mut state = seed ^ splitmix(&mut s1) ^ splitmix(&mut s2);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Simulate per-cell increments of the Lévy basis with characteristic triplet
/// `t` on `grid`, replacing jumps of size `<= delta` by a Gaussian of
/// matching variance.
pub fn simulate_cells<T: Scalar>(
    triplet: &LevyTriplet<T>,
    grid: &GridSpec<T>,
    delta: T,
    seed: u64,
    stream: u64,
) -> Result<CellNoise<T>> {
    if !(delta > T::zero() && delta <= T::one()) {
        return Err(Error::config("delta must lie in (0, 1]"));
    }
    let v = grid.cell_volume();
    if !(v > T::zero()) {
        return Err(Error::config("grid cell volume must be positive"));
    }
    let tail_mass = triplet.nu.tail_mass(delta);
    if !tail_mass.is_finite() {
        return Err(Error::config("nu(|r| > delta) is not finite"));
    }
    let lambda = (v * tail_mass).as_f64();
    let expected_jumps = lambda * grid.len() as f64;
    if expected_jumps > DEFAULT_JUMP_BUDGET {
        return Err(Error::resource(format!(
            "expected {expected_jumps:.3e} jumps exceeds the budget {DEFAULT_JUMP_BUDGET:.1e}; increase delta"
        )));
    }
    let sigma_small = triplet.nu.small_second_moment(delta);
    let gamma_eff = triplet.gamma - triplet.nu.truncated_mean_between(delta);
    let mean = (v * gamma_eff).as_f64();
    let std = (v * (triplet.a + sigma_small)).as_f64().sqrt();
    let sampler = JumpSampler::prepare(&triplet.nu, delta);

    let values: Vec<T> = (0..grid.len() as u64)
        .into_par_iter()
        .map(|cell| {
            let mut rng = cell_rng(seed, stream, cell);
            let mut x = mean;
            if std > 0.0 {
                let n: f64 = rng.sample(StandardNormal);
                x += std * n;
            }
            if lambda > 0.0 {
                let count = Poisson::new(lambda).expect("positive poisson mean").sample(&mut rng);
                for _ in 0..count as u64 {
                    x += sampler.sample(&mut rng);
                }
            }
            T::of(x)
        })
        .collect();

    Ok(CellNoise { spec: grid.clone(), values, seed, stream, delta })
}

impl<T: Scalar> CellNoise<T> {
    pub fn sample_mean(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::of_usize(self.values.len())
    }

    pub fn sample_variance(&self) -> T {
        let m = self.sample_mean();
        self.values.iter().map(|&x| (x - m) * (x - m)).sum::<T>()
            / T::of_usize(self.values.len().saturating_sub(1).max(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::LevyMeasureSpec;

    fn grid_1d(n: usize, h: f64) -> GridSpec<f64> {
        GridSpec::new(vec![n], vec![h], vec![0.0]).unwrap()
    }

    #[test]
    fn pure_gaussian_cells() {
        // a=1, v=0.01: cells iid N(0, 0.01); sample variance within 3% at 1e5 cells
        let t = LevyTriplet::new(1.0, 0.0, LevyMeasureSpec::none()).unwrap();
        let g = grid_1d(100_000, 0.01);
        let n = simulate_cells(&t, &g, 0.01, 7, 0).unwrap();
        let var = n.sample_variance();
        assert!((var - 0.01).abs() / 0.01 < 0.03, "variance {var}");
        assert!(n.sample_mean().abs() < 3.0 * (0.01f64 / 1e5).sqrt());
    }

    #[test]
    fn compensated_atom_cells() {
        // atom mass 2 at r=1, v=0.5, delta=0.5: E = 0, Var = v c r^2 = 1
        let t = LevyTriplet::new(0.0, 0.0, LevyMeasureSpec::atoms(vec![(1.0, 2.0)]).unwrap())
            .unwrap();
        let g = grid_1d(100_000, 0.5);
        let n = simulate_cells(&t, &g, 0.5, 11, 0).unwrap();
        let mean = n.sample_mean();
        let var = n.sample_variance();
        assert!(mean.abs() < 3.0 * (1.0f64 / 1e5).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "variance {var}");
    }

    #[test]
    fn degenerate_triplet_is_zero() {
        let t = LevyTriplet::new(0.0, 0.0, LevyMeasureSpec::none()).unwrap();
        let g = grid_1d(64, 0.1);
        let n = simulate_cells(&t, &g, 0.1, 3, 9).unwrap();
        assert!(n.values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn bit_exact_reproducibility() {
        let t = LevyTriplet::new(
            0.3,
            0.1,
            LevyMeasureSpec::two_sided_pareto(2.5, 0.8, 1.0, 1.0).unwrap(),
        )
        .unwrap();
        let g = grid_1d(512, 0.25);
        let a = simulate_cells(&t, &g, 0.05, 42, 1).unwrap();
        let b = simulate_cells(&t, &g, 0.05, 42, 1).unwrap();
        assert_eq!(
            a.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        let c = simulate_cells(&t, &g, 0.05, 42, 2).unwrap();
        assert_ne!(
            a.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            c.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn delta_out_of_range_rejected() {
        let t = LevyTriplet::new(1.0, 0.0, LevyMeasureSpec::none()).unwrap();
        let g = grid_1d(8, 0.1);
        assert!(simulate_cells(&t, &g, 0.0, 1, 0).is_err());
        assert!(simulate_cells(&t, &g, 1.5, 1, 0).is_err());
    }

    #[test]
    fn gamma_small_jump_replacement_keeps_moments() {
        // gamma subordinator: mean v(gamma + int_{r>1} r nu), var v int r^2 nu
        let c = 1.0f64;
        let lam = 1.0f64;
        let t = LevyTriplet::new(
            0.0,
            0.0,
            LevyMeasureSpec::GammaSubordinator { shape: c, rate: lam },
        )
        .unwrap();
        let g = grid_1d(200_000, 0.05);
        let n = simulate_cells(&t, &g, 0.01, 5, 0).unwrap();
        let v = 0.05;
        // E dL = v (gamma + int_{|r|>1} r nu): jumps in (delta, 1] stay compensated
        let want_mean = v * t.nu.tail_first_moment_signed().unwrap();
        let want_var = v * t.nu.second_moment_full().unwrap();
        let mean = n.sample_mean();
        let var = n.sample_variance();
        assert!(
            (mean - want_mean).abs() < 4.0 * (want_var / 2e5).sqrt(),
            "mean {mean} vs {want_mean}"
        );
        assert!((var - want_var).abs() / want_var < 0.05, "var {var} vs {want_var}");
    }
}
