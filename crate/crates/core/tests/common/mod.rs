#![allow(dead_code)]

use fuzzy_euler::fuzzy::{uniform_grid, DEFAULT_GRID_SIZE};
use fuzzy_euler::{FuzzyNumber, FuzzySequence};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Builds a fuzzy number from interior levels (in thousandths), a core
/// `[center, center + width]` and nonnegative endpoint increments going
/// down from `α = 1`.
pub fn fuzzy_from_parts(
    interior: &[u16],
    center: f64,
    width: f64,
    left: &[f64],
    right: &[f64],
) -> FuzzyNumber {
    let mut ticks: Vec<u16> = interior
        .iter()
        .copied()
        .filter(|&t| t > 0 && t < 1000)
        .collect();
    ticks.sort_unstable();
    ticks.dedup();
    let mut levels = vec![0.0];
    levels.extend(ticks.iter().map(|&t| t as f64 / 1000.0));
    levels.push(1.0);
    let m = levels.len();
    let mut lower = vec![0.0; m];
    let mut upper = vec![0.0; m];
    lower[m - 1] = center;
    upper[m - 1] = center + width;
    for j in (0..m - 1).rev() {
        lower[j] = lower[j + 1] - left[j % left.len()];
        upper[j] = upper[j + 1] + right[j % right.len()];
    }
    FuzzyNumber::new(levels, lower, upper).expect("nested by construction")
}

/// Random fuzzy number with up to six interior levels; endpoints within
/// roughly `±scale`.
pub fn random_fuzzy<R: Rng>(rng: &mut R, scale: f64) -> FuzzyNumber {
    let k = rng.gen_range(0..=6);
    let interior: Vec<u16> = (0..k).map(|_| rng.gen_range(1..1000)).collect();
    let center = rng.gen_range(-scale..=scale) * 0.5;
    let width = rng.gen_range(0.0..=scale) * 0.2;
    let left: Vec<f64> = (0..7).map(|_| rng.gen_range(0.0..=scale) * 0.05).collect();
    let right: Vec<f64> = (0..7).map(|_| rng.gen_range(0.0..=scale) * 0.05).collect();
    fuzzy_from_parts(&interior, center, width, &left, &right)
}

pub fn random_sequence<R: Rng>(rng: &mut R, len: usize, scale: f64) -> FuzzySequence {
    FuzzySequence::new((0..len).map(|_| random_fuzzy(rng, scale)).collect()).unwrap()
}

/// Unit triangular number `[α, 2 − α]` on the default grid.
pub fn unit_triangular() -> FuzzyNumber {
    FuzzyNumber::triangular(0.0, 1.0, 2.0, uniform_grid(DEFAULT_GRID_SIZE).unwrap()).unwrap()
}

/// `max(1, D(u,0̄), D(v,0̄))`, used to scale absolute tolerances.
pub fn scale_of(us: &[&FuzzyNumber]) -> f64 {
    us.iter().map(|u| u.magnitude()).fold(1.0, f64::max)
}
