use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

/// Denominator of the breakpoint grid for sampled densities.
pub const SAMPLE_GRID: i64 = 12;
/// Density levels (numerator, denominator) before normalization.
pub const SAMPLE_LEVELS: [(i64, i64); 4] = [(1, 2), (1, 1), (3, 2), (2, 1)];

/// A random hungry density: up to four breakpoints on the 1/12 grid,
/// levels drawn from [`SAMPLE_LEVELS`], rescaled to total value 1.
pub fn sample_hungry_density<R: Rng>(rng: &mut R) -> PiecewiseConstant {
    let mut interior: Vec<i64> = (1..SAMPLE_GRID).collect();
    interior.shuffle(rng);
    let k = rng.gen_range(0..=4);
    let mut cuts: Vec<i64> = interior[..k].to_vec();
    cuts.sort_unstable();
    let densities = (0..=k)
        .map(|_| {
            let (p, q) = SAMPLE_LEVELS[rng.gen_range(0..SAMPLE_LEVELS.len())];
            Rational::ratio(p, q)
        })
        .collect();
    let cuts = cuts
        .into_iter()
        .map(|c| Rational::ratio(c, SAMPLE_GRID))
        .collect();
    PiecewiseConstant::steps(cuts, densities)
        .and_then(|f| f.normalized())
        .expect("positive levels on a valid grid")
}

/// `count` tuples of `size` sampled densities, reproducible from `seed`.
pub fn sample_opponent_profiles(
    size: usize,
    count: usize,
    seed: u64,
) -> Vec<Vec<PiecewiseConstant>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..size).map(|_| sample_hungry_density(&mut rng)).collect())
        .collect()
}
