use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanisms::MechanismId;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

use super::utility;

/// Candidate breakpoints and density levels for deviation search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationGrid {
    pub breakpoints: Vec<Rational>,
    pub levels: Vec<Rational>,
}

impl Default for DeviationGrid {
    /// Breakpoints {1/4, 1/2, 3/4}, levels {1/2, 1, 2}.
    fn default() -> Self {
        DeviationGrid {
            breakpoints: vec![
                Rational::ratio(1, 4),
                Rational::ratio(1, 2),
                Rational::ratio(3, 4),
            ],
            levels: vec![Rational::ratio(1, 2), Rational::one(), Rational::integer(2)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestResponse {
    pub deviation: PiecewiseConstant,
    pub utility: Rational,
    pub truthful_utility: Rational,
    /// Distinct reports tried, not counting the truthful one.
    pub candidates: usize,
}

/// Every distinct density with breakpoints drawn from the grid and one level
/// per cell, skipping all-zero ones. Order: breakpoint subsets by bitmask,
/// then level tuples with the leftmost cell varying slowest.
pub fn enumerate_deviations(grid: &DeviationGrid) -> Result<Vec<PiecewiseConstant>> {
    if grid.levels.is_empty() {
        return Err(Error::SearchSpaceEmpty);
    }
    if grid.levels.iter().any(Rational::is_negative) {
        return Err(Error::InvalidGrid("negative density level".into()));
    }
    let zero = Rational::zero();
    let one = Rational::one();
    if grid.breakpoints.iter().any(|b| b <= &zero || b >= &one)
        || grid.breakpoints.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidGrid(
            "breakpoints must ascend strictly inside (0, 1)".into(),
        ));
    }
    if grid.breakpoints.len() > 16 {
        return Err(Error::InvalidGrid(
            "at most 16 breakpoint candidates".into(),
        ));
    }

    let m = grid.breakpoints.len();
    let l = grid.levels.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let interior: Vec<Rational> = (0..m)
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| grid.breakpoints[b].clone())
            .collect();
        let cells = interior.len() + 1;
        let tuples = l
            .checked_pow(cells as u32)
            .ok_or_else(|| Error::InvalidGrid("search space too large".into()))?;
        for code in 0..tuples {
            let mut rest = code;
            let mut digits = vec![0usize; cells];
            for d in digits.iter_mut().rev() {
                *d = rest % l;
                rest /= l;
            }
            if digits.iter().all(|&d| grid.levels[d].is_zero()) {
                continue;
            }
            let densities = digits.iter().map(|&d| grid.levels[d].clone()).collect();
            let f = PiecewiseConstant::steps(interior.clone(), densities)?;
            if seen.insert(f.clone()) {
                out.push(f);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::SearchSpaceEmpty);
    }
    Ok(out)
}

/// Best report for `agent` against fixed opponents, judged by the true
/// density. The truthful report wins ties; otherwise the first candidate in
/// [`enumerate_deviations`] order does.
pub fn brute_force_best_response(
    mechanism: MechanismId,
    agent: usize,
    true_f: &PiecewiseConstant,
    opponents: &[PiecewiseConstant],
    grid: &DeviationGrid,
) -> Result<BestResponse> {
    if agent > opponents.len() {
        return Err(Error::ProfileMismatch(format!(
            "agent index {agent} out of range"
        )));
    }
    let candidates = enumerate_deviations(grid)?;
    let truthful_utility = utility(mechanism, agent, true_f, true_f, opponents)?;
    let utilities = candidates
        .par_iter()
        .map(|report| utility(mechanism, agent, true_f, report, opponents))
        .collect::<Result<Vec<_>>>()?;

    let mut best = (true_f.clone(), truthful_utility.clone());
    for (report, u) in candidates.iter().zip(utilities) {
        if u > best.1 {
            best = (report.clone(), u);
        }
    }
    Ok(BestResponse {
        deviation: best.0,
        utility: best.1,
        truthful_utility,
        candidates: candidates.len(),
    })
}
