use serde::Serialize;

use crate::allocation::Allocation;
use crate::error::Result;
use crate::piece::Piece;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

use super::{require_agents, require_positive_totals};

/// One divide step of Even-Paz.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EvenPazSplit {
    pub lo: Rational,
    pub hi: Rational,
    pub agents: Vec<usize>,
    /// Mark of `agents[k]`, aligned with `agents`.
    pub marks: Vec<Rational>,
    pub cut: Rational,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

pub fn even_paz(profile: &[PiecewiseConstant]) -> Result<Allocation> {
    even_paz_traced(profile).map(|(a, _)| a)
}

/// Divide and conquer. With `k` agents on `[lo, hi)` each agent marks the
/// point where the left part is worth `floor(k/2)/k` of its value for the
/// interval. Sorting marks by (mark, agent), the first `floor(k/2)` agents
/// recurse on the left of the cut and the rest on the right. The cut is the
/// average of the two marks when `k == 2` and otherwise the mark at sorted
/// position `floor(k/2)`, so every left agent's mark is at or before it and
/// every right agent's mark at or after it.
///
/// Splits are returned in depth-first order, left before right; the first
/// entry is the top-level split.
pub fn even_paz_traced(profile: &[PiecewiseConstant]) -> Result<(Allocation, Vec<EvenPazSplit>)> {
    require_agents(profile, 1)?;
    require_positive_totals(profile)?;
    let mut shares = vec![Piece::empty(); profile.len()];
    let mut splits = Vec::new();
    let agents: Vec<usize> = (0..profile.len()).collect();
    divide(
        profile,
        Rational::zero(),
        Rational::one(),
        agents,
        &mut shares,
        &mut splits,
    )?;
    Ok((Allocation::new(shares)?, splits))
}

fn divide(
    profile: &[PiecewiseConstant],
    lo: Rational,
    hi: Rational,
    agents: Vec<usize>,
    shares: &mut [Piece],
    splits: &mut Vec<EvenPazSplit>,
) -> Result<()> {
    let k = agents.len();
    if k == 1 {
        shares[agents[0]] = Piece::interval(lo, hi)?;
        return Ok(());
    }
    let half = k / 2;
    let fraction = Rational::ratio(half as i64, k as i64);

    let marks = agents
        .iter()
        .map(|&i| {
            let f = &profile[i];
            f.cut(&lo, &(f.eval_interval(&lo, &hi) * &fraction))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ranked: Vec<usize> = (0..k).collect();
    ranked.sort_by(|&a, &b| marks[a].cmp(&marks[b]).then(agents[a].cmp(&agents[b])));

    let cut = if k == 2 {
        Rational::midpoint(&marks[0], &marks[1])
    } else {
        marks[ranked[half]].clone()
    };
    let mut left: Vec<usize> = ranked[..half].iter().map(|&r| agents[r]).collect();
    let mut right: Vec<usize> = ranked[half..].iter().map(|&r| agents[r]).collect();
    left.sort_unstable();
    right.sort_unstable();

    splits.push(EvenPazSplit {
        lo: lo.clone(),
        hi: hi.clone(),
        agents: agents.clone(),
        marks,
        cut: cut.clone(),
        left: left.clone(),
        right: right.clone(),
    });

    divide(profile, lo, cut.clone(), left, shares, splits)?;
    divide(profile, cut, hi, right, shares, splits)
}
