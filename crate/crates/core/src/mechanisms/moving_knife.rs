use serde::Serialize;

use crate::allocation::Allocation;
use crate::error::Result;
use crate::piece::Piece;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

use super::{require_agents, require_positive_totals};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MovingKnifeTrace {
    /// Agents in the order they left; the last one took the remainder.
    pub order: Vec<usize>,
    /// Knife positions where each of the first n-1 agents shouted stop.
    pub cuts: Vec<Rational>,
}

pub fn moving_knife(profile: &[PiecewiseConstant]) -> Result<Allocation> {
    moving_knife_traced(profile).map(|(a, _)| a)
}

/// Each round, every remaining agent marks the leftmost point where the
/// piece from the current knife position is worth its proportional value
/// `total / n`; the smallest mark wins that piece.
pub fn moving_knife_traced(
    profile: &[PiecewiseConstant],
) -> Result<(Allocation, MovingKnifeTrace)> {
    require_agents(profile, 1)?;
    require_positive_totals(profile)?;
    let n = profile.len();
    let shares_of: Vec<Rational> = profile
        .iter()
        .map(|f| f.total() / Rational::integer(n as i64))
        .collect();

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut shares = vec![Piece::empty(); n];
    let mut trace = MovingKnifeTrace {
        order: Vec::with_capacity(n),
        cuts: Vec::new(),
    };
    let mut knife = Rational::zero();

    while remaining.len() > 1 {
        let mut best: Option<(usize, Rational)> = None;
        for (pos, &agent) in remaining.iter().enumerate() {
            let mark = profile[agent].cut(&knife, &shares_of[agent])?;
            if best.as_ref().is_none_or(|(_, m)| &mark < m) {
                best = Some((pos, mark));
            }
        }
        let (pos, mark) = best.expect("remaining is nonempty");
        let agent = remaining.remove(pos);
        shares[agent] = Piece::interval(knife, mark.clone())?;
        trace.order.push(agent);
        trace.cuts.push(mark.clone());
        knife = mark;
    }

    let last = remaining[0];
    shares[last] = Piece::interval(knife, Rational::one())?;
    trace.order.push(last);
    Ok((Allocation::new(shares)?, trace))
}
