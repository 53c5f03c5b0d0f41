use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::piece::Piece;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

/// Agent 0 halves the cake by its own valuation; agent 1 takes the half it
/// strictly prefers, or the right half on a tie.
pub fn cut_and_choose(profile: &[PiecewiseConstant]) -> Result<Allocation> {
    if profile.len() != 2 {
        return Err(Error::WrongAgentCount {
            expected: 2,
            got: profile.len(),
        });
    }
    let (cutter, chooser) = (&profile[0], &profile[1]);
    let total = cutter.total();
    if total.is_zero() {
        return Err(Error::ZeroTotalValue { agent: 0 });
    }
    let x = cutter.cut(&Rational::zero(), &(total / Rational::integer(2)))?;
    let left = Piece::interval(Rational::zero(), x.clone())?;
    let right = Piece::interval(x, Rational::one())?;
    let shares = if chooser.eval(&left) > chooser.eval(&right) {
        vec![right, left]
    } else {
        vec![left, right]
    };
    Allocation::new(shares)
}
