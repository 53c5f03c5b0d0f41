use crate::allocation::Allocation;
use crate::error::Result;
use crate::piece::Piece;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

use super::require_agents;

/// Splits every cell of the common refinement into `n` equal slices; agent
/// `i` always takes slice `i` (left to right).
pub fn simple_ef(profile: &[PiecewiseConstant]) -> Result<Allocation> {
    slice_cells(profile, |agent, _cell, _n| agent)
}

/// Like [`simple_ef`], but in cell `j` agent `i` takes slice `(i + j) mod n`.
pub fn rotating_ef(profile: &[PiecewiseConstant]) -> Result<Allocation> {
    slice_cells(profile, |agent, cell, n| (agent + cell) % n)
}

fn common_refinement(profile: &[PiecewiseConstant]) -> Vec<Rational> {
    let mut points: Vec<Rational> = profile.iter().flat_map(|f| f.discontinuities()).collect();
    points.push(Rational::zero());
    points.push(Rational::one());
    points.sort();
    points.dedup();
    points
}

fn slice_cells(
    profile: &[PiecewiseConstant],
    slot: impl Fn(usize, usize, usize) -> usize,
) -> Result<Allocation> {
    require_agents(profile, 1)?;
    let n = profile.len();
    let points = common_refinement(profile);
    let mut intervals: Vec<Vec<(Rational, Rational)>> = vec![Vec::new(); n];
    for (j, w) in points.windows(2).enumerate() {
        let width = (&w[1] - &w[0]) / Rational::integer(n as i64);
        for (agent, ivs) in intervals.iter_mut().enumerate() {
            let s = Rational::integer(slot(agent, j, n) as i64);
            let lo = &w[0] + &width * &s;
            let hi = &lo + &width;
            ivs.push((lo, hi));
        }
    }
    let shares = intervals
        .into_iter()
        .map(Piece::from_intervals)
        .collect::<Result<_>>()?;
    Allocation::new(shares)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::audit;
    use crate::rational::q;

    fn front_heavy(n: i64) -> PiecewiseConstant {
        PiecewiseConstant::steps(vec![q(1, n)], vec![q(1, 1), q(1, 2)]).unwrap()
    }

    fn pieces(iv: &[(Rational, Rational)]) -> Piece {
        Piece::from_intervals(iv.iter().cloned()).unwrap()
    }

    #[test]
    fn simple_ef_three_agents() {
        let u = PiecewiseConstant::uniform();
        let profile = vec![front_heavy(3), u.clone(), u];
        let a = simple_ef(&profile).unwrap();
        assert_eq!(
            a.share(0),
            &pieces(&[(q(0, 1), q(1, 9)), (q(1, 3), q(5, 9))])
        );
        let r = audit(&profile, &a).unwrap();
        assert_eq!(r.own_value(0), &q(2, 9));
        assert!(r.exact && r.entire && r.envy_free);
    }

    #[test]
    fn single_cell_and_single_agent() {
        let u = PiecewiseConstant::uniform();
        let a = simple_ef(&[u.clone(), u.clone()]).unwrap();
        assert_eq!(a.share(0), &pieces(&[(q(0, 1), q(1, 2))]));
        assert_eq!(a.share(1), &pieces(&[(q(1, 2), q(1, 1))]));
        assert_eq!(rotating_ef(&[u.clone(), u.clone()]).unwrap(), a);
        let solo = simple_ef(&[front_heavy(2)]).unwrap();
        assert_eq!(solo.share(0), &Piece::full());
    }

    #[test]
    fn rotating_ef_offsets() {
        let u = PiecewiseConstant::uniform();
        let profile = vec![front_heavy(3), u.clone(), u.clone()];
        let a = rotating_ef(&profile).unwrap();
        assert_eq!(
            a.share(0),
            &pieces(&[(q(0, 1), q(1, 9)), (q(5, 9), q(7, 9))])
        );
        assert_eq!(audit(&profile, &a).unwrap().own_value(0), &q(2, 9));

        let profile = vec![front_heavy(2), u];
        let a = rotating_ef(&profile).unwrap();
        assert_eq!(
            a.share(0),
            &pieces(&[(q(0, 1), q(1, 4)), (q(3, 4), q(1, 1))])
        );
        assert_eq!(a.share(1), &pieces(&[(q(1, 4), q(3, 4))]));
    }
}
