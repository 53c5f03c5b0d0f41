use serde::Serialize;

use crate::allocation::Allocation;
use crate::error::{Error, Result};
use crate::piece::Piece;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

use super::{require_agents, require_positive_totals};

/// What happened inside one run of [`connected_prop_traced`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectedPropTrace {
    /// `marks[i]` holds agent i's equal-value points `x_1..x_{n-1}`.
    pub marks: Vec<Vec<Rational>>,
    /// Agent served in round `j` (the last entry gets the remainder).
    pub order: Vec<usize>,
    /// `c_0 = 0, c_1, ..., c_{n-1}`.
    pub cuts: Vec<Rational>,
}

pub fn connected_prop(profile: &[PiecewiseConstant], entire: bool) -> Result<Allocation> {
    connected_prop_traced(profile, entire).map(|(a, _)| a)
}

/// Every agent marks n-1 equal-value points. In round j the unserved agent
/// with the smallest j-th mark is served up to that mark.
///
/// With `entire` the served agent gets `[c_{j-1}, c_j)` and the last agent the
/// rest of the cake. Without it every agent gets exactly the span between its
/// own (j-1)-th and j-th marks, `[x_{j-1}, c_j)`, so gaps may remain.
pub fn connected_prop_traced(
    profile: &[PiecewiseConstant],
    entire: bool,
) -> Result<(Allocation, ConnectedPropTrace)> {
    require_agents(profile, 1)?;
    require_positive_totals(profile)?;
    let n = profile.len();

    let mut marks = Vec::with_capacity(n);
    for (agent, f) in profile.iter().enumerate() {
        let mut m = f.mark_points(n).map_err(|e| match e {
            Error::ZeroTotalValue { .. } => Error::ZeroTotalValue { agent },
            other => other,
        })?;
        // x_0 = 0 and x_n = 1 make the indexing below uniform
        m.insert(0, Rational::zero());
        m.push(Rational::one());
        marks.push(m);
    }

    let mut unserved: Vec<usize> = (0..n).collect();
    let mut order = Vec::with_capacity(n);
    let mut cuts = vec![Rational::zero()];
    let mut shares = vec![Piece::empty(); n];

    for j in 1..n {
        let (pos, &agent) = unserved
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| marks[a][j].cmp(&marks[b][j]).then(a.cmp(&b)))
            .expect("at least two unserved agents");
        let c = marks[agent][j].clone();
        let left = if entire {
            cuts[j - 1].clone()
        } else {
            marks[agent][j - 1].clone()
        };
        shares[agent] = Piece::interval(left, c.clone())?;
        cuts.push(c);
        order.push(agent);
        unserved.remove(pos);
    }

    let last = unserved[0];
    let left = if entire {
        cuts[n - 1].clone()
    } else {
        marks[last][n - 1].clone()
    };
    shares[last] = Piece::interval(left, Rational::one())?;
    order.push(last);

    for m in &mut marks {
        m.remove(0);
        m.pop();
    }
    Ok((
        Allocation::new(shares)?,
        ConnectedPropTrace { marks, order, cuts },
    ))
}
