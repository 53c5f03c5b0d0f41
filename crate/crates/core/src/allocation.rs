//! Allocations and the fairness auditor.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::piece::Piece;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

/// One share per agent, pairwise disjoint up to measure zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Allocation {
    shares: Vec<Piece>,
}

impl Allocation {
    pub fn new(shares: Vec<Piece>) -> Result<Self> {
        for i in 0..shares.len() {
            for j in i + 1..shares.len() {
                if !shares[i].intersection(&shares[j]).is_empty() {
                    return Err(Error::OverlappingShares {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(Allocation { shares })
    }

    pub fn shares(&self) -> &[Piece] {
        &self.shares
    }

    pub fn share(&self, agent: usize) -> &Piece {
        &self.shares[agent]
    }

    pub fn agents(&self) -> usize {
        self.shares.len()
    }

    pub fn allocated(&self) -> Piece {
        self.shares
            .iter()
            .fold(Piece::empty(), |acc, p| acc.union(p))
    }

    /// The part of the cake nobody received.
    pub fn complement(&self) -> Piece {
        self.allocated().complement()
    }

    pub fn is_entire(&self) -> bool {
        self.complement().is_empty()
    }

    /// Share-by-share equality up to measure zero.
    pub fn measure_eq(&self, other: &Allocation) -> bool {
        self.shares.len() == other.shares.len()
            && self
                .shares
                .iter()
                .zip(&other.shares)
                .all(|(a, b)| a.measure_eq(b))
    }
}

impl<'de> Deserialize<'de> for Allocation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            shares: Vec<Piece>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Allocation::new(raw.shares).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub proportional: bool,
    pub envy_free: bool,
    pub entire: bool,
    pub connected: bool,
    pub exact: bool,
    /// `per_agent_values[i][j]` is agent i's value for agent j's share.
    pub per_agent_values: Vec<Vec<Rational>>,
    pub totals: Vec<Rational>,
}

impl AuditReport {
    pub fn own_value(&self, agent: usize) -> &Rational {
        &self.per_agent_values[agent][agent]
    }

    /// Agents whose own share is worth less than `total / n` to them.
    pub fn below_proportional(&self) -> Vec<usize> {
        let n = self.totals.len() as i64;
        (0..self.totals.len())
            .filter(|&i| self.own_value(i) * Rational::integer(n) < self.totals[i])
            .collect()
    }
}

pub fn audit(profile: &[PiecewiseConstant], allocation: &Allocation) -> Result<AuditReport> {
    let n = profile.len();
    if n == 0 || n != allocation.agents() {
        return Err(Error::AgentCountMismatch {
            valuations: n,
            shares: allocation.agents(),
        });
    }
    let per_agent_values: Vec<Vec<Rational>> = profile
        .iter()
        .map(|f| allocation.shares().iter().map(|s| f.eval(s)).collect())
        .collect();
    let totals: Vec<Rational> = profile.iter().map(PiecewiseConstant::total).collect();
    let n_r = Rational::integer(n as i64);

    let proportional = (0..n).all(|i| &per_agent_values[i][i] * &n_r >= totals[i]);
    let envy_free = (0..n).all(|i| {
        per_agent_values[i]
            .iter()
            .all(|v| v <= &per_agent_values[i][i])
    });
    let exact = (0..n).all(|i| per_agent_values[i].iter().all(|v| v * &n_r == totals[i]));
    let connected = allocation.shares().iter().all(Piece::is_connected);
    let entire = allocation.is_entire();

    Ok(AuditReport {
        proportional,
        envy_free,
        entire,
        connected,
        exact,
        per_agent_values,
        totals,
    })
}
