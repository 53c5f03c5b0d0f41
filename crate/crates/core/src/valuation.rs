//! Piecewise-constant value densities on the unit cake.

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::piece::Piece;
use crate::rational::Rational;

/// A nonnegative value density that is constant on each cell
/// `[b_k, b_{k+1})` of a finite partition of `[0, 1]` (the last cell is
/// closed at 1).
///
/// Always canonical: breakpoints strictly increase from 0 to 1 and no two
/// adjacent cells share a density, so every interior breakpoint is a genuine
/// discontinuity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PiecewiseConstant {
    breakpoints: Vec<Rational>,
    densities: Vec<Rational>,
}

impl PiecewiseConstant {
    pub fn new(breakpoints: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidBreakpoints("need at least 0 and 1".into()));
        }
        if !breakpoints[0].is_zero() || breakpoints[breakpoints.len() - 1] != Rational::one() {
            return Err(Error::InvalidBreakpoints(
                "must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBreakpoints(
                "must be strictly ascending".into(),
            ));
        }
        if densities.len() + 1 != breakpoints.len() {
            return Err(Error::DensityCountMismatch {
                expected: breakpoints.len() - 1,
                got: densities.len(),
            });
        }
        if let Some(d) = densities.iter().find(|d| d.is_negative()) {
            return Err(Error::NegativeDensity(d.clone()));
        }

        let mut bps = vec![breakpoints[0].clone()];
        let mut ds: Vec<Rational> = Vec::with_capacity(densities.len());
        for (k, d) in densities.into_iter().enumerate() {
            if ds.last() == Some(&d) {
                // same density as the previous cell: extend it
                *bps.last_mut().unwrap() = breakpoints[k + 1].clone();
            } else {
                ds.push(d);
                bps.push(breakpoints[k + 1].clone());
            }
        }
        Ok(PiecewiseConstant {
            breakpoints: bps,
            densities: ds,
        })
    }

    /// Builds a density from its interior cut points; `densities` has one
    /// more entry than `interior`.
    pub fn steps(interior: Vec<Rational>, densities: Vec<Rational>) -> Result<Self> {
        let mut breakpoints = Vec::with_capacity(interior.len() + 2);
        breakpoints.push(Rational::zero());
        breakpoints.extend(interior);
        breakpoints.push(Rational::one());
        Self::new(breakpoints, densities)
    }

    pub fn constant(density: Rational) -> Self {
        Self::new(vec![Rational::zero(), Rational::one()], vec![density])
            .expect("nonnegative constant density")
    }

    pub fn uniform() -> Self {
        Self::constant(Rational::one())
    }

    /// Density that takes value `d` on region `R` for each `(R, d)`.
    ///
    /// Regions must cover `[0, 1]` up to measure zero; where regions overlap
    /// the first one listed wins.
    pub fn from_regions(regions: &[(&Piece, Rational)]) -> Result<Self> {
        let mut cuts: Vec<Rational> = vec![Rational::zero(), Rational::one()];
        for (piece, _) in regions {
            cuts.extend(piece.endpoints().cloned());
        }
        cuts.sort();
        cuts.dedup();

        let mut densities = Vec::with_capacity(cuts.len() - 1);
        for w in cuts.windows(2) {
            let cell = Piece::interval(w[0].clone(), w[1].clone())?;
            let density = regions
                .iter()
                .find(|(piece, _)| !piece.intersection(&cell).is_empty())
                .map(|(_, d)| d.clone())
                .ok_or_else(|| Error::UncoveredRegion(w[0].clone(), w[1].clone()))?;
            densities.push(density);
        }
        Self::new(cuts, densities)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[Rational] {
        &self.densities
    }

    /// `(left, right, density)` for each cell.
    pub fn cells(&self) -> impl Iterator<Item = (&Rational, &Rational, &Rational)> {
        self.breakpoints
            .windows(2)
            .zip(&self.densities)
            .map(|(w, d)| (&w[0], &w[1], d))
    }

    pub fn density_at(&self, x: &Rational) -> &Rational {
        let k = self.breakpoints[1..].partition_point(|b| b <= x);
        &self.densities[k.min(self.densities.len() - 1)]
    }

    pub fn is_hungry(&self) -> bool {
        self.densities.iter().all(Rational::is_positive)
    }

    pub fn total(&self) -> Rational {
        self.cells().map(|(a, b, d)| (b - a) * d).sum()
    }

    /// Value of the interval `[a, b]`; zero if `b <= a`.
    pub fn eval_interval(&self, a: &Rational, b: &Rational) -> Rational {
        let mut acc = Rational::zero();
        if b <= a {
            return acc;
        }
        for (lo, hi, d) in self.cells() {
            if hi <= a {
                continue;
            }
            if lo >= b {
                break;
            }
            let left = lo.max(a);
            let right = hi.min(b);
            acc += (right - left) * d;
        }
        acc
    }

    pub fn eval(&self, piece: &Piece) -> Rational {
        piece
            .intervals()
            .iter()
            .map(|(a, b)| self.eval_interval(a, b))
            .sum()
    }

    /// Leftmost `y >= x` with `eval([x, y]) == r`.
    pub fn cut(&self, x: &Rational, r: &Rational) -> Result<Rational> {
        let remaining = self.eval_interval(x, &Rational::one());
        if r > &remaining {
            return Err(Error::RequestExceedsRemaining {
                requested: r.clone(),
                remaining,
            });
        }
        let mut need = r.clone();
        let mut pos = x.clone();
        for (lo, hi, d) in self.cells() {
            if need.is_zero() {
                break;
            }
            if hi <= x {
                continue;
            }
            let start = lo.max(x).clone();
            let value = (hi - &start) * d;
            if value >= need {
                return Ok(start + need / d);
            }
            need -= &value;
            pos = hi.clone();
        }
        Ok(pos)
    }

    /// Interior points where the density jumps.
    pub fn discontinuities(&self) -> Vec<Rational> {
        let n = self.breakpoints.len();
        self.breakpoints[1..n - 1].to_vec()
    }

    /// `x_1 <= ... <= x_{n-1}` splitting the cake into `n` spans of equal
    /// value, each chosen as the leftmost such point.
    pub fn mark_points(&self, n: usize) -> Result<Vec<Rational>> {
        let total = self.total();
        if total.is_zero() {
            return Err(Error::ZeroTotalValue { agent: 0 });
        }
        let zero = Rational::zero();
        (1..n)
            .map(|j| {
                let target = &total * Rational::ratio(j as i64, n as i64);
                self.cut(&zero, &target)
            })
            .collect()
    }

    /// Same density rescaled to total value 1.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total();
        if total.is_zero() {
            return Err(Error::ZeroTotalValue { agent: 0 });
        }
        Self::new(
            self.breakpoints.clone(),
            self.densities.iter().map(|d| d / &total).collect(),
        )
    }

    /// Mirror image about 1/2.
    pub fn reflected(&self) -> Self {
        let one = Rational::one();
        let breakpoints = self.breakpoints.iter().rev().map(|b| &one - b).collect();
        let densities = self.densities.iter().rev().cloned().collect();
        Self::new(breakpoints, densities).expect("reflection preserves validity")
    }
}

impl<'de> Deserialize<'de> for PiecewiseConstant {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            breakpoints: Vec<Rational>,
            densities: Vec<Rational>,
        }
        let raw = Raw::deserialize(deserializer)?;
        PiecewiseConstant::new(raw.breakpoints, raw.densities).map_err(serde::de::Error::custom)
    }
}

/// Front-loaded density: 3/2 on `[0, 1/(2n))`, 1/2 on `[1/(2n), 1/n)`,
/// 1 on `[1/n, 1]`. Any interval worth at least `1/n` under it is at least
/// `1/n` long.
pub fn ell(n: usize) -> PiecewiseConstant {
    assert!(n >= 2, "ell needs n >= 2");
    let n = n as i64;
    PiecewiseConstant::new(
        vec![
            Rational::zero(),
            Rational::ratio(1, 2 * n),
            Rational::ratio(1, n),
            Rational::one(),
        ],
        vec![
            Rational::ratio(3, 2),
            Rational::ratio(1, 2),
            Rational::one(),
        ],
    )
    .expect("valid construction")
}

/// Mirror image of [`ell`] about 1/2.
pub fn rr(n: usize) -> PiecewiseConstant {
    ell(n).reflected()
}
