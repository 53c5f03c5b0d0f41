//! Finite unions of half-open subintervals of the cake.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A canonical finite union of intervals `[a, b)` inside `[0, 1]`.
///
/// Intervals are sorted, non-empty and separated by gaps of positive length;
/// adjacent or overlapping inputs are merged and zero-length inputs dropped.
/// Since single points have measure zero, two pieces are equal up to measure
/// zero exactly when their canonical forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Piece {
    intervals: Vec<(Rational, Rational)>,
}

impl Piece {
    pub fn empty() -> Self {
        Piece {
            intervals: Vec::new(),
        }
    }

    pub fn full() -> Self {
        Piece {
            intervals: vec![(Rational::zero(), Rational::one())],
        }
    }

    pub fn interval(a: Rational, b: Rational) -> Result<Self> {
        Self::from_intervals([(a, b)])
    }

    pub fn from_intervals<I>(intervals: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut raw = Vec::new();
        for (a, b) in intervals {
            if a > b || a.is_negative() || b > Rational::one() {
                return Err(Error::InvalidInterval(a, b));
            }
            if a < b {
                raw.push((a, b));
            }
        }
        Ok(Self::normalized(raw))
    }

    fn normalized(mut raw: Vec<(Rational, Rational)>) -> Self {
        raw.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(raw.len());
        for (a, b) in raw {
            match merged.last_mut() {
                Some(last) if a <= last.1 => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        Piece { intervals: merged }
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// An empty piece counts as connected.
    pub fn is_connected(&self) -> bool {
        self.intervals.len() <= 1
    }

    pub fn length(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn union(&self, other: &Piece) -> Piece {
        let raw = self
            .intervals
            .iter()
            .chain(other.intervals.iter())
            .cloned()
            .collect();
        Self::normalized(raw)
    }

    pub fn intersection(&self, other: &Piece) -> Piece {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a1, b1) = &self.intervals[i];
            let (a2, b2) = &other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if b1 < b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalized(out)
    }

    /// `[0, 1]` minus this piece.
    pub fn complement(&self) -> Piece {
        let mut out = Vec::new();
        let mut cursor = Rational::zero();
        for (a, b) in &self.intervals {
            if &cursor < a {
                out.push((cursor.clone(), a.clone()));
            }
            cursor = b.clone();
        }
        if cursor < Rational::one() {
            out.push((cursor, Rational::one()));
        }
        Piece { intervals: out }
    }

    pub fn difference(&self, other: &Piece) -> Piece {
        self.intersection(&other.complement())
    }

    pub fn symmetric_difference(&self, other: &Piece) -> Piece {
        self.difference(other).union(&other.difference(self))
    }

    /// Equality up to a set of measure zero.
    pub fn measure_eq(&self, other: &Piece) -> bool {
        self.symmetric_difference(other).length().is_zero()
    }

    /// Every endpoint of every interval, in order.
    pub fn endpoints(&self) -> impl Iterator<Item = &Rational> {
        self.intervals.iter().flat_map(|(a, b)| [a, b])
    }
}

impl Serialize for Piece {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[&Rational; 2]> = self.intervals.iter().map(|(a, b)| [a, b]).collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Piece {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[Rational; 2]> = Vec::deserialize(deserializer)?;
        Piece::from_intervals(pairs.into_iter().map(|[a, b]| (a, b)))
            .map_err(serde::de::Error::custom)
    }
}
