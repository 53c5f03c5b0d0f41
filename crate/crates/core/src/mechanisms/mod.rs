//! Deterministic cake-cutting mechanisms.
//!
//! Every mechanism is a pure function from a reported profile (one density
//! per agent, agents indexed from 0) to an [`Allocation`]. All argmin and
//! median ties are broken towards the lowest agent index.

mod connected;
mod cut_and_choose;
mod even_paz;
mod exact;
mod moving_knife;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use connected::{connected_prop, connected_prop_traced, ConnectedPropTrace};
pub use cut_and_choose::cut_and_choose;
pub use even_paz::{even_paz, even_paz_traced, EvenPazSplit};
pub use exact::{rotating_ef, simple_ef};
pub use moving_knife::{moving_knife, moving_knife_traced, MovingKnifeTrace};

use crate::allocation::{Allocation, AuditReport};
use crate::error::{Error, Result};
use crate::valuation::PiecewiseConstant;

/// Anything that maps a reported profile to an allocation.
pub trait Mechanism: Sync {
    fn allocate(&self, profile: &[PiecewiseConstant]) -> Result<Allocation>;
}

impl<F> Mechanism for F
where
    F: Fn(&[PiecewiseConstant]) -> Result<Allocation> + Sync,
{
    fn allocate(&self, profile: &[PiecewiseConstant]) -> Result<Allocation> {
        self(profile)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismId {
    SimpleEf,
    RotatingEf,
    ConnectedProp,
    #[serde(rename = "connected_prop_open")]
    ConnectedPropNonEntire,
    MovingKnife,
    EvenPaz,
    CutAndChoose,
}

impl MechanismId {
    pub const ALL: [MechanismId; 7] = [
        MechanismId::SimpleEf,
        MechanismId::RotatingEf,
        MechanismId::ConnectedProp,
        MechanismId::ConnectedPropNonEntire,
        MechanismId::MovingKnife,
        MechanismId::EvenPaz,
        MechanismId::CutAndChoose,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MechanismId::SimpleEf => "simple_ef",
            MechanismId::RotatingEf => "rotating_ef",
            MechanismId::ConnectedProp => "connected_prop",
            MechanismId::ConnectedPropNonEntire => "connected_prop_open",
            MechanismId::MovingKnife => "moving_knife",
            MechanismId::EvenPaz => "even_paz",
            MechanismId::CutAndChoose => "cut_and_choose",
        }
    }

    pub fn run(self, profile: &[PiecewiseConstant]) -> Result<Allocation> {
        match self {
            MechanismId::SimpleEf => simple_ef(profile),
            MechanismId::RotatingEf => rotating_ef(profile),
            MechanismId::ConnectedProp => connected_prop(profile, true),
            MechanismId::ConnectedPropNonEntire => connected_prop(profile, false),
            MechanismId::MovingKnife => moving_knife(profile),
            MechanismId::EvenPaz => even_paz(profile),
            MechanismId::CutAndChoose => cut_and_choose(profile),
        }
    }

    /// Whether an audit shows every property this mechanism promises.
    pub fn guarantees_hold(self, report: &AuditReport) -> bool {
        match self {
            MechanismId::SimpleEf | MechanismId::RotatingEf => {
                report.exact && report.envy_free && report.entire
            }
            MechanismId::ConnectedProp | MechanismId::MovingKnife | MechanismId::EvenPaz => {
                report.proportional && report.connected && report.entire
            }
            MechanismId::ConnectedPropNonEntire => report.proportional && report.connected,
            MechanismId::CutAndChoose => {
                report.proportional && report.envy_free && report.connected && report.entire
            }
        }
    }
}

impl Mechanism for MechanismId {
    fn allocate(&self, profile: &[PiecewiseConstant]) -> Result<Allocation> {
        self.run(profile)
    }
}

impl fmt::Display for MechanismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MechanismId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MechanismId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::UnknownMechanism(s.to_string()))
    }
}

fn require_agents(profile: &[PiecewiseConstant], min: usize) -> Result<()> {
    if profile.len() < min {
        return Err(Error::TooFewAgents {
            min,
            got: profile.len(),
        });
    }
    Ok(())
}

fn require_positive_totals(profile: &[PiecewiseConstant]) -> Result<()> {
    match profile.iter().position(|f| f.total().is_zero()) {
        Some(agent) => Err(Error::ZeroTotalValue { agent }),
        None => Ok(()),
    }
}
