//! Exact-arithmetic cake cutting.
//!
//! The cake is `[0, 1]`; agents report piecewise-constant value densities and
//! mechanisms return allocations of finite interval unions. Everything is a
//! [`Rational`], so fairness and manipulation claims are checked with exact
//! equalities rather than tolerances.
//!
//! - [`valuation`]: densities, integration, cut queries, `ell`/`rr`.
//! - [`allocation`]: pieces, allocations and the fairness audit.
//! - [`mechanisms`]: the deterministic procedures.
//! - [`strategy`]: deviation scenarios, classification and counterexamples.
//! - [`gadget`]: adaptive driver forcing a 2-agent proportional mechanism
//!   into a truthfulness violation.

#![allow(clippy::result_large_err)]

pub mod allocation;
pub mod error;
pub mod gadget;
pub mod mechanisms;
pub mod piece;
pub mod profile;
pub mod rational;
pub mod strategy;
pub mod valuation;

pub use allocation::{audit, Allocation, AuditReport};
pub use error::{Error, Result};
pub use gadget::{run_gadget, GadgetReport, Verdict};
pub use mechanisms::{Mechanism, MechanismId};
pub use piece::Piece;
pub use profile::ProfileFile;
pub use rational::Rational;
pub use valuation::{ell, rr, PiecewiseConstant};
