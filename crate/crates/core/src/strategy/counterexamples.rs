//! Concrete manipulation constructions against the implemented mechanisms.

use crate::error::{Error, Result};
use crate::mechanisms::{rotating_ef, MechanismId};
use crate::rational::Rational;
use crate::valuation::{ell, rr, PiecewiseConstant};

use super::{with_report, Scenario};

fn step(at: Rational, left: Rational, right: Rational) -> PiecewiseConstant {
    PiecewiseConstant::steps(vec![at], vec![left, right]).expect("valid two-step density")
}

/// Opponents under which a uniform agent 0 gains from reporting `ell(n)` to
/// the moving knife: agent 1 values only `[0, 1/n]`, the rest only `[1/n, 1]`.
pub fn movingknife_proof_opponents(n: usize) -> Vec<PiecewiseConstant> {
    let third = Rational::ratio(1, n as i64);
    let mut opponents = vec![step(third.clone(), Rational::one(), Rational::zero())];
    opponents.extend((2..n).map(|_| step(third.clone(), Rational::zero(), Rational::one())));
    opponents
}

/// Uniform agent 0 reporting `ell(n)` to the moving knife. Needs `n >= 3`:
/// with two agents the deviator is either first (same mark) or last (same
/// remainder), so no gain exists.
pub fn movingknife_counterexample(n: usize) -> Result<Scenario> {
    if n < 3 {
        return Err(Error::TooFewAgents { min: 3, got: n });
    }
    Scenario::new(
        MechanismId::MovingKnife,
        0,
        PiecewiseConstant::uniform(),
        ell(n),
        vec![movingknife_proof_opponents(n)],
    )
}

/// Five agents; uniform agent 0 reports `rr(5)` to Even-Paz. Requires
/// `0 < eps < 1/10`.
pub fn evenpaz_counterexample(eps: &Rational) -> Result<Scenario> {
    if !eps.is_positive() || eps >= &Rational::ratio(1, 10) {
        return Err(Error::EpsOutOfRange(eps.clone()));
    }
    let one = Rational::one();
    let zero = Rational::zero();
    let mut opponents = vec![step(eps.clone(), one.clone(), zero.clone())];
    let tail = step(&one - eps, zero, one);
    opponents.extend(std::iter::repeat_n(tail, 3));
    Scenario::new(
        MechanismId::EvenPaz,
        0,
        PiecewiseConstant::uniform(),
        rr(5),
        vec![opponents],
    )
}

/// Agent 0 values `[0, 1/n)` at 1 and the rest at 1/2, and hides the jump by
/// reporting uniform; opponents are uniform.
pub fn simpleef_counterexample(n: usize) -> Result<Scenario> {
    if n < 2 {
        return Err(Error::TooFewAgents { min: 2, got: n });
    }
    let true_f = step(
        Rational::ratio(1, n as i64),
        Rational::one(),
        Rational::ratio(1, 2),
    );
    Scenario::new(
        MechanismId::SimpleEf,
        0,
        true_f,
        PiecewiseConstant::uniform(),
        vec![vec![PiecewiseConstant::uniform(); n - 1]],
    )
}

/// Rotating-EF counterpart of [`simpleef_counterexample`]: agent 0 values
/// `[0, 1/2)` at 1/2 and `[1/2, 1]` at 3/2 and reports uniform; the family is
/// the single tuple built by [`rotatingef_risk_profile`].
pub fn rotatingef_counterexample(n: usize, eps: &Rational) -> Result<Scenario> {
    let true_f = step(
        Rational::ratio(1, 2),
        Rational::ratio(1, 2),
        Rational::ratio(3, 2),
    );
    let deviation = PiecewiseConstant::uniform();
    let opponents = rotatingef_risk_profile(&true_f, &deviation, n, eps)?;
    Scenario::new(
        MechanismId::RotatingEf,
        0,
        true_f,
        deviation,
        vec![opponents],
    )
}

/// Opponents that punish agent 0 under rotating EF for dropping a true
/// discontinuity `t` from its report.
///
/// The opponents' breakpoints include every true and reported breakpoint
/// except `t`, plus the ends of a window of length `n * eps` around `t` that
/// becomes a single cell. Filler breakpoints left of the window fix the cell
/// index so that agent 0's rotating slot in the window is the slice on the
/// low-density side of `t`. Everywhere else agent 0's true density is
/// constant per cell, so it gets exactly `1/n` there and strictly less in the
/// window. The result is replayed before being returned.
pub fn rotatingef_risk_profile(
    true_f: &PiecewiseConstant,
    deviation_f: &PiecewiseConstant,
    n: usize,
    eps: &Rational,
) -> Result<Vec<PiecewiseConstant>> {
    if n < 2 {
        return Err(Error::TooFewAgents { min: 2, got: n });
    }
    if !eps.is_positive() {
        return Err(Error::EpsOutOfRange(eps.clone()));
    }
    let reported = deviation_f.discontinuities();
    let candidates: Vec<Rational> = true_f
        .discontinuities()
        .into_iter()
        .filter(|t| !reported.contains(t))
        .collect();
    if candidates.is_empty() {
        return Err(Error::NotApplicable(
            "the report keeps every true discontinuity, so each cell stays uniform for the agent"
                .into(),
        ));
    }

    let mut last_err = Error::EpsTooLarge(eps.clone());
    for t in &candidates {
        match punish_at(true_f, deviation_f, n, eps, t) {
            Ok(opponents) => return Ok(opponents),
            Err(e @ Error::EpsTooLarge(_)) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

fn punish_at(
    true_f: &PiecewiseConstant,
    deviation_f: &PiecewiseConstant,
    n: usize,
    eps: &Rational,
    t: &Rational,
) -> Result<Vec<PiecewiseConstant>> {
    let n_r = Rational::integer(n as i64);
    let k = true_f
        .breakpoints()
        .iter()
        .position(|b| b == t)
        .expect("t is a breakpoint");
    let low_left = true_f.densities()[k - 1] < true_f.densities()[k];

    // window cell and the cell index agent 0 needs it to have
    let (lo, hi, target) = if low_left {
        (t - eps, t + eps * (&n_r - Rational::one()), 0)
    } else {
        (t - eps * (&n_r - Rational::one()), t + eps, n - 1)
    };
    if !lo.is_positive() || hi >= Rational::one() {
        return Err(Error::EpsTooLarge(eps.clone()));
    }

    let mut required: Vec<Rational> = true_f
        .discontinuities()
        .into_iter()
        .chain(deviation_f.discontinuities())
        .filter(|x| x != t)
        .collect();
    if required.iter().any(|x| x >= &lo && x <= &hi) {
        return Err(Error::EpsTooLarge(eps.clone()));
    }
    required.push(lo.clone());
    required.push(hi);
    required.sort();
    required.dedup();

    let before = required.iter().filter(|x| *x < &lo).count();
    // cells are indexed from 0 at [0, first point); the window is the cell
    // starting at its (before + 1)-th point
    let window_index = before + 1;
    let fillers = (target + n - window_index % n) % n;
    let gap = required[0].clone();
    for k in 1..=fillers {
        required.push(&gap * Rational::ratio(k as i64, fillers as i64 + 1));
    }
    required.sort();

    let densities = (0..=required.len())
        .map(|k| {
            if k % 2 == 0 {
                Rational::one()
            } else {
                Rational::integer(2)
            }
        })
        .collect();
    let marker = PiecewiseConstant::steps(required, densities)?;
    let mut opponents = vec![marker];
    opponents.extend((2..n).map(|_| PiecewiseConstant::uniform()));

    let allocation = rotating_ef(&with_report(0, deviation_f, &opponents))?;
    let value = true_f.eval(allocation.share(0));
    if value * n_r >= true_f.total() {
        return Err(Error::ConstructionFailed(format!(
            "replay did not push agent 0 below its proportional value at t = {t}"
        )));
    }
    Ok(opponents)
}
