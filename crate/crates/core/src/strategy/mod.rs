//! Misreporting scenarios and their classification.
//!
//! Truthfulness notions quantify over every possible opponent profile. Here
//! they are evaluated over an explicit finite family: a violation found in
//! the family is a genuine counterexample, while "deterred" or "dominated"
//! verdicts are only evidence about the family that was supplied.

mod counterexamples;
mod sampling;
mod search;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

pub use counterexamples::{
    evenpaz_counterexample, movingknife_counterexample, movingknife_proof_opponents,
    rotatingef_counterexample, rotatingef_risk_profile, simpleef_counterexample,
};
pub use sampling::{sample_hungry_density, sample_opponent_profiles, SAMPLE_GRID, SAMPLE_LEVELS};
pub use search::{brute_force_best_response, enumerate_deviations, BestResponse, DeviationGrid};

use crate::error::{Error, Result};
use crate::mechanisms::MechanismId;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

/// Agent `agent` with density `true_f` considers reporting `deviation_f`
/// against each opponent tuple in `opponent_profiles`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub mechanism: MechanismId,
    pub agent: usize,
    pub true_f: PiecewiseConstant,
    pub deviation_f: PiecewiseConstant,
    pub opponent_profiles: Vec<Vec<PiecewiseConstant>>,
}

impl Scenario {
    pub fn new(
        mechanism: MechanismId,
        agent: usize,
        true_f: PiecewiseConstant,
        deviation_f: PiecewiseConstant,
        opponent_profiles: Vec<Vec<PiecewiseConstant>>,
    ) -> Result<Self> {
        if true_f == deviation_f {
            return Err(Error::IdenticalReport);
        }
        let Some(first) = opponent_profiles.first() else {
            return Err(Error::ProfileMismatch("opponent family is empty".into()));
        };
        let others = first.len();
        if opponent_profiles.iter().any(|o| o.len() != others) {
            return Err(Error::ProfileMismatch(
                "opponent tuples differ in length".into(),
            ));
        }
        if agent > others {
            return Err(Error::ProfileMismatch(format!(
                "agent index {agent} out of range for {} agents",
                others + 1
            )));
        }
        Ok(Scenario {
            mechanism,
            agent,
            true_f,
            deviation_f,
            opponent_profiles,
        })
    }

    pub fn agents(&self) -> usize {
        self.opponent_profiles[0].len() + 1
    }

    /// Appends opponent tuples to the family.
    pub fn extend_family(&mut self, more: Vec<Vec<PiecewiseConstant>>) -> Result<()> {
        let others = self.agents() - 1;
        if more.iter().any(|o| o.len() != others) {
            return Err(Error::ProfileMismatch(
                "opponent tuples differ in length".into(),
            ));
        }
        self.opponent_profiles.extend(more);
        Ok(())
    }

    /// Utility under `true_f` when reporting `report` against `opponents`.
    pub fn utility(
        &self,
        report: &PiecewiseConstant,
        opponents: &[PiecewiseConstant],
    ) -> Result<Rational> {
        utility(self.mechanism, self.agent, &self.true_f, report, opponents)
    }

    pub fn proportional_value(&self) -> Rational {
        self.true_f.total() / Rational::integer(self.agents() as i64)
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            mechanism: MechanismId,
            agent: usize,
            true_f: PiecewiseConstant,
            deviation_f: PiecewiseConstant,
            opponent_profiles: Vec<Vec<PiecewiseConstant>>,
        }
        let r = Raw::deserialize(deserializer)?;
        Scenario::new(
            r.mechanism,
            r.agent,
            r.true_f,
            r.deviation_f,
            r.opponent_profiles,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// The full reported profile with `report` placed at index `agent`.
pub fn with_report(
    agent: usize,
    report: &PiecewiseConstant,
    opponents: &[PiecewiseConstant],
) -> Vec<PiecewiseConstant> {
    let mut profile = Vec::with_capacity(opponents.len() + 1);
    profile.extend_from_slice(&opponents[..agent]);
    profile.push(report.clone());
    profile.extend_from_slice(&opponents[agent..]);
    profile
}

/// Value, under `true_f`, of what `agent` receives after reporting `report`.
pub fn utility(
    mechanism: MechanismId,
    agent: usize,
    true_f: &PiecewiseConstant,
    report: &PiecewiseConstant,
    opponents: &[PiecewiseConstant],
) -> Result<Rational> {
    let allocation = mechanism.run(&with_report(agent, report, opponents))?;
    Ok(true_f.eval(allocation.share(agent)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    /// The deviation never beats the truth on the family.
    Dominated,
    /// Some profile leaves the deviator below its proportional value.
    #[serde(rename = "RAT_Deterred")]
    RatDeterred,
    /// No profile drops below proportional, but some profile is worse than
    /// the truthful outcome.
    #[serde(rename = "WRAT_Deterred_Only")]
    WratDeterredOnly,
    /// Never worse than the truth and strictly better somewhere.
    #[serde(rename = "WRAT_Violation")]
    WratViolation,
}

/// One opponent tuple together with the deviator's two utilities on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub profile_index: usize,
    pub opponents: Vec<PiecewiseConstant>,
    pub truthful_value: Rational,
    pub deviating_value: Rational,
}

impl Witness {
    pub fn gain(&self) -> Rational {
        &self.deviating_value - &self.truthful_value
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationCertificate {
    pub scenario: Scenario,
    pub classification: Classification,
    pub proportional_value: Rational,
    /// First profile (in family order) where deviating strictly gains.
    pub gain_profile: Option<Witness>,
    /// First profile where the deviation falls below the proportional value.
    pub risk_profile: Option<Witness>,
    /// First profile where the deviation does strictly worse than the truth.
    pub worse_profile: Option<Witness>,
}

impl DeviationCertificate {
    pub fn gain(&self) -> Option<Rational> {
        self.gain_profile.as_ref().map(Witness::gain)
    }
}

pub fn classify_deviation(scenario: &Scenario) -> Result<DeviationCertificate> {
    let outcomes = scenario
        .opponent_profiles
        .par_iter()
        .map(|opp| {
            Ok((
                scenario.utility(&scenario.true_f, opp)?,
                scenario.utility(&scenario.deviation_f, opp)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let threshold = scenario.proportional_value();
    let witness = |pred: &dyn Fn(&Rational, &Rational) -> bool| {
        outcomes
            .iter()
            .enumerate()
            .find(|(_, (t, d))| pred(t, d))
            .map(|(k, (t, d))| Witness {
                profile_index: k,
                opponents: scenario.opponent_profiles[k].clone(),
                truthful_value: t.clone(),
                deviating_value: d.clone(),
            })
    };
    let gain_profile = witness(&|t, d| d > t);
    let risk_profile = witness(&|_, d| d < &threshold);
    let worse_profile = witness(&|t, d| d < t);

    let classification = if risk_profile.is_some() {
        Classification::RatDeterred
    } else if gain_profile.is_none() {
        Classification::Dominated
    } else if worse_profile.is_some() {
        Classification::WratDeterredOnly
    } else {
        Classification::WratViolation
    };

    Ok(DeviationCertificate {
        scenario: scenario.clone(),
        classification,
        proportional_value: threshold,
        gain_profile,
        risk_profile,
        worse_profile,
    })
}

/// Re-runs the mechanism on every recorded witness and re-derives the
/// classification; true iff everything matches what the certificate says.
pub fn verify_certificate(cert: &DeviationCertificate) -> Result<bool> {
    let s = &cert.scenario;
    for w in [&cert.gain_profile, &cert.risk_profile, &cert.worse_profile]
        .into_iter()
        .flatten()
    {
        if s.opponent_profiles.get(w.profile_index) != Some(&w.opponents) {
            return Ok(false);
        }
        if s.utility(&s.true_f, &w.opponents)? != w.truthful_value
            || s.utility(&s.deviation_f, &w.opponents)? != w.deviating_value
        {
            return Ok(false);
        }
    }
    let fresh = classify_deviation(s)?;
    Ok(&fresh == cert)
}
