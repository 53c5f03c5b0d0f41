//! Adaptive six-instance driver against two-agent mechanisms.
//!
//! No two-agent mechanism can be both truthful and proportional, even on
//! hungry piecewise-constant valuations. The driver makes that executable:
//! it feeds a black-box mechanism six instances, each built from the
//! mechanism's own earlier outputs, and returns a replay-verified witness of
//! either a proportionality failure or a profitable misreport.
//!
//! Agents are indexed from 0 here; instance `F^k` is `k` in `1..=6`.

use serde::{Deserialize, Serialize};

use crate::allocation::{audit, Allocation, AuditReport};
use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::piece::Piece;
use crate::rational::Rational;
use crate::valuation::PiecewiseConstant;

/// Pieces recorded from the mechanism's outputs on `F^1` and `F^3`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetState {
    pub eps: Rational,
    /// Agent 0's and agent 1's shares of `M(F^1)`.
    pub x1: Option<Piece>,
    pub x2: Option<Piece>,
    /// `M_0(F^3) ∩ X1`, `M_1(F^3) ∩ X1`, `M_0(F^3) ∩ X2`, `M_1(F^3) ∩ X2`.
    pub x11: Option<Piece>,
    pub x12: Option<Piece>,
    pub x21: Option<Piece>,
    pub x22: Option<Piece>,
    /// `instance_outputs[k - 1]` is the mechanism's allocation on `F^k`.
    pub instance_outputs: Vec<Option<Allocation>>,
}

impl GadgetState {
    pub fn new(eps: Rational) -> Self {
        GadgetState {
            eps,
            instance_outputs: vec![None; 6],
            ..Default::default()
        }
    }

    /// The layout of a mechanism that always splits at 1/2 and then at the
    /// quarter points: `X1 = [0, 1/2)`, `X11 = [0, 1/4)`, `X12 = [1/4, 1/2)`,
    /// and so on.
    pub fn canonical(eps: Rational) -> Self {
        let iv =
            |a, b| Some(Piece::interval(Rational::ratio(a, 4), Rational::ratio(b, 4)).unwrap());
        GadgetState {
            x1: iv(0, 2),
            x2: iv(2, 4),
            x11: iv(0, 1),
            x12: iv(1, 2),
            x21: iv(2, 3),
            x22: iv(3, 4),
            ..GadgetState::new(eps)
        }
    }

    fn halves(&self) -> Result<(&Piece, &Piece)> {
        match (&self.x1, &self.x2) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::StateIncomplete("X1/X2")),
        }
    }

    fn quarters(&self) -> Result<[&Piece; 4]> {
        match (&self.x11, &self.x12, &self.x21, &self.x22) {
            (Some(a), Some(b), Some(c), Some(d)) => Ok([a, b, c, d]),
            _ => Err(Error::StateIncomplete("X11/X12/X21/X22")),
        }
    }
}

/// Instance `F^k` (`k` in `1..=6`) as a two-agent profile.
pub fn build_instance(state: &GadgetState, k: usize) -> Result<Vec<PiecewiseConstant>> {
    let eps = &state.eps;
    let one = Rational::one();
    let uniform = PiecewiseConstant::uniform;
    // agent 1 in F^2..F^4: eps on X1, 1 on X2
    let low_first_half = || -> Result<PiecewiseConstant> {
        let (x1, x2) = state.halves()?;
        PiecewiseConstant::from_regions(&[(x1, eps.clone()), (x2, one.clone())])
    };
    // agent 0 in F^4 and F^6
    let peaked = || -> Result<PiecewiseConstant> {
        let [x11, x12, x21, x22] = state.quarters()?;
        PiecewiseConstant::from_regions(&[
            (x11, one.clone()),
            (x12, eps.clone()),
            (x21, eps * Rational::integer(2)),
            (x22, eps.clone()),
        ])
    };
    // agent 1 in F^5 and F^6
    let nearly_flat = || -> Result<PiecewiseConstant> {
        let (_, x2) = state.halves()?;
        let [x11, x12, _, _] = state.quarters()?;
        PiecewiseConstant::from_regions(&[(x11, &one - eps), (x12, eps.clone()), (x2, one.clone())])
    };

    Ok(match k {
        1 => vec![uniform(), uniform()],
        2 => vec![uniform(), low_first_half()?],
        3 => {
            let (x1, x2) = state.halves()?;
            let f =
                PiecewiseConstant::from_regions(&[(x1, Rational::ratio(1, 2)), (x2, one.clone())])?;
            vec![f, low_first_half()?]
        }
        4 => vec![peaked()?, low_first_half()?],
        5 => vec![uniform(), nearly_flat()?],
        6 => vec![peaked()?, nearly_flat()?],
        _ => panic!("instances are numbered 1 to 6, got {k}"),
    })
}

/// All six instances; needs the full state.
pub fn build_instances(state: &GadgetState) -> Result<Vec<Vec<PiecewiseConstant>>> {
    (1..=6).map(|k| build_instance(state, k)).collect()
}

/// Whether `(1 + 2eps)/(8 - 8eps) + eps < 1/4 + eps/4`, the inequality that
/// makes the three constraints on `M(F^6)` jointly unsatisfiable.
pub fn final_inequality_check(eps: &Rational) -> bool {
    let one = Rational::one();
    if eps >= &one {
        return false;
    }
    let two = Rational::integer(2);
    let eight = Rational::integer(8);
    let lhs = (&one + &two * eps) / (&eight - &eight * eps) + eps;
    let rhs = Rational::ratio(1, 4) + eps / Rational::integer(4);
    lhs < rhs
}

/// Driver precondition: `0 < eps < 1/2` and [`final_inequality_check`].
pub fn eps_admissible(eps: &Rational) -> bool {
    eps.is_positive() && eps < &Rational::ratio(1, 2) && final_inequality_check(eps)
}

pub const DEFAULT_EPS: (i64, i64) = (1, 100);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ProportionalityViolation,
    TruthfulnessViolation,
    ForcedStateDiverged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    /// `k` of the instance `F^k` being examined.
    pub instance: usize,
    pub check: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum GadgetCertificate {
    /// `agent` gets less than half its total on `F^instance`.
    Proportionality {
        instance: usize,
        agent: usize,
        profile: Vec<PiecewiseConstant>,
        allocation: Allocation,
        audit: AuditReport,
    },
    /// With true profile `F^true_instance`, `agent` does strictly better by
    /// reporting its density from `F^deviation_instance`.
    Truthfulness {
        true_instance: usize,
        deviation_instance: usize,
        agent: usize,
        true_profile: Vec<PiecewiseConstant>,
        deviation_report: PiecewiseConstant,
        truthful_allocation: Allocation,
        deviating_allocation: Allocation,
        truthful_value: Rational,
        deviating_value: Rational,
    },
    Diagnostic {
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance: usize,
    pub profile: Vec<PiecewiseConstant>,
    pub allocation: Allocation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetReport {
    pub verdict: Verdict,
    pub stage: Stage,
    pub certificate: GadgetCertificate,
    pub eps_used: Rational,
    pub state: GadgetState,
    /// Every instance the driver ran, for independent re-audit.
    pub instances: Vec<InstanceRecord>,
}

fn call<M: Mechanism + ?Sized>(m: &M, profile: &[PiecewiseConstant]) -> Result<Allocation> {
    let a = m.allocate(profile).map_err(|e| match e {
        e @ Error::Mechanism(_) => e,
        other => Error::Mechanism(other.to_string()),
    })?;
    if a.agents() != profile.len() {
        return Err(Error::Mechanism(format!(
            "returned {} shares for {} agents",
            a.agents(),
            profile.len()
        )));
    }
    Ok(a)
}

struct Driver<'m, M: Mechanism + ?Sized> {
    m: &'m M,
    state: GadgetState,
    profiles: Vec<Option<Vec<PiecewiseConstant>>>,
}

#[allow(clippy::large_enum_variant)]
enum Step {
    Continue,
    Done(Verdict, Stage, GadgetCertificate),
}

impl<'m, M: Mechanism + ?Sized> Driver<'m, M> {
    fn output(&self, k: usize) -> &Allocation {
        self.state.instance_outputs[k - 1]
            .as_ref()
            .expect("instance already run")
    }

    fn profile(&self, k: usize) -> &[PiecewiseConstant] {
        self.profiles[k - 1]
            .as_ref()
            .expect("instance already built")
    }

    fn run_instance(&mut self, k: usize) -> Result<()> {
        let profile = build_instance(&self.state, k)?;
        let allocation = call(self.m, &profile)?;
        self.profiles[k - 1] = Some(profile);
        self.state.instance_outputs[k - 1] = Some(allocation);
        Ok(())
    }

    /// Proportionality of `F^k`, re-checked on a fresh call.
    fn proportionality(&self, k: usize) -> Result<Option<GadgetCertificate>> {
        let report = audit(self.profile(k), self.output(k))?;
        let Some(&agent) = report.below_proportional().first() else {
            return Ok(None);
        };
        let fresh = call(self.m, self.profile(k))?;
        let fresh_report = audit(self.profile(k), &fresh)?;
        if !fresh_report.below_proportional().contains(&agent) {
            return Ok(None);
        }
        Ok(Some(GadgetCertificate::Proportionality {
            instance: k,
            agent,
            profile: self.profile(k).to_vec(),
            allocation: fresh,
            audit: fresh_report,
        }))
    }

    /// Does `agent`, truly facing `F^truth`, gain by reporting its density
    /// from `F^lie`? Only meaningful when the two instances agree on the
    /// other agent. Positive answers are confirmed on fresh calls.
    fn misreport(
        &self,
        truth: usize,
        agent: usize,
        lie: usize,
    ) -> Result<Option<GadgetCertificate>> {
        let (tp, lp) = (self.profile(truth), self.profile(lie));
        let other = 1 - agent;
        if tp[other] != lp[other] || tp[agent] == lp[agent] {
            return Ok(None);
        }
        let f = &tp[agent];
        if f.eval(self.output(lie).share(agent)) <= f.eval(self.output(truth).share(agent)) {
            return Ok(None);
        }
        let truthful_allocation = call(self.m, tp)?;
        let deviating_allocation = call(self.m, lp)?;
        let truthful_value = f.eval(truthful_allocation.share(agent));
        let deviating_value = f.eval(deviating_allocation.share(agent));
        if deviating_value <= truthful_value {
            return Ok(None);
        }
        Ok(Some(GadgetCertificate::Truthfulness {
            true_instance: truth,
            deviation_instance: lie,
            agent,
            true_profile: tp.to_vec(),
            deviation_report: lp[agent].clone(),
            truthful_allocation,
            deviating_allocation,
            truthful_value,
            deviating_value,
        }))
    }

    /// Named witnesses first, then every single-agent misreport between the
    /// instances run so far.
    fn find_witness(
        &self,
        upto: usize,
        named: &[(usize, usize, usize)],
    ) -> Result<Option<GadgetCertificate>> {
        for &(truth, agent, lie) in named {
            if let Some(c) = self.misreport(truth, agent, lie)? {
                return Ok(Some(c));
            }
        }
        for truth in 1..=upto {
            for lie in 1..=upto {
                for agent in 0..2 {
                    if truth != lie {
                        if let Some(c) = self.misreport(truth, agent, lie)? {
                            return Ok(Some(c));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn check_forced(
        &self,
        k: usize,
        holds: bool,
        what: &str,
        named: &[(usize, usize, usize)],
    ) -> Result<Step> {
        if holds {
            return Ok(Step::Continue);
        }
        let stage = Stage {
            instance: k,
            check: what.to_string(),
        };
        Ok(match self.find_witness(k, named)? {
            Some(cert) => Step::Done(Verdict::TruthfulnessViolation, stage, cert),
            None => Step::Done(
                Verdict::ForcedStateDiverged,
                stage,
                GadgetCertificate::Diagnostic {
                    message: format!(
                        "{what} failed on F{k} but no misreport witness replayed; \
                         rerun with a smaller eps"
                    ),
                },
            ),
        })
    }

    fn stage_proportional(&self, k: usize, what: &str) -> Result<Step> {
        Ok(match self.proportionality(k)? {
            Some(cert) => Step::Done(
                Verdict::ProportionalityViolation,
                Stage {
                    instance: k,
                    check: what.to_string(),
                },
                cert,
            ),
            None => Step::Continue,
        })
    }

    fn stages(&mut self) -> Result<Step> {
        let quarter = Rational::ratio(1, 4);
        let half = Rational::ratio(1, 2);
        let eps = self.state.eps.clone();

        macro_rules! step {
            ($e:expr) => {
                match $e? {
                    Step::Continue => {}
                    done => return Ok(done),
                }
            };
        }

        // F^1: both uniform, so each agent needs exactly half the length
        self.run_instance(1)?;
        step!(self.stage_proportional(1, "proportionality"));
        let a1 = self.output(1).clone();
        if a1.share(0).length() != half || a1.share(1).length() != half {
            // proportional with uniform valuations forces halves; unreachable
            return Ok(Step::Done(
                Verdict::ForcedStateDiverged,
                Stage {
                    instance: 1,
                    check: "half lengths".into(),
                },
                GadgetCertificate::Diagnostic {
                    message: "M(F1) shares are not halves".into(),
                },
            ));
        }
        self.state.x1 = Some(a1.share(0).clone());
        self.state.x2 = Some(a1.share(1).clone());
        let (x1, x2) = (a1.share(0).clone(), a1.share(1).clone());

        // F^2: forced to (X1, X2)
        self.run_instance(2)?;
        step!(self.stage_proportional(2, "proportionality"));
        let forced = self.output(2).measure_eq(&a1);
        step!(self.check_forced(2, forced, "M(F2) = (X1, X2)", &[(2, 1, 1)]));

        // F^3: every share meets each half in length 1/4
        self.run_instance(3)?;
        step!(self.stage_proportional(3, "proportionality"));
        let a3 = self.output(3).clone();
        let parts = [
            a3.share(0).intersection(&x1),
            a3.share(1).intersection(&x1),
            a3.share(0).intersection(&x2),
            a3.share(1).intersection(&x2),
        ];
        let forced = parts.iter().all(|p| p.length() == quarter);
        step!(self.check_forced(3, forced, "quarter lengths of M(F3)", &[(2, 0, 3)]));
        let [x11, x12, x21, x22] = parts;
        self.state.x11 = Some(x11.clone());
        self.state.x12 = Some(x12.clone());
        self.state.x21 = Some(x21.clone());
        self.state.x22 = Some(x22.clone());

        // F^4: same allocation as F^3
        self.run_instance(4)?;
        step!(self.stage_proportional(4, "proportionality"));
        let forced = self.output(4).measure_eq(&a3);
        step!(self.check_forced(
            4,
            forced,
            "M(F4) = (X11 ∪ X21, X12 ∪ X22)",
            &[(2, 0, 4), (4, 0, 3)]
        ));

        // F^5: back to (X1, X2)
        self.run_instance(5)?;
        step!(self.stage_proportional(5, "proportionality"));
        let forced = self.output(5).measure_eq(&a1);
        step!(self.check_forced(5, forced, "M(F5) = (X1, X2)", &[(5, 1, 2)]));

        // F^6: the three constraints cannot hold together
        self.run_instance(6)?;
        let a6 = self.output(6).clone();
        let bound = &quarter + &eps / Rational::integer(4);
        if a6.share(1).intersection(&x2).length() > bound {
            if let Some(cert) = self.misreport(4, 1, 6)? {
                return Ok(Step::Done(
                    Verdict::TruthfulnessViolation,
                    Stage {
                        instance: 6,
                        check: "|M_1(F6) ∩ X2| <= 1/4 + eps/4".into(),
                    },
                    cert,
                ));
            }
        }
        let f6 = &self.profile(6)[0];
        if f6.eval(a6.share(0)) < bound {
            if let Some(cert) = self.misreport(6, 0, 5)? {
                return Ok(Step::Done(
                    Verdict::TruthfulnessViolation,
                    Stage {
                        instance: 6,
                        check: "v_0(M_0(F6)) >= 1/4 + eps/4".into(),
                    },
                    cert,
                ));
            }
        }
        step!(self.stage_proportional(6, "v_1(M_1(F6)) >= 3/8"));
        step!(self.check_forced(6, false, "constraints on M(F6)", &[(4, 1, 6), (6, 0, 5)]));
        unreachable!("check_forced with holds = false always finishes")
    }
}

/// Runs the six-instance driver against `m`.
pub fn run_gadget<M: Mechanism + ?Sized>(m: &M, eps: &Rational) -> Result<GadgetReport> {
    if !eps.is_positive() {
        return Err(Error::EpsOutOfRange(eps.clone()));
    }
    if !eps_admissible(eps) {
        return Err(Error::EpsTooLarge(eps.clone()));
    }
    let mut driver = Driver {
        m,
        state: GadgetState::new(eps.clone()),
        profiles: vec![None; 6],
    };
    let Step::Done(verdict, stage, certificate) = driver.stages()? else {
        unreachable!("stages always finish")
    };
    let instances = (1..=6)
        .filter(|&k| driver.profiles[k - 1].is_some())
        .map(|k| InstanceRecord {
            instance: k,
            profile: driver.profile(k).to_vec(),
            allocation: driver.output(k).clone(),
        })
        .collect();
    Ok(GadgetReport {
        verdict,
        stage,
        certificate,
        eps_used: eps.clone(),
        state: driver.state,
        instances,
    })
}

/// Replays a report's certificate against `m`; true iff the recorded
/// violation reproduces exactly.
pub fn verify_report<M: Mechanism + ?Sized>(m: &M, report: &GadgetReport) -> Result<bool> {
    match &report.certificate {
        GadgetCertificate::Proportionality {
            agent,
            profile,
            allocation,
            audit: recorded,
            ..
        } => {
            let fresh = call(m, profile)?;
            let fresh_audit = audit(profile, &fresh)?;
            Ok(&fresh == allocation
                && &fresh_audit == recorded
                && fresh_audit.below_proportional().contains(agent))
        }
        GadgetCertificate::Truthfulness {
            agent,
            true_profile,
            deviation_report,
            truthful_value,
            deviating_value,
            ..
        } => {
            let mut lie = true_profile.clone();
            lie[*agent] = deviation_report.clone();
            let f = &true_profile[*agent];
            let t = f.eval(call(m, true_profile)?.share(*agent));
            let d = f.eval(call(m, &lie)?.share(*agent));
            Ok(&t == truthful_value && &d == deviating_value && d > t)
        }
        GadgetCertificate::Diagnostic { .. } => Ok(false),
    }
}
