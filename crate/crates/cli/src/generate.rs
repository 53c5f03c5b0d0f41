//! Named instances for `cakecut gen`.

use cakecut::gadget::{build_instance, GadgetState};
use cakecut::strategy::{
    evenpaz_counterexample, movingknife_counterexample, rotatingef_counterexample,
    simpleef_counterexample, with_report, Scenario,
};
use cakecut::{ell, rr, Error, ProfileFile, Rational, Result};
use serde::Serialize;
/// Pretty JSON, newline-terminated.
pub fn json<T: Serialize>(v: &T) -> String {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    text
}

pub const NAMES: &[&str] = &[
    "F1",
    "F2",
    "F3",
    "F4",
    "F5",
    "F6",
    "ell",
    "rr",
    "movingknife",
    "evenpaz",
    "simpleef",
    "rotatingef",
];

pub struct Params {
    pub n: Option<usize>,
    pub eps: Option<Rational>,
    pub deviating: bool,
}

/// `None` for an unknown name.
pub fn generate(name: &str, p: &Params) -> Option<Result<String>> {
    let eps = |default: (i64, i64)| {
        p.eps
            .clone()
            .unwrap_or_else(|| Rational::ratio(default.0, default.1))
    };
    let scenario = |s: Result<Scenario>| -> Result<String> {
        let s = s?;
        let report = if p.deviating {
            &s.deviation_f
        } else {
            &s.true_f
        };
        let profile = with_report(s.agent, report, &s.opponent_profiles[0]);
        Ok(json(&ProfileFile::new(profile)))
    };
    Some(match name {
        "F1" | "F2" | "F3" | "F4" | "F5" | "F6" => {
            let k = name[1..].parse().expect("digit");
            let state = GadgetState::canonical(eps(cakecut::gadget::DEFAULT_EPS));
            build_instance(&state, k).map(|f| json(&ProfileFile::new(f)))
        }
        "ell" | "rr" => match p.n.unwrap_or(2) {
            0 => Err(Error::TooFewAgents { min: 1, got: 0 }),
            n if name == "ell" => Ok(json(&ell(n))),
            n => Ok(json(&rr(n))),
        },
        "movingknife" => scenario(movingknife_counterexample(p.n.unwrap_or(3))),
        "evenpaz" => scenario(evenpaz_counterexample(&eps((1, 20)))),
        "simpleef" => scenario(simpleef_counterexample(p.n.unwrap_or(2))),
        "rotatingef" => scenario(rotatingef_counterexample(p.n.unwrap_or(2), &eps((1, 100)))),
        _ => return None,
    })
}
