use std::time::Duration;

use anyhow::{bail, Result};
use clap::ValueEnum;
use euclid_core::minkowski::{recognize_minkowski, Budget};
use euclid_core::smt::{recognize_with_solver, EncodeMode};
use euclid_core::{recognize_1d, Metric, Profile, ProfileKind, RecognitionResult, UnknownReason, VerifyMode};
use serde::Serialize;

use crate::config::Settings;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Strict for strict profiles, weak for weak ones, de for dichotomous.
    Auto,
    Strict,
    Weak,
    /// Dichotomous: each voter has its own approval radius.
    De,
    /// Dichotomous: every approval radius is 1.
    Due,
}

impl Mode {
    pub fn encode_mode(self, kind: ProfileKind) -> EncodeMode {
        match self {
            Mode::Auto => EncodeMode::for_kind(kind),
            Mode::Strict => EncodeMode::Strict,
            Mode::Weak => EncodeMode::Weak,
            Mode::De => EncodeMode::De,
            Mode::Due => EncodeMode::Due,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Query {
    pub d: usize,
    #[serde(serialize_with = "display")]
    pub metric: Metric,
    pub mode: Mode,
}

fn display<S: serde::Serializer>(m: &Metric, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Line,
    Minkowski,
    Solver,
}

pub struct Answer {
    pub result: RecognitionResult,
    pub route: Route,
    /// How the certificate is to be checked.
    pub verify: VerifyMode,
}

pub fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse()
}

pub fn route(profile: &Profile, query: &Query) -> Route {
    match query.metric {
        Metric::L1 | Metric::Linf => Route::Minkowski,
        Metric::L2 if query.d == 1 && profile.kind() == ProfileKind::Strict && matches!(query.mode, Mode::Auto | Mode::Strict) => {
            Route::Line
        }
        Metric::L2 => Route::Solver,
    }
}

pub fn run(profile: &Profile, query: &Query, settings: &Settings, timeout: Duration) -> Result<Answer> {
    if query.d == 0 {
        bail!("dimension must be at least 1");
    }
    let route = route(profile, query);
    let mut verify = VerifyMode::Ordinal;
    let result = match route {
        Route::Line => recognize_1d(profile)?,
        Route::Minkowski => {
            if query.mode != Mode::Auto && query.mode != Mode::Strict {
                bail!("{} recognition supports strict profiles only", query.metric);
            }
            recognize_minkowski(profile, query.d, query.metric, Budget { lp_solves: settings.lp_budget })?
        }
        Route::Solver => {
            let mode = query.mode.encode_mode(profile.kind());
            verify = mode.verify_mode();
            match &settings.solver {
                Some(config) => recognize_with_solver(profile, query.d, mode, config, timeout)?,
                None => RecognitionResult::Unknown(UnknownReason::SolverGaveUp(
                    "no solver configured (use --solver or EUCLID_SOLVER_CMD)".into(),
                )),
            }
        }
    };
    Ok(Answer { result, route, verify })
}

pub fn exit_code(result: &RecognitionResult) -> u8 {
    match result {
        RecognitionResult::Yes(_) => 0,
        RecognitionResult::No(_) => 1,
        RecognitionResult::Unknown(_) => 2,
    }
}

pub fn verdict_word(result: &RecognitionResult) -> &'static str {
    match result {
        RecognitionResult::Yes(_) => "yes",
        RecognitionResult::No(_) => "no",
        RecognitionResult::Unknown(_) => "unknown",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use euclid_core::generators::condorcet_cycle;

    #[test]
    fn routing() {
        let p = condorcet_cycle(3);
        let q = |d, metric, mode| Query { d, metric, mode };
        assert_eq!(route(&p, &q(1, Metric::L2, Mode::Auto)), Route::Line);
        assert_eq!(route(&p, &q(2, Metric::L2, Mode::Auto)), Route::Solver);
        assert_eq!(route(&p, &q(1, Metric::L2, Mode::Weak)), Route::Solver);
        assert_eq!(route(&p, &q(3, Metric::Linf, Mode::Auto)), Route::Minkowski);
        let weak = p.clone().into_weak();
        assert_eq!(route(&weak, &q(1, Metric::L2, Mode::Auto)), Route::Solver);
    }

    #[test]
    fn missing_solver_is_unknown() {
        let settings = Settings { solver: None, timeout: 1, lp_budget: 10 };
        let q = Query { d: 2, metric: Metric::L2, mode: Mode::Auto };
        let a = run(&condorcet_cycle(3), &q, &settings, Duration::from_secs(1)).unwrap();
        assert_eq!(exit_code(&a.result), 2);
    }
}
