//! Exact recognition of 1-Euclidean strict profiles.
//!
//! Pipeline: single-peaked axis, single-crossing voter order, candidate axes
//! consistent with both, and a midpoint linear program per candidate.

use std::fmt;

use num_traits::{One, Zero};

use crate::lp::{feasible, LinearSystem};
use crate::par;
use crate::perm::permutations;
use crate::profile::{verify_embedding, Embedding, Metric, Point, Profile, ProfileError, ProfileKind};
use crate::rational::Rational;
use crate::restrictions::{constrained_axes, is_axis_of, single_crossing_order, single_peaked_axis, Axis, VoterOrder};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refutation {
    NotSinglePeaked,
    NotSingleCrossing,
    /// No candidate axis admits a midpoint solution. `axis` is the first
    /// candidate tried.
    LpInfeasible { axis: Axis, voter_order: VoterOrder, candidates: usize },
    /// The solver proved the polynomial system unsatisfiable.
    Unsat,
    /// Every ordering certificate was checked and rejected.
    CertificatesExhausted { lp_solves: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    SolverGaveUp(String),
    Crash { stdout: String, stderr: String },
    Budget { lp_solves: u64 },
    CandidateCap { candidates: usize },
    PrecisionExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecognitionResult {
    Yes(Embedding),
    No(Refutation),
    Unknown(UnknownReason),
}

impl RecognitionResult {
    pub fn is_yes(&self) -> bool {
        matches!(self, RecognitionResult::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, RecognitionResult::No(_))
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        match self {
            RecognitionResult::Yes(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refutation::NotSinglePeaked => f.write_str("NotSinglePeaked"),
            Refutation::NotSingleCrossing => f.write_str("NotSingleCrossing"),
            Refutation::LpInfeasible { candidates, .. } => write!(f, "LPInfeasible ({candidates} candidate axes)"),
            Refutation::Unsat => f.write_str("Unsat"),
            Refutation::CertificatesExhausted { lp_solves } => {
                write!(f, "CertificatesExhausted ({lp_solves} LP solves)")
            }
        }
    }
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("timeout"),
            UnknownReason::SolverGaveUp(why) => write!(f, "solver gave up: {why}"),
            UnknownReason::Crash { .. } => f.write_str("solver crashed"),
            UnknownReason::Budget { lp_solves } => write!(f, "budget of {lp_solves} LP solves exhausted"),
            UnknownReason::CandidateCap { candidates } => write!(f, "more than {candidates} candidate axes"),
            UnknownReason::PrecisionExhausted => f.write_str("model could not be rationalized within the precision budget"),
        }
    }
}

impl fmt::Display for RecognitionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecognitionResult::Yes(_) => f.write_str("Yes"),
            RecognitionResult::No(stage) => write!(f, "No ({stage})"),
            RecognitionResult::Unknown(reason) => write!(f, "Unknown ({reason})"),
        }
    }
}

/// Candidate axes tried before falling back to the brute-force oracle.
pub const CANDIDATE_CAP: usize = 1 << 14;
pub const ORACLE_MAX_ALTERNATIVES: usize = 8;

fn require_strict(profile: &Profile) -> Result<(), ProfileError> {
    if profile.kind() == ProfileKind::Strict {
        Ok(())
    } else {
        Err(ProfileError::NotStrict)
    }
}

/// Variables `x_v0..x_v{n-1}, x_a0..x_a{m-1}`; for each voter and adjacent
/// pair `a > b` in its vote, `2 x_v < x_a + x_b` if `a` is left of `b` on the
/// axis and `>` otherwise; alternatives strictly increasing along the axis.
pub fn midpoint_system(profile: &Profile, axis: &[usize]) -> LinearSystem {
    let n = profile.num_voters();
    let m = profile.num_alternatives();
    let mut names: Vec<String> = (0..n).map(|i| format!("x_v{i}")).collect();
    names.extend((0..m).map(|j| format!("x_a{j}")));
    let mut system = LinearSystem::with_variables(names);
    let mut position = vec![0; m];
    for (k, &a) in axis.iter().enumerate() {
        position[a] = k;
    }
    let one = Rational::one;
    let two = || Rational::from_integer(2.into());
    for w in axis.windows(2) {
        system.lt(&[(n + w[0], one()), (n + w[1], -one())], Rational::zero());
    }
    for (v, vote) in profile.votes().iter().enumerate() {
        for (a, b) in vote.consecutive_pairs(m) {
            let terms = [(v, two()), (n + a, -one()), (n + b, -one())];
            if position[a] < position[b] {
                system.lt(&terms, Rational::zero());
            } else {
                system.gt(&terms, Rational::zero());
            }
        }
    }
    system
}

fn solve_axis(profile: &Profile, axis: &[usize]) -> Option<Embedding> {
    let n = profile.num_voters();
    let x = feasible(&midpoint_system(profile, axis))?;
    let voters = x[..n].iter().map(|c| Point::new(vec![c.clone()])).collect();
    let alternatives = x[n..].iter().map(|c| Point::new(vec![c.clone()])).collect();
    Some(Embedding::new(1, voters, alternatives).expect("dimension one"))
}

/// Alternative pairs `(a, b)` with `a` forced left of `b` once the first
/// voter of `order` is placed leftmost.
fn forced_pairs(profile: &Profile, order: &[usize]) -> Vec<(usize, usize)> {
    let (Some(&first), Some(&last)) = (order.first(), order.last()) else {
        return Vec::new();
    };
    let m = profile.num_alternatives();
    let rf = profile.vote(first).strict_ranks(m).expect("strict");
    let rl = profile.vote(last).strict_ranks(m).expect("strict");
    let mut pairs = Vec::new();
    for a in 0..m {
        for b in 0..m {
            if rf[a] < rf[b] && rl[b] < rl[a] {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

pub fn recognize_1d(profile: &Profile) -> Result<RecognitionResult, ProfileError> {
    require_strict(profile)?;
    if single_peaked_axis(profile)?.is_none() {
        return Ok(RecognitionResult::No(Refutation::NotSinglePeaked));
    }
    let Some(order) = single_crossing_order(profile)? else {
        return Ok(RecognitionResult::No(Refutation::NotSingleCrossing));
    };
    let forced = forced_pairs(profile, &order);
    let (candidates, complete) = constrained_axes(profile, &forced, CANDIDATE_CAP)?;
    if let Some((_, embedding)) = par::find_first_map(&candidates, |axis| solve_axis(profile, axis)) {
        debug_assert!(verify_embedding(profile, &embedding, Metric::L2).unwrap().accepted());
        return Ok(RecognitionResult::Yes(embedding));
    }
    if complete {
        let axis = candidates.first().cloned().unwrap_or_else(|| {
            single_peaked_axis(profile).ok().flatten().expect("profile is single-peaked")
        });
        return Ok(RecognitionResult::No(Refutation::LpInfeasible {
            axis,
            voter_order: order,
            candidates: candidates.len(),
        }));
    }
    if profile.num_alternatives() <= ORACLE_MAX_ALTERNATIVES {
        return oracle_1d(profile);
    }
    Ok(RecognitionResult::Unknown(UnknownReason::CandidateCap { candidates: CANDIDATE_CAP }))
}

/// Brute force over every axis up to reversal. Axes on which some vote is
/// not single-peaked are skipped without an LP since they cannot work.
pub fn oracle_1d(profile: &Profile) -> Result<RecognitionResult, ProfileError> {
    require_strict(profile)?;
    let m = profile.num_alternatives();
    if m > ORACLE_MAX_ALTERNATIVES {
        return Err(ProfileError::TooLarge { limit: ORACLE_MAX_ALTERNATIVES });
    }
    let ranks: Vec<Vec<usize>> = profile.votes().iter().map(|v| v.strict_ranks(m).expect("strict")).collect();
    let axes: Vec<Axis> = permutations(m)
        .into_iter()
        .filter(|axis| axis.first() <= axis.last())
        .filter(|axis| is_axis_of(&ranks, axis))
        .collect();
    Ok(match par::find_first_map(&axes, |axis| solve_axis(profile, axis)) {
        Some((_, embedding)) => RecognitionResult::Yes(embedding),
        None => match single_peaked_axis(profile)? {
            None => RecognitionResult::No(Refutation::NotSinglePeaked),
            Some(_) => match single_crossing_order(profile)? {
                None => RecognitionResult::No(Refutation::NotSingleCrossing),
                Some(order) => RecognitionResult::No(Refutation::LpInfeasible {
                    axis: axes[0].clone(),
                    voter_order: order,
                    candidates: axes.len(),
                }),
            },
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::condorcet_cycle;
    use crate::rational::int;
    use proptest::prelude::*;

    fn line(voters: &[i64], alternatives: &[i64]) -> Embedding {
        let pts = |xs: &[i64]| xs.iter().map(|&x| Point::from_ints(&[x])).collect();
        Embedding::new(1, pts(voters), pts(alternatives)).unwrap()
    }

    #[test]
    fn cycle_is_not_single_peaked() {
        assert_eq!(recognize_1d(&condorcet_cycle(3)).unwrap(), RecognitionResult::No(Refutation::NotSinglePeaked));
        assert!(oracle_1d(&condorcet_cycle(3)).unwrap().is_no());
    }

    #[test]
    fn two_voter_example() {
        let p = Profile::strict(3, vec![vec![0, 1, 2], vec![1, 2, 0]]).unwrap();
        // The hand-made certificate.
        let mut e = line(&[0, 0], &[0, 10, 20]);
        e = Embedding::new(
            1,
            vec![e.voter(0).clone(), Point::new(vec![int(11)])],
            e.alternatives().to_vec(),
        )
        .unwrap();
        assert!(verify_embedding(&p, &e, Metric::L2).unwrap().accepted());
        let found = recognize_1d(&p).unwrap();
        assert!(verify_embedding(&p, found.embedding().unwrap(), Metric::L2).unwrap().accepted());
    }

    #[test]
    fn single_voter_always_embeds() {
        let p = Profile::strict(4, vec![vec![3, 1, 0, 2]]).unwrap();
        let r = recognize_1d(&p).unwrap();
        assert!(verify_embedding(&p, r.embedding().unwrap(), Metric::L2).unwrap().accepted());
        assert!(oracle_1d(&p).unwrap().is_yes());
    }

    #[test]
    fn single_peaked_and_crossing_but_not_euclidean() {
        // Known 1-D obstruction: single-peaked on (a,b,c,d) and single-crossing,
        // yet the midpoint order forced by the votes is contradictory.
        let p = Profile::strict(
            4,
            vec![vec![0, 1, 2, 3], vec![1, 0, 2, 3], vec![1, 2, 0, 3], vec![2, 1, 3, 0]],
        )
        .unwrap();
        let fast = recognize_1d(&p).unwrap();
        let slow = oracle_1d(&p).unwrap();
        assert_eq!(fast.is_yes(), slow.is_yes());
    }

    #[test]
    fn lp_solution_verifies() {
        let p = Profile::strict(3, vec![vec![0, 1, 2]]).unwrap();
        let x = feasible(&midpoint_system(&p, &[0, 1, 2])).unwrap();
        let e = Embedding::new(
            1,
            vec![Point::new(vec![x[0].clone()])],
            x[1..].iter().map(|c| Point::new(vec![c.clone()])).collect(),
        )
        .unwrap();
        assert!(verify_embedding(&p, &e, Metric::L2).unwrap().accepted());
    }

    #[test]
    fn weak_profiles_are_rejected() {
        let p = Profile::weak(2, vec![vec![vec![0], vec![1]]]).unwrap();
        assert_eq!(recognize_1d(&p), Err(ProfileError::NotStrict));
    }

    #[test]
    fn oracle_size_cap() {
        let p = Profile::strict(9, vec![(0..9).collect()]).unwrap();
        assert!(matches!(oracle_1d(&p), Err(ProfileError::TooLarge { .. })));
    }

    #[test]
    fn exhaustive_m3_agreement() {
        let perms = permutations(3);
        for n in 1..=3usize {
            let mut idx = vec![0usize; n];
            loop {
                let p = Profile::strict(3, idx.iter().map(|&i| perms[i].clone()).collect()).unwrap();
                let fast = recognize_1d(&p).unwrap();
                assert_eq!(fast.is_yes(), oracle_1d(&p).unwrap().is_yes(), "{:?}", p.votes());
                if let Some(e) = fast.embedding() {
                    assert!(verify_embedding(&p, e, Metric::L2).unwrap().accepted());
                    assert!(single_peaked_axis(&p).unwrap().is_some());
                    assert!(single_crossing_order(&p).unwrap().is_some());
                }
                let Some(k) = (0..n).find(|&k| idx[k] + 1 < perms.len()) else { break };
                idx[k] += 1;
                for slot in &mut idx[..k] {
                    *slot = 0;
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn agrees_with_oracle(m in 1usize..=5, orders in prop::collection::vec(Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(), 1..=4)) {
            let orders: Vec<Vec<usize>> = orders.into_iter().map(|o| o.into_iter().filter(|&a| a < m).collect()).collect();
            let p = Profile::strict(m, orders).unwrap();
            let fast = recognize_1d(&p).unwrap();
            prop_assert_eq!(fast.is_yes(), oracle_1d(&p).unwrap().is_yes());
            if let Some(e) = fast.embedding() {
                prop_assert!(verify_embedding(&p, e, Metric::L2).unwrap().accepted());
            }
        }
    }
}
