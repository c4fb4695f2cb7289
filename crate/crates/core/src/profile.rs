//! Profiles, embeddings and the exact verification predicate.
//!
//! A profile is `d`-Euclidean under a metric when there is an embedding in
//! which every voter is strictly closer to each alternative it strictly
//! prefers. [`verify_embedding`] decides that predicate exactly for a given
//! embedding; ties in weak orders impose nothing.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{rational_size, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("vote {voter} references undeclared alternative {alternative}")]
    UnknownAlternative { voter: usize, alternative: usize },
    #[error("vote {voter} lists alternative {alternative} more than once")]
    DuplicateAlternative { voter: usize, alternative: usize },
    #[error("vote {voter} does not rank every alternative")]
    IncompleteVote { voter: usize },
    #[error("vote {voter} contains an empty indifference class")]
    EmptyClass { voter: usize },
    #[error("{votes} votes for {voters} voters")]
    VoterCountMismatch { voters: usize, votes: usize },
    #[error("ids must be dense: found {found} at position {position}")]
    SparseIds { position: usize, found: usize },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("cannot mix dichotomous and ordinal votes in one profile")]
    MixedKinds,
    #[error("embedding dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("embedding has no point for {0}")]
    MissingPoint(Entity),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("unit-ball verification requires a dichotomous profile")]
    NotDichotomous,
    #[error("restriction must keep at least one alternative")]
    EmptyRestriction,
    #[error("restriction references unknown {0}")]
    UnknownEntity(Entity),
    #[error("input exceeds the supported size of {limit}")]
    TooLarge { limit: usize },
    #[error("operation requires a profile of strict orders")]
    NotStrict,
    #[error("containment search exceeded {0} nodes")]
    BudgetExceeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alternative {
    pub id: usize,
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Voter {
    pub id: usize,
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Strict,
    Weak,
    Dichotomous,
}

/// A single voter's preference over the alternative set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vote {
    /// Best first.
    Strict(Vec<usize>),
    /// Indifference classes, best first.
    Weak(Vec<Vec<usize>>),
    /// The approved set; everything else is disapproved.
    Dichotomous(BTreeSet<usize>),
}

impl Vote {
    pub fn kind(&self) -> ProfileKind {
        match self {
            Vote::Strict(_) => ProfileKind::Strict,
            Vote::Weak(_) => ProfileKind::Weak,
            Vote::Dichotomous(_) => ProfileKind::Dichotomous,
        }
    }

    /// Indifference classes, best first, over `m` alternatives. Empty classes
    /// are dropped, so an approve-everything ballot yields a single class.
    pub fn classes(&self, m: usize) -> Vec<Vec<usize>> {
        match self {
            Vote::Strict(order) => order.iter().map(|&a| vec![a]).collect(),
            Vote::Weak(classes) => classes.clone(),
            Vote::Dichotomous(approved) => {
                let yes: Vec<usize> = approved.iter().copied().collect();
                let no: Vec<usize> = (0..m).filter(|a| !approved.contains(a)).collect();
                [yes, no].into_iter().filter(|c| !c.is_empty()).collect()
            }
        }
    }

    /// Every strictly ordered pair `(better, worse)`.
    pub fn strict_pairs(&self, m: usize) -> Vec<(usize, usize)> {
        let classes = self.classes(m);
        let mut pairs = Vec::new();
        for (i, upper) in classes.iter().enumerate() {
            for lower in &classes[i + 1..] {
                for &a in upper {
                    for &b in lower {
                        pairs.push((a, b));
                    }
                }
            }
        }
        pairs
    }

    /// Pairs between adjacent indifference classes only; by transitivity
    /// these imply every strict pair.
    pub fn consecutive_pairs(&self, m: usize) -> Vec<(usize, usize)> {
        let classes = self.classes(m);
        let mut pairs = Vec::new();
        for window in classes.windows(2) {
            for &a in &window[0] {
                for &b in &window[1] {
                    pairs.push((a, b));
                }
            }
        }
        pairs
    }

    /// Rank position of each alternative in a strict vote.
    pub fn strict_ranks(&self, m: usize) -> Option<Vec<usize>> {
        match self {
            Vote::Strict(order) => {
                let mut rank = vec![usize::MAX; m];
                for (r, &a) in order.iter().enumerate() {
                    rank[a] = r;
                }
                Some(rank)
            }
            _ => None,
        }
    }

    fn relabel(&self, map: &[Option<usize>]) -> Vote {
        match self {
            Vote::Strict(order) => Vote::Strict(order.iter().filter_map(|&a| map[a]).collect()),
            Vote::Weak(classes) => Vote::Weak(
                classes
                    .iter()
                    .map(|c| c.iter().filter_map(|&a| map[a]).collect::<Vec<_>>())
                    .filter(|c| !c.is_empty())
                    .collect(),
            ),
            Vote::Dichotomous(approved) => {
                Vote::Dichotomous(approved.iter().filter_map(|&a| map[a]).collect())
            }
        }
    }

    fn validate(&self, voter: usize, m: usize) -> Result<(), ProfileError> {
        let mut seen = vec![false; m];
        let mut mark = |a: usize| {
            if a >= m {
                return Err(ProfileError::UnknownAlternative { voter, alternative: a });
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(ProfileError::DuplicateAlternative { voter, alternative: a });
            }
            Ok(())
        };
        match self {
            Vote::Strict(order) => {
                for &a in order {
                    mark(a)?;
                }
            }
            Vote::Weak(classes) => {
                for class in classes {
                    if class.is_empty() {
                        return Err(ProfileError::EmptyClass { voter });
                    }
                    for &a in class {
                        mark(a)?;
                    }
                }
            }
            Vote::Dichotomous(approved) => {
                for &a in approved {
                    mark(a)?;
                }
                return Ok(());
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(ProfileError::IncompleteVote { voter })
        }
    }
}

/// An ordered list of votes over a fixed alternative set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    alternatives: Vec<Alternative>,
    voters: Vec<Voter>,
    votes: Vec<Vote>,
    kind: ProfileKind,
}

impl Profile {
    /// Validates and assembles a profile. Strict votes mixed with weak votes
    /// are promoted to singleton-class weak votes.
    pub fn new(
        alternatives: Vec<Alternative>,
        voters: Vec<Voter>,
        votes: Vec<Vote>,
    ) -> Result<Self, ProfileError> {
        if voters.len() != votes.len() {
            return Err(ProfileError::VoterCountMismatch { voters: voters.len(), votes: votes.len() });
        }
        check_dense(alternatives.iter().map(|a| a.id))?;
        check_dense(voters.iter().map(|v| v.id))?;
        check_names(alternatives.iter().filter_map(|a| a.name.as_deref()))?;
        check_names(voters.iter().filter_map(|v| v.name.as_deref()))?;
        let m = alternatives.len();
        for (i, vote) in votes.iter().enumerate() {
            vote.validate(i, m)?;
        }
        let kinds: BTreeSet<u8> = votes
            .iter()
            .map(|v| match v.kind() {
                ProfileKind::Strict => 0,
                ProfileKind::Weak => 1,
                ProfileKind::Dichotomous => 2,
            })
            .collect();
        let (kind, votes) = if kinds.contains(&2) {
            if kinds.len() > 1 {
                return Err(ProfileError::MixedKinds);
            }
            (ProfileKind::Dichotomous, votes)
        } else if kinds.contains(&1) {
            let votes = votes.into_iter().map(|v| Vote::Weak(v.classes(m))).collect();
            (ProfileKind::Weak, votes)
        } else {
            (ProfileKind::Strict, votes)
        };
        Ok(Profile { alternatives, voters, votes, kind })
    }

    fn unnamed(m: usize, votes: Vec<Vote>) -> Result<Self, ProfileError> {
        let alternatives = (0..m).map(|id| Alternative { id, name: None }).collect();
        let voters = (0..votes.len()).map(|id| Voter { id, name: None }).collect();
        Profile::new(alternatives, voters, votes)
    }

    pub fn strict(m: usize, orders: Vec<Vec<usize>>) -> Result<Self, ProfileError> {
        Profile::unnamed(m, orders.into_iter().map(Vote::Strict).collect())
    }

    pub fn weak(m: usize, orders: Vec<Vec<Vec<usize>>>) -> Result<Self, ProfileError> {
        let mut profile = Profile::unnamed(m, orders.into_iter().map(Vote::Weak).collect())?;
        profile.kind = ProfileKind::Weak;
        profile.votes = profile.votes.into_iter().map(|v| Vote::Weak(v.classes(m))).collect();
        Ok(profile)
    }

    pub fn dichotomous(m: usize, approvals: Vec<Vec<usize>>) -> Result<Self, ProfileError> {
        let votes = approvals
            .into_iter()
            .enumerate()
            .map(|(voter, set)| {
                let approved: BTreeSet<usize> = set.iter().copied().collect();
                if approved.len() != set.len() {
                    let dup = set.iter().find(|a| set.iter().filter(|b| b == a).count() > 1).unwrap();
                    return Err(ProfileError::DuplicateAlternative { voter, alternative: *dup });
                }
                Ok(Vote::Dichotomous(approved))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut profile = Profile::unnamed(m, votes)?;
        profile.kind = ProfileKind::Dichotomous;
        Ok(profile)
    }

    /// Reinterprets the profile as weak orders, turning strict votes into
    /// singleton classes. Dichotomous profiles are returned unchanged.
    pub fn into_weak(mut self) -> Self {
        if self.kind == ProfileKind::Strict {
            let m = self.num_alternatives();
            self.votes = self.votes.iter().map(|v| Vote::Weak(v.classes(m))).collect();
            self.kind = ProfileKind::Weak;
        }
        self
    }

    /// Marks a profile without votes as dichotomous.
    pub(crate) fn mark_dichotomous(mut self) -> Self {
        if self.votes.is_empty() {
            self.kind = ProfileKind::Dichotomous;
        }
        self
    }

    /// Replaces alternative display names.
    pub fn with_alternative_names<S: Into<String>>(
        mut self,
        names: impl IntoIterator<Item = S>,
    ) -> Result<Self, ProfileError> {
        for (alt, name) in self.alternatives.iter_mut().zip(names) {
            alt.name = Some(name.into());
        }
        check_names(self.alternatives.iter().filter_map(|a| a.name.as_deref()))?;
        Ok(self)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn num_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn num_voters(&self) -> usize {
        self.voters.len()
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.alternatives
    }

    pub fn voters(&self) -> &[Voter] {
        &self.voters
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn vote(&self, voter: usize) -> &Vote {
        &self.votes[voter]
    }

    /// Display name of an alternative, falling back to its 1-based index.
    pub fn alternative_label(&self, alternative: usize) -> String {
        self.alternatives[alternative]
            .name
            .clone()
            .unwrap_or_else(|| format!("{}", alternative + 1))
    }

    /// Strict orders of a strict profile, best first.
    pub fn strict_orders(&self) -> Option<Vec<&[usize]>> {
        self.votes
            .iter()
            .map(|v| match v {
                Vote::Strict(o) => Some(o.as_slice()),
                _ => None,
            })
            .collect()
    }
}

fn check_dense(ids: impl Iterator<Item = usize>) -> Result<(), ProfileError> {
    for (position, found) in ids.enumerate() {
        if position != found {
            return Err(ProfileError::SparseIds { position, found });
        }
    }
    Ok(())
}

fn check_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<(), ProfileError> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(ProfileError::DuplicateName(name.to_string()));
        }
    }
    Ok(())
}

/// A voter or an alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entity {
    Voter(usize),
    Alternative(usize),
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Voter(i) => write!(f, "v:{i}"),
            Entity::Alternative(j) => write!(f, "a:{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn origin(d: usize) -> Self {
        Point(vec![Rational::zero(); d])
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dot(&self, other: &Point) -> Rational {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> Rational {
        self.dot(self)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, factor: &Rational) -> Point {
        Point(self.0.iter().map(|c| c * factor).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    L2,
    L1,
    Linf,
}

impl Metric {
    /// A quantity that orders pairs of points exactly as the metric does.
    /// For `L2` this is the squared distance, so everything stays rational.
    pub fn distance_key(&self, p: &Point, q: &Point) -> Rational {
        let diffs = p.0.iter().zip(&q.0).map(|(a, b)| a - b);
        match self {
            Metric::L2 => diffs.map(|d| &d * &d).sum(),
            Metric::L1 => diffs.map(|d| d.abs()).sum(),
            Metric::Linf => diffs.map(|d| d.abs()).max().unwrap_or_else(Rational::zero),
        }
    }

    /// The key of a distance equal to `r`; monotone in `r >= 0`.
    pub fn key_of_radius(&self, r: &Rational) -> Rational {
        match self {
            Metric::L2 => r * r,
            Metric::L1 | Metric::Linf => r.clone(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::L2 => "l2",
            Metric::L1 => "l1",
            Metric::Linf => "linf",
        })
    }
}

impl std::str::FromStr for Metric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l2" | "euclidean" => Ok(Metric::L2),
            "l1" | "manhattan" => Ok(Metric::L1),
            "linf" | "l-inf" | "chebyshev" => Ok(Metric::Linf),
            other => Err(format!("unknown metric `{other}` (expected l2, l1 or linf)")),
        }
    }
}

/// Exact rational coordinates for every voter and alternative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    dimension: usize,
    voters: Vec<Point>,
    alternatives: Vec<Point>,
}

impl Embedding {
    pub fn new(dimension: usize, voters: Vec<Point>, alternatives: Vec<Point>) -> Result<Self, ProfileError> {
        if dimension == 0 {
            return Err(ProfileError::ZeroDimension);
        }
        for p in voters.iter().chain(&alternatives) {
            if p.dim() != dimension {
                return Err(ProfileError::DimensionMismatch { expected: dimension, found: p.dim() });
            }
        }
        Ok(Embedding { dimension, voters, alternatives })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn voters(&self) -> &[Point] {
        &self.voters
    }

    pub fn alternatives(&self) -> &[Point] {
        &self.alternatives
    }

    pub fn voter(&self, i: usize) -> &Point {
        &self.voters[i]
    }

    pub fn alternative(&self, j: usize) -> &Point {
        &self.alternatives[j]
    }

    pub fn point(&self, entity: Entity) -> Option<&Point> {
        match entity {
            Entity::Voter(i) => self.voters.get(i),
            Entity::Alternative(j) => self.alternatives.get(j),
        }
    }

    /// Entities in canonical order: voters first, then alternatives.
    pub fn entities(&self) -> impl Iterator<Item = (Entity, &Point)> {
        let voters = self.voters.iter().enumerate().map(|(i, p)| (Entity::Voter(i), p));
        let alts = self.alternatives.iter().enumerate().map(|(j, p)| (Entity::Alternative(j), p));
        voters.chain(alts)
    }

    /// The embedding of the sub-profile produced by `restriction`.
    pub fn restrict(&self, restriction: &Restriction) -> Embedding {
        Embedding {
            dimension: self.dimension,
            voters: restriction.voter_map.iter().map(|&i| self.voters[i].clone()).collect(),
            alternatives: restriction.alternative_map.iter().map(|&j| self.alternatives[j].clone()).collect(),
        }
    }

    fn check_covers(&self, profile: &Profile) -> Result<(), ProfileError> {
        if self.voters.len() < profile.num_voters() {
            return Err(ProfileError::MissingPoint(Entity::Voter(self.voters.len())));
        }
        if self.alternatives.len() < profile.num_alternatives() {
            return Err(ProfileError::MissingPoint(Entity::Alternative(self.alternatives.len())));
        }
        Ok(())
    }
}

/// Which ball semantics a dichotomous profile is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Plain ordinal check; for dichotomous votes this is ball-of-any-radius.
    Ordinal,
    /// Approved alternatives inside the open unit ball, others outside.
    UnitBall,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `voter` strictly prefers `preferred` but is not strictly closer to it.
    Order { voter: usize, preferred: usize, other: usize },
    /// `alternative` is on the wrong side of `voter`'s unit ball.
    UnitBall { voter: usize, alternative: usize, approved: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_embedding(
    profile: &Profile,
    embedding: &Embedding,
    metric: Metric,
) -> Result<VerificationReport, ProfileError> {
    verify_embedding_with(profile, embedding, metric, VerifyMode::Ordinal)
}

pub fn verify_embedding_with(
    profile: &Profile,
    embedding: &Embedding,
    metric: Metric,
    mode: VerifyMode,
) -> Result<VerificationReport, ProfileError> {
    embedding.check_covers(profile)?;
    if mode == VerifyMode::UnitBall && profile.kind() != ProfileKind::Dichotomous {
        return Err(ProfileError::NotDichotomous);
    }
    let m = profile.num_alternatives();
    let mut report = VerificationReport::default();
    for (v, vote) in profile.votes().iter().enumerate() {
        let here = embedding.voter(v);
        let keys: Vec<Rational> = embedding.alternatives[..m]
            .iter()
            .map(|p| metric.distance_key(here, p))
            .collect();
        match mode {
            VerifyMode::Ordinal => {
                for (a, b) in vote.strict_pairs(m) {
                    if keys[a] >= keys[b] {
                        report.violations.push(Violation::Order { voter: v, preferred: a, other: b });
                    }
                }
            }
            VerifyMode::UnitBall => {
                let Vote::Dichotomous(approved) = vote else { unreachable!() };
                let one = Rational::one();
                for (a, key) in keys.iter().enumerate() {
                    let inside = key < &one;
                    let wanted = approved.contains(&a);
                    if inside != wanted {
                        report.violations.push(Violation::UnitBall { voter: v, alternative: a, approved: wanted });
                    }
                }
            }
        }
    }
    Ok(report)
}

/// A sub-profile together with the maps back to the original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub profile: Profile,
    /// New alternative id to original id.
    pub alternative_map: Vec<usize>,
    /// New voter id to original id.
    pub voter_map: Vec<usize>,
}

/// Deletes every alternative and voter not in the keep sets and re-densifies ids.
pub fn restrict(
    profile: &Profile,
    keep_alternatives: &BTreeSet<usize>,
    keep_voters: &BTreeSet<usize>,
) -> Result<Restriction, ProfileError> {
    if keep_alternatives.is_empty() {
        return Err(ProfileError::EmptyRestriction);
    }
    let m = profile.num_alternatives();
    if let Some(&a) = keep_alternatives.iter().find(|&&a| a >= m) {
        return Err(ProfileError::UnknownEntity(Entity::Alternative(a)));
    }
    if let Some(&v) = keep_voters.iter().find(|&&v| v >= profile.num_voters()) {
        return Err(ProfileError::UnknownEntity(Entity::Voter(v)));
    }
    let alternative_map: Vec<usize> = keep_alternatives.iter().copied().collect();
    let voter_map: Vec<usize> = keep_voters.iter().copied().collect();
    let mut relabel = vec![None; m];
    for (new, &old) in alternative_map.iter().enumerate() {
        relabel[old] = Some(new);
    }
    let alternatives = alternative_map
        .iter()
        .enumerate()
        .map(|(id, &old)| Alternative { id, name: profile.alternatives[old].name.clone() })
        .collect();
    let voters = voter_map
        .iter()
        .enumerate()
        .map(|(id, &old)| Voter { id, name: profile.voters[old].name.clone() })
        .collect();
    let votes = voter_map.iter().map(|&v| profile.votes[v].relabel(&relabel)).collect();
    let restricted = Profile { alternatives, voters, votes, kind: profile.kind };
    Ok(Restriction { profile: restricted, alternative_map, voter_map })
}

/// Witness that a needle profile occurs inside a haystack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Containment {
    /// Needle voter to haystack voter.
    pub voter_map: Vec<usize>,
    /// Needle alternative to haystack alternative.
    pub alternative_map: Vec<usize>,
}

pub const DEFAULT_CONTAINMENT_NODES: u64 = 1_000_000;

/// Searches for injective maps under which deleting, relabelling and
/// reordering turns `haystack` into `needle`.
///
/// Votes are compared as relations, so a strict vote over one alternative
/// matches a weak vote with a single class.
pub fn contains_configuration(
    haystack: &Profile,
    needle: &Profile,
    node_cap: u64,
) -> Result<Option<Containment>, ProfileError> {
    if needle.num_alternatives() > haystack.num_alternatives() || needle.num_voters() > haystack.num_voters() {
        return Ok(None);
    }
    let mut search = ContainmentSearch {
        haystack,
        needle,
        mapped: Vec::with_capacity(needle.num_alternatives()),
        used: vec![false; haystack.num_alternatives()],
        nodes: 0,
        cap: node_cap,
    };
    search.run()
}

struct ContainmentSearch<'a> {
    haystack: &'a Profile,
    needle: &'a Profile,
    mapped: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    cap: u64,
}

type VoteKey = Vec<Vec<usize>>;

impl ContainmentSearch<'_> {
    fn run(&mut self) -> Result<Option<Containment>, ProfileError> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(ProfileError::BudgetExceeded(self.cap));
        }
        let Some(hay_keys) = self.prefix_feasible() else {
            return Ok(None);
        };
        if self.mapped.len() == self.needle.num_alternatives() {
            return Ok(Some(self.assemble(&hay_keys)));
        }
        for candidate in 0..self.haystack.num_alternatives() {
            if self.used[candidate] {
                continue;
            }
            self.used[candidate] = true;
            self.mapped.push(candidate);
            let found = self.run()?;
            self.mapped.pop();
            self.used[candidate] = false;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    /// Needle votes cut down to the first `k` needle alternatives must form a
    /// sub-multiset of haystack votes cut down to their images.
    fn prefix_feasible(&self) -> Option<Vec<VoteKey>> {
        let k = self.mapped.len();
        let mut needle_map = vec![None; self.needle.num_alternatives()];
        for (j, slot) in needle_map.iter_mut().enumerate().take(k) {
            *slot = Some(j);
        }
        let mut hay_map = vec![None; self.haystack.num_alternatives()];
        for (j, &h) in self.mapped.iter().enumerate() {
            hay_map[h] = Some(j);
        }
        let mut counts: HashMap<VoteKey, i64> = HashMap::new();
        let hay_keys: Vec<VoteKey> = self
            .haystack
            .votes()
            .iter()
            .map(|v| canonical_key(v, self.haystack.num_alternatives(), &hay_map))
            .collect();
        for key in &hay_keys {
            *counts.entry(key.clone()).or_default() += 1;
        }
        for vote in self.needle.votes() {
            let key = canonical_key(vote, self.needle.num_alternatives(), &needle_map);
            let slot = counts.entry(key).or_default();
            *slot -= 1;
            if *slot < 0 {
                return None;
            }
        }
        Some(hay_keys)
    }

    fn assemble(&self, hay_keys: &[VoteKey]) -> Containment {
        let identity: Vec<Option<usize>> = (0..self.needle.num_alternatives()).map(Some).collect();
        let mut taken = vec![false; hay_keys.len()];
        let voter_map = self
            .needle
            .votes()
            .iter()
            .map(|vote| {
                let key = canonical_key(vote, self.needle.num_alternatives(), &identity);
                let h = (0..hay_keys.len())
                    .find(|&h| !taken[h] && hay_keys[h] == key)
                    .expect("multiset check guarantees a match");
                taken[h] = true;
                h
            })
            .collect();
        Containment { voter_map, alternative_map: self.mapped.clone() }
    }
}

fn canonical_key(vote: &Vote, m: usize, map: &[Option<usize>]) -> VoteKey {
    vote.classes(m)
        .into_iter()
        .map(|class| {
            let mut c: Vec<usize> = class.into_iter().filter_map(|a| map[a]).collect();
            c.sort_unstable();
            c
        })
        .filter(|c| !c.is_empty())
        .collect()
}

/// Total bit size of an embedding: the sum over all points of the sizes of
/// their rational coordinates.
pub fn embedding_size(embedding: &Embedding) -> u64 {
    embedding
        .entities()
        .flat_map(|(_, p)| p.0.iter())
        .map(rational_size)
        .sum()
}
