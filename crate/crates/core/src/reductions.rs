//! Sign vectors, oriented hyperplane arrangements and the reductions between
//! them and Euclidean profiles.
//!
//! A set `S` of sign vectors of length `n` becomes a profile over
//! `a1, b1, ..., an, bn` whose voter `v_s` ranks the pairs in index order and
//! puts `ai` first iff `s_i = +`. The profile is `d`-Euclidean iff some
//! arrangement of `n` oriented hyperplanes in `R^d` has a cell for every
//! vector of `S`; both directions are implemented constructively here.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::lp::{feasible, LinearSystem};
use crate::profile::{Embedding, Metric, Point, Profile, ProfileError, ProfileKind};
use crate::rational::{format_rational, parse_rational, sqrt_lower, Rational};
use crate::smt::{literal, solve, SmtError, SolverConfig, SolverOutcome, SolverScript};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("expected dimension {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("hyperplane {0} has a zero normal")]
    ZeroNormal(usize),
    #[error("sign vectors have mixed lengths {expected} and {found}")]
    Length { expected: usize, found: usize },
    #[error("sign vector set is empty")]
    EmptySet,
    #[error("sign vector set lacks the all-plus or all-minus vector")]
    MissingExtremes,
    #[error("{0} does not occur as a cell of the arrangement")]
    EmptyCell(SignVector),
    #[error("expected {expected} witnesses, got {found}")]
    WitnessCount { expected: usize, found: usize },
    #[error("witness {index} has sign vector {found}, expected {expected}")]
    WitnessSign { index: usize, expected: SignVector, found: SignVector },
    #[error("no radius up to {0} places every voter in its balls")]
    RadiusCap(Rational),
    #[error("alternatives of pair {0} coincide")]
    Coincident(usize),
    #[error("profile does not have the paired a/b shape")]
    NotPaired,
    #[error("at most {limit} hyperplanes are supported")]
    TooManyHyperplanes { limit: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Smt(#[from] SmtError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_positive() {
            Sign::Plus
        } else if q.is_negative() {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    fn factor(self) -> Rational {
        match self {
            Sign::Plus => Rational::one(),
            Sign::Minus => -Rational::one(),
            Sign::Zero => Rational::zero(),
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
            Sign::Zero => '0',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn uniform(n: usize, sign: Sign) -> Self {
        SignVector(vec![sign; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_zero(&self) -> bool {
        self.0.contains(&Sign::Zero)
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl FromStr for SignVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.trim()
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' | '\u{2212}' => Ok(Sign::Minus),
                '0' => Ok(Sign::Zero),
                other => Err(format!("unexpected sign character {other:?}")),
            })
            .collect::<Result<_, _>>()
            .map(SignVector)
    }
}

/// Sign vectors over `{-, +}` sharing a length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVectorSet {
    n: usize,
    vectors: BTreeSet<SignVector>,
}

impl SignVectorSet {
    pub fn new(n: usize, vectors: impl IntoIterator<Item = SignVector>) -> Result<Self, ReductionError> {
        let mut set = BTreeSet::new();
        for v in vectors {
            if v.len() != n {
                return Err(ReductionError::Length { expected: n, found: v.len() });
            }
            if v.has_zero() {
                return Err(ReductionError::Parse { line: 0, message: format!("{v} has a zero entry") });
            }
            set.insert(v);
        }
        Ok(SignVectorSet { n, vectors: set })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &SignVector> {
        self.vectors.iter()
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.vectors.contains(v)
    }

    pub fn has_extremes(&self) -> bool {
        self.contains(&SignVector::uniform(self.n, Sign::Plus)) && self.contains(&SignVector::uniform(self.n, Sign::Minus))
    }

    /// One vector per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let mut vectors = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: SignVector = line.parse().map_err(|message| ReductionError::Parse { line: i + 1, message })?;
            if v.has_zero() {
                return Err(ReductionError::Parse { line: i + 1, message: "zero entries are not allowed".into() });
            }
            vectors.push(v);
        }
        let n = vectors.first().map(SignVector::len).ok_or(ReductionError::EmptySet)?;
        SignVectorSet::new(n, vectors)
    }
}

impl fmt::Display for SignVectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.vectors.iter().try_for_each(|v| writeln!(f, "{v}"))
    }
}

/// `{x : normal . x = offset}` with positive side `normal . x > offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrientedHyperplane {
    pub normal: Point,
    pub offset: Rational,
}

impl OrientedHyperplane {
    pub fn new(normal: Point, offset: Rational) -> Self {
        OrientedHyperplane { normal, offset }
    }

    pub fn value(&self, x: &Point) -> Rational {
        self.normal.dot(x) - &self.offset
    }

    pub fn side(&self, x: &Point) -> Sign {
        Sign::of(&self.value(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrangement {
    dimension: usize,
    hyperplanes: Vec<OrientedHyperplane>,
}

pub const MAX_ENUMERATION_HYPERPLANES: usize = 12;

impl Arrangement {
    pub fn new(dimension: usize, hyperplanes: Vec<OrientedHyperplane>) -> Result<Self, ReductionError> {
        for (i, h) in hyperplanes.iter().enumerate() {
            if h.normal.dim() != dimension {
                return Err(ReductionError::Dimension { expected: dimension, found: h.normal.dim() });
            }
            if h.normal.0.iter().all(Zero::is_zero) {
                return Err(ReductionError::ZeroNormal(i));
            }
        }
        Ok(Arrangement { dimension, hyperplanes })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn hyperplanes(&self) -> &[OrientedHyperplane] {
        &self.hyperplanes
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    /// Lines `u1 ... ud b` of rational literals.
    pub fn parse(text: &str) -> Result<Self, ReductionError> {
        let mut hyperplanes = Vec::new();
        let mut dimension = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let values = line
                .split_whitespace()
                .map(parse_rational)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ReductionError::Parse { line: i + 1, message: e.to_string() })?;
            if values.len() < 2 {
                return Err(ReductionError::Parse { line: i + 1, message: "need a normal and an offset".into() });
            }
            let d = *dimension.get_or_insert(values.len() - 1);
            if values.len() - 1 != d {
                return Err(ReductionError::Parse { line: i + 1, message: format!("expected {} numbers", d + 1) });
            }
            let mut values = values;
            let offset = values.pop().unwrap();
            hyperplanes.push(OrientedHyperplane::new(Point::new(values), offset));
        }
        let d = dimension.ok_or(ReductionError::Parse { line: 0, message: "no hyperplanes".into() })?;
        Arrangement::new(d, hyperplanes)
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for h in &self.hyperplanes {
            let parts: Vec<String> = h.normal.0.iter().chain([&h.offset]).map(format_rational).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

pub fn sign_vector(point: &Point, arrangement: &Arrangement) -> Result<SignVector, ReductionError> {
    if point.dim() != arrangement.dimension {
        return Err(ReductionError::Dimension { expected: arrangement.dimension, found: point.dim() });
    }
    Ok(SignVector(arrangement.hyperplanes.iter().map(|h| h.side(point)).collect()))
}

fn pair_names(n: usize) -> Vec<String> {
    (1..=n).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect()
}

/// Alternative `2i` is `a(i+1)` and `2i + 1` is `b(i+1)`; voters follow the
/// set's iteration order.
pub fn profile_from_sign_vectors(set: &SignVectorSet) -> Profile {
    let orders = set
        .vectors()
        .map(|s| {
            s.0.iter()
                .enumerate()
                .flat_map(|(i, sign)| if *sign == Sign::Plus { [2 * i, 2 * i + 1] } else { [2 * i + 1, 2 * i] })
                .collect()
        })
        .collect();
    Profile::strict(2 * set.n, orders)
        .and_then(|p| p.with_alternative_names(pair_names(set.n)))
        .expect("paired orders are permutations")
}

/// Voter `v_s` approves `ai` where `s_i = +` and `bi` where `s_i = -`.
pub fn dichotomous_from_sign_vectors(set: &SignVectorSet) -> Profile {
    let approvals = set
        .vectors()
        .map(|s| s.0.iter().enumerate().map(|(i, sign)| if *sign == Sign::Plus { 2 * i } else { 2 * i + 1 }).collect())
        .collect();
    Profile::dichotomous(2 * set.n, approvals)
        .and_then(|p| p.with_alternative_names(pair_names(set.n)))
        .expect("approvals are in range")
}

/// `S x {+, -}`.
pub fn lift(set: &SignVectorSet) -> SignVectorSet {
    let vectors = set.vectors().flat_map(|s| {
        [Sign::Plus, Sign::Minus].map(|last| {
            let mut v = s.clone();
            v.0.push(last);
            v
        })
    });
    SignVectorSet::new(set.n + 1, vectors.collect::<Vec<_>>()).expect("lengths agree")
}

fn cell_system(arrangement: &Arrangement, signs: &[Sign]) -> LinearSystem {
    let mut system = LinearSystem::with_variables((0..arrangement.dimension).map(|k| format!("x{k}")));
    for (h, sign) in arrangement.hyperplanes.iter().zip(signs) {
        let f = sign.factor();
        let terms: Vec<(usize, Rational)> = h.normal.0.iter().enumerate().map(|(k, c)| (k, c * &f)).collect();
        system.gt(&terms, &h.offset * &f);
    }
    system
}

/// An interior point of the cell with sign vector `sigma`, if the cell is nonempty.
pub fn find_cell_witness(arrangement: &Arrangement, sigma: &SignVector) -> Result<Option<Point>, ReductionError> {
    if sigma.len() != arrangement.len() {
        return Err(ReductionError::Length { expected: arrangement.len(), found: sigma.len() });
    }
    Ok(feasible(&cell_system(arrangement, &sigma.0)).map(Point::new))
}

/// Every full-dimensional cell with an interior witness, by depth-first
/// search over partial sign patterns pruned by feasibility.
pub fn enumerate_cells(arrangement: &Arrangement) -> Result<Vec<(SignVector, Point)>, ReductionError> {
    if arrangement.len() > MAX_ENUMERATION_HYPERPLANES {
        return Err(ReductionError::TooManyHyperplanes { limit: MAX_ENUMERATION_HYPERPLANES });
    }
    let mut cells = Vec::new();
    let mut prefix = Vec::with_capacity(arrangement.len());
    let partial = |prefix: &[Sign]| {
        let sub = Arrangement { dimension: arrangement.dimension, hyperplanes: arrangement.hyperplanes[..prefix.len()].to_vec() };
        feasible(&cell_system(&sub, prefix))
    };
    fn walk(
        arrangement: &Arrangement,
        prefix: &mut Vec<Sign>,
        cells: &mut Vec<(SignVector, Point)>,
        partial: &dyn Fn(&[Sign]) -> Option<Vec<Rational>>,
    ) {
        for sign in [Sign::Minus, Sign::Plus] {
            prefix.push(sign);
            if let Some(x) = partial(prefix) {
                if prefix.len() == arrangement.len() {
                    cells.push((SignVector(prefix.clone()), Point::new(x)));
                } else {
                    walk(arrangement, prefix, cells, partial);
                }
            }
            prefix.pop();
        }
    }
    if arrangement.is_empty() {
        return Ok(vec![(SignVector(vec![]), Point::origin(arrangement.dimension))]);
    }
    walk(arrangement, &mut prefix, &mut cells, &partial);
    Ok(cells)
}

/// The embedding built from an arrangement, with the parameters used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub profile: Profile,
    pub embedding: Embedding,
    /// The accepted base radius `R`; pair `i` (1-based) sits near radius `R i`.
    pub radius: Rational,
    /// Factor applied to the witnesses to move them into the unit ball.
    pub scale: Rational,
}

const RADIUS_DOUBLINGS: u32 = 64;

/// Smallest rational `t >= rho / |u|` with `t |u| <= rho + 1/4`.
fn placement_factor(rho: &Rational, norm_sq: &Rational) -> Rational {
    let mut bits = 2u32;
    // Need 2^-bits |u| <= 1/4, i.e. 4^bits >= 16 |u|^2.
    let bound = norm_sq * Rational::from_integer(16.into());
    while Rational::from_integer(BigInt::one() << (2 * bits)) < bound {
        bits += 1;
    }
    let eps = Rational::new(BigInt::one(), BigInt::one() << bits);
    sqrt_lower(&(rho * rho / norm_sq), bits) + eps
}

/// Voter `y` lies in the open ball of radius `t |u|` centred at
/// `p + sign t u`, i.e. `|y - p|^2 < 2 t sign u.(y - p)`.
fn in_ball(y: &Point, p: &Point, u: &Point, t: &Rational, sign: Sign) -> bool {
    let diff = y.sub(p);
    diff.norm_squared() < Rational::from_integer(2.into()) * t * sign.factor() * u.dot(&diff)
}

/// Places voters at (rescaled) cell witnesses and each pair `ai, bi`
/// symmetrically about hyperplane `i` at distance about `R i` from it, doubling
/// `R` from 5 until every voter lies in the ball of its nearer pair member.
/// The result is verified exactly before it is returned.
pub fn embedding_from_arrangement(
    arrangement: &Arrangement,
    set: &SignVectorSet,
    witnesses: Option<&[Point]>,
) -> Result<Construction, ReductionError> {
    let n = arrangement.len();
    if set.len() != n {
        return Err(ReductionError::Length { expected: n, found: set.len() });
    }
    if set.is_empty() {
        return Err(ReductionError::EmptySet);
    }
    if n > 0 && !set.has_extremes() {
        return Err(ReductionError::MissingExtremes);
    }
    let d = arrangement.dimension;
    let points: Vec<Point> = match witnesses {
        Some(w) => {
            if w.len() != set.size() {
                return Err(ReductionError::WitnessCount { expected: set.size(), found: w.len() });
            }
            for (index, (x, sigma)) in w.iter().zip(set.vectors()).enumerate() {
                let found = sign_vector(x, arrangement)?;
                if &found != sigma {
                    return Err(ReductionError::WitnessSign { index, expected: sigma.clone(), found });
                }
            }
            w.to_vec()
        }
        None => set
            .vectors()
            .map(|sigma| find_cell_witness(arrangement, sigma)?.ok_or_else(|| ReductionError::EmptyCell(sigma.clone())))
            .collect::<Result<_, _>>()?,
    };
    let one = Rational::one();
    let max_l1 = points.iter().map(|x| x.0.iter().map(Signed::abs).sum::<Rational>()).max().unwrap_or_default();
    let scale = &one / (&one + max_l1);
    let voters: Vec<Point> = points.iter().map(|x| x.scale(&scale)).collect();
    let scaled: Vec<OrientedHyperplane> =
        arrangement.hyperplanes.iter().map(|h| OrientedHyperplane::new(h.normal.clone(), &h.offset * &scale)).collect();
    let profile = profile_from_sign_vectors(set);
    let signs: Vec<&SignVector> = set.vectors().collect();

    // Anchor of each hyperplane: where it crosses the segment from the
    // all-minus witness to the all-plus witness, inside the unit ball.
    let mut anchors = Vec::with_capacity(n);
    if n > 0 {
        let index_of = |s: Sign| signs.iter().position(|v| **v == SignVector::uniform(n, s)).unwrap();
        let low = &voters[index_of(Sign::Minus)];
        let high = &voters[index_of(Sign::Plus)];
        let dir = high.sub(low);
        for h in &scaled {
            let f0 = h.value(low);
            let f1 = h.value(high);
            let t = -&f0 / (f1 - &f0);
            anchors.push(low.add(&dir.scale(&t)));
        }
    }

    let mut radius = Rational::from_integer(5.into());
    for _ in 0..=RADIUS_DOUBLINGS {
        let factors: Vec<Rational> = scaled
            .iter()
            .enumerate()
            .map(|(i, h)| placement_factor(&(&radius * Rational::from_integer((i as i64 + 1).into())), &h.normal.norm_squared()))
            .collect();
        let fits = voters.iter().zip(&signs).all(|(y, sigma)| {
            (0..n).all(|i| in_ball(y, &anchors[i], &scaled[i].normal, &factors[i], sigma.0[i]))
        });
        if fits {
            let mut alternatives = Vec::with_capacity(2 * n);
            for i in 0..n {
                let offset = scaled[i].normal.scale(&factors[i]);
                alternatives.push(anchors[i].add(&offset));
                alternatives.push(anchors[i].sub(&offset));
            }
            let embedding = Embedding::new(d, voters, alternatives)?;
            let report = crate::profile::verify_embedding(&profile, &embedding, Metric::L2)?;
            debug_assert!(report.accepted(), "ball membership implies the profile");
            if report.accepted() {
                return Ok(Construction { profile, embedding, radius, scale });
            }
            break;
        }
        radius *= Rational::from_integer(2.into());
    }
    Err(ReductionError::RadiusCap(radius))
}

fn check_paired(profile: &Profile) -> Result<usize, ReductionError> {
    let m = profile.num_alternatives();
    if m % 2 != 0 || profile.kind() == ProfileKind::Dichotomous {
        return Err(ReductionError::NotPaired);
    }
    if let Some(orders) = profile.strict_orders() {
        let paired = orders.iter().all(|o| o.chunks(2).enumerate().all(|(i, c)| c.iter().all(|&a| a / 2 == i)));
        if !paired {
            return Err(ReductionError::NotPaired);
        }
    } else {
        return Err(ReductionError::NotPaired);
    }
    Ok(m / 2)
}

/// Perpendicular bisectors of each pair, positive toward `ai`.
pub fn arrangement_from_embedding(profile: &Profile, embedding: &Embedding) -> Result<Arrangement, ReductionError> {
    let n = check_paired(profile)?;
    if embedding.alternatives().len() < 2 * n {
        return Err(ReductionError::Profile(ProfileError::UnknownEntity(crate::profile::Entity::Alternative(2 * n - 1))));
    }
    let two = Rational::from_integer(2.into());
    let hyperplanes = (0..n)
        .map(|i| {
            let a = embedding.alternative(2 * i);
            let b = embedding.alternative(2 * i + 1);
            if a == b {
                return Err(ReductionError::Coincident(i));
            }
            Ok(OrientedHyperplane::new(a.sub(b), (a.norm_squared() - b.norm_squared()) / &two))
        })
        .collect::<Result<_, _>>()?;
    Arrangement::new(embedding.dimension(), hyperplanes)
}

/// A script whose models are arrangements of `set.len()` unit-normal
/// hyperplanes in `R^d` together with a witness point in each cell of `set`.
pub fn realizability_script(set: &SignVectorSet, d: usize) -> Result<SolverScript, ReductionError> {
    if d == 0 {
        return Err(SmtError::ZeroDimension.into());
    }
    if set.is_empty() {
        return Err(ReductionError::EmptySet);
    }
    let mut script = SolverScript::new("QF_NRA");
    let n = set.len();
    let normals: Vec<Vec<String>> = (0..n).map(|i| (0..d).map(|k| script.declare(format!("u_{i}_{k}"))).collect()).collect();
    let offsets: Vec<String> = (0..n).map(|i| script.declare(format!("c_{i}"))).collect();
    for u in &normals {
        let squares: Vec<String> = u.iter().map(|x| format!("(* {x} {x})")).collect();
        let sum = if squares.len() == 1 { squares[0].clone() } else { format!("(+ {})", squares.join(" ")) };
        script.assert(format!("(= {sum} {})", literal(&Rational::one())));
    }
    for (j, sigma) in set.vectors().enumerate() {
        let x: Vec<String> = (0..d).map(|k| script.declare(format!("y_{j}_{k}"))).collect();
        for (i, sign) in sigma.0.iter().enumerate() {
            let products: Vec<String> = normals[i].iter().zip(&x).map(|(u, x)| format!("(* {u} {x})")).collect();
            let dot = if products.len() == 1 { products[0].clone() } else { format!("(+ {})", products.join(" ")) };
            let op = if *sign == Sign::Plus { ">" } else { "<" };
            script.assert(format!("({op} {dot} {})", offsets[i]));
        }
    }
    Ok(script)
}

/// Asks the solver whether some arrangement in `R^d` realizes every vector of `set`.
pub fn realizable(
    set: &SignVectorSet,
    d: usize,
    config: &SolverConfig,
    timeout: Duration,
) -> Result<SolverOutcome, ReductionError> {
    let script = realizability_script(set, d)?;
    Ok(solve(&script, config, timeout)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::verify_embedding;
    use crate::rational::{int, rat};
    use crate::restrictions::is_single_peaked_on;

    fn sv(s: &str) -> SignVector {
        s.parse().unwrap()
    }

    fn set(n: usize, items: &[&str]) -> SignVectorSet {
        SignVectorSet::new(n, items.iter().map(|s| sv(s))).unwrap()
    }

    fn line(a: Rational, b: Rational, c: Rational) -> OrientedHyperplane {
        OrientedHyperplane::new(Point::new(vec![a, b]), c)
    }

    /// Four lines with exactly the six cells below among their witnesses.
    fn example() -> (Arrangement, SignVectorSet, Vec<(SignVector, Point)>) {
        let arrangement = Arrangement::new(
            2,
            vec![
                line(int(5), int(-14), int(7)),
                line(int(-14), rat(-9, 2), rat(-7, 2)),
                line(rat(-13, 2), int(-14), rat(7, 2)),
                line(int(14), rat(-41, 5), rat(7, 5)),
            ],
        )
        .unwrap();
        let s = set(4, &["++++", "-++-", "-+-+", "-+--", "---+", "----"]);
        let witnesses = [
            ("-+-+", (17, 100), (-2, 10)),
            ("----", (3, 10), (7, 10)),
            ("-++-", (-4, 10), (-3, 10)),
            ("---+", (7, 10), (2, 10)),
            ("-+--", (-62, 100), (4, 10)),
            ("++++", (23, 100), (-7, 10)),
        ]
        .iter()
        .map(|(s, x, y)| (sv(s), Point::new(vec![rat(x.0, x.1), rat(y.0, y.1)])))
        .collect();
        (arrangement, s, witnesses)
    }

    #[test]
    fn sign_vector_basics() {
        let a = Arrangement::new(2, vec![line(int(1), int(0), int(0))]).unwrap();
        assert_eq!(sign_vector(&Point::from_ints(&[2, 0]), &a).unwrap(), sv("+"));
        assert_eq!(sign_vector(&Point::from_ints(&[0, 0]), &a).unwrap(), sv("0"));
        assert!(matches!(sign_vector(&Point::from_ints(&[0]), &a), Err(ReductionError::Dimension { .. })));
        assert!(matches!(Arrangement::new(2, vec![line(int(0), int(0), int(1))]), Err(ReductionError::ZeroNormal(0))));
    }

    #[test]
    fn example_witnesses_realize_the_set() {
        let (arrangement, s, witnesses) = example();
        let found: BTreeSet<SignVector> = witnesses.iter().map(|(_, x)| sign_vector(x, &arrangement).unwrap()).collect();
        assert_eq!(found, s.vectors().cloned().collect());
        for (sigma, x) in &witnesses {
            assert_eq!(&sign_vector(x, &arrangement).unwrap(), sigma);
        }
        let cells: BTreeSet<SignVector> = enumerate_cells(&arrangement).unwrap().into_iter().map(|c| c.0).collect();
        assert!(s.vectors().all(|v| cells.contains(v)));
    }

    #[test]
    fn paired_profiles() {
        let p = profile_from_sign_vectors(&set(1, &["+", "-"]));
        assert_eq!(p.strict_orders().unwrap(), vec![&[1, 0][..], &[0, 1]]);
        assert_eq!(p.alternative_label(0), "a1");
        let (_, s, _) = example();
        let p = profile_from_sign_vectors(&s);
        assert_eq!((p.num_voters(), p.num_alternatives()), (6, 8));
        let top = p.strict_orders().unwrap().last().unwrap().to_vec();
        assert_eq!(top, vec![0, 1, 2, 3, 4, 5, 6, 7]);
        for order in p.strict_orders().unwrap() {
            assert!(order.chunks(2).enumerate().all(|(i, c)| c.iter().all(|&a| a / 2 == i)));
        }
        // a4 a3 a2 a1 b1 b2 b3 b4
        let axis: Vec<usize> = (0..4).rev().map(|i| 2 * i).chain((0..4).map(|i| 2 * i + 1)).collect();
        assert!(is_single_peaked_on(&p, &axis).unwrap());
    }

    #[test]
    fn dichotomous_profiles() {
        let p = dichotomous_from_sign_vectors(&set(1, &["+"]));
        assert_eq!(p.vote(0), &crate::profile::Vote::Dichotomous([0].into_iter().collect()));
        let p = dichotomous_from_sign_vectors(&set(2, &["--"]));
        assert_eq!(p.vote(0), &crate::profile::Vote::Dichotomous([1, 3].into_iter().collect()));
        let (_, s, _) = example();
        let p = dichotomous_from_sign_vectors(&s);
        assert_eq!(p.num_voters(), 6);
        for vote in p.votes() {
            let crate::profile::Vote::Dichotomous(approved) = vote else { panic!() };
            assert_eq!(approved.len(), 4);
        }
    }

    #[test]
    fn lift_doubles() {
        assert_eq!(lift(&set(1, &["+"])), set(2, &["++", "+-"]));
        let (_, s, _) = example();
        assert_eq!(lift(&s).size(), 12);
    }

    fn check_construction(arrangement: &Arrangement, s: &SignVectorSet, c: &Construction) {
        assert!(verify_embedding(&c.profile, &c.embedding, Metric::L2).unwrap().accepted());
        for y in c.embedding.voters() {
            assert!(y.norm_squared() < Rational::one());
        }
        for (j, x) in c.embedding.alternatives().iter().enumerate() {
            let ri = &c.radius * Rational::from_integer((j as i64 / 2 + 1).into());
            let lo = &ri - int(2);
            let hi = &ri + int(2);
            assert!(&lo * &lo < x.norm_squared() && x.norm_squared() < &hi * &hi);
        }
        let back = arrangement_from_embedding(&c.profile, &c.embedding).unwrap();
        for (y, sigma) in c.embedding.voters().iter().zip(s.vectors()) {
            assert_eq!(&sign_vector(y, &back).unwrap(), sigma);
            assert_eq!(&sign_vector(&y.scale(&(Rational::one() / &c.scale)), arrangement).unwrap(), sigma);
        }
    }

    #[test]
    fn single_line_construction() {
        let a = Arrangement::new(2, vec![line(int(1), int(0), int(0))]).unwrap();
        let s = set(1, &["+", "-"]);
        let w = [Point::new(vec![rat(-1, 2), int(0)]), Point::new(vec![rat(1, 2), int(0)])];
        let c = embedding_from_arrangement(&a, &s, Some(&w)).unwrap();
        check_construction(&a, &s, &c);
        for x in c.embedding.alternatives() {
            assert_eq!(x.0[1], int(0));
        }
        let bad = [Point::new(vec![int(0), int(0)]), w[1].clone()];
        assert!(matches!(embedding_from_arrangement(&a, &s, Some(&bad)), Err(ReductionError::WitnessSign { .. })));
        assert!(matches!(embedding_from_arrangement(&a, &set(1, &["+"]), None), Err(ReductionError::MissingExtremes)));
    }

    #[test]
    fn example_construction() {
        let (arrangement, s, witnesses) = example();
        let ordered: Vec<Point> =
            s.vectors().map(|v| witnesses.iter().find(|(w, _)| w == v).unwrap().1.clone()).collect();
        let c = embedding_from_arrangement(&arrangement, &s, Some(&ordered)).unwrap();
        check_construction(&arrangement, &s, &c);
        let found = embedding_from_arrangement(&arrangement, &s, None).unwrap();
        check_construction(&arrangement, &s, &found);
    }

    #[test]
    fn group_distance_chain() {
        let (arrangement, s, _) = example();
        let c = embedding_from_arrangement(&arrangement, &s, None).unwrap();
        for y in c.embedding.voters() {
            let dist: Vec<Rational> = c.embedding.alternatives().iter().map(|x| Metric::L2.distance_key(y, x)).collect();
            for i in 0..3 {
                let far = dist[2 * i].clone().max(dist[2 * i + 1].clone());
                let near_next = dist[2 * i + 2].clone().min(dist[2 * i + 3].clone());
                assert!(far < near_next);
            }
        }
    }

    #[test]
    fn bisectors() {
        let p = profile_from_sign_vectors(&set(1, &["+"]));
        let e = Embedding::new(2, vec![Point::from_ints(&[1, 1])], vec![Point::from_ints(&[1, 0]), Point::from_ints(&[-1, 0])]).unwrap();
        let a = arrangement_from_embedding(&p, &e).unwrap();
        assert_eq!(a.hyperplanes()[0], line(int(2), int(0), int(0)));
        let e = Embedding::new(2, vec![Point::from_ints(&[0, 0])], vec![Point::from_ints(&[0, 0]), Point::from_ints(&[0, 2])]).unwrap();
        let bisector = arrangement_from_embedding(&p, &e).unwrap();
        let h = &bisector.hyperplanes()[0];
        assert_eq!(h.side(&Point::new(vec![int(0), rat(1, 2)])), Sign::Plus);
        assert_eq!(h.side(&Point::from_ints(&[5, 1])), Sign::Zero);
        assert_eq!(h.side(&Point::from_ints(&[0, 2])), Sign::Minus);
        let e = Embedding::new(2, vec![Point::from_ints(&[0, 0])], vec![Point::from_ints(&[1, 1]), Point::from_ints(&[1, 1])]).unwrap();
        assert!(matches!(arrangement_from_embedding(&p, &e), Err(ReductionError::Coincident(0))));
        let cyc = crate::generators::condorcet_cycle(4);
        assert!(matches!(arrangement_from_embedding(&cyc, &e), Err(ReductionError::NotPaired)));
    }

    #[test]
    fn cell_counts() {
        // Three lines in general position have seven cells.
        let a = Arrangement::new(
            2,
            vec![line(int(1), int(0), int(0)), line(int(0), int(1), int(0)), line(int(1), int(1), int(1))],
        )
        .unwrap();
        let cells = enumerate_cells(&a).unwrap();
        assert_eq!(cells.len(), 7);
        for (sigma, x) in &cells {
            assert_eq!(&sign_vector(x, &a).unwrap(), sigma);
        }
        assert!(!cells.iter().any(|(s, _)| *s == sv("--+")));
    }

    #[test]
    fn text_formats() {
        let s = SignVectorSet::parse("# cells\n+-\n\u{2212}+\n\n++\n").unwrap();
        assert_eq!(s, set(2, &["+-", "-+", "++"]));
        assert_eq!(SignVectorSet::parse(&s.to_string()).unwrap(), s);
        assert!(SignVectorSet::parse("+0\n").is_err());
        assert!(SignVectorSet::parse("+-\n+\n").is_err());
        let (a, _, _) = example();
        assert_eq!(Arrangement::parse(&a.to_string()).unwrap(), a);
        assert!(Arrangement::parse("1 2 3\n1 2\n").is_err());
    }

    #[test]
    fn realizability_script_shape() {
        let s = set(1, &["+", "-"]);
        let script = realizability_script(&s, 1).unwrap();
        assert_eq!(script.variables.len(), 2 + 2);
        assert_eq!(script.assertions.len(), 1 + 2);
    }

    #[test]
    fn realizability_with_solver() {
        let Some(config) = SolverConfig::detect() else { return };
        let t = Duration::from_secs(60);
        assert!(matches!(realizable(&set(1, &["+", "-"]), 1, &config, t).unwrap(), SolverOutcome::Sat(_)));
        let (_, s, _) = example();
        assert!(matches!(realizable(&s, 2, &config, t).unwrap(), SolverOutcome::Sat(_)));
    }
}
