//! Instances with known ground truth.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::profile::{Embedding, Metric, Point, Profile, ProfileError, ProfileKind};
use crate::reductions::{Arrangement, OrientedHyperplane};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("no point set in general position after {0} attempts")]
    RejectionCap(u32),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Coordinates are drawn uniformly from `{k / denominator : |k| <= denominator}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub metric: Metric,
    pub seed: u64,
    pub denominator: u64,
    pub max_attempts: u32,
}

pub const DEFAULT_DENOMINATOR: u64 = 1_000_000;

impl GenSpec {
    pub fn new(n: usize, m: usize, d: usize, metric: Metric, seed: u64) -> Self {
        GenSpec { n, m, d, metric, seed, denominator: DEFAULT_DENOMINATOR, max_attempts: 10_000 }
    }
}

fn sample_point(rng: &mut ChaCha8Rng, d: usize, den: u64) -> Point {
    let den = den as i64;
    let denom = BigInt::from(den);
    Point::new(
        (0..d)
            .map(|_| Rational::new(BigInt::from(rng.random_range(-den..=den)), denom.clone()))
            .collect(),
    )
}

/// Strict ranking of alternatives by distance from `voter`, or `None` on a tie.
fn ranking(metric: Metric, voter: &Point, alternatives: &[Point]) -> Option<Vec<usize>> {
    let keys: Vec<Rational> = alternatives.iter().map(|a| metric.distance_key(voter, a)).collect();
    let mut order: Vec<usize> = (0..alternatives.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    order.windows(2).all(|w| keys[w[0]] != keys[w[1]]).then_some(order)
}

/// For the polyhedral metrics the ordering certificate is read off the
/// points, so coordinates must be distinct per axis and, for `linf`, the
/// largest coordinate gap of every voter/alternative pair must be unique.
fn general_position(metric: Metric, voters: &[Point], alternatives: &[Point], d: usize) -> bool {
    if metric == Metric::L2 {
        return true;
    }
    for axis in 0..d {
        let mut coords: Vec<&Rational> = voters.iter().chain(alternatives).map(|p| &p.0[axis]).collect();
        coords.sort();
        if coords.windows(2).any(|w| w[0] == w[1]) {
            return false;
        }
    }
    if metric == Metric::Linf {
        for v in voters {
            for a in alternatives {
                let mut gaps: Vec<Rational> = v.0.iter().zip(&a.0).map(|(x, y)| (x - y).abs()).collect();
                gaps.sort();
                if gaps.len() >= 2 && gaps[gaps.len() - 1] == gaps[gaps.len() - 2] {
                    return false;
                }
            }
        }
    }
    true
}

/// Random points and the strict profile they induce under `spec.metric`.
/// Voters that are equidistant from two alternatives are redrawn.
pub fn random_spatial(spec: &GenSpec) -> Result<(Profile, Embedding), GenError> {
    if spec.d == 0 || spec.m == 0 || spec.n == 0 {
        return Err(GenError::InvalidSpec("n, m and d must be positive".into()));
    }
    if spec.denominator == 0 || spec.denominator > i64::MAX as u64 {
        return Err(GenError::InvalidSpec("denominator out of range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut attempts = 0u32;
    let bump = |attempts: &mut u32| {
        *attempts += 1;
        if *attempts > spec.max_attempts {
            Err(GenError::RejectionCap(spec.max_attempts))
        } else {
            Ok(())
        }
    };
    loop {
        let alternatives: Vec<Point> = (0..spec.m).map(|_| sample_point(&mut rng, spec.d, spec.denominator)).collect();
        let mut voters = Vec::with_capacity(spec.n);
        let mut orders = Vec::with_capacity(spec.n);
        while voters.len() < spec.n {
            let v = sample_point(&mut rng, spec.d, spec.denominator);
            match ranking(spec.metric, &v, &alternatives) {
                Some(order) => {
                    voters.push(v);
                    orders.push(order);
                }
                None => bump(&mut attempts)?,
            }
        }
        if !general_position(spec.metric, &voters, &alternatives, spec.d) {
            bump(&mut attempts)?;
            continue;
        }
        let profile = Profile::strict(spec.m, orders)?;
        let embedding = Embedding::new(spec.d, voters, alternatives)?;
        return Ok((profile, embedding));
    }
}

/// `k` voters over `k` alternatives; voter `j` ranks `j, j+1, ..., j-1` (mod k).
pub fn condorcet_cycle(k: usize) -> Profile {
    assert!(k >= 1, "cycle needs at least one alternative");
    let orders = (0..k).map(|j| (0..k).map(|i| (i + j) % k).collect()).collect();
    Profile::strict(k, orders).expect("cyclic shifts are permutations")
}

/// Embeds any strict profile over `m` alternatives in dimension `m - 1`.
///
/// Alternative 0 sits at the origin and alternative `j` at the `j`-th unit
/// vector. A voter at `y` has squared distance `|y|^2` to alternative 0 and
/// `|y|^2 - 2 y_j + 1` to alternative `j`, so choosing
/// `y_j = (1 + rank(0) - rank(j)) / 2` makes every squared distance equal to
/// `|y|^2` plus the rank offset `rank(j) - rank(0)`.
pub fn simplex_embedding(profile: &Profile) -> Result<Embedding, ProfileError> {
    if profile.kind() != ProfileKind::Strict {
        return Err(ProfileError::NotStrict);
    }
    let m = profile.num_alternatives();
    if m <= 1 {
        let origin = || Point::origin(1);
        return Embedding::new(1, (0..profile.num_voters()).map(|_| origin()).collect(), (0..m).map(|_| origin()).collect());
    }
    let d = m - 1;
    let alternatives = (0..m)
        .map(|j| {
            let mut coords = vec![Rational::zero(); d];
            if j > 0 {
                coords[j - 1] = Rational::one();
            }
            Point::new(coords)
        })
        .collect();
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let voters = profile
        .votes()
        .iter()
        .map(|vote| {
            let rank = vote.strict_ranks(m).expect("strict");
            Point::new(
                (1..m)
                    .map(|j| (Rational::one() + Rational::from_integer(BigInt::from(rank[0] as i64 - rank[j] as i64))) * &half)
                    .collect(),
            )
        })
        .collect();
    Embedding::new(d, voters, alternatives)
}

/// `n` oriented hyperplanes in `R^d` with small integer normals, each crossing
/// the segment between two random points `P` and `Q` and oriented with `Q`
/// on its positive side, so the all-minus and all-plus cells are nonempty.
pub fn random_arrangement(d: usize, n: usize, seed: u64) -> Result<Arrangement, GenError> {
    if d == 0 {
        return Err(GenError::InvalidSpec("d must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = sample_point(&mut rng, d, 10);
    let mut q = sample_point(&mut rng, d, 10);
    while q == p {
        q = sample_point(&mut rng, d, 10);
    }
    let dir = q.sub(&p);
    let mut hyperplanes = Vec::with_capacity(n);
    while hyperplanes.len() < n {
        let normal = Point::new((0..d).map(|_| Rational::from_integer(rng.random_range(-9i64..=9).into())).collect());
        let along = normal.dot(&dir);
        if along.is_zero() {
            continue;
        }
        let t = Rational::new(BigInt::from(rng.random_range(1i64..=99)), BigInt::from(100));
        let through = p.add(&dir.scale(&t));
        let normal = if along.is_negative() { normal.scale(&-Rational::one()) } else { normal };
        let offset = normal.dot(&through);
        hyperplanes.push(OrientedHyperplane::new(normal, offset));
    }
    Ok(Arrangement::new(d, hyperplanes).expect("normals are nonzero"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{restrict, verify_embedding};
    use crate::rational::int;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn spatial_outputs_verify() {
        for metric in [Metric::L2, Metric::L1, Metric::Linf] {
            for d in 1..=3 {
                for seed in 0..20 {
                    let (p, e) = random_spatial(&GenSpec::new(5, 4, d, metric, seed)).unwrap();
                    assert!(verify_embedding(&p, &e, metric).unwrap().accepted());
                }
            }
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let spec = GenSpec::new(4, 5, 2, Metric::L2, 7);
        assert_eq!(random_spatial(&spec).unwrap(), random_spatial(&spec).unwrap());
        let other = GenSpec { seed: 8, ..spec };
        assert_ne!(random_spatial(&spec).unwrap(), random_spatial(&other).unwrap());
    }

    #[test]
    fn coarse_grid_hits_the_cap() {
        let spec = GenSpec { denominator: 1, max_attempts: 50, ..GenSpec::new(3, 6, 1, Metric::L2, 1) };
        assert_eq!(random_spatial(&spec), Err(GenError::RejectionCap(50)));
    }

    #[test]
    fn cycle_shapes() {
        let one = condorcet_cycle(1);
        assert_eq!((one.num_voters(), one.num_alternatives()), (1, 1));
        let three = condorcet_cycle(3);
        assert_eq!(three.strict_orders().unwrap(), vec![&[0, 1, 2][..], &[1, 2, 0], &[2, 0, 1]]);
    }

    #[test]
    fn cycle_restrictions_stay_cyclic() {
        // Dropping one alternative of a k-cycle leaves every cyclic order of
        // the remaining k-1 alternatives with the dropped one removed.
        let p = condorcet_cycle(4);
        let r = restrict(&p, &BTreeSet::from([0, 1, 2]), &(0..4).collect()).unwrap();
        let orders: Vec<Vec<usize>> = r.profile.strict_orders().unwrap().iter().map(|o| o.to_vec()).collect();
        assert_eq!(orders, vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn simplex_examples() {
        let p = Profile::strict(2, vec![vec![0, 1]]).unwrap();
        let e = simplex_embedding(&p).unwrap();
        assert_eq!(e.dimension(), 1);
        assert_eq!(e.alternative(0).coords(), &[int(0)]);
        assert_eq!(e.alternative(1).coords(), &[int(1)]);
        assert_eq!(e.voter(0).coords(), &[int(0)]);
        let cycle = condorcet_cycle(3);
        let e = simplex_embedding(&cycle).unwrap();
        assert_eq!(e.dimension(), 2);
        assert!(verify_embedding(&cycle, &e, Metric::L2).unwrap().accepted());
        let lone = Profile::strict(1, vec![vec![0], vec![0]]).unwrap();
        let e = simplex_embedding(&lone).unwrap();
        assert_eq!(e.dimension(), 1);
        assert!(e.entities().all(|(_, p)| p == &Point::origin(1)));
    }

    #[test]
    fn arrangements_have_extreme_cells() {
        use crate::reductions::{find_cell_witness, Sign, SignVector};
        for seed in 0..20 {
            let a = random_arrangement(2, 5, seed).unwrap();
            assert_eq!(a, random_arrangement(2, 5, seed).unwrap());
            for sign in [Sign::Plus, Sign::Minus] {
                assert!(find_cell_witness(&a, &SignVector::uniform(5, sign)).unwrap().is_some());
            }
        }
    }

    proptest! {
        #[test]
        fn simplex_embedding_verifies(m in 1usize..=6, orders in prop::collection::vec(Just((0..6usize).collect::<Vec<_>>()).prop_shuffle(), 1..=6)) {
            let orders: Vec<Vec<usize>> = orders.into_iter().map(|o| o.into_iter().filter(|&a| a < m).collect()).collect();
            let p = Profile::strict(m, orders).unwrap();
            let e = simplex_embedding(&p).unwrap();
            prop_assert!(verify_embedding(&p, &e, Metric::L2).unwrap().accepted());
        }
    }
}
