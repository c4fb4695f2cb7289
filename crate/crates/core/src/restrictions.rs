//! Single-peaked axes and single-crossing voter orders.
//!
//! Every axis on which a strict profile is single-peaked is an "onion" of the
//! first voter's ranking: the peak, then each next-ranked alternative glued to
//! the left or right end. A vote is single-peaked on an axis iff no triple has
//! its worst member between the other two, and each such triple translates
//! into an equal-side or opposite-side constraint on the glue bits. The
//! constraints are solved with a parity union-find, which also enumerates
//! every single-peaked axis.

use crate::profile::{Profile, ProfileError, ProfileKind};

pub type Axis = Vec<usize>;
pub type VoterOrder = Vec<usize>;

fn strict_ranks(profile: &Profile) -> Result<Vec<Vec<usize>>, ProfileError> {
    if profile.kind() != ProfileKind::Strict {
        return Err(ProfileError::NotStrict);
    }
    let m = profile.num_alternatives();
    Ok(profile.votes().iter().map(|v| v.strict_ranks(m).expect("strict")).collect())
}

/// Union-find where every element carries its parity relative to its root.
#[derive(Debug, Clone)]
pub(crate) struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    pub(crate) fn new(n: usize) -> Self {
        ParityUnionFind { parent: (0..n).collect(), parity: vec![false; n] }
    }

    pub(crate) fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, up) = self.find(p);
        self.parent[x] = root;
        self.parity[x] ^= up;
        (root, self.parity[x])
    }

    /// Records `bit(x) xor bit(y) = differ`; false on contradiction.
    pub(crate) fn relate(&mut self, x: usize, y: usize, differ: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return (px ^ py) == differ;
        }
        self.parent[rx] = ry;
        self.parity[rx] = px ^ py ^ differ;
        true
    }
}

/// Side of each alternative (true = right of the peak) in the onion of
/// `base`, solved from all votes. Index `m` is an anchor node fixed to
/// "left" and used for unary constraints.
struct SideSystem {
    base: Vec<usize>,
    rank: Vec<usize>,
    uf: ParityUnionFind,
}

impl SideSystem {
    fn build(ranks: &[Vec<usize>], order_of_first: &[usize]) -> Option<Self> {
        let m = order_of_first.len();
        let rank = ranks[0].clone();
        let mut uf = ParityUnionFind::new(m + 1);
        for vote in &ranks[1..] {
            for x in 0..m {
                for y in x + 1..m {
                    for z in y + 1..m {
                        // b is the voter's worst of the triple.
                        let mut t = [x, y, z];
                        t.sort_by_key(|&a| std::cmp::Reverse(vote[a]));
                        let (b, a, c) = (t[0], t[1], t[2]);
                        let ok = if rank[b] < rank[a] && rank[b] < rank[c] {
                            uf.relate(a, c, false)
                        } else if rank[b] > rank[a] && rank[b] > rank[c] {
                            true
                        } else {
                            let outer = if rank[a] > rank[b] { a } else { c };
                            uf.relate(b, outer, true)
                        };
                        if !ok {
                            return None;
                        }
                    }
                }
            }
        }
        Some(SideSystem { base: order_of_first.to_vec(), rank, uf })
    }

    /// Requires `left` to sit left of `right` on the axis.
    fn force_left_of(&mut self, left: usize, right: usize) -> bool {
        let m = self.base.len();
        let anchor = m;
        let (rl, rr) = (self.rank[left], self.rank[right]);
        // Only the farther-from-peak alternative's side matters.
        if rl < rr {
            self.uf.relate(right, anchor, true)
        } else {
            self.uf.relate(left, anchor, false)
        }
    }

    /// Free components (excluding the anchor's and the peak's) in order of
    /// their smallest-ranked member.
    fn free_roots(&mut self) -> Vec<usize> {
        let m = self.base.len();
        let (anchor_root, _) = self.uf.find(m);
        let mut roots = Vec::new();
        for &a in &self.base[1..] {
            let (r, _) = self.uf.find(a);
            if r != anchor_root && !roots.contains(&r) {
                roots.push(r);
            }
        }
        roots
    }

    /// The axis where each free root takes the side given by `choice`
    /// (bit k for root k, true = right) and anchored components follow
    /// the anchor (left).
    fn axis(&mut self, roots: &[usize], choice: &[bool]) -> Axis {
        let m = self.base.len();
        let (anchor_root, anchor_parity) = self.uf.find(m);
        let mut left = Vec::new();
        let mut right = Vec::new();
        for &a in &self.base[1..] {
            let (r, p) = self.uf.find(a);
            let side_right = if r == anchor_root {
                // Anchor bit is "left" (false).
                p ^ anchor_parity
            } else {
                let k = roots.iter().position(|&x| x == r).expect("root listed");
                p ^ choice.get(k).copied().unwrap_or(false)
            };
            if side_right {
                right.push(a);
            } else {
                left.push(a);
            }
        }
        let mut axis: Axis = left.into_iter().rev().collect();
        axis.push(self.base[0]);
        axis.extend(right);
        axis
    }
}

fn first_order(ranks: &[Vec<usize>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ranks[0].len()).collect();
    order.sort_by_key(|&a| ranks[0][a]);
    order
}

fn canonical(seq: Vec<usize>) -> Vec<usize> {
    let rev: Vec<usize> = seq.iter().rev().copied().collect();
    if rev < seq {
        rev
    } else {
        seq
    }
}

/// An axis on which every vote is single-peaked, or `None` if there is none.
/// The result is the lexicographically smaller of the axis and its reverse.
pub fn single_peaked_axis(profile: &Profile) -> Result<Option<Axis>, ProfileError> {
    let ranks = strict_ranks(profile)?;
    let m = profile.num_alternatives();
    if ranks.is_empty() || m <= 1 {
        return Ok(Some((0..m).collect()));
    }
    let base = first_order(&ranks);
    let Some(mut sides) = SideSystem::build(&ranks, &base) else {
        return Ok(None);
    };
    let roots = sides.free_roots();
    // All free components to the right reproduces the first vote's order
    // whenever that is possible.
    let all_right = vec![true; roots.len()];
    Ok(Some(canonical(sides.axis(&roots, &all_right))))
}

/// Every single-peaked axis, each listed once up to reversal, stopping after
/// `cap` axes. The flag reports whether the list is complete.
pub fn single_peaked_axes(profile: &Profile, cap: usize) -> Result<(Vec<Axis>, bool), ProfileError> {
    constrained_axes(profile, &[], cap)
}

/// Single-peaked axes on which every `(left, right)` pair appears in that
/// order. Without pairs, axes are listed once up to reversal; with pairs the
/// orientation is fixed by them.
pub(crate) fn constrained_axes(
    profile: &Profile,
    forced: &[(usize, usize)],
    cap: usize,
) -> Result<(Vec<Axis>, bool), ProfileError> {
    let ranks = strict_ranks(profile)?;
    let m = profile.num_alternatives();
    if ranks.is_empty() || m <= 1 {
        return Ok((vec![(0..m).collect()], true));
    }
    let base = first_order(&ranks);
    let Some(mut sides) = SideSystem::build(&ranks, &base) else {
        return Ok((Vec::new(), true));
    };
    for &(l, r) in forced {
        if !sides.force_left_of(l, r) {
            return Ok((Vec::new(), true));
        }
    }
    let roots = sides.free_roots();
    // Without a unary constraint the last free root only picks the orientation.
    let choosable = if forced.is_empty() { roots.len().saturating_sub(1) } else { roots.len() };
    let total = if choosable >= 63 { u64::MAX } else { 1u64 << choosable };
    let mut out = Vec::new();
    for choice in 0..total.min(cap as u64) {
        let bits: Vec<bool> = (0..roots.len()).map(|k| k < 64 && choice >> k & 1 == 1).collect();
        let axis = sides.axis(&roots, &bits);
        out.push(if forced.is_empty() { canonical(axis) } else { axis });
    }
    Ok((out, total <= cap as u64))
}

/// A voter order in which, for every pair of alternatives, the voters
/// preferring one of them form a prefix or a suffix. Equal votes end up
/// adjacent. The result is the lexicographically smaller of the order and
/// its reverse.
pub fn single_crossing_order(profile: &Profile) -> Result<Option<VoterOrder>, ProfileError> {
    let ranks = strict_ranks(profile)?;
    let n = ranks.len();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    let far = (0..n).max_by_key(|&v| (kendall_tau(&ranks[0], &ranks[v]), std::cmp::Reverse(v))).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (kendall_tau(&ranks[far], &ranks[v]), v));
    if is_single_crossing_by_ranks(&ranks, &order) {
        Ok(Some(canonical(order)))
    } else {
        Ok(None)
    }
}

/// Number of alternative pairs on which two strict rankings disagree.
pub fn kendall_tau(a: &[usize], b: &[usize]) -> usize {
    let m = a.len();
    let mut count = 0;
    for x in 0..m {
        for y in x + 1..m {
            if (a[x] < a[y]) != (b[x] < b[y]) {
                count += 1;
            }
        }
    }
    count
}

/// Definitional check: no vote has its worst element of a triple strictly
/// between the other two on `axis`.
pub fn is_single_peaked_on(profile: &Profile, axis: &[usize]) -> Result<bool, ProfileError> {
    let ranks = strict_ranks(profile)?;
    Ok(is_axis_of(&ranks, axis))
}

pub(crate) fn is_axis_of(ranks: &[Vec<usize>], axis: &[usize]) -> bool {
    // Walking along the axis, ranks must fall then rise: no interior maximum.
    ranks.iter().all(|rank| {
        let seq: Vec<usize> = axis.iter().map(|&a| rank[a]).collect();
        let Some(peak) = (0..seq.len()).min_by_key(|&i| seq[i]) else {
            return true;
        };
        seq[..=peak].windows(2).all(|w| w[0] > w[1])
            && seq[peak..].windows(2).all(|w| w[0] < w[1])
    })
}

/// Definitional check of a voter order.
pub fn is_single_crossing(profile: &Profile, order: &[usize]) -> Result<bool, ProfileError> {
    let ranks = strict_ranks(profile)?;
    Ok(is_single_crossing_by_ranks(&ranks, order))
}

fn is_single_crossing_by_ranks(ranks: &[Vec<usize>], order: &[usize]) -> bool {
    let m = ranks.first().map_or(0, Vec::len);
    for x in 0..m {
        for y in x + 1..m {
            let prefers = |v: usize| ranks[v][x] < ranks[v][y];
            let flips = order.windows(2).filter(|w| prefers(w[0]) != prefers(w[1])).count();
            if flips > 1 {
                return false;
            }
        }
    }
    true
}
