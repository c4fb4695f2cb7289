//! Recognition under `l1` and `linf` by guessing coordinate orderings.
//!
//! Once the order of all points along every axis is fixed, each coordinate
//! difference has a known sign, so `|x - y|` is linear and the profile's
//! preferences become a linear system. For `linf` the axis achieving each
//! voter/alternative distance is guessed as well. A feasible point of the
//! system is an embedding; exhausting every guess refutes the dimension.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::lp::{feasible, LinearSystem};
use crate::one_d::{recognize_1d, RecognitionResult, Refutation, UnknownReason};
use crate::par;
use crate::profile::{verify_embedding, Embedding, Entity, Metric, Point, Profile, ProfileError, ProfileKind};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinkowskiError {
    #[error("ordering certificates apply to l1 and linf only")]
    UnsupportedMetric,
    #[error("ordering certificates need a strict profile")]
    NotStrict,
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Per-axis orders of every voter and alternative, lowest coordinate first,
/// and for `linf` the axis on which each voter/alternative distance is attained.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OrderingCertificate {
    pub axes: Vec<Vec<Entity>>,
    pub argmax: Option<BTreeMap<(usize, usize), usize>>,
}

impl OrderingCertificate {
    /// Reads the certificate off concrete points, breaking coordinate ties by
    /// entity order and argmax ties by the lowest axis.
    pub fn from_embedding(embedding: &Embedding, metric: Metric) -> Self {
        let d = embedding.dimension();
        let entities: Vec<(Entity, &Point)> = embedding.entities().collect();
        let axes = (0..d)
            .map(|k| {
                let mut order: Vec<(Entity, &Point)> = entities.clone();
                order.sort_by(|a, b| a.1 .0[k].cmp(&b.1 .0[k]));
                order.into_iter().map(|(e, _)| e).collect()
            })
            .collect();
        let argmax = (metric == Metric::Linf).then(|| {
            let mut map = BTreeMap::new();
            for (v, x) in embedding.voters().iter().enumerate() {
                for (c, y) in embedding.alternatives().iter().enumerate() {
                    let gaps: Vec<Rational> = x.0.iter().zip(&y.0).map(|(a, b)| num_traits::Signed::abs(&(a - b))).collect();
                    let best = (0..d).fold(0, |best, k| if gaps[k] > gaps[best] { k } else { best });
                    map.insert((v, c), best);
                }
            }
            map
        });
        OrderingCertificate { axes, argmax }
    }

    /// One axis order per line (`v:0 a:2 ...`), then `(v,c): axis` lines.
    pub fn parse(text: &str) -> Result<Self, MinkowskiError> {
        let mut cert = OrderingCertificate::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if let Some(rest) = line.strip_prefix('(') {
                let (pair, axis) = rest.split_once("):").ok_or_else(|| MinkowskiError::Malformed(line.into()))?;
                let (v, c) = pair.split_once(',').ok_or_else(|| MinkowskiError::Malformed(line.into()))?;
                let num = |s: &str| s.trim().parse::<usize>().map_err(|_| MinkowskiError::Malformed(line.into()));
                cert.argmax.get_or_insert_with(BTreeMap::new).insert((num(v)?, num(c)?), num(axis)?);
            } else {
                let order = line
                    .split_whitespace()
                    .map(|t| crate::io::parse_entity(t).ok_or_else(|| MinkowskiError::Malformed(format!("bad entity {t}"))))
                    .collect::<Result<_, _>>()?;
                cert.axes.push(order);
            }
        }
        Ok(cert)
    }
}

impl fmt::Display for OrderingCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for axis in &self.axes {
            let tokens: Vec<String> = axis.iter().map(Entity::to_string).collect();
            writeln!(f, "{}", tokens.join(" "))?;
        }
        for ((v, c), axis) in self.argmax.iter().flatten() {
            writeln!(f, "({v},{c}): {axis}")?;
        }
        Ok(())
    }
}

/// Compiled view of a profile for certificate checks and search.
struct Instance<'a> {
    profile: &'a Profile,
    d: usize,
    metric: Metric,
    n: usize,
    m: usize,
    /// Each voter's ranking, best first.
    rankings: Vec<Vec<usize>>,
}

/// Coordinates of the points placed so far: positions per axis (`ABSENT`
/// for unplaced ids) and each placed id's slot in the variable vector.
struct Frame {
    pos: Vec<Vec<usize>>,
    local: Vec<usize>,
    d: usize,
}

const ABSENT: usize = usize::MAX;

impl Frame {
    fn var(&self, id: usize, k: usize) -> usize {
        self.local[id] * self.d + k
    }

    fn placed(&self, id: usize) -> bool {
        self.local[id] != ABSENT
    }
}

impl<'a> Instance<'a> {
    fn new(profile: &'a Profile, d: usize, metric: Metric) -> Result<Self, MinkowskiError> {
        if metric == Metric::L2 {
            return Err(MinkowskiError::UnsupportedMetric);
        }
        if profile.kind() != ProfileKind::Strict {
            return Err(MinkowskiError::NotStrict);
        }
        if d == 0 {
            return Err(MinkowskiError::ZeroDimension);
        }
        let rankings = profile.strict_orders().expect("strict").into_iter().map(<[usize]>::to_vec).collect();
        Ok(Instance { profile, d, metric, n: profile.num_voters(), m: profile.num_alternatives(), rankings })
    }

    fn entities(&self) -> usize {
        self.n + self.m
    }

    fn alternative_id(&self, c: usize) -> usize {
        self.n + c
    }

    fn frame(&self, orders: &[Vec<usize>]) -> Frame {
        let total = self.entities();
        let pos = orders
            .iter()
            .map(|order| {
                let mut pos = vec![ABSENT; total];
                for (p, &id) in order.iter().enumerate() {
                    pos[id] = p;
                }
                pos
            })
            .collect();
        let mut local = vec![ABSENT; total];
        let mut next = 0;
        for id in 0..total {
            if orders[0].contains(&id) {
                local[id] = next;
                next += 1;
            }
        }
        Frame { pos, local, d: self.d }
    }

    /// Voter `v`'s ranking restricted to placed alternatives.
    fn placed_ranking(&self, frame: &Frame, v: usize) -> Vec<usize> {
        self.rankings[v].iter().copied().filter(|&c| frame.placed(self.alternative_id(c))).collect()
    }

    /// Some voter prefers `a` to `b` although `b` lies between it and `a`
    /// on every axis, which no monotone norm allows.
    fn dominated(&self, frame: &Frame) -> bool {
        (0..self.n).filter(|&v| frame.placed(v)).any(|v| {
            let ranking = self.placed_ranking(frame, v);
            ranking.iter().enumerate().any(|(i, &a)| {
                ranking[i + 1..].iter().any(|&b| {
                    let (ai, bi) = (self.alternative_id(a), self.alternative_id(b));
                    frame.pos.iter().all(|p| (p[v] < p[bi] && p[bi] < p[ai]) || (p[ai] < p[bi] && p[bi] < p[v]))
                })
            })
        })
    }

    /// `|x_v - x_c|` on axis `k` as linear terms, sign read off the ordering.
    fn gap(&self, frame: &Frame, v: usize, c: usize, k: usize, scale: i64, out: &mut Vec<(usize, Rational)>) {
        let ci = self.alternative_id(c);
        let s = if frame.pos[k][v] > frame.pos[k][ci] { scale } else { -scale };
        out.push((frame.var(v, k), Rational::from_integer(s.into())));
        out.push((frame.var(ci, k), Rational::from_integer((-s).into())));
    }

    fn distance(&self, frame: &Frame, argmax: Option<&[Vec<usize>]>, v: usize, c: usize, scale: i64, out: &mut Vec<(usize, Rational)>) {
        match argmax {
            None => (0..self.d).for_each(|k| self.gap(frame, v, c, k, scale, out)),
            Some(rows) => self.gap(frame, v, c, rows[v][c], scale, out),
        }
    }

    /// Constraints for the placed points: axis orders with unit gaps, argmax
    /// dominance for `linf`, and unit-slack preferences among placed points.
    fn system(&self, orders: &[Vec<usize>], argmax: Option<&[Vec<usize>]>) -> (LinearSystem, Frame) {
        let frame = self.frame(orders);
        let mut names = Vec::new();
        for id in (0..self.entities()).filter(|&id| frame.placed(id)) {
            let e = if id < self.n { format!("x_v{id}") } else { format!("x_a{}", id - self.n) };
            names.extend((0..self.d).map(|k| format!("{e}_{k}")));
        }
        let mut system = LinearSystem::with_variables(names);
        let one = Rational::one();
        for (k, order) in orders.iter().enumerate() {
            for w in order.windows(2) {
                system.le(&[(frame.var(w[0], k), one.clone()), (frame.var(w[1], k), -one.clone())], -one.clone());
            }
        }
        for v in (0..self.n).filter(|&v| frame.placed(v)) {
            let ranking = self.placed_ranking(&frame, v);
            if let Some(rows) = argmax {
                for &c in &ranking {
                    let best = rows[v][c];
                    for k in (0..self.d).filter(|&k| k != best) {
                        let mut terms = Vec::new();
                        self.gap(&frame, v, c, k, 1, &mut terms);
                        self.gap(&frame, v, c, best, -1, &mut terms);
                        system.le(&terms, Rational::from_integer(0.into()));
                    }
                }
            }
            for w in ranking.windows(2) {
                let mut terms = Vec::new();
                self.distance(&frame, argmax, v, w[0], 1, &mut terms);
                self.distance(&frame, argmax, v, w[1], -1, &mut terms);
                system.le(&terms, -one.clone());
            }
        }
        (system, frame)
    }

    fn verified(&self, frame: &Frame, x: &[Rational]) -> Option<Embedding> {
        let point = |id: usize| Point::new((0..self.d).map(|k| x[frame.var(id, k)].clone()).collect());
        let e = Embedding::new(self.d, (0..self.n).map(point).collect(), (0..self.m).map(|c| point(self.alternative_id(c))).collect())
            .expect("dimensions agree");
        let ok = verify_embedding(self.profile, &e, self.metric).map(|r| r.accepted()).unwrap_or(false);
        debug_assert!(ok, "feasible ordering systems yield embeddings");
        ok.then_some(e)
    }

    fn check(&self, orders: &[Vec<usize>], argmax: Option<&[Vec<usize>]>) -> Option<Embedding> {
        let (system, frame) = self.system(orders, argmax);
        feasible(&system).and_then(|x| self.verified(&frame, &x))
    }

    /// Insertion sequence: voters and alternatives interleaved so preference
    /// constraints appear early.
    fn insertion_order(&self) -> Vec<usize> {
        let mut seq = Vec::with_capacity(self.entities());
        let (mut v, mut c) = (0, 0);
        while v < self.n || c < self.m {
            if v < self.n && (v <= c / 2 || c >= self.m) {
                seq.push(v);
                v += 1;
            } else {
                seq.push(self.alternative_id(c));
                c += 1;
            }
        }
        seq
    }
}

fn certificate_orders(inst: &Instance, cert: &OrderingCertificate) -> Result<(Vec<Vec<usize>>, Option<Vec<Vec<usize>>>), MinkowskiError> {
    if cert.axes.len() != inst.d {
        return Err(MinkowskiError::Malformed(format!("expected {} axis orders, found {}", inst.d, cert.axes.len())));
    }
    let total = inst.entities();
    let mut orders = Vec::with_capacity(inst.d);
    for axis in &cert.axes {
        let ids: Vec<usize> = axis
            .iter()
            .map(|e| match *e {
                Entity::Voter(v) if v < inst.n => Ok(v),
                Entity::Alternative(c) if c < inst.m => Ok(inst.alternative_id(c)),
                other => Err(MinkowskiError::Malformed(format!("unknown entity {other}"))),
            })
            .collect::<Result<_, _>>()?;
        let mut seen = vec![false; total];
        for &id in &ids {
            seen[id] = true;
        }
        if ids.len() != total || seen.iter().any(|s| !s) {
            return Err(MinkowskiError::Malformed("axis order is not a permutation of all points".into()));
        }
        orders.push(ids);
    }
    let argmax = match (inst.metric, &cert.argmax) {
        (Metric::L1, None) => None,
        (Metric::L1, Some(_)) => return Err(MinkowskiError::Malformed("argmax map given for l1".into())),
        (_, None) => return Err(MinkowskiError::Malformed("linf certificate needs an argmax map".into())),
        (_, Some(map)) => {
            let mut rows = vec![vec![ABSENT; inst.m]; inst.n];
            for (&(v, c), &k) in map {
                if v >= inst.n || c >= inst.m || k >= inst.d {
                    return Err(MinkowskiError::Malformed(format!("argmax entry ({v},{c}): {k} out of range")));
                }
                rows[v][c] = k;
            }
            if rows.iter().flatten().any(|&k| k == ABSENT) {
                return Err(MinkowskiError::Malformed("argmax map is incomplete".into()));
            }
            Some(rows)
        }
    };
    Ok((orders, argmax))
}

/// Compiles the certificate into a linear system and, if it is feasible,
/// returns the embedding it yields (verified under `metric`).
pub fn check_certificate(
    profile: &Profile,
    d: usize,
    metric: Metric,
    cert: &OrderingCertificate,
) -> Result<Option<Embedding>, MinkowskiError> {
    let inst = Instance::new(profile, d, metric)?;
    let (orders, argmax) = certificate_orders(&inst, cert)?;
    Ok(inst.check(&orders, argmax.as_deref()))
}

/// The LP system for a certificate, for inspection.
pub fn certificate_system(
    profile: &Profile,
    d: usize,
    metric: Metric,
    cert: &OrderingCertificate,
) -> Result<LinearSystem, MinkowskiError> {
    let inst = Instance::new(profile, d, metric)?;
    let (orders, argmax) = certificate_orders(&inst, cert)?;
    Ok(inst.system(&orders, argmax.as_deref()).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Linear programs solved before giving up.
    pub lp_solves: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { lp_solves: 5_000 }
    }
}

/// Seeded descent on a hinge loss over floating-point coordinates. Returns
/// the axis orders and argmax map of the first zero-loss configuration; the
/// caller still checks that certificate exactly.
fn float_guess(inst: &Instance, restarts: u64) -> Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    const ITERATIONS: usize = 3000;
    const MARGIN: f64 = 0.05;
    let (d, total) = (inst.d, inst.entities());
    let linf = inst.metric == Metric::Linf;
    let coord = |x: &[f64], id: usize, k: usize| x[id * d + k];
    let dist = |x: &[f64], v: usize, c: usize| {
        let gaps = (0..d).map(|k| (coord(x, v, k) - coord(x, inst.alternative_id(c), k)).abs());
        if linf { gaps.fold(0.0, f64::max) } else { gaps.sum() }
    };
    let argmax = |x: &[f64], v: usize, c: usize| {
        (0..d)
            .max_by(|&i, &j| {
                let g = |k| (coord(x, v, k) - coord(x, inst.alternative_id(c), k)).abs();
                g(i).total_cmp(&g(j)).then(j.cmp(&i))
            })
            .expect("d > 0")
    };
    // Adds `scale * d|x_v - x_c| / dx` to the gradient.
    let push = |x: &[f64], grad: &mut [f64], v: usize, c: usize, scale: f64| {
        let ci = inst.alternative_id(c);
        let axes: Vec<usize> = if linf { vec![argmax(x, v, c)] } else { (0..d).collect() };
        for k in axes {
            let s = (coord(x, v, k) - coord(x, ci, k)).signum() * scale;
            grad[v * d + k] += s;
            grad[ci * d + k] -= s;
        }
    };
    for restart in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart);
        let mut x: Vec<f64> = (0..total * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        for it in 0..ITERATIONS {
            let mut grad = vec![0.0; x.len()];
            let mut violated = false;
            for v in 0..inst.n {
                for w in inst.rankings[v].windows(2) {
                    if dist(&x, v, w[0]) + MARGIN > dist(&x, v, w[1]) {
                        violated = true;
                        push(&x, &mut grad, v, w[0], 1.0);
                        push(&x, &mut grad, v, w[1], -1.0);
                    }
                }
            }
            if !violated {
                let orders = (0..d)
                    .map(|k| {
                        let mut ids: Vec<usize> = (0..total).collect();
                        ids.sort_by(|&a, &b| coord(&x, a, k).total_cmp(&coord(&x, b, k)).then(a.cmp(&b)));
                        ids
                    })
                    .collect();
                let rows = (0..inst.n).map(|v| (0..inst.m).map(|c| argmax(&x, v, c)).collect()).collect();
                return Some((orders, rows));
            }
            let step = 0.05 / (1.0 + it as f64 / 500.0);
            for (xi, g) in x.iter_mut().zip(&grad) {
                *xi -= step * g + step * 0.01 * rng.random_range(-1.0..1.0);
            }
        }
    }
    None
}

const GUESS_RESTARTS: u64 = 32;

/// Sibling LPs solved together; fixed so results do not depend on threads.
const BATCH: usize = 8;

enum Step {
    Found(Embedding),
    Exhausted,
    OutOfBudget,
}

/// A partial certificate: the axis orders of the points placed so far and,
/// for `linf`, the argmax axes of the placed voter/alternative pairs.
#[derive(Clone)]
struct Node {
    orders: Vec<Vec<usize>>,
    argmax: Vec<Vec<usize>>,
}

struct Search<'a, 'b> {
    inst: &'b Instance<'a>,
    seq: Vec<usize>,
    cap: u64,
    used: u64,
}

impl Search<'_, '_> {
    fn children(&self, node: &Node, depth: usize) -> Vec<Node> {
        let inst = self.inst;
        let id = self.seq[depth];
        let d = inst.d;
        let len = node.orders[0].len();
        let pairs: Vec<(usize, usize)> = if inst.metric != Metric::Linf {
            Vec::new()
        } else if id < inst.n {
            node.orders[0].iter().filter(|&&o| o >= inst.n).map(|&o| (id, o - inst.n)).collect()
        } else {
            node.orders[0].iter().filter(|&&o| o < inst.n).map(|&o| (o, id - inst.n)).collect()
        };
        let slots = (len + 1) as u64;
        let mut out = Vec::new();
        for code in 0..slots.pow(d as u32) {
            let mut rest = code;
            let places: Vec<usize> = (0..d)
                .map(|_| {
                    let p = (rest % slots) as usize;
                    rest /= slots;
                    p
                })
                .collect();
            // Mirror symmetry: the second point goes after the first on every axis.
            if depth == 1 && places.iter().any(|&p| p != 1) {
                continue;
            }
            let mut orders = node.orders.clone();
            for (order, &p) in orders.iter_mut().zip(&places) {
                order.insert(p, id);
            }
            let frame = inst.frame(&orders);
            if inst.dominated(&frame) {
                continue;
            }
            for combo in 0..(d as u64).pow(pairs.len() as u32) {
                let mut argmax = node.argmax.clone();
                let mut rest = combo;
                for &(v, c) in &pairs {
                    argmax[v][c] = (rest % d as u64) as usize;
                    rest /= d as u64;
                }
                out.push(Node { orders: orders.clone(), argmax });
            }
        }
        out
    }

    fn run(&mut self, node: &Node, depth: usize) -> Step {
        let inst = self.inst;
        let linf = inst.metric == Metric::Linf;
        let children = self.children(node, depth);
        for batch in children.chunks(BATCH) {
            if self.used >= self.cap {
                return Step::OutOfBudget;
            }
            let solved = par::map(batch, |child| {
                let (system, frame) = inst.system(&child.orders, linf.then_some(child.argmax.as_slice()));
                feasible(&system).map(|x| (x, frame))
            });
            self.used += batch.len() as u64;
            for (child, result) in batch.iter().zip(solved) {
                let Some((x, frame)) = result else { continue };
                if depth + 1 == self.seq.len() {
                    if let Some(e) = inst.verified(&frame, &x) {
                        return Step::Found(e);
                    }
                    continue;
                }
                match self.run(child, depth + 1) {
                    Step::Exhausted => {}
                    other => return other,
                }
            }
        }
        Step::Exhausted
    }
}

fn pad(embedding: &Embedding, d: usize) -> Embedding {
    let widen = |p: &Point| {
        let mut coords = p.0.clone();
        coords.resize(d, Rational::from_integer(0.into()));
        Point::new(coords)
    };
    Embedding::new(d, embedding.voters().iter().map(widen).collect(), embedding.alternatives().iter().map(widen).collect())
        .expect("dimensions agree")
}

/// Searches ordering certificates for a `d`-dimensional embedding under
/// `l1` or `linf`.
///
/// 1-Euclidean profiles are answered directly: a line embedding padded with
/// zeros is valid for every Minkowski metric. Otherwise points are inserted
/// one at a time into every axis order, and a partial certificate is
/// abandoned as soon as the sub-profile on the placed points is infeasible.
/// Every full certificate (up to mirroring the axes) is reachable, so an
/// exhausted search is a refutation. Sibling LPs run in parallel when enabled
/// and the first feasible sibling wins, so results do not depend on threads.
pub fn recognize_minkowski(profile: &Profile, d: usize, metric: Metric, budget: Budget) -> Result<RecognitionResult, MinkowskiError> {
    let inst = Instance::new(profile, d, metric)?;
    let line = recognize_1d(profile)?;
    if d == 1 {
        return Ok(line);
    }
    if let RecognitionResult::Yes(line) = line {
        let e = pad(&line, d);
        if verify_embedding(profile, &e, metric)?.accepted() {
            return Ok(RecognitionResult::Yes(e));
        }
    }
    search(&inst, budget)
}

/// The certificate search alone, without the 1-Euclidean shortcut.
pub fn search_certificates(profile: &Profile, d: usize, metric: Metric, budget: Budget) -> Result<RecognitionResult, MinkowskiError> {
    let inst = Instance::new(profile, d, metric)?;
    search(&inst, budget)
}

fn search(inst: &Instance, budget: Budget) -> Result<RecognitionResult, MinkowskiError> {
    let d = inst.d;
    let seq = inst.insertion_order();
    if seq.is_empty() {
        return Ok(RecognitionResult::Yes(Embedding::new(d, vec![], vec![])?));
    }
    if let Some((orders, rows)) = float_guess(inst, GUESS_RESTARTS) {
        if let Some(e) = inst.check(&orders, (inst.metric == Metric::Linf).then_some(rows.as_slice())) {
            return Ok(RecognitionResult::Yes(e));
        }
    }
    let root = Node { orders: vec![Vec::new(); d], argmax: vec![vec![ABSENT; inst.m]; inst.n] };
    let mut search = Search { inst, seq, cap: budget.lp_solves, used: 0 };
    Ok(match search.run(&root, 0) {
        Step::Found(e) => RecognitionResult::Yes(e),
        Step::Exhausted => RecognitionResult::No(Refutation::CertificatesExhausted { lp_solves: search.used }),
        Step::OutOfBudget => RecognitionResult::Unknown(UnknownReason::Budget { lp_solves: search.used }),
    })
}
