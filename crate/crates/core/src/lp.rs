//! Exact rational linear feasibility.
//!
//! Systems mix strict (`<`), weak (`<=`) and equality rows over free
//! variables. Strict rows are compiled into weak ones with the slack-one
//! device, which is only sound for systems that are invariant under positive
//! scaling; non-homogeneous systems are first homogenized with an auxiliary
//! scale variable. The weak system is then decided by a dense phase-one
//! simplex with Bland's rule.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Lt,
    Le,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
        })
    }
}

/// `coeffs · x  relation  rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn lhs(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().zip(point).filter(|(c, _)| !c.is_zero()).map(|(c, x)| c * x).sum()
    }

    pub fn holds(&self, point: &[Rational]) -> bool {
        let lhs = self.lhs(point);
        match self.relation {
            Relation::Lt => lhs < self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    variables: Vec<String>,
    constraints: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_variables<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        LinearSystem { variables: names.into_iter().map(Into::into).collect(), constraints: Vec::new() }
    }

    pub fn add_variable(&mut self, name: impl Into<String>) -> usize {
        self.variables.push(name.into());
        for c in &mut self.constraints {
            c.coeffs.push(Rational::zero());
        }
        self.variables.len() - 1
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Adds `Σ terms  relation  rhs` from sparse `(variable, coefficient)` terms.
    /// Repeated variables accumulate.
    pub fn add(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.variables.len()];
        for (var, c) in terms {
            coeffs[*var] += c;
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn push(&mut self, constraint: Constraint) {
        assert_eq!(constraint.coeffs.len(), self.variables.len(), "coefficient vector length");
        self.constraints.push(constraint);
    }

    pub fn lt(&mut self, terms: &[(usize, Rational)], rhs: Rational) {
        self.add(terms, Relation::Lt, rhs);
    }

    pub fn le(&mut self, terms: &[(usize, Rational)], rhs: Rational) {
        self.add(terms, Relation::Le, rhs);
    }

    pub fn equal(&mut self, terms: &[(usize, Rational)], rhs: Rational) {
        self.add(terms, Relation::Eq, rhs);
    }

    pub fn gt(&mut self, terms: &[(usize, Rational)], rhs: Rational) {
        let negated: Vec<_> = terms.iter().map(|(v, c)| (*v, -c)).collect();
        self.add(&negated, Relation::Lt, -rhs);
    }

    pub fn ge(&mut self, terms: &[(usize, Rational)], rhs: Rational) {
        let negated: Vec<_> = terms.iter().map(|(v, c)| (*v, -c)).collect();
        self.add(&negated, Relation::Le, -rhs);
    }

    /// Every right-hand side is zero, so the feasible set is a cone.
    pub fn is_homogeneous(&self) -> bool {
        self.constraints.iter().all(|c| c.rhs.is_zero())
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.variables.len() && self.constraints.iter().all(|c| c.holds(point))
    }
}

impl fmt::Display for LinearSystem {
    /// One row per line, e.g. `2*x_v0 - x_a0 - x_a1 < 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            let mut first = true;
            for (var, coeff) in c.coeffs.iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                let name = &self.variables[var];
                let mag = coeff.abs();
                let sign = if coeff.is_negative() { "-" } else { "+" };
                if first {
                    if coeff.is_negative() {
                        f.write_str("-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                if mag.is_one() {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{}*{name}", format_rational(&mag))?;
                }
                first = false;
            }
            if first {
                f.write_str("0")?;
            }
            writeln!(f, " {} {}", c.relation, format_rational(&c.rhs))?;
        }
        Ok(())
    }
}

/// Returns a point satisfying every constraint of `system` exactly, or `None`
/// if the system is infeasible.
pub fn feasible(system: &LinearSystem) -> Option<Vec<Rational>> {
    let has_strict = system.constraints.iter().any(|c| c.relation == Relation::Lt);
    let solution = if !has_strict {
        solve_weak(system.num_variables(), &system.constraints)
    } else if system.is_homogeneous() {
        solve_weak(system.num_variables(), &slackened(&system.constraints))
    } else {
        // a·x < b  ⇔  a·y - b·s < 0 with y = s·x, s > 0.
        let n = system.num_variables();
        let mut rows: Vec<Constraint> = system
            .constraints
            .iter()
            .map(|c| {
                let mut coeffs = c.coeffs.clone();
                coeffs.push(-c.rhs.clone());
                Constraint { coeffs, relation: c.relation, rhs: Rational::zero() }
            })
            .collect();
        let mut scale = vec![Rational::zero(); n + 1];
        scale[n] = -Rational::one();
        rows.push(Constraint { coeffs: scale, relation: Relation::Lt, rhs: Rational::zero() });
        solve_weak(n + 1, &slackened(&rows)).map(|mut y| {
            let s = y.pop().expect("scale variable");
            y.into_iter().map(|v| v / &s).collect()
        })
    };
    if let Some(point) = &solution {
        debug_assert!(system.satisfied_by(point), "simplex returned a point violating the system");
    }
    solution
}

/// `a·x < 0` becomes `a·x <= -1`; valid for scale-invariant systems.
fn slackened(rows: &[Constraint]) -> Vec<Constraint> {
    rows.iter()
        .map(|c| match c.relation {
            Relation::Lt => {
                debug_assert!(c.rhs.is_zero());
                Constraint { coeffs: c.coeffs.clone(), relation: Relation::Le, rhs: -Rational::one() }
            }
            _ => c.clone(),
        })
        .collect()
}

/// Phase-one simplex on `{a·x <= b, a·x = b}` with free variables.
fn solve_weak(n: usize, rows: &[Constraint]) -> Option<Vec<Rational>> {
    debug_assert!(rows.iter().all(|c| c.relation != Relation::Lt));
    let m = rows.len();
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    // Columns: x+ (n), x- (n), one slack per inequality, one artificial per
    // row that cannot start with its slack basic.
    enum Start {
        Slack(Rational),
        Artificial { slack: Option<Rational> },
    }
    let mut starts = Vec::with_capacity(m);
    let mut normalized = Vec::with_capacity(m);
    for c in rows {
        let (coeffs, rhs, start) = match c.relation {
            Relation::Le if !c.rhs.is_negative() => (c.coeffs.clone(), c.rhs.clone(), Start::Slack(Rational::one())),
            Relation::Le => (
                c.coeffs.iter().map(|v| -v).collect(),
                -c.rhs.clone(),
                Start::Artificial { slack: Some(-Rational::one()) },
            ),
            Relation::Eq if c.rhs.is_negative() => {
                (c.coeffs.iter().map(|v| -v).collect(), -c.rhs.clone(), Start::Artificial { slack: None })
            }
            Relation::Eq => (c.coeffs.clone(), c.rhs.clone(), Start::Artificial { slack: None }),
            Relation::Lt => unreachable!(),
        };
        normalized.push((coeffs, rhs));
        starts.push(start);
    }
    let slack_count = starts
        .iter()
        .filter(|s| matches!(s, Start::Slack(_) | Start::Artificial { slack: Some(_) }))
        .count();
    let art_count = starts.iter().filter(|s| matches!(s, Start::Artificial { .. })).count();
    let slack_base = 2 * n;
    let art_base = slack_base + slack_count;
    let cols = art_base + art_count;

    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = slack_base;
    let mut next_art = art_base;
    for ((coeffs, rhs), start) in normalized.into_iter().zip(&starts) {
        let mut row = vec![Rational::zero(); cols + 1];
        for (j, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                row[n + j] = -&c;
                row[j] = c;
            }
        }
        row[cols] = rhs;
        match start {
            Start::Slack(sign) => {
                row[next_slack] = sign.clone();
                basis.push(next_slack);
                next_slack += 1;
            }
            Start::Artificial { slack } => {
                if let Some(sign) = slack {
                    row[next_slack] = sign.clone();
                    next_slack += 1;
                }
                row[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        tableau.push(row);
    }

    // Reduced costs of "minimize the sum of artificials".
    let mut objective = vec![Rational::zero(); cols + 1];
    for (row, &b) in tableau.iter().zip(&basis) {
        if b >= art_base {
            for (o, v) in objective.iter_mut().zip(row) {
                if !v.is_zero() {
                    *o -= v;
                }
            }
        }
    }
    for o in &mut objective[art_base..cols] {
        *o = Rational::zero();
    }

    loop {
        // Bland: lowest-index improving column.
        let Some(enter) = (0..cols).find(|&j| objective[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leave else {
            // Unbounded below cannot happen: the objective is a sum of nonnegatives.
            unreachable!("phase-one objective is bounded");
        };
        pivot(&mut tableau, &mut objective, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    if !objective[cols].is_zero() {
        return None;
    }
    let mut values = vec![Rational::zero(); cols];
    for (row, &b) in tableau.iter().zip(&basis) {
        values[b] = row[cols].clone();
    }
    Some((0..n).map(|j| &values[j] - &values[n + j]).collect())
}

fn pivot(tableau: &mut [Vec<Rational>], objective: &mut [Rational], r: usize, c: usize) {
    let inv = tableau[r][c].recip();
    if !inv.is_one() {
        for v in tableau[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
    }
    let pivot_row = std::mem::take(&mut tableau[r]);
    let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    let eliminate = |row: &mut [Rational]| {
        let factor = row[c].clone();
        if factor.is_zero() {
            return;
        }
        for &j in &nonzero {
            let delta = &factor * &pivot_row[j];
            row[j] -= delta;
        }
    };
    for (i, row) in tableau.iter_mut().enumerate() {
        if i != r {
            eliminate(row);
        }
    }
    eliminate(objective);
    tableau[r] = pivot_row;
}

#[cfg(test)]
pub(crate) mod fourier_motzkin {
    //! Independent decision procedure used only to cross-check the simplex.
    use super::*;

    #[derive(Clone)]
    struct Ineq {
        coeffs: Vec<Rational>,
        strict: bool,
        rhs: Rational,
    }

    pub fn feasible(system: &LinearSystem) -> bool {
        let mut rows = Vec::new();
        for c in system.constraints() {
            let neg = || Ineq { coeffs: c.coeffs.iter().map(|v| -v).collect(), strict: false, rhs: -c.rhs.clone() };
            match c.relation {
                Relation::Lt => rows.push(Ineq { coeffs: c.coeffs.clone(), strict: true, rhs: c.rhs.clone() }),
                Relation::Le => rows.push(Ineq { coeffs: c.coeffs.clone(), strict: false, rhs: c.rhs.clone() }),
                Relation::Eq => {
                    rows.push(Ineq { coeffs: c.coeffs.clone(), strict: false, rhs: c.rhs.clone() });
                    rows.push(neg());
                }
            }
        }
        for var in 0..system.num_variables() {
            let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
            for r in rows {
                if r.coeffs[var].is_positive() {
                    pos.push(r);
                } else if r.coeffs[var].is_negative() {
                    neg.push(r);
                } else {
                    rest.push(r);
                }
            }
            for p in &pos {
                for q in &neg {
                    let lp = -&q.coeffs[var];
                    let lq = p.coeffs[var].clone();
                    let coeffs = p.coeffs.iter().zip(&q.coeffs).map(|(a, b)| a * &lp + b * &lq).collect();
                    rest.push(Ineq { coeffs, strict: p.strict || q.strict, rhs: &p.rhs * &lp + &q.rhs * &lq });
                }
            }
            rows = rest;
        }
        rows.iter().all(|r| if r.strict { r.rhs.is_positive() } else { !r.rhs.is_negative() })
    }
}
