//! Text formats: PrefLib-style profiles, embeddings, sign vectors,
//! arrangements and ordering certificates.
//!
//! Profile files follow the PrefLib SOC/TOC layout:
//!
//! ```text
//! # DATA TYPE: soc
//! # NUMBER ALTERNATIVES: 3
//! # NUMBER VOTERS: 3
//! # ALTERNATIVE NAME 1: a
//! 2: 1, 2, 3
//! 1: 3, {1, 2}
//! ```
//!
//! Alternative ids in files are 1-based. A `# KIND: dichotomous` header
//! turns every ballot into an approval set written as one braced group.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::profile::{Alternative, Embedding, Entity, Point, Profile, ProfileError, ProfileKind, Vote, Voter};
use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: alternative {id} is not declared")]
    UndeclaredAlternative { line: usize, id: usize },
    #[error("line {line}: alternative {id} appears twice in one ballot")]
    DuplicateAlternative { line: usize, id: usize },
    #[error("line {line}: ballot does not rank every alternative")]
    IncompleteBallot { line: usize },
    #[error("header declares {declared} voters but ballots add up to {found}")]
    VoterCount { declared: usize, found: usize },
    #[error("line {line}: malformed rational `{text}`")]
    MalformedRational { line: usize, text: String },
    #[error("line {line}: expected {expected} coordinates, found {found}")]
    Dimension { line: usize, expected: usize, found: usize },
    #[error("{0} is missing")]
    MissingEntity(Entity),
    #[error("line {line}: {entity} is given twice")]
    DuplicateEntity { line: usize, entity: Entity },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> IoError {
    IoError::Syntax { line, column, message: message.into() }
}

/// One comma-separated item of a ballot; ids are as written (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    Single(usize),
    Braced(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ballot {
    pub multiplicity: usize,
    pub groups: Vec<Group>,
    /// 1-based source line, 0 for ballots built in memory.
    pub line: usize,
}

/// The file as written: ordered metadata and ballots in order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProfileDocument {
    pub metadata: Vec<(String, String)>,
    pub ballots: Vec<Ballot>,
}

impl ProfileDocument {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)).map(|(_, v)| v.as_str())
    }
}

pub fn parse_document(text: &str) -> Result<ProfileDocument, IoError> {
    let mut doc = ProfileDocument::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.strip_prefix(' ').unwrap_or(meta);
            let (key, value) = match meta.split_once(':') {
                Some((k, v)) => (k.trim().to_string(), v.strip_prefix(' ').unwrap_or(v).to_string()),
                None => (meta.trim().to_string(), String::new()),
            };
            doc.metadata.push((key, value));
        } else if !line.trim().is_empty() {
            doc.ballots.push(parse_ballot(line, line_no)?);
        }
    }
    Ok(doc)
}

fn parse_ballot(line: &str, line_no: usize) -> Result<Ballot, IoError> {
    let chars: Vec<char> = line.chars().collect();
    let Some(colon) = chars.iter().position(|&c| c == ':') else {
        return Err(syntax(line_no, 1, "expected `count: ranking`"));
    };
    let count: String = chars[..colon].iter().collect();
    let multiplicity = count
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&k| k >= 1)
        .ok_or_else(|| syntax(line_no, 1, format!("multiplicity `{}` is not a positive integer", count.trim())))?;
    let mut pos = colon + 1;
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };
    let number = |pos: &mut usize| -> Result<usize, IoError> {
        let start = *pos;
        while *pos < chars.len() && chars[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(syntax(line_no, start + 1, "expected an alternative id"));
        }
        let digits: String = chars[start..*pos].iter().collect();
        digits.parse().map_err(|_| syntax(line_no, start + 1, "alternative id out of range"))
    };
    let mut groups = Vec::new();
    skip_ws(&mut pos);
    if pos == chars.len() {
        return Ok(Ballot { multiplicity, groups, line: line_no });
    }
    loop {
        skip_ws(&mut pos);
        match chars.get(pos) {
            Some('{') => {
                pos += 1;
                let mut ids = Vec::new();
                skip_ws(&mut pos);
                if chars.get(pos) != Some(&'}') {
                    loop {
                        skip_ws(&mut pos);
                        ids.push(number(&mut pos)?);
                        skip_ws(&mut pos);
                        match chars.get(pos) {
                            Some(',') => pos += 1,
                            Some('}') => break,
                            _ => return Err(syntax(line_no, pos + 1, "expected `,` or `}`")),
                        }
                    }
                }
                pos += 1;
                groups.push(Group::Braced(ids));
            }
            Some(c) if c.is_ascii_digit() => groups.push(Group::Single(number(&mut pos)?)),
            Some(_) => return Err(syntax(line_no, pos + 1, "expected an alternative id or `{`")),
            None => return Err(syntax(line_no, pos + 1, "ranking ends with `,`")),
        }
        skip_ws(&mut pos);
        match chars.get(pos) {
            None => break,
            Some(',') => pos += 1,
            Some(_) => return Err(syntax(line_no, pos + 1, "expected `,`")),
        }
    }
    Ok(Ballot { multiplicity, groups, line: line_no })
}

/// Writes a document in PrefLib style; inverse of [`parse_document`] for
/// files in that style.
pub fn write_document(doc: &ProfileDocument) -> String {
    let mut out = String::new();
    for (key, value) in &doc.metadata {
        let _ = writeln!(out, "# {key}: {value}");
    }
    for ballot in &doc.ballots {
        let items: Vec<String> = ballot
            .groups
            .iter()
            .map(|g| match g {
                Group::Single(a) => a.to_string(),
                Group::Braced(ids) => {
                    format!("{{{}}}", ids.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "))
                }
            })
            .collect();
        let _ = writeln!(out, "{}: {}", ballot.multiplicity, items.join(", "));
    }
    out
}

fn is_dichotomous(doc: &ProfileDocument) -> bool {
    doc.get("KIND").is_some_and(|k| k.trim().eq_ignore_ascii_case("dichotomous"))
}

pub fn profile_from_document(doc: &ProfileDocument) -> Result<Profile, IoError> {
    let mut names: Vec<(usize, String)> = Vec::new();
    let mut declared = None;
    let mut declared_voters = None;
    for (key, value) in &doc.metadata {
        let upper = key.to_ascii_uppercase();
        if let Some(id) = upper.strip_prefix("ALTERNATIVE NAME ") {
            if let Ok(id) = id.trim().parse::<usize>() {
                names.push((id, value.clone()));
            }
        } else if upper == "NUMBER ALTERNATIVES" {
            declared = value.trim().parse::<usize>().ok();
        } else if upper == "NUMBER VOTERS" {
            declared_voters = value.trim().parse::<usize>().ok();
        }
    }
    let m = match declared {
        Some(m) => m,
        None => doc
            .ballots
            .iter()
            .flat_map(|b| b.groups.iter())
            .flat_map(|g| match g {
                Group::Single(a) => vec![*a],
                Group::Braced(ids) => ids.clone(),
            })
            .chain(names.iter().map(|(id, _)| *id))
            .max()
            .unwrap_or(0),
    };
    let dichotomous = is_dichotomous(doc);
    let mut votes = Vec::new();
    for ballot in &doc.ballots {
        let vote = ballot_vote(ballot, m, dichotomous)?;
        for _ in 0..ballot.multiplicity {
            votes.push(vote.clone());
        }
    }
    if let Some(n) = declared_voters {
        if n != votes.len() {
            return Err(IoError::VoterCount { declared: n, found: votes.len() });
        }
    }
    let mut alt_names = vec![None; m];
    for (id, name) in names {
        if id == 0 || id > m {
            return Err(IoError::UndeclaredAlternative { line: 0, id });
        }
        alt_names[id - 1] = Some(name);
    }
    let alternatives = alt_names.into_iter().enumerate().map(|(id, name)| Alternative { id, name }).collect();
    let voters = (0..votes.len()).map(|id| Voter { id, name: None }).collect();
    let profile = Profile::new(alternatives, voters, votes)?;
    let toc = doc.get("DATA TYPE").is_some_and(|t| t.trim().eq_ignore_ascii_case("toc"));
    Ok(if dichotomous {
        profile.mark_dichotomous()
    } else if toc {
        profile.into_weak()
    } else {
        profile
    })
}

fn ballot_vote(ballot: &Ballot, m: usize, dichotomous: bool) -> Result<Vote, IoError> {
    let line = ballot.line;
    let mut seen = BTreeSet::new();
    let mut check = |id: usize| -> Result<usize, IoError> {
        if id == 0 || id > m {
            return Err(IoError::UndeclaredAlternative { line, id });
        }
        if !seen.insert(id) {
            return Err(IoError::DuplicateAlternative { line, id });
        }
        Ok(id - 1)
    };
    if dichotomous {
        let mut approved = BTreeSet::new();
        let braced = ballot.groups.iter().filter(|g| matches!(g, Group::Braced(_))).count();
        if braced > 1 || (braced == 1 && ballot.groups.len() > 1) {
            return Err(syntax(line, 1, "a dichotomous ballot is one approval set"));
        }
        for g in &ballot.groups {
            match g {
                Group::Single(a) => {
                    approved.insert(check(*a)?);
                }
                Group::Braced(ids) => {
                    for &a in ids {
                        approved.insert(check(a)?);
                    }
                }
            }
        }
        return Ok(Vote::Dichotomous(approved));
    }
    let mut classes = Vec::new();
    for g in &ballot.groups {
        match g {
            Group::Single(a) => classes.push(vec![check(*a)?]),
            Group::Braced(ids) => {
                if ids.is_empty() {
                    return Err(syntax(line, 1, "empty tie group"));
                }
                classes.push(ids.iter().map(|&a| check(a)).collect::<Result<Vec<_>, _>>()?);
            }
        }
    }
    if seen.len() != m {
        return Err(IoError::IncompleteBallot { line });
    }
    if classes.iter().all(|c| c.len() == 1) {
        Ok(Vote::Strict(classes.into_iter().map(|c| c[0]).collect()))
    } else {
        Ok(Vote::Weak(classes))
    }
}

pub fn parse_profile(text: &str) -> Result<Profile, IoError> {
    profile_from_document(&parse_document(text)?)
}

/// Canonical document: identical votes merged, most frequent first (ties
/// keep first appearance), names only where present.
pub fn document_from_profile(profile: &Profile) -> ProfileDocument {
    let m = profile.num_alternatives();
    let mut unique: Vec<(Vote, usize)> = Vec::new();
    for vote in profile.votes() {
        match unique.iter_mut().find(|(v, _)| v == vote) {
            Some((_, k)) => *k += 1,
            None => unique.push((vote.clone(), 1)),
        }
    }
    unique.sort_by_key(|(_, k)| std::cmp::Reverse(*k));
    let data_type = match profile.kind() {
        ProfileKind::Strict => "soc",
        ProfileKind::Weak => "toc",
        ProfileKind::Dichotomous => "toi",
    };
    let mut metadata = vec![("DATA TYPE".to_string(), data_type.to_string())];
    if profile.kind() == ProfileKind::Dichotomous {
        metadata.push(("KIND".into(), "dichotomous".into()));
    }
    metadata.push(("NUMBER ALTERNATIVES".into(), m.to_string()));
    metadata.push(("NUMBER VOTERS".into(), profile.num_voters().to_string()));
    metadata.push(("NUMBER UNIQUE ORDERS".into(), unique.len().to_string()));
    for alt in profile.alternatives() {
        if let Some(name) = &alt.name {
            metadata.push((format!("ALTERNATIVE NAME {}", alt.id + 1), name.clone()));
        }
    }
    let ballots = unique
        .into_iter()
        .map(|(vote, multiplicity)| {
            let groups = match &vote {
                Vote::Strict(order) => order.iter().map(|&a| Group::Single(a + 1)).collect(),
                Vote::Weak(classes) => classes
                    .iter()
                    .map(|c| if c.len() == 1 { Group::Single(c[0] + 1) } else { Group::Braced(c.iter().map(|a| a + 1).collect()) })
                    .collect(),
                Vote::Dichotomous(approved) => vec![Group::Braced(approved.iter().map(|a| a + 1).collect())],
            };
            Ballot { multiplicity, groups, line: 0 }
        })
        .collect();
    ProfileDocument { metadata, ballots }
}

pub fn serialize_profile(profile: &Profile) -> String {
    write_document(&document_from_profile(profile))
}

/// ```text
/// dimension 2
/// v:0 0 1/2
/// a:0 -3/2 1
/// ```
pub fn write_embedding(embedding: &Embedding) -> String {
    let mut out = format!("dimension {}\n", embedding.dimension());
    for (entity, point) in embedding.entities() {
        let coords: Vec<String> = point.coords().iter().map(format_rational).collect();
        let _ = writeln!(out, "{entity} {}", coords.join(" "));
    }
    out
}

pub fn parse_entity(token: &str) -> Option<Entity> {
    let (kind, id) = token.split_once(':')?;
    let id = id.parse().ok()?;
    match kind {
        "v" => Some(Entity::Voter(id)),
        "a" => Some(Entity::Alternative(id)),
        _ => None,
    }
}

/// Reads an embedding. Blank lines and `#` comments are ignored; entity
/// lines may come in any order but ids must be dense.
pub fn read_embedding(text: &str) -> Result<Embedding, IoError> {
    let mut dimension = None;
    let mut voters: Vec<Option<Point>> = Vec::new();
    let mut alternatives: Vec<Option<Point>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let head = tokens.next().expect("non-empty line");
        let Some(d) = dimension else {
            if head != "dimension" {
                return Err(syntax(line_no, 1, "expected `dimension d` header"));
            }
            let value = tokens.next().and_then(|t| t.parse::<usize>().ok()).filter(|&d| d >= 1);
            dimension = Some(value.ok_or_else(|| syntax(line_no, 11, "dimension must be a positive integer"))?);
            if tokens.next().is_some() {
                return Err(syntax(line_no, 1, "unexpected text after dimension"));
            }
            continue;
        };
        let entity = parse_entity(head).ok_or_else(|| syntax(line_no, 1, format!("expected `v:<i>` or `a:<j>`, found `{head}`")))?;
        let coords = tokens
            .map(|t| parse_rational(t).map_err(|_| IoError::MalformedRational { line: line_no, text: t.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() != d {
            return Err(IoError::Dimension { line: line_no, expected: d, found: coords.len() });
        }
        let (slots, id) = match entity {
            Entity::Voter(i) => (&mut voters, i),
            Entity::Alternative(j) => (&mut alternatives, j),
        };
        if slots.len() <= id {
            slots.resize(id + 1, None);
        }
        if slots[id].replace(Point::new(coords)).is_some() {
            return Err(IoError::DuplicateEntity { line: line_no, entity });
        }
    }
    let d = dimension.ok_or_else(|| syntax(1, 1, "missing `dimension d` header"))?;
    let dense = |slots: Vec<Option<Point>>, make: fn(usize) -> Entity| {
        slots
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or(IoError::MissingEntity(make(i))))
            .collect::<Result<Vec<_>, _>>()
    };
    let voters = dense(voters, Entity::Voter)?;
    let alternatives = dense(alternatives, Entity::Alternative)?;
    Ok(Embedding::new(d, voters, alternatives)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::condorcet_cycle;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    const HEADER3: &str = "# NUMBER ALTERNATIVES: 3\n";

    #[test]
    fn strict_ballot() {
        let p = parse_profile(&format!("{HEADER3}1: 1,2,3\n")).unwrap();
        assert_eq!(p.votes(), &[Vote::Strict(vec![0, 1, 2])]);
        assert_eq!(p.kind(), ProfileKind::Strict);
    }

    #[test]
    fn multiplicity_expands() {
        let p = parse_profile(&format!("{HEADER3}2: 3,1,2\n")).unwrap();
        assert_eq!(p.votes(), &[Vote::Strict(vec![2, 0, 1]), Vote::Strict(vec![2, 0, 1])]);
    }

    #[test]
    fn tie_groups_are_weak() {
        let p = parse_profile(&format!("{HEADER3}1: 1,{{2,3}}\n")).unwrap();
        assert_eq!(p.votes(), &[Vote::Weak(vec![vec![0], vec![1, 2]])]);
        assert_eq!(p.kind(), ProfileKind::Weak);
    }

    #[test]
    fn incomplete_ballots() {
        let text = format!("{HEADER3}1: {{1,2}}\n");
        assert_eq!(parse_profile(&text), Err(IoError::IncompleteBallot { line: 2 }));
        let p = parse_profile(&format!("# KIND: dichotomous\n{text}1: {{}}\n")).unwrap();
        assert_eq!(p.kind(), ProfileKind::Dichotomous);
        assert_eq!(p.votes()[0], Vote::Dichotomous(BTreeSet::from([0, 1])));
        assert_eq!(p.votes()[1], Vote::Dichotomous(BTreeSet::new()));
    }

    #[test]
    fn ballot_errors() {
        assert_eq!(
            parse_profile(&format!("{HEADER3}1: 1,4,2\n")),
            Err(IoError::UndeclaredAlternative { line: 2, id: 4 })
        );
        assert_eq!(
            parse_profile(&format!("{HEADER3}1: 1,1,2\n")),
            Err(IoError::DuplicateAlternative { line: 2, id: 1 })
        );
        match parse_profile(&format!("{HEADER3}1: 1,x,2\n")) {
            Err(IoError::Syntax { line: 2, column: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_profile("0: 1\n"), Err(IoError::Syntax { column: 1, .. })));
        assert!(matches!(parse_profile("1: 1,\n"), Err(IoError::Syntax { .. })));
        assert!(matches!(parse_profile("1: {1,2\n"), Err(IoError::Syntax { .. })));
        assert_eq!(
            parse_profile(&format!("{HEADER3}# NUMBER VOTERS: 2\n1: 1,2,3\n")),
            Err(IoError::VoterCount { declared: 2, found: 1 })
        );
    }

    #[test]
    fn toc_header_makes_weak_profiles() {
        let p = parse_profile("# DATA TYPE: toc\n# NUMBER ALTERNATIVES: 2\n1: 1, 2\n").unwrap();
        assert_eq!(p.kind(), ProfileKind::Weak);
    }

    #[test]
    fn canonical_form_merges_votes() {
        let p = Profile::strict(2, vec![vec![0, 1], vec![1, 0], vec![1, 0]]).unwrap();
        assert_eq!(
            serialize_profile(&p),
            "# DATA TYPE: soc\n# NUMBER ALTERNATIVES: 2\n# NUMBER VOTERS: 3\n# NUMBER UNIQUE ORDERS: 2\n2: 2, 1\n1: 1, 2\n"
        );
    }

    #[test]
    fn cycle_round_trips() {
        let p = condorcet_cycle(3);
        assert_eq!(parse_profile(&serialize_profile(&p)).unwrap(), p);
    }

    #[test]
    fn names_round_trip() {
        let p = condorcet_cycle(3).with_alternative_names(["x", "y", "z"]).unwrap();
        let text = serialize_profile(&p);
        assert!(text.contains("# ALTERNATIVE NAME 2: y\n"));
        assert_eq!(parse_profile(&text).unwrap(), p);
    }

    #[test]
    fn document_is_lossless() {
        let text = "# FILE NAME: x.soc\n# DESCRIPTION: \n# NUMBER ALTERNATIVES: 3\n3: 1, 2, 3\n1: {2, 3}, 1\n";
        assert_eq!(write_document(&parse_document(text).unwrap()), text);
    }

    #[test]
    fn embedding_round_trip() {
        let e = Embedding::new(
            1,
            vec![Point::new(vec![int(0)])],
            vec![Point::new(vec![rat(1, 2)]), Point::new(vec![rat(-3, 2)])],
        )
        .unwrap();
        let text = write_embedding(&e);
        assert_eq!(text, "dimension 1\nv:0 0\na:0 1/2\na:1 -3/2\n");
        assert_eq!(read_embedding(&text).unwrap(), e);
        let unicode = "dimension 1\nv:0 0\na:0 1/2\na:1 \u{2212}3/2\n";
        assert_eq!(read_embedding(unicode).unwrap(), e);
    }

    #[test]
    fn embedding_errors() {
        assert!(matches!(read_embedding("v:0 1\n"), Err(IoError::Syntax { .. })));
        assert_eq!(
            read_embedding("dimension 2\nv:0 1\n"),
            Err(IoError::Dimension { line: 2, expected: 2, found: 1 })
        );
        assert_eq!(
            read_embedding("dimension 1\nv:0 1/0\n"),
            Err(IoError::MalformedRational { line: 2, text: "1/0".into() })
        );
        assert_eq!(read_embedding("dimension 1\nv:1 0\n"), Err(IoError::MissingEntity(Entity::Voter(0))));
        assert!(matches!(read_embedding("dimension 1\nv:0 0\nv:0 1\n"), Err(IoError::DuplicateEntity { .. })));
    }

    fn arb_profile() -> impl Strategy<Value = Profile> {
        (1usize..=5, 0usize..=6, 0u8..3).prop_flat_map(|(m, n, kind)| {
            let vote = (Just((0..m).collect::<Vec<usize>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), m));
            prop::collection::vec(vote, n).prop_map(move |raw| {
                let votes: Vec<Vote> = raw
                    .into_iter()
                    .map(|(order, cuts)| match kind {
                        0 => Vote::Strict(order),
                        1 => {
                            let mut classes: Vec<Vec<usize>> = vec![vec![order[0]]];
                            for (a, cut) in order[1..].iter().zip(&cuts) {
                                if *cut {
                                    classes.push(vec![*a]);
                                } else {
                                    classes.last_mut().unwrap().push(*a);
                                }
                            }
                            Vote::Weak(classes)
                        }
                        _ => Vote::Dichotomous(order.iter().zip(&cuts).filter(|(_, c)| **c).map(|(a, _)| *a).collect()),
                    })
                    .collect();
                let alternatives = (0..m).map(|id| Alternative { id, name: None }).collect();
                let voters = (0..votes.len()).map(|id| Voter { id, name: None }).collect();
                let mut p = Profile::new(alternatives, voters, votes).unwrap();
                if kind == 1 && p.kind() == ProfileKind::Strict {
                    p = Profile::weak(m, p.votes().iter().map(|v| v.classes(m)).collect()).unwrap();
                }
                p
            })
        })
    }

    fn multiset(p: &Profile) -> Vec<Vote> {
        let mut v = p.votes().to_vec();
        v.sort();
        v
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(p in arb_profile()) {
            let back = parse_profile(&serialize_profile(&p)).unwrap();
            prop_assert_eq!(back.kind(), p.kind());
            prop_assert_eq!(multiset(&back), multiset(&p));
            // Canonical text is a fixed point.
            prop_assert_eq!(serialize_profile(&back), serialize_profile(&p));
        }

        #[test]
        fn embeddings_round_trip(d in 1usize..4, coords in prop::collection::vec((-1000i64..1000, 1i64..50), 1..12)) {
            let pts: Vec<Point> = coords.chunks(d).filter(|c| c.len() == d).map(|c| Point::new(c.iter().map(|&(n, q)| rat(n, q)).collect())).collect();
            prop_assume!(!pts.is_empty());
            let split = pts.len() / 2;
            let e = Embedding::new(d, pts[..split].to_vec(), pts[split..].to_vec()).unwrap();
            prop_assert_eq!(read_embedding(&write_embedding(&e)).unwrap(), e);
        }
    }
}
