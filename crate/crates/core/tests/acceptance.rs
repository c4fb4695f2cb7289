//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use euclid_core::generators::{condorcet_cycle, random_arrangement, random_spatial, GenSpec};
use euclid_core::io::{parse_document, parse_profile, read_embedding, serialize_profile, write_document, write_embedding};
use euclid_core::minkowski::{check_certificate, recognize_minkowski, search_certificates, Budget, OrderingCertificate};
use euclid_core::one_d::oracle_1d;
use euclid_core::perm::permutations;
use euclid_core::profile::{embedding_size, restrict};
use euclid_core::reductions::{
    arrangement_from_embedding, embedding_from_arrangement, enumerate_cells, lift, profile_from_sign_vectors, realizable,
    sign_vector, Sign, SignVector, SignVectorSet,
};
use euclid_core::smt::{encode, model_to_embedding, solve, EncodeMode, EncodeOptions, SolverConfig, SolverOutcome};
use euclid_core::{recognize_1d, verify_embedding, Embedding, Metric, Point, Profile, RecognitionResult, Refutation, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Verified instances collected for the hereditariness check.
#[derive(Default)]
struct Pool(Vec<(Profile, Embedding, Metric)>);

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn one_d_round_trip(pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    for seed in 0..500u64 {
        let n = 1 + (seed % 8) as usize;
        let m = 1 + (seed / 8 % 8) as usize;
        let (p, _) = random_spatial(&GenSpec::new(n, m, 1, Metric::L2, seed)).map_err(|e| e.to_string())?;
        let r = recognize_1d(&p).map_err(|e| e.to_string())?;
        let e = r.embedding().ok_or_else(|| format!("seed {seed}: {r}"))?;
        ensure(verify_embedding(&p, e, Metric::L2).unwrap().accepted(), || format!("seed {seed}: certificate rejected"))?;
        if seed % 5 == 0 {
            pool.0.push((p, e.clone(), Metric::L2));
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("500/500 Yes and verified in {:.1}s", elapsed.as_secs_f64()))
}

fn oracle_equivalence() -> Outcome {
    let perms = permutations(3);
    let mut exhaustive = 0;
    for a in &perms {
        for b in &perms {
            for c in &perms {
                let p = Profile::strict(3, vec![a.clone(), b.clone(), c.clone()]).unwrap();
                let fast = recognize_1d(&p).unwrap().is_yes();
                let slow = oracle_1d(&p).unwrap().is_yes();
                ensure(fast == slow, || format!("disagreement on {a:?} {b:?} {c:?}"))?;
                exhaustive += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut yes = 0;
    for i in 0..1000 {
        let m = rng.random_range(1..=6);
        let n = rng.random_range(1..=6);
        // Half the profiles come from points on a line so both verdicts occur often.
        let p = if i % 2 == 0 {
            let orders = (0..n)
                .map(|_| {
                    let mut o: Vec<usize> = (0..m).collect();
                    o.shuffle(&mut rng);
                    o
                })
                .collect();
            Profile::strict(m, orders).unwrap()
        } else {
            random_spatial(&GenSpec::new(n, m, 1, Metric::L2, i)).unwrap().0
        };
        let fast = recognize_1d(&p).unwrap();
        let slow = oracle_1d(&p).unwrap();
        ensure(fast.is_yes() == slow.is_yes() && fast.is_no() == slow.is_no(), || {
            format!("disagreement on {:?}: {fast} vs {slow}", p.strict_orders())
        })?;
        yes += fast.is_yes() as usize;
    }
    Ok(format!("{exhaustive} exhaustive + 1000 random profiles agree ({yes} Yes)"))
}

fn condorcet_facts(pool: &mut Pool, solver: Option<&SolverConfig>) -> Outcome {
    let cycle = condorcet_cycle(3);
    let r = recognize_1d(&cycle).unwrap();
    ensure(matches!(r, RecognitionResult::No(Refutation::NotSinglePeaked | Refutation::NotSingleCrossing)), || {
        format!("d=1 verdict {r}")
    })?;
    let Some(config) = solver else {
        return Ok(format!("d=1 rejected ({r}); solver half skipped: no solver configured"));
    };
    let start = Instant::now();
    let script = encode(&cycle, 2, EncodeMode::Strict, EncodeOptions::default()).unwrap();
    let outcome = solve(&script, config, Duration::from_secs(60)).map_err(|e| e.to_string())?;
    let SolverOutcome::Sat(model) = outcome else { return Err(format!("d=2 outcome {outcome:?}")) };
    let e = model_to_embedding(&model, &cycle, 2, EncodeMode::Strict, script.decimal_precision).map_err(|e| e.to_string())?;
    ensure(verify_embedding(&cycle, &e, Metric::L2).unwrap().accepted(), || "recovered embedding rejected".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("solver took {elapsed:?}"))?;
    pool.0.push((cycle, e, Metric::L2));
    Ok(format!("d=1 rejected ({r}); d=2 Sat and verified in {:.2}s", elapsed.as_secs_f64()))
}

fn arrangement_round_trip(pool: &mut Pool) -> Outcome {
    let mut sizes = Vec::new();
    for seed in 0..100u64 {
        let n = 1 + (seed % 5) as usize;
        let arrangement = random_arrangement(2, n, seed).unwrap();
        let cells = enumerate_cells(&arrangement).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extremes = [SignVector::uniform(n, Sign::Plus), SignVector::uniform(n, Sign::Minus)];
        let chosen: Vec<SignVector> = cells
            .iter()
            .map(|(s, _)| s.clone())
            .filter(|s| extremes.contains(s) || rng.random_bool(0.6))
            .collect();
        let set = SignVectorSet::new(n, chosen).unwrap();
        let c = embedding_from_arrangement(&arrangement, &set, None).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(verify_embedding(&c.profile, &c.embedding, Metric::L2).unwrap().accepted(), || format!("seed {seed}: rejected"))?;
        ensure(c.profile == profile_from_sign_vectors(&set), || format!("seed {seed}: profile mismatch"))?;
        let back = arrangement_from_embedding(&c.profile, &c.embedding).map_err(|e| e.to_string())?;
        let realized: Vec<SignVector> = c.embedding.voters().iter().map(|y| sign_vector(y, &back).unwrap()).collect();
        ensure(realized.iter().eq(set.vectors()), || format!("seed {seed}: sign vectors differ"))?;
        for (j, x) in c.embedding.alternatives().iter().enumerate() {
            let ri = &c.radius * Rational::from_integer(((j / 2) as i64 + 1).into());
            let two = Rational::from_integer(2.into());
            let (lo, hi) = (&ri - &two, &ri + &two);
            let r2 = x.norm_squared();
            ensure(&lo * &lo < r2 && r2 < &hi * &hi, || format!("seed {seed}: alternative {j} outside R i +- 2"))?;
        }
        sizes.push(set.size());
        if seed % 10 == 0 {
            pool.0.push((c.profile, c.embedding, Metric::L2));
        }
    }
    Ok(format!("100 arrangements, |S| from {} to {}", sizes.iter().min().unwrap(), sizes.iter().max().unwrap()))
}

fn example_set() -> SignVectorSet {
    SignVectorSet::parse(&std::fs::read_to_string(fixtures().join("example.signs")).unwrap()).unwrap()
}

fn realisability(solver: Option<&SolverConfig>) -> Outcome {
    let Some(config) = solver else { return Ok("skipped: no solver configured".into()) };
    let limit = Duration::from_secs(60);
    let start = Instant::now();
    let sat = realizable(&example_set(), 2, config, limit).map_err(|e| e.to_string())?;
    ensure(matches!(sat, SolverOutcome::Sat(_)), || format!("example set: {sat:?}"))?;
    let t_sat = start.elapsed();
    let all: Vec<SignVector> = (0..8u32)
        .map(|b| SignVector((0..3).map(|i| if b >> i & 1 == 1 { Sign::Plus } else { Sign::Minus }).collect()))
        .collect();
    let start = Instant::now();
    let unsat = realizable(&SignVectorSet::new(3, all).unwrap(), 2, config, limit).map_err(|e| e.to_string())?;
    ensure(unsat == SolverOutcome::Unsat, || format!("eight vectors: {unsat:?}"))?;
    let t_unsat = start.elapsed();
    ensure(t_sat < limit && t_unsat < limit, || "time limit exceeded".into())?;
    // Lift cross-check: Unknown tolerated, definite answers must agree.
    let small = [SignVectorSet::parse("+\n-\n").unwrap(), SignVectorSet::parse("++\n--\n+-\n").unwrap()];
    let mut agreed = 0;
    for s in &small {
        let short = Duration::from_secs(20);
        let a = realizable(s, 1, config, short).map_err(|e| e.to_string())?;
        let b = realizable(&lift(s), 2, config, short).map_err(|e| e.to_string())?;
        let status = |o: &SolverOutcome| match o {
            SolverOutcome::Sat(_) => Some(true),
            SolverOutcome::Unsat => Some(false),
            SolverOutcome::Unknown(_) => None,
        };
        if let (Some(x), Some(y)) = (status(&a), status(&b)) {
            ensure(x == y, || format!("lift disagrees on {s}"))?;
            agreed += 1;
        }
    }
    Ok(format!(
        "example Sat in {:.2}s, eight vectors Unsat in {:.2}s, lift agrees on {agreed}/{}",
        t_sat.as_secs_f64(),
        t_unsat.as_secs_f64(),
        small.len()
    ))
}

fn minkowski_round_trip(pool: &mut Pool) -> Outcome {
    let start = Instant::now();
    let mut planar = 0;
    for metric in [Metric::L1, Metric::Linf] {
        for seed in 0..50u64 {
            let n = 1 + (seed % 3) as usize;
            let m = 2 + (seed as usize / 3) % (5 - n);
            let (p, e) = random_spatial(&GenSpec::new(n, m, 2, metric, seed)).map_err(|e| e.to_string())?;
            let cert = OrderingCertificate::from_embedding(&e, metric);
            let checked = check_certificate(&p, 2, metric, &cert).map_err(|e| e.to_string())?;
            ensure(checked.is_some(), || format!("{metric} seed {seed}: true certificate rejected"))?;
            if recognize_1d(&p).map_err(|e| e.to_string())?.embedding().is_none() {
                planar += 1;
            }
            let r = recognize_minkowski(&p, 2, metric, Budget::default()).map_err(|e| e.to_string())?;
            let found = r.embedding().ok_or_else(|| format!("{metric} seed {seed}: {r}"))?;
            ensure(verify_embedding(&p, found, metric).unwrap().accepted(), || format!("{metric} seed {seed}: rejected"))?;
            let searched = search_certificates(&p, 2, metric, Budget::default()).map_err(|e| e.to_string())?;
            let direct = searched.embedding().ok_or_else(|| format!("{metric} seed {seed}: search alone gave {searched}"))?;
            ensure(verify_embedding(&p, direct, metric).unwrap().accepted(), || format!("{metric} seed {seed}: search rejected"))?;
            if seed % 10 == 0 {
                pool.0.push((p, found.clone(), metric));
            }
        }
    }
    Ok(format!(
        "2 x 50 instances Yes and verified, with and without the line shortcut ({planar} not 1-Euclidean), in {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn size_accounting() -> Outcome {
    let rat = |q: &str| euclid_core::rational::parse_rational(q).unwrap();
    let single = |q: &str| Embedding::new(1, vec![Point::new(vec![rat(q)])], vec![]).unwrap();
    ensure(embedding_size(&single("0")) == 3, || "size(0) != 3".into())?;
    ensure(embedding_size(&single("3/2")) == 6, || "size(3/2) != 6".into())?;
    let two = Embedding::new(1, vec![Point::new(vec![rat("1")])], vec![Point::new(vec![rat("1")])]).unwrap();
    ensure(embedding_size(&two) == 8, || "size(1, 1) != 8".into())?;
    // Certificate size against n + m on line instances.
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for total in 4..=16usize {
        let mut sum = 0u64;
        let samples = 8;
        for seed in 0..samples {
            let n = total / 2;
            let (p, _) = random_spatial(&GenSpec::new(n, total - n, 1, Metric::L2, seed)).unwrap();
            let e = recognize_1d(&p).unwrap();
            sum += embedding_size(e.embedding().ok_or("not recognized")?);
        }
        xs.push((total as f64).ln());
        ys.push((sum as f64 / samples as f64).ln());
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = num / den;
    ensure(slope < 2.0, || format!("log-log slope {slope:.2}"))?;
    Ok(format!("worked examples 3, 6, 8; certificate size slope {slope:.2}"))
}

fn hereditariness(pool: &Pool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for (p, e, metric) in &pool.0 {
        for _ in 0..20 {
            let m = p.num_alternatives();
            let n = p.num_voters();
            let mut alts: BTreeSet<usize> = (0..m).filter(|_| rng.random_bool(0.6)).collect();
            if alts.is_empty() {
                alts.insert(rng.random_range(0..m));
            }
            let voters: BTreeSet<usize> = (0..n).filter(|_| rng.random_bool(0.6)).collect();
            let r = restrict(p, &alts, &voters).unwrap();
            let sub = e.restrict(&r);
            ensure(verify_embedding(&r.profile, &sub, *metric).unwrap().accepted(), || {
                format!("restriction {alts:?}/{voters:?} failed under {metric}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} restrictions of {} verified instances re-verify", pool.0.len()))
}

fn io_round_trip() -> Outcome {
    let mut files = 0;
    let mut names: Vec<PathBuf> = std::fs::read_dir(fixtures()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    let mut genuine = false;
    for path in &names {
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        let text = std::fs::read_to_string(path).unwrap();
        match ext {
            "soc" | "toc" | "soi" | "toi" => {
                let doc = parse_document(&text).map_err(|e| format!("{}: {e}", path.display()))?;
                ensure(write_document(&doc) == text, || format!("{}: bytes differ", path.display()))?;
                let p = parse_profile(&text).map_err(|e| e.to_string())?;
                ensure(parse_profile(&serialize_profile(&p)).unwrap() == p, || format!("{}: profile differs", path.display()))?;
                genuine |= ext == "soc" && doc.get("FILE NAME").is_some() && doc.get("DATA TYPE") == Some("soc");
                files += 1;
            }
            "emb" => {
                let e = read_embedding(&text).map_err(|e| e.to_string())?;
                ensure(write_embedding(&e) == text, || format!("{}: bytes differ", path.display()))?;
                ensure(read_embedding(&write_embedding(&e)).unwrap() == e, || "embedding differs".into())?;
                files += 1;
            }
            _ => {}
        }
    }
    ensure(genuine, || "no PrefLib SOC file in the corpus".into())?;
    Ok(format!("{files} fixture files round-trip byte for byte"))
}

fn main() {
    let solver = SolverConfig::detect();
    let mut pool = Pool::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "d=1 round trip", one_d_round_trip(&mut pool)));
    results.push((2, "oracle equivalence", oracle_equivalence()));
    results.push((3, "Condorcet facts", condorcet_facts(&mut pool, solver.as_ref())));
    results.push((4, "arrangement round trip", arrangement_round_trip(&mut pool)));
    results.push((5, "realisability sanity", realisability(solver.as_ref())));
    results.push((6, "l1/linf round trip", minkowski_round_trip(&mut pool)));
    results.push((7, "size accounting", size_accounting()));
    results.push((8, "hereditariness", hereditariness(&pool)));
    results.push((9, "I/O round trip", io_round_trip()));
    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
