//! `euclid`: recognize, certify and refute Euclidean preference profiles.
//!
//! Exit codes: 0 yes / accepted / sat, 1 no / rejected / unsat,
//! 2 unknown, 3 usage or I/O error.

mod config;
mod corpus;
mod query;
mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use euclid_core::generators::{condorcet_cycle, random_arrangement, random_spatial, simplex_embedding, GenSpec, DEFAULT_DENOMINATOR};
use euclid_core::io::{parse_profile, read_embedding, serialize_profile, write_embedding};
use euclid_core::reductions::{
    dichotomous_from_sign_vectors, embedding_from_arrangement, profile_from_sign_vectors, realizable, Arrangement, SignVectorSet,
};
use euclid_core::smt::{encode, format_model, EncodeOptions, SolverOutcome};
use euclid_core::{verify_embedding_with, Metric, Profile, RecognitionResult, VerifyMode};

use config::{FileConfig, FlagConfig, Settings};
use corpus::{run_corpus, CorpusOptions};
use query::{exit_code, parse_metric, Mode, Query};

const USAGE_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "euclid", version, about = "Decide whether preference profiles are d-Euclidean")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct SolverArgs {
    /// Solver command; `{}` is replaced by the script path [env: EUCLID_SOLVER_CMD]
    #[arg(long)]
    solver: Option<String>,
    /// Directory for solver scripts [env: EUCLID_SCRATCH_DIR]
    #[arg(long)]
    scratch_dir: Option<PathBuf>,
    /// Keep solver scripts after the run
    #[arg(long)]
    keep_scripts: bool,
    /// Solver timeout in seconds [default: 60]
    #[arg(long)]
    timeout: Option<u64>,
    /// LP solves allowed to the l1/linf search [default: 5000]
    #[arg(long)]
    lp_budget: Option<u64>,
    /// TOML config file [default: $EUCLID_CONFIG or ./euclid.toml]
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SolverArgs {
    fn settings(&self) -> Result<Settings> {
        let file = FileConfig::load(self.config.as_deref())?;
        let flags = FlagConfig {
            solver: self.solver.clone(),
            scratch_dir: self.scratch_dir.clone(),
            timeout: self.timeout,
            lp_budget: self.lp_budget,
            keep_scripts: self.keep_scripts,
        };
        Ok(config::resolve(&flags, &file, |k| std::env::var(k).ok()))
    }
}

#[derive(Args, Clone, Copy)]
struct QueryArgs {
    /// Dimension
    #[arg(long, short = 'd', default_value_t = 1)]
    dim: usize,
    /// l2, l1 or linf
    #[arg(long, default_value = "l2", value_parser = parse_metric)]
    metric: Metric,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
}

impl QueryArgs {
    fn query(self) -> Query {
        Query { d: self.dim, metric: self.metric, mode: self.mode }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a profile and print a summary, or its canonical form
    Parse {
        file: PathBuf,
        /// Print the canonical serialization instead of a summary
        #[arg(long)]
        canonical: bool,
    },
    /// Check an embedding against a profile
    Verify {
        profile: PathBuf,
        embedding: PathBuf,
        #[arg(long, default_value = "l2", value_parser = parse_metric)]
        metric: Metric,
        /// Dichotomous only: approved alternatives inside the unit ball
        #[arg(long)]
        unit_ball: bool,
    },
    /// Decide d-Euclidean membership; writes a certificate on yes
    Recognize {
        profile: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        /// Certificate path [default: <profile>.d<D>-<metric>.emb]
        #[arg(long)]
        certificate: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Print the solver script for a profile without solving it
    Encode {
        profile: PathBuf,
        #[arg(long, short = 'd', default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        /// Declare every coordinate instead of pinning leading points
        #[arg(long)]
        no_symmetry: bool,
        /// Assert every preference pair, not just consecutive ones
        #[arg(long)]
        all_pairs: bool,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Turn a set of sign vectors into a profile
    Reduce {
        signs: PathBuf,
        /// Emit the approval profile instead of the ranking profile
        #[arg(long)]
        dichotomous: bool,
        /// Hyperplanes realizing the sign vectors; enables --embedding
        #[arg(long)]
        arrangement: Option<PathBuf>,
        /// Where to write the embedding built from --arrangement
        #[arg(long, requires = "arrangement")]
        embedding: Option<PathBuf>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Ask the solver whether sign vectors come from hyperplanes in R^d
    Realize {
        signs: PathBuf,
        #[arg(long, short = 'd', default_value_t = 2)]
        dim: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Generate instances
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run one query over every profile in a directory
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        /// Worker threads [default: available cores]
        #[arg(long, short = 'j')]
        jobs: Option<usize>,
        /// Wall-clock budget for the whole run, in seconds
        #[arg(long)]
        budget: Option<u64>,
        /// One JSON record per file
        #[arg(long, default_value = "corpus-report.jsonl")]
        report: PathBuf,
        /// Directory for certificates of yes answers
        #[arg(long)]
        certificates: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Draw a 2-dimensional embedding as SVG
    Render {
        profile: PathBuf,
        embedding: PathBuf,
        /// Draw the bisector of each a<i>/b<i> pair
        #[arg(long)]
        bisectors: bool,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Random points; voters rank alternatives by distance
    Spatial {
        #[arg(long, short = 'n')]
        voters: usize,
        #[arg(long, short = 'm')]
        alternatives: usize,
        #[arg(long, short = 'd', default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value = "l2", value_parser = parse_metric)]
        metric: Metric,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Coordinates are multiples of 1/denominator in [-1, 1]
        #[arg(long, default_value_t = DEFAULT_DENOMINATOR)]
        denominator: u64,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Also write the generating points
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
    /// The cyclic profile on k alternatives
    Cycle {
        k: usize,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
        /// Also write a (k-1)-dimensional embedding
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
    /// Random oriented hyperplanes with both extreme cells
    Arrangement {
        #[arg(long, short = 'd', default_value_t = 2)]
        dim: usize,
        #[arg(long, short = 'n')]
        hyperplanes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_profile(path: &Path) -> Result<Profile> {
    parse_profile(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn default_certificate(profile: &Path, query: &Query) -> PathBuf {
    let mut name = profile.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(format!(".d{}-{}.emb", query.d, query.metric));
    profile.with_file_name(name)
}

fn recognize(path: &Path, query: Query, certificate: Option<PathBuf>, solver: &SolverArgs) -> Result<u8> {
    let profile = read_profile(path)?;
    let settings = solver.settings()?;
    let answer = query::run(&profile, &query, &settings, Duration::from_secs(settings.timeout))?;
    match &answer.result {
        RecognitionResult::Yes(e) => {
            if !verify_embedding_with(&profile, e, query.metric, answer.verify)?.accepted() {
                bail!("internal error: certificate failed re-verification");
            }
            let target = certificate.unwrap_or_else(|| default_certificate(path, &query));
            write_file(&target, &write_embedding(e))?;
            println!("{}", answer.result);
            println!("certificate: {}", target.display());
        }
        other => println!("{other}"),
    }
    println!("route: {}", serde_json::to_value(answer.route)?.as_str().unwrap_or("?"));
    Ok(exit_code(&answer.result))
}

fn verify(profile: &Path, embedding: &Path, metric: Metric, unit_ball: bool) -> Result<u8> {
    let p = read_profile(profile)?;
    let e = read_embedding(&read(embedding)?).with_context(|| format!("parsing {}", embedding.display()))?;
    let mode = if unit_ball { VerifyMode::UnitBall } else { VerifyMode::Ordinal };
    let report = verify_embedding_with(&p, &e, metric, mode)?;
    if report.accepted() {
        println!("accepted");
        return Ok(0);
    }
    println!("rejected: {} violations", report.violations.len());
    for v in &report.violations {
        println!("  {v:?}");
    }
    Ok(1)
}

fn gen(kind: GenKind) -> Result<u8> {
    match kind {
        GenKind::Spatial { voters, alternatives, dim, metric, seed, denominator, output, embedding } => {
            let spec = GenSpec { denominator, ..GenSpec::new(voters, alternatives, dim, metric, seed) };
            let (p, e) = random_spatial(&spec)?;
            emit(output.as_deref(), &serialize_profile(&p))?;
            if let Some(path) = embedding {
                write_file(&path, &write_embedding(&e))?;
            }
        }
        GenKind::Cycle { k, output, embedding } => {
            if k == 0 {
                bail!("the cycle needs at least one alternative");
            }
            let p = condorcet_cycle(k);
            emit(output.as_deref(), &serialize_profile(&p))?;
            if let Some(path) = embedding {
                write_file(&path, &write_embedding(&simplex_embedding(&p)?))?;
            }
        }
        GenKind::Arrangement { dim, hyperplanes, seed, output } => {
            emit(output.as_deref(), &random_arrangement(dim, hyperplanes, seed)?.to_string())?;
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Parse { file, canonical } => {
            let p = read_profile(&file)?;
            if canonical {
                print!("{}", serialize_profile(&p));
            } else {
                println!("kind: {:?}", p.kind());
                println!("voters: {}", p.num_voters());
                println!("alternatives: {}", p.num_alternatives());
                let names: Vec<String> = (0..p.num_alternatives()).map(|c| p.alternative_label(c)).collect();
                println!("names: {}", names.join(", "));
            }
            Ok(0)
        }
        Command::Verify { profile, embedding, metric, unit_ball } => verify(&profile, &embedding, metric, unit_ball),
        Command::Recognize { profile, query, certificate, solver } => recognize(&profile, query.query(), certificate, &solver),
        Command::Encode { profile, dim, mode, no_symmetry, all_pairs, output } => {
            let p = read_profile(&profile)?;
            let options = EncodeOptions { symmetry: !no_symmetry, consecutive_only: !all_pairs };
            let script = encode(&p, dim, mode.encode_mode(p.kind()), options)?;
            emit(output.as_deref(), &script.to_smtlib())?;
            Ok(0)
        }
        Command::Reduce { signs, dichotomous, arrangement, embedding, output } => {
            let set = SignVectorSet::parse(&read(&signs)?)?;
            let profile = if dichotomous { dichotomous_from_sign_vectors(&set) } else { profile_from_sign_vectors(&set) };
            emit(output.as_deref(), &serialize_profile(&profile))?;
            if let Some(arr) = arrangement {
                if dichotomous {
                    bail!("--arrangement builds embeddings for the ranking profile only");
                }
                let arr = Arrangement::parse(&read(&arr)?)?;
                let c = embedding_from_arrangement(&arr, &set, None)?;
                let text = write_embedding(&c.embedding);
                match embedding {
                    Some(path) => write_file(&path, &text)?,
                    None => eprint!("{text}"),
                }
            }
            Ok(0)
        }
        Command::Realize { signs, dim, solver } => {
            let set = SignVectorSet::parse(&read(&signs)?)?;
            let settings = solver.settings()?;
            let Some(config) = settings.solver else {
                println!("unknown (no solver configured)");
                return Ok(2);
            };
            Ok(match realizable(&set, dim, &config, Duration::from_secs(settings.timeout))? {
                SolverOutcome::Sat(model) => {
                    println!("sat");
                    print!("{}", format_model(&model));
                    0
                }
                SolverOutcome::Unsat => {
                    println!("unsat");
                    1
                }
                SolverOutcome::Unknown(reason) => {
                    println!("unknown ({reason})");
                    2
                }
            })
        }
        Command::Gen { kind } => gen(kind),
        Command::Corpus { dir, query, jobs, budget, report, certificates, solver } => {
            let settings = solver.settings()?;
            if let Some(dir) = &certificates {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let options = CorpusOptions { query: query.query(), jobs, budget: budget.map(Duration::from_secs), certificates };
            let result = run_corpus(&dir, &options, &settings)?;
            write_file(&report, &result.to_jsonl())?;
            print!("{}", result.table());
            Ok(0)
        }
        Command::Render { profile, embedding, bisectors, output } => {
            let p = read_profile(&profile)?;
            let e = read_embedding(&read(&embedding)?).with_context(|| format!("parsing {}", embedding.display()))?;
            emit(output.as_deref(), &render::render(&p, &e, bisectors)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}
