use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use euclid_core::smt::{SolverConfig, DEFAULT_SOLVER_COMMAND, SCRATCH_ENV, SOLVER_ENV};
use serde::Deserialize;

pub const CONFIG_ENV: &str = "EUCLID_CONFIG";
pub const DEFAULT_CONFIG_FILE: &str = "euclid.toml";

/// Settings read from a TOML file. Every field is optional.
#[derive(Debug, Default, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub solver: Option<String>,
    pub scratch_dir: Option<PathBuf>,
    pub timeout: Option<u64>,
    pub lp_budget: Option<u64>,
    pub keep_scripts: Option<bool>,
}

impl FileConfig {
    /// `explicit`, else `$EUCLID_CONFIG`, else `./euclid.toml` if present.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        let path = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV)
                .map(PathBuf::from)
                .or_else(|| Some(PathBuf::from(DEFAULT_CONFIG_FILE)).filter(|p| p.is_file())),
        };
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Values given on the command line; they win over everything else.
#[derive(Debug, Default, Clone)]
pub struct FlagConfig {
    pub solver: Option<String>,
    pub scratch_dir: Option<PathBuf>,
    pub timeout: Option<u64>,
    pub lp_budget: Option<u64>,
    pub keep_scripts: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// `None` when no solver is configured and `z3` is not on the path.
    pub solver: Option<SolverConfig>,
    pub timeout: u64,
    pub lp_budget: u64,
}

pub const DEFAULT_TIMEOUT: u64 = 60;

fn on_path(program: &str) -> bool {
    std::env::var_os("PATH").is_some_and(|paths| std::env::split_paths(&paths).any(|dir| dir.join(program).is_file()))
}

/// Flags, then environment, then file, then built-in defaults.
pub fn resolve(flags: &FlagConfig, file: &FileConfig, env: impl Fn(&str) -> Option<String>) -> Settings {
    let env_solver = env(SOLVER_ENV).filter(|c| !c.trim().is_empty());
    let command = flags
        .solver
        .clone()
        .or(env_solver)
        .or_else(|| file.solver.clone())
        .or_else(|| on_path("z3").then(|| DEFAULT_SOLVER_COMMAND.to_string()));
    let scratch = flags
        .scratch_dir
        .clone()
        .or_else(|| env(SCRATCH_ENV).map(PathBuf::from))
        .or_else(|| file.scratch_dir.clone());
    let solver = command.map(|c| {
        let mut config = SolverConfig::new(c);
        if let Some(dir) = scratch {
            config.scratch_dir = dir;
        }
        config.keep_scripts = flags.keep_scripts || file.keep_scripts.unwrap_or(false);
        config
    });
    Settings {
        solver,
        timeout: flags.timeout.or(file.timeout).unwrap_or(DEFAULT_TIMEOUT),
        lp_budget: flags.lp_budget.or(file.lp_budget).unwrap_or(euclid_core::minkowski::Budget::default().lp_solves),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file() -> FileConfig {
        FileConfig {
            solver: Some("file-solver".into()),
            scratch_dir: Some("/file".into()),
            timeout: Some(5),
            lp_budget: Some(7),
            keep_scripts: None,
        }
    }

    #[test]
    fn flags_beat_env_beat_file() {
        let env = |k: &str| match k {
            SOLVER_ENV => Some("env-solver".to_string()),
            SCRATCH_ENV => Some("/env".to_string()),
            _ => None,
        };
        let s = resolve(&FlagConfig::default(), &file(), env);
        let solver = s.solver.unwrap();
        assert_eq!(solver.command, "env-solver");
        assert_eq!(solver.scratch_dir, PathBuf::from("/env"));
        assert_eq!((s.timeout, s.lp_budget), (5, 7));

        let flags = FlagConfig { solver: Some("flag".into()), timeout: Some(9), ..FlagConfig::default() };
        let s = resolve(&flags, &file(), env);
        assert_eq!(s.solver.unwrap().command, "flag");
        assert_eq!(s.timeout, 9);

        let s = resolve(&FlagConfig::default(), &file(), |_| None);
        assert_eq!(s.solver.unwrap().command, "file-solver");
    }

    #[test]
    fn blank_env_solver_is_ignored() {
        let s = resolve(&FlagConfig::default(), &file(), |k| (k == SOLVER_ENV).then(|| " ".to_string()));
        assert_eq!(s.solver.unwrap().command, "file-solver");
    }

    #[test]
    fn config_files_parse() {
        let c: FileConfig = toml::from_str("solver = \"z3 -smt2 {}\"\ntimeout = 10\n").unwrap();
        assert_eq!(c.timeout, Some(10));
        assert!(toml::from_str::<FileConfig>("typo = 1").is_err());
    }
}
