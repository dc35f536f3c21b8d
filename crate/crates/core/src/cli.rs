//! Command implementations behind the `semiband` binary. Each command
//! returns its output and exit code instead of touching the process, so the
//! same code serves the binary, the FFI layer and the tests.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use crate::campaign::{run_campaign, CampaignOptions};
use crate::error::{Error, Result};
use crate::io::{parse_exponent, parse_frop_json, parse_operator_json};
use crate::probe::probe_projections;
use crate::report::{analyze_interval, analyze_operator, probe_report_dto};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub max_atoms: usize,
    pub budget: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_atoms: 16,
            budget: 200,
            seed: 1,
            output: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmdOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CmdOutcome {
    fn ok(stdout: String) -> Self {
        CmdOutcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn failed(e: &Error) -> Self {
        CmdOutcome {
            code: exit_code(e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => EXIT_BUDGET,
        Error::Internal(_) | Error::Indeterminate(_) => EXIT_SELFTEST_FAILED,
        _ => EXIT_INPUT,
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn emit(text: String, output: Option<&Path>) -> Result<String> {
    match output {
        None => Ok(text),
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", p.display())))?;
            Ok(String::new())
        }
    }
}

fn run(f: impl FnOnce() -> Result<String>) -> CmdOutcome {
    match f() {
        Ok(s) => CmdOutcome::ok(s),
        Err(e) => CmdOutcome::failed(&e),
    }
}

fn check_config(cfg: &Config) -> Result<()> {
    if cfg.max_atoms == 0 {
        return Err(Error::Parse("max-atoms must be at least 1".into()));
    }
    Ok(())
}

/// The analysis report for an operator file's contents, as JSON text.
pub fn cmd_analyze_text(input: &str, cfg: &Config) -> Result<String> {
    check_config(cfg)?;
    let t = parse_operator_json(input)?;
    Ok(to_json(&analyze_operator(&t, cfg.max_atoms)?))
}

pub fn cmd_interval_text(input: &str, cfg: &Config) -> Result<String> {
    check_config(cfg)?;
    Ok(to_json(&analyze_interval(&parse_frop_json(input)?)?))
}

pub fn cmd_probe_text(p: &str, dims: RangeInclusive<usize>, cfg: &Config) -> Result<String> {
    let p = parse_exponent(p)?;
    Ok(to_json(&probe_report_dto(&probe_projections(
        p, dims, cfg.budget, cfg.seed,
    )?)))
}

/// Writes the report to `cfg.output` when set, otherwise returns it.
pub fn cmd_analyze(input: &Path, cfg: &Config) -> CmdOutcome {
    run(|| emit(cmd_analyze_text(&read(input)?, cfg)?, cfg.output.as_deref()))
}

pub fn cmd_interval(input: &Path, cfg: &Config) -> CmdOutcome {
    run(|| emit(cmd_interval_text(&read(input)?, cfg)?, cfg.output.as_deref()))
}

pub fn cmd_probe(p: &str, dims: RangeInclusive<usize>, cfg: &Config) -> CmdOutcome {
    run(|| emit(cmd_probe_text(p, dims, cfg)?, cfg.output.as_deref()))
}

pub fn cmd_selftest(seed: u64, tamper: bool) -> CmdOutcome {
    let report = run_campaign(CampaignOptions { seed, tamper });
    let stderr = if report.all_passed() {
        String::new()
    } else {
        format!("selftest failed: {}\n", report.failed().join(", "))
    };
    CmdOutcome {
        code: if report.all_passed() {
            EXIT_OK
        } else {
            EXIT_SELFTEST_FAILED
        },
        stdout: report.render(),
        stderr,
    }
}

/// Parses `A..B` (inclusive) or a single dimension.
pub fn parse_dims(text: &str) -> Result<RangeInclusive<usize>> {
    let bad = || Error::Parse(format!("invalid dimension range {text:?}, expected A..B"));
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (text, text),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        assert_eq!(parse_dims("2..3").unwrap(), 2..=3);
        assert_eq!(parse_dims("4").unwrap(), 4..=4);
        assert_eq!(parse_dims("2..=5").unwrap(), 2..=5);
        assert!(parse_dims("3..2").is_err());
        assert!(parse_dims("0..2").is_err());
        assert!(parse_dims("x").is_err());
    }

    #[test]
    fn exit_codes() {
        let cfg = Config::default();
        let bad = cmd_analyze_text(r#"{"matrix":[["1/0"]]}"#, &cfg).unwrap_err();
        assert_eq!(exit_code(&bad), EXIT_INPUT);
        let big = r#"{"matrix":[["0","0","0"],["0","0","0"],["0","0","0"]]}"#;
        let cfg2 = Config {
            max_atoms: 2,
            ..Config::default()
        };
        assert_eq!(exit_code(&cmd_analyze_text(big, &cfg2).unwrap_err()), EXIT_BUDGET);
        assert_eq!(exit_code(&cmd_probe_text("inf", 2..=3, &cfg).unwrap_err()), EXIT_INPUT);
    }
}
