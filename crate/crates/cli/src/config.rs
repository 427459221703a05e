//! `key = value` run configuration.
//!
//! Lines are applied in order, then the command-line overrides; a later
//! assignment replaces an earlier one. Every problem found is reported, each
//! with its line number or override position.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use photonctx_core::experiment::{ExperimentError, ExperimentOptions, ImperfectionModel, Theory};
use photonctx_core::AssignmentDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Ideal,
    Bounds,
    NchvEnumerate,
    Run,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ideal => "ideal",
            Command::Bounds => "bounds",
            Command::NchvEnumerate => "nchv-enumerate",
            Command::Run => "run",
            Command::Sweep => "sweep",
        }
    }

    fn needs_seed(self) -> bool {
        matches!(self, Command::Run | Command::Sweep)
    }
}

impl FromStr for Command {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        [Command::Ideal, Command::Bounds, Command::NchvEnumerate, Command::Run, Command::Sweep]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
}

impl FromStr for Format {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// Uniform over the four assignments with `v(Z1)v(Z2) = v(X1)v(X2) = +1`.
    Constrained,
    /// Uniform over all sixteen assignments.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub theory: Theory,
    /// Trials per measurement context.
    pub trials: u64,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub fair_sampling: bool,
    pub ensemble: Ensemble,
    pub imperfection: ImperfectionModel,
    pub sweep_param: Option<String>,
    pub sweep_values: Vec<f64>,
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Ideal,
            theory: Theory::Qm,
            trials: DEFAULT_TRIALS,
            seed: None,
            workers: None,
            format: Format::Table,
            out: None,
            fair_sampling: true,
            ensemble: Ensemble::Constrained,
            imperfection: ImperfectionModel::ideal(),
            sweep_param: None,
            sweep_values: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn options(&self) -> ExperimentOptions {
        let ensemble = match self.ensemble {
            Ensemble::Constrained => AssignmentDistribution::constrained(),
            Ensemble::Uniform => AssignmentDistribution::uniform(),
        };
        ExperimentOptions { ensemble, workers: self.workers, fair_sampling: self.fair_sampling }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Override(usize),
    Config,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Override(n) => write!(f, "override {n}"),
            Origin::Config => f.write_str("config"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub origin: Origin,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(k) => write!(f, "{}: {k}: {}", self.origin, self.message),
            None => write!(f, "{}: {}", self.origin, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "invalid configuration ({} problem{})",
            self.issues.len(),
            if self.issues.len() == 1 { "" } else { "s" }
        )?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

struct Parser {
    cfg: RunConfig,
    issues: Vec<ConfigIssue>,
    /// Origin of the most recent assignment of each imperfection field.
    imperfection_origin: Vec<(String, Origin)>,
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

impl Parser {
    fn issue(&mut self, origin: &Origin, key: Option<&str>, message: impl Into<String>) {
        self.issues.push(ConfigIssue { origin: origin.clone(), key: key.map(str::to_string), message: message.into() });
    }

    fn assign(&mut self, origin: &Origin, key: &str, value: &str) {
        let bad = |what: &str| format!("expected {what}, got `{value}`");
        let result: Result<(), String> = match key {
            "command" => value
                .parse()
                .map(|c| self.cfg.command = c)
                .map_err(|_| bad("one of ideal, bounds, nchv-enumerate, run, sweep")),
            "theory" => value.parse().map(|t| self.cfg.theory = t).map_err(|_| bad("QM or NCHV")),
            "trials" => match value.parse::<u64>() {
                Ok(0) => Err("must be at least 1".to_string()),
                Ok(n) => {
                    self.cfg.trials = n;
                    Ok(())
                }
                Err(_) => Err(bad("a positive integer")),
            },
            "seed" => value.parse().map(|s| self.cfg.seed = Some(s)).map_err(|_| bad("a nonnegative integer")),
            "workers" => match value.parse::<usize>() {
                Ok(0) => Err("must be at least 1".to_string()),
                Ok(n) => {
                    self.cfg.workers = Some(n);
                    Ok(())
                }
                Err(_) => Err(bad("a positive integer")),
            },
            "format" => value.parse().map(|f| self.cfg.format = f).map_err(|_| bad("table or csv")),
            "out" => {
                self.cfg.out = (!value.is_empty()).then(|| PathBuf::from(value));
                Ok(())
            }
            "analysis.fair_sampling" => {
                parse_bool(value).map(|b| self.cfg.fair_sampling = b).ok_or_else(|| bad("true or false"))
            }
            "nchv.ensemble" => match value {
                "constrained" => {
                    self.cfg.ensemble = Ensemble::Constrained;
                    Ok(())
                }
                "uniform" => {
                    self.cfg.ensemble = Ensemble::Uniform;
                    Ok(())
                }
                _ => Err(bad("constrained or uniform")),
            },
            "sweep.param" => {
                let mut probe = ImperfectionModel::ideal();
                match probe.set(value, 0.0) {
                    Ok(()) => {
                        self.cfg.sweep_param = Some(value.to_string());
                        Ok(())
                    }
                    Err(_) => Err(format!("`{value}` is not an imperfection parameter")),
                }
            }
            "sweep.values" => {
                let parsed: Result<Vec<f64>, _> =
                    value.split(',').map(str::trim).filter(|v| !v.is_empty()).map(str::parse::<f64>).collect();
                parsed.map(|v| self.cfg.sweep_values = v).map_err(|_| bad("a comma-separated list of numbers"))
            }
            k if k.starts_with("imperfection.") => match value.parse::<f64>() {
                Ok(x) => match self.cfg.imperfection.set(k, x) {
                    Ok(()) => {
                        self.imperfection_origin.push((k.to_string(), origin.clone()));
                        Ok(())
                    }
                    Err(ExperimentError::UnknownParameter(_)) => Err("unknown key".to_string()),
                    Err(e) => Err(e.to_string()),
                },
                Err(_) => Err(bad("a number")),
            },
            _ => Err("unknown key".to_string()),
        };
        if let Err(message) = result {
            self.issue(origin, Some(key), message);
        }
    }

    /// Where a range-checked imperfection field was last set.
    fn origin_of(&self, field: &str) -> Origin {
        let bare = field.strip_prefix("imperfection.").unwrap_or(field);
        self.imperfection_origin
            .iter()
            .rev()
            .find(|(k, _)| {
                let k = k.strip_prefix("imperfection.").unwrap_or(k);
                k == bare || bare.starts_with(&format!("{k}."))
            })
            .map(|(_, o)| o.clone())
            .unwrap_or(Origin::Config)
    }

    fn finish(mut self) -> Result<RunConfig, ConfigError> {
        for issue in self.cfg.imperfection.issues() {
            let origin = self.origin_of(&issue.field);
            self.issue(
                &origin,
                Some(&issue.field),
                format!("{} out of range, expected {}", issue.value, issue.expected),
            );
        }
        if self.cfg.command.needs_seed() && self.cfg.seed.is_none() {
            self.issue(&Origin::Config, Some("seed"), format!("required for `{}`", self.cfg.command.name()));
        }
        if self.cfg.command == Command::Sweep {
            match &self.cfg.sweep_param {
                None => self.issue(&Origin::Config, Some("sweep.param"), "required for `sweep`"),
                Some(param) => {
                    let mut bad = Vec::new();
                    for &v in &self.cfg.sweep_values {
                        let mut imp = self.cfg.imperfection;
                        imp.set(param, v).expect("path checked when assigned");
                        bad.extend(imp.issues().into_iter().filter(|i| !self.cfg.imperfection.issues().contains(i)));
                    }
                    for i in bad {
                        self.issue(
                            &Origin::Config,
                            Some("sweep.values"),
                            format!("{} = {} out of range, expected {}", i.field, i.value, i.expected),
                        );
                    }
                }
            }
        }
        if self.issues.is_empty() {
            Ok(self.cfg)
        } else {
            Err(ConfigError { issues: self.issues })
        }
    }
}

fn split_assignment(text: &str) -> Option<(&str, &str)> {
    let (k, v) = text.split_once('=')?;
    let k = k.trim();
    (!k.is_empty()).then(|| (k, v.trim()))
}

/// Parses the configuration file and applies `overrides` on top.
pub fn parse_config(file_text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let mut p = Parser { cfg: RunConfig::default(), issues: Vec::new(), imperfection_origin: Vec::new() };
    for (n, raw) in file_text.lines().enumerate() {
        let origin = Origin::Line(n + 1);
        let line = raw.split_once('#').map_or(raw, |(code, _)| code).trim();
        if line.is_empty() {
            continue;
        }
        match split_assignment(line) {
            Some((k, v)) => p.assign(&origin, k, v),
            None => p.issue(&origin, None, format!("malformed line `{}`, expected `key = value`", raw.trim())),
        }
    }
    for (n, (k, v)) in overrides.iter().enumerate() {
        p.assign(&Origin::Override(n + 1), k.trim(), v.trim());
    }
    p.finish()
}

/// Splits a `key=value` command-line override.
pub fn parse_override(text: &str) -> Result<(String, String), String> {
    split_assignment(text)
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .ok_or_else(|| format!("expected key=value, got `{text}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn empty_input_gives_ideal_defaults() {
        let cfg = parse_config("", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.imperfection, ImperfectionModel::ideal());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\n  trials = 10   # inline\nimperfection.efficiency.D3 = 0.08\n";
        let cfg = parse_config(text, &[]).unwrap();
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.imperfection.efficiency[2], 0.08);
    }

    #[test]
    fn overrides_beat_file() {
        let cfg = parse_config("trials = 1000\nseed = 3", &ov(&[("trials", "5000")])).unwrap();
        assert_eq!(cfg.trials, 5000);
        assert_eq!(cfg.seed, Some(3));
    }

    #[test]
    fn out_of_range_names_the_key() {
        let err = parse_config("imperfection.visibility = 1.5", &[]).unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert_eq!(err.issues[0].key.as_deref(), Some("imperfection.visibility"));
        assert_eq!(err.issues[0].origin, Origin::Line(1));
    }

    #[test]
    fn all_problems_reported_together() {
        let text = "trials = ten\nbogus.key = 1\njust words\nimperfection.dark_count_prob = 1\n";
        let err = parse_config(text, &ov(&[("theory", "classical")])).unwrap_err();
        let origins: Vec<_> = err.issues.iter().map(|i| i.origin.clone()).collect();
        assert_eq!(origins, [Origin::Line(1), Origin::Line(2), Origin::Line(3), Origin::Override(1), Origin::Line(4)]);
        let text = err.to_string();
        assert!(text.contains("line 3"), "{text}");
        assert!(text.contains("bogus.key: unknown key"), "{text}");
    }

    #[test]
    fn unknown_imperfection_field_is_unknown_key() {
        let err = parse_config("imperfection.efficiency.D9 = 0.5", &[]).unwrap_err();
        assert_eq!(err.issues[0].message, "unknown key");
    }

    #[test]
    fn range_error_points_at_the_override() {
        let err =
            parse_config("imperfection.efficiency = 0.5", &ov(&[("imperfection.efficiency.D2", "2")])).unwrap_err();
        assert_eq!(err.issues[0].origin, Origin::Override(1));
        assert_eq!(err.issues[0].key.as_deref(), Some("imperfection.efficiency.D2"));
    }

    #[test]
    fn run_and_sweep_require_seed() {
        for cmd in ["run", "sweep"] {
            let err = parse_config(&format!("command = {cmd}\nsweep.param = visibility"), &[]).unwrap_err();
            assert!(err.issues.iter().any(|i| i.key.as_deref() == Some("seed")), "{cmd}");
        }
        assert!(parse_config("command = run\nseed = 0", &[]).is_ok());
        assert!(parse_config("command = bounds", &[]).is_ok());
    }

    #[test]
    fn sweep_settings() {
        let text = "command = sweep\nseed = 1\nsweep.param = imperfection.visibility\nsweep.values = 0, 0.5,1";
        let cfg = parse_config(text, &[]).unwrap();
        assert_eq!(cfg.sweep_param.as_deref(), Some("imperfection.visibility"));
        assert_eq!(cfg.sweep_values, [0.0, 0.5, 1.0]);

        let err = parse_config("command = sweep\nseed = 1\nsweep.param = visibility\nsweep.values = 0.5, 2", &[])
            .unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert_eq!(err.issues[0].key.as_deref(), Some("sweep.values"));

        let err = parse_config("sweep.param = brightness", &[]).unwrap_err();
        assert_eq!(err.issues[0].origin, Origin::Line(1));
    }

    #[test]
    fn options_follow_config() {
        let cfg = parse_config("nchv.ensemble = uniform\nanalysis.fair_sampling = false\nworkers = 2", &[]).unwrap();
        let opts = cfg.options();
        assert_eq!(opts.ensemble, AssignmentDistribution::uniform());
        assert!(!opts.fair_sampling);
        assert_eq!(opts.workers, Some(2));
    }

    #[test]
    fn override_syntax() {
        assert_eq!(parse_override("a.b = 3").unwrap(), ("a.b".to_string(), "3".to_string()));
        assert!(parse_override("novalue").is_err());
        assert!(parse_override("=3").is_err());
    }
}
