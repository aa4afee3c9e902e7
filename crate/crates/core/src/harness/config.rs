//! Experiment configuration: a flat key-value text format plus the merge
//! rule that lets command-line flags override file values.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which distinguisher a sweep exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistinguisherKind {
    /// Classical birthday attack; the budget is the number of distinct
    /// classical queries.
    Birthday,
    /// Collision table plus Grover search; the budget is the total query
    /// count, split between the table and the quantum search.
    Bht,
}

impl FromStr for DistinguisherKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "birthday" => Ok(Self::Birthday),
            "bht" => Ok(Self::Bht),
            other => Err(Error::Parse(format!(
                "unknown distinguisher {other:?}, expected \"birthday\" or \"bht\""
            ))),
        }
    }
}

impl fmt::Display for DistinguisherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Birthday => "birthday",
            Self::Bht => "bht",
        })
    }
}

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distinguisher: DistinguisherKind,
    /// Domain sizes to sweep; may be empty, producing a header-only CSV.
    pub n_values: Vec<usize>,
    /// Query budgets to sweep. For `bht` this is the total budget; the table
    /// size defaults to half of it unless `k` pins it.
    pub budgets: Vec<u64>,
    /// Explicit table size for `bht`; ignored by `birthday`.
    pub k: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Hybrid threshold exponent, used by profile tooling.
    pub d: f64,
    /// CSV destination; stdout when absent.
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Parses the key-value format, requiring a seed.
    pub fn from_text(text: &str) -> Result<Self> {
        PartialConfig::from_text(text)?.build()
    }

    /// Serializes back to the key-value format parsed by
    /// [`from_text`](Self::from_text).
    pub fn to_text(&self) -> String {
        let join_usize = |xs: &[usize]| {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        };
        let join_u64 =
            |xs: &[u64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        out.push_str(&format!("distinguisher = {}\n", self.distinguisher));
        out.push_str(&format!("n = {}\n", join_usize(&self.n_values)));
        out.push_str(&format!("budget = {}\n", join_u64(&self.budgets)));
        if let Some(k) = self.k {
            out.push_str(&format!("k = {k}\n"));
        }
        out.push_str(&format!("trials = {}\n", self.trials));
        out.push_str(&format!("seed = {}\n", self.seed));
        out.push_str(&format!("d = {}\n", self.d));
        if let Some(path) = &self.out {
            out.push_str(&format!("out = {}\n", path.display()));
        }
        out
    }
}

/// Configuration with every field optional, for layering sources.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub distinguisher: Option<DistinguisherKind>,
    pub n_values: Option<Vec<usize>>,
    pub budgets: Option<Vec<u64>>,
    pub k: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub d: Option<f64>,
    pub out: Option<PathBuf>,
}

impl PartialConfig {
    /// Parses `key = value` lines. Blank lines and `#` comments are ignored,
    /// later keys overwrite earlier ones, and unknown keys are rejected.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse(format!("expected \"key = value\", found {line:?}")));
            };
            let key = key.trim();
            let value = value.trim();
            match key {
                "distinguisher" => cfg.distinguisher = Some(value.parse()?),
                "n" => cfg.n_values = Some(parse_list(value, "n")?),
                "budget" => cfg.budgets = Some(parse_list(value, "budget")?),
                "k" => cfg.k = Some(parse_scalar(value, "k")?),
                "trials" => cfg.trials = Some(parse_scalar(value, "trials")?),
                "seed" => cfg.seed = Some(parse_scalar(value, "seed")?),
                "d" => {
                    cfg.d = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad value {value:?} for key \"d\""))
                    })?)
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    /// Layers `self` over `fallback`; fields set here win.
    pub fn or(self, fallback: Self) -> Self {
        Self {
            distinguisher: self.distinguisher.or(fallback.distinguisher),
            n_values: self.n_values.or(fallback.n_values),
            budgets: self.budgets.or(fallback.budgets),
            k: self.k.or(fallback.k),
            trials: self.trials.or(fallback.trials),
            seed: self.seed.or(fallback.seed),
            d: self.d.or(fallback.d),
            out: self.out.or(fallback.out),
        }
    }

    /// Fills defaults and validates. The seed is mandatory: experiments never
    /// pull implicit entropy.
    pub fn build(self) -> Result<ExperimentConfig> {
        let seed = self
            .seed
            .ok_or_else(|| Error::InvalidParameter("seed is required".into()))?;
        let d = self.d.unwrap_or(0.6);
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidParameter(format!("d must lie in (0,1), got {d}")));
        }
        let n_values = self.n_values.unwrap_or_default();
        if n_values.contains(&0) {
            return Err(Error::InvalidParameter("domain sizes must be positive".into()));
        }
        let budgets = self.budgets.unwrap_or_default();
        if budgets.contains(&0) {
            return Err(Error::InvalidParameter("budgets must be positive".into()));
        }
        if self.k == Some(0) {
            return Err(Error::InvalidParameter("k must be positive".into()));
        }
        let trials = self.trials.unwrap_or(0);
        if trials == 0 && !n_values.is_empty() && !budgets.is_empty() {
            return Err(Error::InvalidParameter(
                "trials must be positive for a non-empty sweep".into(),
            ));
        }
        Ok(ExperimentConfig {
            distinguisher: self.distinguisher.unwrap_or(DistinguisherKind::Birthday),
            n_values,
            budgets,
            k: self.k,
            trials,
            seed,
            d,
            out: self.out,
        })
    }
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad value {t:?} for key {key:?}")))
        })
        .collect()
}

fn parse_scalar<T: FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("bad value {value:?} for key {key:?}")))
}
