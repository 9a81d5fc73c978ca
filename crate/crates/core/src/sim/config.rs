use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::decoder::{DecoderConfig, ProviderKind};
use crate::error::{Error, Result};

pub const DEFAULT_Q: usize = 10_000;
pub const DEFAULT_Q1: usize = 150_000;
pub const DEFAULT_BASELINE_Q: usize = 150_000;
pub const DEFAULT_CDF_TRIALS: usize = 1_000;

/// What a configured decoder runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderKind {
    Isi(ProviderKind),
    /// ORBGRAND on sign decisions, ignoring channel memory.
    Memoryless,
}

/// A decoder entry with its budgets.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderSpec {
    pub kind: DecoderKind,
    pub cfg: DecoderConfig,
}

impl DecoderSpec {
    pub fn label(&self) -> String {
        match self.kind {
            DecoderKind::Isi(p) => format!("{p}-g{}", self.cfg.partial_cap),
            DecoderKind::Memoryless => "orbgrand-memoryless".into(),
        }
    }
}

impl fmt::Display for DecoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Parses `orbgrand`/`memoryless`, or `<provider>[-g<cap>]`.
fn parse_kind(s: &str) -> Result<(DecoderKind, Option<usize>)> {
    let lower = s.trim().to_ascii_lowercase();
    if matches!(lower.as_str(), "orbgrand" | "memoryless" | "orbgrand-memoryless") {
        return Ok((DecoderKind::Memoryless, None));
    }
    let (name, cap) = match lower.rsplit_once("-g") {
        Some((name, digits)) if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) => {
            (name, Some(digits.parse().map_err(|_| Error::Parse(format!("bad cap in {s:?}")))?))
        }
        _ => (lower.as_str(), None),
    };
    Ok((DecoderKind::Isi(ProviderKind::from_str(name)?), cap))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawDecoder {
    Name(String),
    Table {
        kind: String,
        g: Option<usize>,
        q: Option<usize>,
        q1: Option<usize>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawTap {
    Value(f64),
    Expr(String),
}

/// A tap given as a number or as `sqrt(<number>)`.
pub fn parse_tap(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Parse(format!("bad tap {s:?}"));
    if let Some(inner) = t.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        let v: f64 = inner.trim().parse().map_err(|_| bad())?;
        if v < 0.0 {
            return Err(bad());
        }
        return Ok(v.sqrt());
    }
    t.parse().map_err(|_| bad())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Parse(format!("unknown output format {s:?}"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    code: String,
    taps: Vec<RawTap>,
    ebn0_db: Vec<f64>,
    trials: usize,
    decoders: Vec<RawDecoder>,
    #[serde(default)]
    seed: u64,
    out: Option<PathBuf>,
    #[serde(default)]
    format: OutputFormat,
    q: Option<usize>,
    q1: Option<usize>,
    g: Option<usize>,
    baseline_q: Option<usize>,
    cdf_trials: Option<usize>,
    cdf_cache_dir: Option<PathBuf>,
    genie: Option<bool>,
}

/// A validated sweep description.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub code: String,
    pub taps: Vec<f64>,
    pub ebn0_db: Vec<f64>,
    pub trials: usize,
    pub decoders: Vec<DecoderSpec>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub cdf_trials: usize,
    pub cdf_cache_dir: Option<PathBuf>,
    /// Whether to record the genie lower-bound events.
    pub genie: bool,
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let taps = raw
            .taps
            .iter()
            .map(|t| match t {
                RawTap::Value(v) => Ok(*v),
                RawTap::Expr(s) => parse_tap(s),
            })
            .collect::<Result<Vec<_>>>()?;
        let memory = taps.len().saturating_sub(1);
        let default_g = raw.g.unwrap_or(if memory >= 2 { 3 } else { 0 });
        let q = raw.q.unwrap_or(DEFAULT_Q);
        let q1 = raw.q1.unwrap_or(DEFAULT_Q1);
        let baseline_q = raw.baseline_q.unwrap_or(DEFAULT_BASELINE_Q);
        let decoders = raw
            .decoders
            .iter()
            .map(|d| {
                let (kind, g, dq, dq1) = match d {
                    RawDecoder::Name(s) => {
                        let (kind, g) = parse_kind(s)?;
                        (kind, g, None, None)
                    }
                    RawDecoder::Table { kind, g, q, q1 } => {
                        let (kind, g_in_name) = parse_kind(kind)?;
                        (kind, g.or(g_in_name), *q, *q1)
                    }
                };
                let cfg = match kind {
                    DecoderKind::Memoryless => {
                        let bq = dq.unwrap_or(baseline_q);
                        DecoderConfig::new(bq, dq1.unwrap_or(bq), 0)?
                    }
                    DecoderKind::Isi(_) => DecoderConfig::new(dq.unwrap_or(q), dq1.unwrap_or(q1), g.unwrap_or(default_g))?,
                };
                Ok(DecoderSpec { kind, cfg })
            })
            .collect::<Result<Vec<_>>>()?;
        let cfg = SimConfig {
            code: raw.code,
            taps,
            ebn0_db: raw.ebn0_db,
            trials: raw.trials,
            decoders,
            seed: raw.seed,
            out: raw.out,
            format: raw.format,
            cdf_trials: raw.cdf_trials.unwrap_or(DEFAULT_CDF_TRIALS),
            cdf_cache_dir: raw.cdf_cache_dir,
            genie: raw.genie.unwrap_or(true),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.ebn0_db.is_empty() {
            return Err(Error::Config("the Eb/N0 grid is empty".into()));
        }
        if self.ebn0_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("non-finite Eb/N0 value".into()));
        }
        if self.decoders.is_empty() {
            return Err(Error::Config("no decoders configured".into()));
        }
        if self.taps.is_empty() {
            return Err(Error::Config("no channel taps".into()));
        }
        for d in &self.decoders {
            d.cfg.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        code = "bch127_113"
        taps = ["sqrt(0.9)", 0.31622776601683794]
        ebn0_db = [3.0, 4.0]
        trials = 100
        decoders = ["sgrand-g3", "cdforb", "orbgrand", { kind = "orb", g = 2, q = 50, q1 = 60 }]
        seed = 7
    "#;

    #[test]
    fn parses_sample() {
        let cfg = SimConfig::from_toml(SAMPLE).unwrap();
        assert!((cfg.taps[0] - 0.9f64.sqrt()).abs() < 1e-15);
        let labels: Vec<String> = cfg.decoders.iter().map(|d| d.label()).collect();
        assert_eq!(labels, ["sgrand-g3", "cdforb-g0", "orbgrand-memoryless", "orb-g2"]);
        assert_eq!(cfg.decoders[2].cfg.max_queries, DEFAULT_BASELINE_Q);
        assert_eq!(cfg.decoders[3].cfg.max_candidates, 60);
        assert!(cfg.genie);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(SimConfig::from_toml(&SAMPLE.replace("trials = 100", "trials = 0")).is_err());
        assert!(SimConfig::from_toml(&SAMPLE.replace("[3.0, 4.0]", "[]")).is_err());
        assert!(SimConfig::from_toml(&SAMPLE.replace("\"sgrand-g3\"", "\"nope\"")).is_err());
        assert!(SimConfig::from_toml(&SAMPLE.replace("q1 = 60", "q1 = 10")).is_err());
        assert!(SimConfig::from_toml(&(SAMPLE.to_string() + "unknown = 1\n")).is_err());
    }

    #[test]
    fn tap_expressions() {
        assert_eq!(parse_tap("sqrt(0.25)").unwrap(), 0.5);
        assert_eq!(parse_tap(" 0.5 ").unwrap(), 0.5);
        assert!(parse_tap("sqrt(-1)").is_err());
        assert!(parse_tap("x").is_err());
    }
}
