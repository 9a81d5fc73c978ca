//! Monte Carlo sweeps over Eb/N0, result aggregation and output.
//!
//! Each trial draws its randomness from a seed derived from the master
//! seed, the SNR index and the trial index, so a sweep gives identical
//! results for any worker count. All decoders see the same received block
//! within a trial.

mod complexity;
mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use complexity::{complexity_tot, tot_closed_form_l2};
pub use config::{
    parse_tap, DecoderKind, DecoderSpec, OutputFormat, SimConfig, DEFAULT_BASELINE_Q, DEFAULT_CDF_TRIALS,
    DEFAULT_Q, DEFAULT_Q1,
};

use crate::bits::BitBlock;
use crate::channel::{ebn0_to_sigma2, transmit, ChannelModel};
use crate::codes::CodeSpec;
use crate::decoder::{
    build_cdf_model, fit_two_line, genie_ml_error_event, logistic_weight_of_target, memoryless_orbgrand_decode,
    BurstBank, CdfModel, DecodeResult, DecoderConfig, GammaProvider, GrandIsiDecoder, ProviderKind,
};
use crate::detector::viterbi_hard;
use crate::error::{Error, Result};
use crate::seed::derive_seed;

/// Environment variable holding the number of worker threads.
pub const WORKERS_ENV: &str = "GRAND_ISI_WORKERS";

/// Seed stream used for CDF estimation, kept apart from trial streams.
const CDF_STREAM: u64 = 1 << 40;

/// Statistics of one decoder at one SNR point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub decoder: String,
    pub snr_db: f64,
    pub bler: f64,
    pub bler_ci95: f64,
    pub abandon_rate: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    /// `None` when genie events were not recorded.
    pub genie_bler: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub mean_logistic_weight: f64,
}

pub const CSV_HEADER: &str =
    "decoder,snr_db,bler,bler_ci95,abandon_rate,mean_q,mean_p,genie_bler,trials,seed,mean_logistic_weight";

/// Per-trial outcome of one decoder.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecoderTrial {
    pub error: bool,
    pub abandon: bool,
    pub q: usize,
    pub p: usize,
}

/// Everything recorded for one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub decoders: Vec<DecoderTrial>,
    pub genie_error: bool,
    pub logistic_weight: u64,
}

enum Runner {
    Isi(GrandIsiDecoder),
    Memoryless(DecoderConfig),
}

/// Decoders instantiated for one SNR point.
pub struct PointSetup {
    code: Arc<CodeSpec>,
    model: ChannelModel,
    runners: Vec<Runner>,
    /// Index into `runners` of the SGrand decoder used for the genie, or
    /// a dedicated one.
    genie: Option<GenieSource>,
}

enum GenieSource {
    Shared(usize),
    Own(GrandIsiDecoder),
}

impl PointSetup {
    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    /// Runs every decoder on one random transmission.
    pub fn run_trial(&self, seed: u64) -> Result<TrialRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = &self.code;
        let msg = BitBlock::from_bools((0..code.k()).map(|_| rng.gen::<bool>()));
        let c = code.encode(&msg)?;
        let y = transmit(&c, &self.model, &mut rng);
        let needs_detection =
            self.runners.iter().any(|r| matches!(r, Runner::Isi(_))) || matches!(self.genie, Some(GenieSource::Own(_)));
        let det = needs_detection.then(|| viterbi_hard(&y, &self.model));

        let mut results: Vec<DecodeResult> = Vec::with_capacity(self.runners.len());
        for r in &self.runners {
            results.push(match r {
                Runner::Isi(d) => d.decode_detected(&y, det.as_ref().expect("detected"))?,
                Runner::Memoryless(cfg) => memoryless_orbgrand_decode(&y, code, cfg)?,
            });
        }
        let genie_error = match &self.genie {
            None => false,
            Some(GenieSource::Shared(i)) => genie_ml_error_event(&results[*i], &c, &y, &self.model)?,
            Some(GenieSource::Own(d)) => {
                let r = d.decode_detected(&y, det.as_ref().expect("detected"))?;
                genie_ml_error_event(&r, &c, &y, &self.model)?
            }
        };
        let decoders = results
            .iter()
            .map(|r| DecoderTrial {
                error: r.codeword() != Some(&c),
                abandon: r.is_abandon(),
                q: r.candidate_queries,
                p: r.valid_queries,
            })
            .collect();
        Ok(TrialRecord {
            decoders,
            genie_error,
            logistic_weight: logistic_weight_of_target(&y, &c)?,
        })
    }
}

/// Shared across SNR points: burst banks keyed by partial-burst cap.
pub struct SweepContext {
    code: Arc<CodeSpec>,
    taps: Vec<f64>,
    banks: BTreeMap<usize, Arc<BurstBank>>,
}

impl SweepContext {
    /// Normalizes the taps to unit energy, warning if that changes them.
    pub fn new(code: Arc<CodeSpec>, taps: &[f64]) -> Result<Self> {
        let (model, rescaled) = ChannelModel::normalized(taps.to_vec(), 1.0)?;
        if rescaled {
            log::warn!("channel taps {taps:?} rescaled to unit energy: {:?}", model.taps());
        }
        Ok(SweepContext {
            code,
            taps: model.taps().to_vec(),
            banks: BTreeMap::new(),
        })
    }

    pub fn code(&self) -> &Arc<CodeSpec> {
        &self.code
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    fn bank(&mut self, g: usize) -> Arc<BurstBank> {
        let key = if self.memory() >= 2 { g } else { 0 };
        let (code, memory) = (&self.code, self.memory());
        self.banks
            .entry(key)
            .or_insert_with(|| Arc::new(BurstBank::new(code, memory, g)))
            .clone()
    }

    /// Builds the decoders of `cfg` at `ebn0_db`; `snr_index` selects the
    /// CDF estimation seed.
    pub fn setup_point(&mut self, cfg: &SimConfig, snr_index: usize, ebn0_db: f64) -> Result<PointSetup> {
        let sigma2 = ebn0_to_sigma2(ebn0_db, self.code.rate())?;
        let model = ChannelModel::new(self.taps.clone(), sigma2)?;
        let mut cdfs: BTreeMap<usize, Arc<CdfModel>> = BTreeMap::new();
        let mut runners = Vec::with_capacity(cfg.decoders.len());
        for spec in &cfg.decoders {
            let runner = match spec.kind {
                DecoderKind::Memoryless => Runner::Memoryless(spec.cfg),
                DecoderKind::Isi(kind) => {
                    let g = spec.cfg.partial_cap;
                    let provider = if kind.needs_cdf() {
                        let cdf = match cdfs.get(&g) {
                            Some(c) => c.clone(),
                            None => {
                                let seed = derive_seed(cfg.seed, CDF_STREAM + snr_index as u64, g as u64);
                                let c = Arc::new(cached_cdf(
                                    &self.code,
                                    &model,
                                    g,
                                    cfg.cdf_trials,
                                    seed,
                                    cfg.cdf_cache_dir.as_deref(),
                                )?);
                                cdfs.insert(g, c.clone());
                                c
                            }
                        };
                        match kind {
                            ProviderKind::CdfOrb => GammaProvider::CdfOrb(cdf),
                            _ => GammaProvider::TwoLine(fit_two_line(&cdf)?),
                        }
                    } else if kind == ProviderKind::SGrand {
                        GammaProvider::SGrand
                    } else {
                        GammaProvider::Orb
                    };
                    let bank = self.bank(g);
                    Runner::Isi(GrandIsiDecoder::with_bank(
                        self.code.clone(),
                        model.clone(),
                        provider,
                        spec.cfg,
                        bank,
                    )?)
                }
            };
            runners.push(runner);
        }
        let genie = if !cfg.genie {
            None
        } else if let Some(i) = cfg
            .decoders
            .iter()
            .position(|d| d.kind == DecoderKind::Isi(ProviderKind::SGrand))
        {
            Some(GenieSource::Shared(i))
        } else {
            let dc = cfg
                .decoders
                .iter()
                .find(|d| matches!(d.kind, DecoderKind::Isi(_)))
                .map(|d| d.cfg)
                .unwrap_or_else(|| DecoderConfig::standard(self.memory()));
            let bank = self.bank(dc.partial_cap);
            Some(GenieSource::Own(GrandIsiDecoder::with_bank(
                self.code.clone(),
                model.clone(),
                GammaProvider::SGrand,
                dc,
                bank,
            )?))
        };
        Ok(PointSetup {
            code: self.code.clone(),
            model,
            runners,
            genie,
        })
    }
}

/// Loads a cached CDF model when one with a matching header exists,
/// otherwise estimates it and stores it in `cache_dir`.
pub fn cached_cdf(
    code: &CodeSpec,
    model: &ChannelModel,
    g: usize,
    trials: usize,
    seed: u64,
    cache_dir: Option<&Path>,
) -> Result<CdfModel> {
    let Some(dir) = cache_dir else {
        return build_cdf_model(code, model, g, trials, seed);
    };
    let path = cdf_cache_path(dir, code, model, g, trials, seed);
    if path.is_file() {
        match CdfModel::load(&path) {
            Ok(m) => {
                let h = m.header();
                if h.code == code.name()
                    && h.taps == model.taps()
                    && h.noise_var == model.noise_var()
                    && h.partial_cap == g
                    && h.trials == trials
                    && h.seed == seed
                {
                    log::debug!("loaded CDF model from {}", path.display());
                    return Ok(m);
                }
                log::warn!("{} does not match the requested model, rebuilding", path.display());
            }
            Err(e) => log::warn!("ignoring unreadable CDF cache: {e}"),
        }
    }
    let m = build_cdf_model(code, model, g, trials, seed)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    m.save(&path)?;
    log::info!("stored CDF model in {}", path.display());
    Ok(m)
}

fn cdf_cache_path(dir: &Path, code: &CodeSpec, model: &ChannelModel, g: usize, trials: usize, seed: u64) -> PathBuf {
    let mut key = derive_seed(seed, g as u64, trials as u64);
    for b in code.name().bytes() {
        key = derive_seed(key, u64::from(b), 0);
    }
    for t in model.taps() {
        key = derive_seed(key, t.to_bits(), 1);
    }
    key = derive_seed(key, model.noise_var().to_bits(), 2);
    dir.join(format!("cdf-{key:016x}.bin"))
}

/// Worker count from [`WORKERS_ENV`], if set and positive.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs all trials of all SNR points. Rows are ordered by decoder, then by
/// SNR.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<AggregateStats>> {
    cfg.validate()?;
    let code = Arc::new(CodeSpec::from_id(&cfg.code)?);
    let mut ctx = SweepContext::new(code, &cfg.taps)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers_from_env() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let mut per_point: Vec<Vec<AggregateStats>> = Vec::with_capacity(cfg.ebn0_db.len());
    for (si, &snr) in cfg.ebn0_db.iter().enumerate() {
        let started = Instant::now();
        let setup = ctx.setup_point(cfg, si, snr)?;
        let records: Vec<TrialRecord> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| setup.run_trial(derive_seed(cfg.seed, si as u64, t as u64)))
                .collect::<Result<Vec<_>>>()
        })?;
        let stats = aggregate(cfg, snr, &records);
        for s in &stats {
            log::info!(
                "{} at {snr} dB: BLER {:.4e}, q {:.1}, p {:.1}",
                s.decoder,
                s.bler,
                s.mean_q,
                s.mean_p
            );
        }
        log::info!("{snr} dB done in {:.1?}", started.elapsed());
        per_point.push(stats);
    }
    let mut rows = Vec::with_capacity(cfg.decoders.len() * cfg.ebn0_db.len());
    for d in 0..cfg.decoders.len() {
        for point in &per_point {
            rows.push(point[d].clone());
        }
    }
    Ok(rows)
}

/// Reduces trial records in index order.
pub fn aggregate(cfg: &SimConfig, snr_db: f64, records: &[TrialRecord]) -> Vec<AggregateStats> {
    let n = records.len() as f64;
    let genie_bler = cfg
        .genie
        .then(|| records.iter().filter(|r| r.genie_error).count() as f64 / n);
    let mean_lw = records.iter().map(|r| r.logistic_weight as f64).sum::<f64>() / n;
    cfg.decoders
        .iter()
        .enumerate()
        .map(|(d, spec)| {
            let (mut errors, mut abandons, mut q, mut p) = (0usize, 0usize, 0f64, 0f64);
            for r in records {
                let t = r.decoders[d];
                errors += usize::from(t.error);
                abandons += usize::from(t.abandon);
                q += t.q as f64;
                p += t.p as f64;
            }
            let bler = errors as f64 / n;
            AggregateStats {
                decoder: spec.label(),
                snr_db,
                bler,
                bler_ci95: 1.96 * (bler * (1.0 - bler) / n).sqrt(),
                abandon_rate: abandons as f64 / n,
                mean_q: q / n,
                mean_p: p / n,
                genie_bler,
                trials: records.len(),
                seed: cfg.seed,
                mean_logistic_weight: mean_lw,
            }
        })
        .collect()
}

/// CSV text with a header row. Floats use the shortest representation
/// that parses back to the same value.
pub fn to_csv(stats: &[AggregateStats]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in stats {
        let genie = r.genie_bler.map(|g| g.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.decoder,
            r.snr_db,
            r.bler,
            r.bler_ci95,
            r.abandon_rate,
            r.mean_q,
            r.mean_p,
            genie,
            r.trials,
            r.seed,
            r.mean_logistic_weight
        );
    }
    s
}

pub fn parse_csv(text: &str) -> Result<Vec<AggregateStats>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::Parse("missing or unexpected CSV header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 11 {
                return Err(Error::Parse(format!("expected 11 fields: {line:?}")));
            }
            let num = |i: usize| -> Result<f64> { f[i].parse().map_err(|_| Error::Parse(format!("bad number {:?}", f[i]))) };
            let int = |i: usize| -> Result<u64> { f[i].parse().map_err(|_| Error::Parse(format!("bad integer {:?}", f[i]))) };
            Ok(AggregateStats {
                decoder: f[0].to_string(),
                snr_db: num(1)?,
                bler: num(2)?,
                bler_ci95: num(3)?,
                abandon_rate: num(4)?,
                mean_q: num(5)?,
                mean_p: num(6)?,
                genie_bler: if f[7].is_empty() { None } else { Some(num(7)?) },
                trials: int(8)? as usize,
                seed: int(9)?,
                mean_logistic_weight: num(10)?,
            })
        })
        .collect()
}

/// Writes `stats` to `path`. Empty input is rejected before touching the
/// file system.
pub fn emit_results(stats: &[AggregateStats], format: OutputFormat, path: &Path) -> Result<()> {
    if stats.is_empty() {
        return Err(Error::Config("no results to write".into()));
    }
    let text = match format {
        OutputFormat::Csv => to_csv(stats),
        OutputFormat::Json => {
            serde_json::to_string_pretty(stats).map_err(|e| Error::Parse(e.to_string()))? + "\n"
        }
    };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
