use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use grand_isi::channel::{ebn0_to_sigma2, transmit};
use grand_isi::decoder::{
    fit_two_line, memoryless_orbgrand_decode, DecoderConfig, GammaProvider, GrandIsiDecoder, Outcome, ProviderKind,
};
use grand_isi::detector::viterbi_hard;
use grand_isi::reliability::{rel_table_general, BurstDictionary};
use grand_isi::sim::{
    cached_cdf, complexity_tot, emit_results, parse_tap, run_sweep, to_csv, tot_closed_form_l2, OutputFormat,
    SimConfig, DEFAULT_CDF_TRIALS, DEFAULT_Q, DEFAULT_Q1,
};
use grand_isi::{BitBlock, ChannelModel, CodeSpec, Error, RealBlock, Result};

#[derive(Parser)]
#[command(name = "grand-isi", version, about = "GRAND decoding over Gaussian ISI channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ChannelArgs {
    /// Channel taps, comma separated; `sqrt(v)` is accepted.
    #[arg(long, value_delimiter = ',', value_parser = tap, allow_hyphen_values = true)]
    taps: Vec<f64>,
    /// Noise variance per channel use.
    #[arg(long, conflicts_with = "ebn0")]
    sigma2: Option<f64>,
    /// Eb/N0 in dB, converted with the code rate.
    #[arg(long)]
    ebn0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep described by a TOML file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<OutputFormat>,
    },
    /// Transmit one random codeword and decode it.
    DecodeOne {
        #[arg(long, default_value = "bch127_113")]
        code: String,
        #[command(flatten)]
        channel: ChannelArgs,
        /// sgrand, orb, cdforb, twoline or orbgrand (memoryless).
        #[arg(long, default_value = "sgrand")]
        provider: String,
        #[arg(long, default_value_t = DEFAULT_Q)]
        q: usize,
        #[arg(long, default_value_t = DEFAULT_Q1)]
        q1: usize,
        /// Partial-burst cap; defaults to 3 for memory 2 and above.
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CDF_TRIALS)]
        cdf_trials: usize,
        #[arg(long)]
        cdf_cache_dir: Option<PathBuf>,
    },
    /// Estimate the burst reliability distribution and store it.
    CdfEstimate {
        #[arg(long, default_value = "bch127_113")]
        code: String,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        g: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_CDF_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cache directory the model is written to.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print the hard detection and every burst reliability for given outputs.
    DumpRel {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Channel outputs, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        g: usize,
    },
    /// Count reliability evaluations over the unrestricted burst set.
    Complexity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
    },
}

fn tap(s: &str) -> std::result::Result<f64, String> {
    parse_tap(s).map_err(|e| e.to_string())
}

impl ChannelArgs {
    fn model(&self, rate: Option<f64>) -> Result<ChannelModel> {
        let sigma2 = match (self.sigma2, self.ebn0) {
            (Some(s), _) => s,
            (None, Some(db)) => {
                let rate = rate.ok_or_else(|| Error::Config("--ebn0 needs a code; use --sigma2".into()))?;
                ebn0_to_sigma2(db, rate)?
            }
            (None, None) => return Err(Error::Config("give --sigma2 or --ebn0".into())),
        };
        let (model, rescaled) = ChannelModel::normalized(self.taps.clone(), sigma2)?;
        if rescaled {
            log::warn!("taps rescaled to unit energy: {:?}", model.taps());
        }
        Ok(model)
    }
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn default_g(model: &ChannelModel, g: Option<usize>) -> usize {
    g.unwrap_or(if model.memory() >= 2 { 3 } else { 0 })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, format } => {
            let mut cfg = SimConfig::from_file(&config)?;
            if out.is_some() {
                cfg.out = out;
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            let stats = run_sweep(&cfg)?;
            match &cfg.out {
                Some(path) => {
                    emit_results(&stats, cfg.format, path)?;
                    log::info!("wrote {}", path.display());
                }
                None => emit(&to_csv(&stats))?,
            }
        }
        Command::DecodeOne {
            code,
            channel,
            provider,
            q,
            q1,
            g,
            seed,
            cdf_trials,
            cdf_cache_dir,
        } => {
            let code = Arc::new(CodeSpec::from_id(&code)?);
            let model = channel.model(Some(code.rate()))?;
            let g = default_g(&model, g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let msg = BitBlock::from_bools((0..code.k()).map(|_| rng.gen::<bool>()));
            let c = code.encode(&msg)?;
            let y = transmit(&c, &model, &mut rng);
            let memoryless = matches!(provider.to_ascii_lowercase().as_str(), "orbgrand" | "memoryless");
            let result = if memoryless {
                memoryless_orbgrand_decode(&y, &code, &DecoderConfig::new(q, q1.max(q), 0)?)?
            } else {
                let kind: ProviderKind = provider.parse()?;
                let gamma = match kind {
                    ProviderKind::SGrand => GammaProvider::SGrand,
                    ProviderKind::Orb => GammaProvider::Orb,
                    ProviderKind::CdfOrb | ProviderKind::TwoLine => {
                        let cdf = cached_cdf(&code, &model, g, cdf_trials, seed, cdf_cache_dir.as_deref())?;
                        if kind == ProviderKind::CdfOrb {
                            GammaProvider::CdfOrb(Arc::new(cdf))
                        } else {
                            GammaProvider::TwoLine(fit_two_line(&cdf)?)
                        }
                    }
                };
                let cfg = DecoderConfig::new(q, q1, g)?;
                GrandIsiDecoder::new(code.clone(), model.clone(), gamma, cfg)?.decode(&y)?
            };
            match &result.outcome {
                Outcome::Decoded(x) => {
                    println!("outcome: decoded ({})", if *x == c { "correct" } else { "wrong codeword" })
                }
                Outcome::Abandon => println!("outcome: abandon"),
            }
            println!("candidates q: {}", result.candidate_queries);
            println!("valid p: {}", result.valid_queries);
            if let Some(e) = &result.pattern {
                println!("error pattern support: {:?}", e.support());
            }
            if let Some(m) = result.metric {
                println!("metric: {m}");
            }
        }
        Command::CdfEstimate {
            code,
            channel,
            g,
            trials,
            seed,
            out_dir,
        } => {
            let code = CodeSpec::from_id(&code)?;
            let model = channel.model(Some(code.rate()))?;
            let g = default_g(&model, g);
            let cdf = cached_cdf(&code, &model, g, trials, seed, Some(&out_dir))?;
            println!("samples: {}", cdf.len());
            for p in [0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
                println!("quantile {p}: {}", cdf.quantile(p));
            }
            let fit = fit_two_line(&cdf)?;
            println!(
                "two-line fit: intercept {}, slopes {} / {}, breakpoint {}, mse {}",
                fit.intercept, fit.slope1, fit.slope2, fit.breakpoint, fit.residual
            );
        }
        Command::DumpRel { channel, y, g } => {
            let model = channel.model(None)?;
            let y = RealBlock::new(y)?;
            let det = viterbi_hard(&y, &model);
            let dict = BurstDictionary::enumerate(y.len(), model.memory(), g);
            let table = rel_table_general(&det.hard_sequence, &y, &model, &dict)?;
            let mut out = format!("# x* = {}\nburst;rel\n", det.hard_sequence);
            for (b, r) in dict.bursts().iter().zip(table.values()) {
                out.push_str(&format!("{b};{r}\n"));
            }
            emit(&out)?;
        }
        Command::Complexity { n, l } => {
            println!("tot = {}", complexity_tot(n, l)?);
            if l == 2 {
                println!("closed form = {}", tot_closed_form_l2(n));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
