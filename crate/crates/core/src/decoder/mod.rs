//! Guessing decoders for ISI channels.
//!
//! A received block is first hard-detected. Candidate error patterns are
//! then unions of dictionary bursts, emitted in ascending order of their
//! summed per-burst cost `gamma`. Unions whose bursts are not separated by
//! more than `L` positions are skipped, since the same pattern is reached
//! through a different burst set. The remaining patterns are checked
//! against the code until one yields a codeword or a budget runs out.

mod baseline;
mod cdf;
mod gamma;
mod generator;

use std::sync::Arc;

pub use baseline::{logistic_weight_of_target, memoryless_orbgrand_decode, reliability_order};
pub use cdf::{build_cdf_model, fit_grid, fit_two_line, CdfHeader, CdfModel, TwoLineFit, MIN_CDF_TRIALS};
pub use gamma::{GammaProvider, ProviderKind};
pub use generator::{next_candidates, Candidate, CandidateGenerator, CandidateId, RankIter};

use crate::bits::BitBlock;
use crate::channel::{ChannelModel, RealBlock};
use crate::codes::CodeSpec;
use crate::detector::{viterbi_hard, weight_lambda, DetectionResult};
use crate::error::{Error, Result};
use crate::reliability::{rel_table_first_order, table_with_context, Burst, BurstDictionary, RelContext};

/// Query budgets and the partial-burst cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoderConfig {
    /// `Q`: most codebook queries on valid patterns.
    pub max_queries: usize,
    /// `Q1`: most emitted candidates.
    pub max_candidates: usize,
    /// `g`: largest partially-decomposable burst in the dictionary.
    pub partial_cap: usize,
}

impl DecoderConfig {
    pub fn new(max_queries: usize, max_candidates: usize, partial_cap: usize) -> Result<Self> {
        let cfg = DecoderConfig {
            max_queries,
            max_candidates,
            partial_cap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `Q = 10^4`, `Q1 = 1.5 * 10^5`, with `g = 3` for memory 2 or more.
    pub fn standard(memory: usize) -> Self {
        DecoderConfig {
            max_queries: 10_000,
            max_candidates: 150_000,
            partial_cap: if memory >= 2 { 3 } else { 0 },
        }
    }

    /// No budget limits; the dictionary holds every burst of a length-`n`
    /// block.
    pub fn unbounded(n: usize) -> Self {
        DecoderConfig {
            max_queries: usize::MAX,
            max_candidates: usize::MAX,
            partial_cap: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_queries == 0 {
            return Err(Error::Config("Q must be at least 1".into()));
        }
        if self.max_candidates < self.max_queries {
            return Err(Error::Config(format!(
                "Q1 = {} must be at least Q = {}",
                self.max_candidates, self.max_queries
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Decoded(BitBlock),
    Abandon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub outcome: Outcome,
    /// Emitted candidates, the empty set included.
    pub candidate_queries: usize,
    /// Candidates that were valid patterns and got checked against the code.
    pub valid_queries: usize,
    /// Error pattern relative to the hard detection, when decoded.
    pub pattern: Option<BitBlock>,
    /// Cost sum of the winning pattern, when decoded.
    pub metric: Option<f64>,
}

impl DecodeResult {
    pub fn codeword(&self) -> Option<&BitBlock> {
        match &self.outcome {
            Outcome::Decoded(c) => Some(c),
            Outcome::Abandon => None,
        }
    }

    pub fn is_abandon(&self) -> bool {
        self.outcome == Outcome::Abandon
    }
}

/// Bursts form a valid pattern when disjoint and every pair is separated:
/// `max(earlier) + L < min(later)`. Order of `bursts` is irrelevant.
pub fn is_valid_pattern(bursts: &[Burst], memory: usize) -> bool {
    let mut spans: Vec<(usize, usize)> = bursts.iter().map(|b| (b.first(), b.last())).collect();
    spans_separated(&mut spans, memory)
}

fn spans_separated(spans: &mut [(usize, usize)], memory: usize) -> bool {
    spans.sort_unstable();
    spans.windows(2).all(|w| w[0].1 + memory < w[1].0)
}

/// Pattern with ones exactly on the union of `bursts`.
pub fn assemble_ep(bursts: &[Burst], n: usize, memory: usize) -> Result<BitBlock> {
    if !is_valid_pattern(bursts, memory) {
        return Err(Error::InvalidPattern);
    }
    let support: Vec<usize> = bursts.iter().flat_map(|b| b.indices().iter().copied()).collect();
    BitBlock::from_support(n, &support)
}

/// Reliabilities of every burst in `dict`, in dictionary order.
pub(crate) fn reliability_values(
    x_star: &BitBlock,
    y: &RealBlock,
    model: &ChannelModel,
    dict: &BurstDictionary,
) -> Result<Vec<f64>> {
    if model.memory() == 1 {
        return Ok(rel_table_first_order(x_star, y, model)?.values().to_vec());
    }
    let ctx = RelContext::new(x_star, y, model)?;
    Ok(table_with_context(&ctx, dict).values().to_vec())
}

/// A burst dictionary with the syndrome of each burst and its span,
/// shared by every decoder of one code, memory order and cap.
#[derive(Debug)]
pub struct BurstBank {
    dict: BurstDictionary,
    words: usize,
    syndromes: Vec<u64>,
    spans: Vec<(usize, usize)>,
}

impl BurstBank {
    pub fn new(code: &CodeSpec, memory: usize, partial_cap: usize) -> Self {
        let dict = BurstDictionary::enumerate(code.n(), memory, partial_cap);
        let map = code.syndrome_map();
        let words = map.words();
        let mut syndromes = vec![0u64; dict.len() * words];
        for (b, chunk) in dict.bursts().iter().zip(syndromes.chunks_exact_mut(words)) {
            for &i in b.indices() {
                map.accumulate(chunk, i);
            }
        }
        let spans = dict.bursts().iter().map(|b| (b.first(), b.last())).collect();
        BurstBank {
            dict,
            words,
            syndromes,
            spans,
        }
    }

    pub fn dictionary(&self) -> &BurstDictionary {
        &self.dict
    }

    fn syndrome(&self, burst: usize) -> &[u64] {
        &self.syndromes[burst * self.words..(burst + 1) * self.words]
    }
}

/// One configured decoder: code, channel, metric and budgets.
///
/// Holds only immutable shared state, so one instance may serve many
/// trials from different threads.
#[derive(Clone, Debug)]
pub struct GrandIsiDecoder {
    code: Arc<CodeSpec>,
    model: ChannelModel,
    provider: GammaProvider,
    cfg: DecoderConfig,
    bank: Arc<BurstBank>,
    rank_costs: Option<Arc<Vec<f64>>>,
}

impl GrandIsiDecoder {
    pub fn new(code: Arc<CodeSpec>, model: ChannelModel, provider: GammaProvider, cfg: DecoderConfig) -> Result<Self> {
        let bank = Arc::new(BurstBank::new(&code, model.memory(), cfg.partial_cap));
        Self::with_bank(code, model, provider, cfg, bank)
    }

    /// Reuses a prebuilt bank; it must match the code, memory order and cap.
    pub fn with_bank(
        code: Arc<CodeSpec>,
        model: ChannelModel,
        provider: GammaProvider,
        cfg: DecoderConfig,
        bank: Arc<BurstBank>,
    ) -> Result<Self> {
        cfg.validate()?;
        let dict = bank.dictionary();
        if dict.n() != code.n() {
            return Err(Error::LengthMismatch {
                expected: code.n(),
                actual: dict.n(),
            });
        }
        if dict.memory() != model.memory() {
            return Err(Error::MemoryOrder {
                expected: dict.memory(),
                actual: model.memory(),
            });
        }
        if model.memory() >= 2 && dict.partial_cap() != cfg.partial_cap {
            return Err(Error::Config(format!(
                "burst bank built for g = {}, decoder asks for g = {}",
                dict.partial_cap(),
                cfg.partial_cap
            )));
        }
        let rank_costs = provider.rank_costs(dict.len()).map(Arc::new);
        Ok(GrandIsiDecoder {
            code,
            model,
            provider,
            cfg,
            bank,
            rank_costs,
        })
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn model(&self) -> &ChannelModel {
        &self.model
    }

    pub fn provider(&self) -> &GammaProvider {
        &self.provider
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn bank(&self) -> &Arc<BurstBank> {
        &self.bank
    }

    pub fn decode(&self, y: &RealBlock) -> Result<DecodeResult> {
        if y.len() != self.code.n() {
            return Err(Error::LengthMismatch {
                expected: self.code.n(),
                actual: y.len(),
            });
        }
        let det = viterbi_hard(y, &self.model);
        self.decode_detected(y, &det)
    }

    /// Decodes from an existing hard detection of `y`.
    pub fn decode_detected(&self, y: &RealBlock, det: &DetectionResult) -> Result<DecodeResult> {
        let x_star = &det.hard_sequence;
        if x_star.len() != self.code.n() || y.len() != self.code.n() {
            return Err(Error::LengthMismatch {
                expected: self.code.n(),
                actual: x_star.len().min(y.len()),
            });
        }
        let base = self.code.syndrome_map().syndrome(x_star);
        let (max_q, max_p) = (self.cfg.max_candidates, self.cfg.max_queries);

        // The empty set: x* itself.
        let (mut q, mut p) = (1usize, 1usize);
        if base.iter().all(|&w| w == 0) {
            return Ok(DecodeResult {
                outcome: Outcome::Decoded(x_star.clone()),
                candidate_queries: q,
                valid_queries: p,
                pattern: Some(BitBlock::zeros(x_star.len())),
                metric: Some(0.0),
            });
        }
        let abandon = |q, p| DecodeResult {
            outcome: Outcome::Abandon,
            candidate_queries: q,
            valid_queries: p,
            pattern: None,
            metric: None,
        };
        if q >= max_q || p >= max_p {
            return Ok(abandon(q, p));
        }

        let dict = self.bank.dictionary();
        let rel = reliability_values(x_star, y, &self.model, dict)?;
        let mut order: Vec<usize> = (0..dict.len()).collect();
        order.sort_by(|&a, &b| rel[a].total_cmp(&rel[b]).then(a.cmp(&b)));
        let costs = match &self.rank_costs {
            Some(c) => c.as_ref().clone(),
            None => order.iter().map(|&i| rel[i].max(0.0)).collect(),
        };

        let memory = self.model.memory();
        let mut gen = CandidateGenerator::new(costs);
        gen.next_candidate(); // the empty set, already counted
        let mut spans: Vec<(usize, usize)> = Vec::new();
        let mut members: Vec<usize> = Vec::new();
        let mut acc = vec![0u64; base.len()];
        while let Some((id, sum)) = gen.next_candidate() {
            q += 1;
            members.clear();
            members.extend(gen.ranks(id).map(|r| order[r]));
            spans.clear();
            spans.extend(members.iter().map(|&b| self.bank.spans[b]));
            if spans_separated(&mut spans, memory) {
                p += 1;
                acc.copy_from_slice(&base);
                for &b in &members {
                    for (a, s) in acc.iter_mut().zip(self.bank.syndrome(b)) {
                        *a ^= s;
                    }
                }
                if acc.iter().all(|&w| w == 0) {
                    let support: Vec<usize> = members
                        .iter()
                        .flat_map(|&b| dict.get(b).indices().iter().copied())
                        .collect();
                    let pattern = BitBlock::from_support(x_star.len(), &support)?;
                    let codeword = x_star.xor(&pattern)?;
                    return Ok(DecodeResult {
                        outcome: Outcome::Decoded(codeword),
                        candidate_queries: q,
                        valid_queries: p,
                        pattern: Some(pattern),
                        metric: Some(sum),
                    });
                }
            }
            if q >= max_q || p >= max_p {
                break;
            }
        }
        Ok(abandon(q, p))
    }
}

/// One-shot decode; builds the burst bank on every call.
pub fn grand_isi_decode(
    y: &RealBlock,
    code: &CodeSpec,
    model: &ChannelModel,
    provider: &GammaProvider,
    cfg: &DecoderConfig,
) -> Result<DecodeResult> {
    GrandIsiDecoder::new(Arc::new(code.clone()), model.clone(), provider.clone(), *cfg)?.decode(y)
}

/// Genie lower-bound event: a codeword other than the transmitted one was
/// decoded and is at least as likely. Abandons never count.
pub fn genie_ml_error_event(
    result: &DecodeResult,
    transmitted: &BitBlock,
    y: &RealBlock,
    model: &ChannelModel,
) -> Result<bool> {
    match &result.outcome {
        Outcome::Decoded(c) if c != transmitted => {
            Ok(weight_lambda(c, y, model)? >= weight_lambda(transmitted, y, model)?)
        }
        _ => Ok(false),
    }
}
