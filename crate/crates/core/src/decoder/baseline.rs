//! ORBGRAND that treats the channel as memoryless: sign decisions,
//! `|y_i|` as bit reliability, and patterns in landslide order (ascending
//! logistic weight, then ascending number of flipped bits).

use super::{DecodeResult, DecoderConfig, Outcome};
use crate::bits::BitBlock;
use crate::channel::RealBlock;
use crate::codes::CodeSpec;
use crate::error::{Error, Result};

/// Positions sorted from least to most reliable by `|y_i|`, ties by index.
pub fn reliability_order(y: &RealBlock) -> Vec<usize> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| y[a].abs().total_cmp(&y[b].abs()).then(a.cmp(&b)));
    order
}

fn sign_decisions(y: &RealBlock) -> BitBlock {
    BitBlock::from_bools(y.as_slice().iter().map(|&v| v < 0.0))
}

/// Sum of the 1-based reliability ranks of the positions where the sign
/// decision disagrees with `transmitted`.
pub fn logistic_weight_of_target(y: &RealBlock, transmitted: &BitBlock) -> Result<u64> {
    if y.len() != transmitted.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            actual: transmitted.len(),
        });
    }
    let hard = sign_decisions(y);
    Ok(reliability_order(y)
        .iter()
        .enumerate()
        .filter(|&(_, &pos)| hard.get(pos) != transmitted.get(pos))
        .map(|(r, _)| r as u64 + 1)
        .sum())
}

/// Memoryless ORBGRAND. Each pattern, the all-zero one included, is one
/// query against the code; the search stops after `cfg.max_queries`.
/// `metric` of a decoded result is the logistic weight of its pattern.
pub fn memoryless_orbgrand_decode(y: &RealBlock, code: &CodeSpec, cfg: &DecoderConfig) -> Result<DecodeResult> {
    cfg.validate()?;
    let n = code.n();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: y.len(),
        });
    }
    let hard = sign_decisions(y);
    let order = reliability_order(y);
    let map = code.syndrome_map();
    let words = map.words();
    let mut columns = vec![0u64; (n + 1) * words];
    for (r, &pos) in order.iter().enumerate() {
        columns[(r + 1) * words..(r + 2) * words].copy_from_slice(map.column(pos));
    }
    let mut search = Landslide {
        columns,
        words,
        budget: cfg.max_queries,
        queries: 0,
        stack: Vec::new(),
        found: None,
    };
    let mut acc = map.syndrome(&hard);
    let max_weight = n * (n + 1) / 2;
    'outer: for weight in 0..=max_weight {
        if weight == 0 {
            if search.leaf(&acc) {
                break;
            }
            continue;
        }
        let mut parts = 1;
        while parts * (parts + 1) / 2 <= weight && parts <= n {
            if search.descend(weight, parts, n, &mut acc) {
                break 'outer;
            }
            parts += 1;
        }
    }
    let q = search.queries;
    Ok(match search.found {
        Some(ranks) => {
            let support: Vec<usize> = ranks.iter().map(|&r| order[r - 1]).collect();
            let pattern = BitBlock::from_support(n, &support)?;
            DecodeResult {
                outcome: Outcome::Decoded(hard.xor(&pattern)?),
                candidate_queries: q,
                valid_queries: q,
                metric: Some(ranks.iter().sum::<usize>() as f64),
                pattern: Some(pattern),
            }
        }
        None => DecodeResult {
            outcome: Outcome::Abandon,
            candidate_queries: q,
            valid_queries: q,
            pattern: None,
            metric: None,
        },
    })
}

/// Enumerates sets of distinct ranks with a given sum and size, keeping
/// the running syndrome up to date on the way down.
struct Landslide {
    /// Syndrome column of rank `r` at `r * words`.
    columns: Vec<u64>,
    words: usize,
    budget: usize,
    queries: usize,
    stack: Vec<usize>,
    found: Option<Vec<usize>>,
}

impl Landslide {
    /// Returns `true` when the search must stop.
    fn leaf(&mut self, acc: &[u64]) -> bool {
        self.queries += 1;
        if acc.iter().all(|&w| w == 0) {
            self.found = Some(self.stack.clone());
            return true;
        }
        self.queries >= self.budget
    }

    fn toggle(&self, acc: &mut [u64], rank: usize) {
        let col = &self.columns[rank * self.words..(rank + 1) * self.words];
        for (a, c) in acc.iter_mut().zip(col) {
            *a ^= c;
        }
    }

    /// All sets of `parts` distinct ranks in `1..=max_rank` summing to
    /// `weight`, largest rank chosen first.
    fn descend(&mut self, weight: usize, parts: usize, max_rank: usize, acc: &mut [u64]) -> bool {
        let rest_min = (parts - 1) * parts / 2;
        if weight < rest_min + parts {
            return false;
        }
        let hi = max_rank.min(weight - rest_min);
        // The remaining parts are below `v`, so they sum to at most
        // (v-1) + .. + (v-parts+1).
        for v in (1..=hi).rev() {
            let rest = weight - v;
            let rest_max = (parts - 1) * (2 * v - parts) / 2;
            if v < parts || rest > rest_max {
                break;
            }
            self.toggle(acc, v);
            self.stack.push(v);
            let stop = if parts == 1 {
                self.leaf(acc)
            } else {
                self.descend(rest, parts - 1, v - 1, acc)
            };
            self.stack.pop();
            self.toggle(acc, v);
            if stop {
                return true;
            }
        }
        false
    }
}
