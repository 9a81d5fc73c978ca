//! Sequence log-likelihood and maximum-likelihood hard detection.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::bits::BitBlock;
use crate::channel::{bpsk_symbol, ChannelModel, RealBlock};
use crate::error::{Error, Result};

/// Hard detection `x*` and its weight `Lambda(x*, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionResult {
    pub hard_sequence: BitBlock,
    pub weight: f64,
    /// Branch metrics evaluated by the trellis search: `N * 2^L * 2`.
    pub branch_metrics: usize,
}

/// `Lambda(x, y) = sum_i ln p(y_i | x_{i-L..i})` with Gaussian densities,
/// the normalizing constant included.
pub fn weight_lambda(x: &BitBlock, y: &RealBlock, model: &ChannelModel) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: y.len(),
            actual: x.len(),
        });
    }
    let w: Vec<f64> = x.iter().map(bpsk_symbol).collect();
    let mean = model.mean_output(&w);
    let var = model.noise_var();
    let norm = -0.5 * (2.0 * PI * var).ln();
    Ok(y
        .as_slice()
        .iter()
        .zip(&mean)
        .map(|(yi, mi)| norm - (yi - mi).powi(2) / (2.0 * var))
        .sum())
}

/// Viterbi search over the `2^L`-state trellis for the unconstrained
/// maximizer of `Lambda(., y)`.
///
/// State bit `j` holds the bit sent `j + 1` uses ago; the search starts from
/// the empty history, so early stages see a truncated convolution. Exact
/// metric ties go to the lexicographically smaller history.
pub fn viterbi_hard(y: &RealBlock, model: &ChannelModel) -> DetectionResult {
    let n = y.len();
    let taps = model.taps();
    let l = model.memory();
    let states = 1usize << l;
    let mask = states - 1;
    let inv_two_var = 1.0 / (2.0 * model.noise_var());
    let norm = -0.5 * (2.0 * PI * model.noise_var()).ln();

    let mean = |s: usize, b: u8, depth: usize| -> f64 {
        let mut mu = taps[0] * bpsk_symbol(b);
        for (j, h) in taps.iter().enumerate().skip(1).take(depth.min(l)) {
            mu += h * bpsk_symbol(((s >> (j - 1)) & 1) as u8);
        }
        mu
    };
    // Steady-state means once the full window is inside the block.
    let full: Vec<[f64; 2]> = (0..states).map(|s| [mean(s, 0, l), mean(s, 1, l)]).collect();

    let mut metric = vec![f64::NEG_INFINITY; states];
    metric[0] = 0.0;
    let mut next = vec![f64::NEG_INFINITY; states];
    // survivors[i * states + s] = (predecessor << 1) | bit
    let mut survivors = vec![u32::MAX; n * states];
    let mut branch_metrics = 0usize;

    for i in 0..n {
        next.fill(f64::NEG_INFINITY);
        for s in 0..states {
            for b in 0..2u8 {
                branch_metrics += 1;
                let mu = if i >= l { full[s][b as usize] } else { mean(s, b, i) };
                let cand = metric[s] + norm - (y[i] - mu).powi(2) * inv_two_var;
                let ns = ((s << 1) | b as usize) & mask;
                let slot = i * states + ns;
                let take = if cand > next[ns] {
                    true
                } else {
                    cand == next[ns]
                        && cand.is_finite()
                        && compare_histories(&survivors, states, i, (s, b), survivors[slot]) == Ordering::Less
                };
                if take {
                    next[ns] = cand;
                    survivors[slot] = ((s as u32) << 1) | u32::from(b);
                }
            }
        }
        std::mem::swap(&mut metric, &mut next);
    }

    let hard_sequence = if n == 0 {
        BitBlock::zeros(0)
    } else {
        let mut best = 0;
        for s in 1..states {
            let better = metric[s] > metric[best]
                || (metric[s] == metric[best]
                    && metric[s].is_finite()
                    && traceback(&survivors, states, n - 1, s) < traceback(&survivors, states, n - 1, best));
            if better {
                best = s;
            }
        }
        BitBlock::from_bits(traceback(&survivors, states, n - 1, best)).expect("binary")
    };
    let weight = weight_lambda(&hard_sequence, y, model).expect("lengths agree");
    DetectionResult {
        hard_sequence,
        weight,
        branch_metrics,
    }
}

/// Bits `0..=stage` of the survivor ending in `state` after `stage`.
fn traceback(survivors: &[u32], states: usize, stage: usize, state: usize) -> Vec<u8> {
    let mut bits = vec![0u8; stage + 1];
    let mut s = state;
    for i in (0..=stage).rev() {
        let entry = survivors[i * states + s];
        bits[i] = (entry & 1) as u8;
        s = (entry >> 1) as usize;
    }
    bits
}

/// Orders the history `survivor(stage - 1, s) ++ [b]` against the incumbent
/// entry already stored for the same target state.
fn compare_histories(survivors: &[u32], states: usize, stage: usize, (s, b): (usize, u8), incumbent: u32) -> Ordering {
    let (s_inc, b_inc) = ((incumbent >> 1) as usize, (incumbent & 1) as u8);
    let (head, head_inc) = if stage == 0 {
        (Vec::new(), Vec::new())
    } else {
        (
            traceback(survivors, states, stage - 1, s),
            traceback(survivors, states, stage - 1, s_inc),
        )
    };
    head.cmp(&head_inc).then(b.cmp(&b_inc))
}
