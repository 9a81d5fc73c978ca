//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's likelihood or reliability code.

#![allow(dead_code)]

use grand_isi::{BitBlock, ChannelModel, CodeSpec, RealBlock};
use rand::Rng;

/// Per-position Gaussian log-density of `y` given bits `x`, computed from
/// scratch: `W = 1 - 2x`, zero symbols before the block.
pub fn position_loglik(x: &[u8], y: &[f64], taps: &[f64], var: f64) -> Vec<f64> {
    (0..y.len())
        .map(|i| {
            let mut mean = 0.0;
            for (l, h) in taps.iter().enumerate() {
                if l <= i {
                    mean += h * (1.0 - 2.0 * f64::from(x[i - l]));
                }
            }
            -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (y[i] - mean).powi(2) / (2.0 * var)
        })
        .collect()
}

pub fn loglik(x: &[u8], y: &[f64], taps: &[f64], var: f64) -> f64 {
    position_loglik(x, y, taps, var).iter().sum()
}

pub fn flipped(x: &[u8], set: &[usize]) -> Vec<u8> {
    let mut out = x.to_vec();
    for &i in set {
        out[i] ^= 1;
    }
    out
}

/// `Rel(S)` from two full log-likelihood evaluations.
pub fn rel_oracle(x: &[u8], set: &[usize], y: &[f64], taps: &[f64], var: f64) -> f64 {
    loglik(x, y, taps, var) - loglik(&flipped(x, set), y, taps, var)
}

/// Maximizer of the log-likelihood over all `2^n` sequences, ties to the
/// lexicographically smallest.
pub fn exhaustive_detection(y: &[f64], taps: &[f64], var: f64) -> (Vec<u8>, f64) {
    let n = y.len();
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    for m in 0u64..(1 << n) {
        let x: Vec<u8> = (0..n).map(|i| ((m >> (n - 1 - i)) & 1) as u8).collect();
        let v = loglik(&x, y, taps, var);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Random unit-energy taps of memory `l` with a dominant first tap.
pub fn random_taps(rng: &mut impl Rng, l: usize) -> Vec<f64> {
    let mut t: Vec<f64> = (0..=l).map(|j| if j == 0 { rng.gen_range(0.6..1.0) } else { rng.gen_range(-0.6..0.6) }).collect();
    let e: f64 = t.iter().map(|h| h * h).sum::<f64>().sqrt();
    t.iter_mut().for_each(|h| *h /= e);
    t
}

pub fn random_model(rng: &mut impl Rng, l: usize) -> ChannelModel {
    let taps = random_taps(rng, l);
    ChannelModel::new(taps, rng.gen_range(0.2..1.5)).unwrap()
}

pub fn random_bits(rng: &mut impl Rng, n: usize) -> BitBlock {
    BitBlock::from_bools((0..n).map(|_| rng.gen::<bool>()))
}

/// Systematic `H = [P | I]` with `n - k` independent rows.
pub fn random_code(rng: &mut impl Rng, n: usize, k: usize) -> CodeSpec {
    let r = n - k;
    let rows: Vec<BitBlock> = (0..r)
        .map(|j| BitBlock::from_bools((0..n).map(|i| if i < k { rng.gen::<bool>() } else { i - k == j })))
        .collect();
    let code = CodeSpec::from_parity_check(rows).unwrap();
    assert_eq!(code.k(), k);
    code
}

pub fn all_codewords(code: &CodeSpec) -> Vec<BitBlock> {
    let k = code.k();
    (0u64..(1 << k))
        .map(|m| code.encode(&BitBlock::from_bools((0..k).map(|i| (m >> i) & 1 == 1))).unwrap())
        .collect()
}

/// Largest log-likelihood over the codebook.
pub fn ml_best(codewords: &[BitBlock], y: &RealBlock, model: &ChannelModel) -> (BitBlock, f64) {
    codewords
        .iter()
        .map(|c| (c.clone(), loglik(c.as_slice(), y.as_slice(), model.taps(), model.noise_var())))
        .fold((BitBlock::zeros(0), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

/// Nonempty subsets of `0..n`, as sorted index lists.
pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u64..(1 << n)).map(move |m| (0..n).filter(|&i| (m >> i) & 1 == 1).collect())
}
