//! Error bursts and their sequence reliabilities.
//!
//! For a hard detection `x*`, the sequence reliability of an index set `S`
//! is `Rel(S) = Lambda(x*, y) - Lambda(f_S(x*), y)`, the log-likelihood cost
//! of flipping `x*` on `S`. Only the outputs at positions
//! `min(S) ..= max(S) + L` depend on `S`, so evaluation is windowed.
//!
//! All positions are 0-based.

use crate::bits::BitBlock;
use crate::channel::{bpsk_symbol, ChannelModel, RealBlock};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BurstKind {
    /// Consecutive indices.
    NonDecomposable,
    /// At least one internal gap in `2..=L`.
    PartiallyDecomposable,
}

/// A strictly increasing, nonempty index set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Burst {
    indices: Vec<usize>,
}

impl Burst {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptySet);
        }
        if indices.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse(format!("burst indices must increase strictly: {indices:?}")));
        }
        Ok(Burst { indices })
    }

    pub fn contiguous(start: usize, len: usize) -> Self {
        assert!(len > 0);
        Burst {
            indices: (start..start + len).collect(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn first(&self) -> usize {
        self.indices[0]
    }

    pub fn last(&self) -> usize {
        self.indices[self.indices.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max_gap(&self) -> usize {
        self.indices.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn is_contiguous(&self) -> bool {
        self.last() - self.first() + 1 == self.len()
    }

    pub fn kind(&self) -> BurstKind {
        if self.is_contiguous() {
            BurstKind::NonDecomposable
        } else {
            BurstKind::PartiallyDecomposable
        }
    }
}

impl std::fmt::Display for Burst {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// The burst set over which candidate error patterns are assembled: every
/// contiguous burst, plus (for `L >= 2`) every partially-decomposable burst
/// of size at most `partial_cap`.
///
/// Ordered by size, then by first index, then lexicographically.
#[derive(Clone, Debug)]
pub struct BurstDictionary {
    bursts: Vec<Burst>,
    n: usize,
    memory: usize,
    partial_cap: usize,
}

impl BurstDictionary {
    /// For `L = 0` only singletons are bursts.
    pub fn enumerate(n: usize, memory: usize, partial_cap: usize) -> Self {
        let mut bursts = Vec::new();
        let max_size = if memory == 0 { n.min(1) } else { n };
        for size in 1..=max_size {
            let with_partial = memory >= 2 && size >= 2 && size <= partial_cap;
            if !with_partial {
                bursts.extend((0..=n - size).map(|start| Burst::contiguous(start, size)));
                continue;
            }
            let gap_seqs = gap_sequences(size - 1, memory);
            for start in 0..n {
                for gaps in &gap_seqs {
                    let span: usize = gaps.iter().sum();
                    if start + span >= n {
                        continue;
                    }
                    let mut idx = Vec::with_capacity(size);
                    idx.push(start);
                    for g in gaps {
                        idx.push(idx[idx.len() - 1] + g);
                    }
                    bursts.push(Burst { indices: idx });
                }
            }
        }
        BurstDictionary {
            bursts,
            n,
            memory,
            partial_cap,
        }
    }

    pub fn bursts(&self) -> &[Burst] {
        &self.bursts
    }

    pub fn get(&self, i: usize) -> &Burst {
        &self.bursts[i]
    }

    pub fn len(&self) -> usize {
        self.bursts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bursts.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn partial_cap(&self) -> usize {
        self.partial_cap
    }

    pub fn position(&self, indices: &[usize]) -> Option<usize> {
        self.bursts.iter().position(|b| b.indices == indices)
    }
}

/// All gap vectors in `[1, max_gap]^len`, lexicographic.
fn gap_sequences(len: usize, max_gap: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=max_gap).map(move |g| {
                    let mut v = prefix.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
    }
    out
}

pub fn enumerate_bursts(n: usize, memory: usize, partial_cap: usize) -> BurstDictionary {
    BurstDictionary::enumerate(n, memory, partial_cap)
}

/// `max(min(S) - L, 0)`.
pub fn left_window(set: &[usize], memory: usize) -> usize {
    set[0].saturating_sub(memory)
}

/// `min(max(S) + L, n - 1)`.
pub fn right_window(set: &[usize], memory: usize, n: usize) -> usize {
    (set[set.len() - 1] + memory).min(n - 1)
}

/// `f_S(x)`: `x` with the bits at `set` toggled.
pub fn flip(x: &BitBlock, set: &[usize]) -> Result<BitBlock> {
    let mut out = x.clone();
    for &i in set {
        if i >= x.len() {
            return Err(Error::IndexOutOfRange { index: i, len: x.len() });
        }
        out.toggle(i);
    }
    Ok(out)
}

/// Per-observation state shared by all reliability evaluations.
pub struct RelContext<'a> {
    model: &'a ChannelModel,
    y: &'a [f64],
    symbols: Vec<f64>,
    mean: Vec<f64>,
    inv_two_var: f64,
}

impl<'a> RelContext<'a> {
    pub fn new(x_star: &BitBlock, y: &'a RealBlock, model: &'a ChannelModel) -> Result<Self> {
        if x_star.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: y.len(),
                actual: x_star.len(),
            });
        }
        let symbols: Vec<f64> = x_star.iter().map(bpsk_symbol).collect();
        let mean = model.mean_output(&symbols);
        Ok(RelContext {
            model,
            y: y.as_slice(),
            symbols,
            mean,
            inv_two_var: 1.0 / (2.0 * model.noise_var()),
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// `ln p(y_i | x*) - ln p(y_i | flipped)` given the change `delta` of the
    /// noise-free output at `i`.
    #[inline]
    fn term(&self, i: usize, delta: f64) -> f64 {
        let r = self.y[i] - self.mean[i];
        ((r - delta).powi(2) - r * r) * self.inv_two_var
    }

    /// Windowed `Rel(S)` for a sorted index set.
    pub fn rel(&self, set: &[usize]) -> f64 {
        let taps = self.model.taps();
        let lo = set[0];
        let hi = right_window(set, self.model.memory(), self.n());
        let mut delta = vec![0.0; hi - lo + 1];
        for &j in set {
            for (l, h) in taps.iter().enumerate() {
                if j + l > hi {
                    break;
                }
                delta[j + l - lo] -= 2.0 * h * self.symbols[j];
            }
        }
        delta.iter().enumerate().map(|(k, &d)| self.term(lo + k, d)).sum()
    }

    /// `Rel` of every contiguous burst, indexed by [`contiguous_offset`].
    ///
    /// Extending `{a..b}` to `{a..b+1}` leaves the terms at positions `<= b`
    /// unchanged, so each burst costs `O(L^2)`.
    pub fn contiguous_table(&self) -> Vec<f64> {
        let n = self.n();
        let taps = self.model.taps();
        let l = self.model.memory();
        let mut out = vec![0.0; n * (n + 1) / 2];
        // Output change at i when S = {lo..=hi}.
        let delta = |i: usize, lo: usize, hi: usize| -> f64 {
            let from = lo.max(i.saturating_sub(l));
            let to = hi.min(i);
            (from..=to).map(|j| -2.0 * taps[i - j] * self.symbols[j]).sum()
        };
        for a in 0..n {
            let mut inner = 0.0;
            for b in a..n {
                inner += self.term(b, delta(b, a, b));
                let tail: f64 = (b + 1..=(b + l).min(n - 1))
                    .map(|i| self.term(i, delta(i, a, b)))
                    .sum();
                out[contiguous_offset(n, a, b - a + 1)] = inner + tail;
            }
        }
        out
    }
}

/// Position of the contiguous burst `{start, .., start + len - 1}` in the
/// size-major ordering of all contiguous bursts of a length-`n` block.
pub fn contiguous_offset(n: usize, start: usize, len: usize) -> usize {
    let k = len - 1;
    k * n - k * (k.saturating_sub(1)) / 2 + start
}

/// `Rel(S)` from the windowed difference of `Lambda`.
pub fn rel_direct(set: &[usize], x_star: &BitBlock, y: &RealBlock, model: &ChannelModel) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&i| i >= x_star.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: x_star.len(),
        });
    }
    Ok(RelContext::new(x_star, y, model)?.rel(&sorted))
}

/// `Rel({i, i+1}) - Rel({i}) - Rel({i+1})` for a first-order channel:
/// `4 h0 h1 / sigma^2` times `+1` when `x*_i = x*_{i+1}` and `-1` otherwise.
pub fn pair_coupling_delta(x_star: &BitBlock, i: usize, model: &ChannelModel) -> Result<f64> {
    if model.memory() != 1 {
        return Err(Error::MemoryOrder {
            expected: 1,
            actual: model.memory(),
        });
    }
    if i + 1 >= x_star.len() {
        return Err(Error::IndexOutOfRange {
            index: i + 1,
            len: x_star.len(),
        });
    }
    let h = model.taps();
    let sign = if x_star.get(i) == x_star.get(i + 1) { 1.0 } else { -1.0 };
    Ok(4.0 * h[0] * h[1] / model.noise_var() * sign)
}

/// Reliabilities aligned with a [`BurstDictionary`].
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityTable {
    values: Vec<f64>,
}

impl ReliabilityTable {
    pub fn from_values(values: Vec<f64>) -> Self {
        ReliabilityTable { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// First-order table from the single-bit reliabilities and the closed-form
/// pair couplings: `Rel({a..b}) = sum Rel({i}) + sum_{i<b} delta_i`.
/// Ordered as `enumerate_bursts(n, 1, 0)`.
pub fn rel_table_first_order(x_star: &BitBlock, y: &RealBlock, model: &ChannelModel) -> Result<ReliabilityTable> {
    if model.memory() != 1 {
        return Err(Error::MemoryOrder {
            expected: 1,
            actual: model.memory(),
        });
    }
    let ctx = RelContext::new(x_star, y, model)?;
    let n = ctx.n();
    let singles: Vec<f64> = (0..n).map(|i| ctx.rel(&[i])).collect();
    let coupling = 4.0 * model.taps()[0] * model.taps()[1] / model.noise_var();
    let deltas: Vec<f64> = (0..n.saturating_sub(1))
        .map(|i| if x_star.get(i) == x_star.get(i + 1) { coupling } else { -coupling })
        .collect();
    let mut values = Vec::with_capacity(n * (n + 1) / 2);
    for len in 1..=n {
        for a in 0..=n - len {
            let s: f64 = singles[a..a + len].iter().sum::<f64>() + deltas[a..a + len - 1].iter().sum::<f64>();
            values.push(s);
        }
    }
    Ok(ReliabilityTable { values })
}

/// Every dictionary burst's reliability from the windowed definition.
pub fn rel_table_general(
    x_star: &BitBlock,
    y: &RealBlock,
    model: &ChannelModel,
    dict: &BurstDictionary,
) -> Result<ReliabilityTable> {
    if dict.n() != y.len() {
        return Err(Error::LengthMismatch {
            expected: dict.n(),
            actual: y.len(),
        });
    }
    if dict.memory() != model.memory() {
        return Err(Error::MemoryOrder {
            expected: dict.memory(),
            actual: model.memory(),
        });
    }
    let ctx = RelContext::new(x_star, y, model)?;
    Ok(table_with_context(&ctx, dict))
}

pub(crate) fn table_with_context(ctx: &RelContext<'_>, dict: &BurstDictionary) -> ReliabilityTable {
    let n = ctx.n();
    let contiguous = ctx.contiguous_table();
    let values = dict
        .bursts()
        .iter()
        .map(|b| {
            if b.is_contiguous() {
                contiguous[contiguous_offset(n, b.first(), b.len())]
            } else {
                ctx.rel(b.indices())
            }
        })
        .collect();
    ReliabilityTable { values }
}

/// An error pattern with its unique burst partition.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorPattern {
    pub bits: BitBlock,
    pub bursts: Vec<Burst>,
}

impl ErrorPattern {
    /// Number of bursts, `zeta`.
    pub fn zeta(&self) -> usize {
        self.bursts.len()
    }
}

/// Splits the support of `e` wherever consecutive ones are more than `L`
/// apart.
pub fn partition_into_bursts(e: &BitBlock, memory: usize) -> ErrorPattern {
    let mut bursts: Vec<Burst> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for i in e.support() {
        if let Some(&prev) = current.last() {
            if i - prev > memory {
                bursts.push(Burst {
                    indices: std::mem::take(&mut current),
                });
            }
        }
        current.push(i);
    }
    if !current.is_empty() {
        bursts.push(Burst { indices: current });
    }
    ErrorPattern {
        bits: e.clone(),
        bursts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitBlock {
        s.parse().unwrap()
    }

    #[test]
    fn dictionary_sizes() {
        assert_eq!(enumerate_bursts(4, 1, 0).len(), 10);
        assert_eq!(enumerate_bursts(6, 2, 3).len(), 33);
        assert_eq!(enumerate_bursts(6, 2, 0).len(), 21);
        let one = enumerate_bursts(1, 3, 5);
        assert_eq!(one.bursts(), &[Burst::contiguous(0, 1)]);
        assert_eq!(enumerate_bursts(5, 0, 0).len(), 5);
    }

    #[test]
    fn partial_counts_follow_closed_form() {
        for n in 4..20 {
            let d = enumerate_bursts(n, 2, 3);
            let size2 = d.bursts().iter().filter(|b| b.len() == 2 && !b.is_contiguous()).count();
            let size3 = d.bursts().iter().filter(|b| b.len() == 3 && !b.is_contiguous()).count();
            assert_eq!(size2, n - 2);
            assert_eq!(size3, (n - 4) + 2 * (n - 3));
            assert_eq!(d.len(), n * (n + 1) / 2 + (n - 2) + (n - 4) + 2 * (n - 3));
        }
    }

    #[test]
    fn dictionary_order_and_uniqueness() {
        let d = enumerate_bursts(9, 2, 4);
        for w in d.bursts().windows(2) {
            let key = |b: &Burst| (b.len(), b.first(), b.indices().to_vec());
            assert!(key(&w[0]) < key(&w[1]));
        }
        for b in d.bursts() {
            assert!(b.max_gap() <= 2);
        }
    }

    #[test]
    fn flip_examples() {
        assert_eq!(flip(&bits("0001"), &[3]).unwrap(), bits("0000"));
        assert_eq!(flip(&bits("0001"), &[]).unwrap(), bits("0001"));
        assert_eq!(flip(&bits("0100"), &[0, 2]).unwrap(), bits("1110"));
        assert!(flip(&bits("0100"), &[4]).is_err());
    }

    #[test]
    fn partitions() {
        let p = partition_into_bursts(&bits("0100111"), 1);
        assert_eq!(p.zeta(), 2);
        assert_eq!(p.bursts[0].indices(), &[1]);
        assert_eq!(p.bursts[1].indices(), &[4, 5, 6]);
        let p = partition_into_bursts(&bits("101001"), 2);
        assert_eq!(p.bursts[0].indices(), &[0, 2]);
        assert_eq!(p.bursts[1].indices(), &[5]);
        assert_eq!(partition_into_bursts(&bits("0000"), 1).zeta(), 0);
    }

    #[test]
    fn windows() {
        assert_eq!(left_window(&[0, 1], 1), 0);
        assert_eq!(left_window(&[4, 6], 2), 2);
        assert_eq!(right_window(&[4, 6], 2, 8), 7);
        assert_eq!(right_window(&[1], 2, 8), 3);
    }

    #[test]
    fn contiguous_offsets_match_enumeration() {
        let n = 7;
        let d = enumerate_bursts(n, 1, 0);
        for (k, b) in d.bursts().iter().enumerate() {
            assert_eq!(contiguous_offset(n, b.first(), b.len()), k);
        }
    }

    #[test]
    fn coupling_requires_first_order() {
        let m = ChannelModel::new(vec![0.8f64.sqrt(), 0.15f64.sqrt(), 0.05f64.sqrt()], 1.0).unwrap();
        assert!(pair_coupling_delta(&bits("0000"), 0, &m).is_err());
        let m1 = ChannelModel::new(vec![0.9f64.sqrt(), 0.1f64.sqrt()], 1.0).unwrap();
        assert!(pair_coupling_delta(&bits("0000"), 3, &m1).is_err());
        let y = RealBlock::new(vec![0.0; 4]).unwrap();
        assert!(rel_table_first_order(&bits("0000"), &y, &m).is_err());
    }

    #[test]
    fn empty_set_rejected() {
        let m = ChannelModel::new(vec![1.0], 1.0).unwrap();
        let y = RealBlock::new(vec![0.5; 3]).unwrap();
        assert!(matches!(rel_direct(&[], &bits("000"), &y, &m), Err(Error::EmptySet)));
    }
}
