use crate::bits::BitBlock;

/// Per-position images of a linear map `x -> s(x)` whose kernel is the code.
///
/// Each column is packed into `words` little-endian `u64` words, so the
/// syndrome of any block is the XOR of the columns at its one positions.
#[derive(Clone, Debug)]
pub struct SyndromeMap {
    bits: usize,
    words: usize,
    columns: Vec<u64>,
}

impl SyndromeMap {
    /// Tabulates `check` on the unit vectors of length `n`. `check` must be
    /// GF(2)-linear and return `bits` values in `{0, 1}`.
    pub(crate) fn from_linear_check(n: usize, bits: usize, check: impl Fn(&BitBlock) -> Vec<u8>) -> Self {
        let words = bits.div_ceil(64).max(1);
        let mut columns = vec![0u64; n * words];
        let mut unit = BitBlock::zeros(n);
        for i in 0..n {
            unit.set(i, true);
            let s = check(&unit);
            debug_assert_eq!(s.len(), bits);
            pack_into(&s, &mut columns[i * words..(i + 1) * words]);
            unit.set(i, false);
        }
        SyndromeMap { bits, words, columns }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn len(&self) -> usize {
        self.columns.len() / self.words
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    #[inline]
    pub fn column(&self, i: usize) -> &[u64] {
        &self.columns[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn accumulate(&self, acc: &mut [u64], i: usize) {
        for (a, c) in acc.iter_mut().zip(self.column(i)) {
            *a ^= c;
        }
    }

    pub fn syndrome(&self, x: &BitBlock) -> Vec<u64> {
        let mut acc = vec![0u64; self.words];
        for (i, b) in x.iter().enumerate() {
            if b == 1 {
                self.accumulate(&mut acc, i);
            }
        }
        acc
    }
}

fn pack_into(bits: &[u8], out: &mut [u64]) {
    for (j, &b) in bits.iter().enumerate() {
        if b == 1 {
            out[j / 64] |= 1 << (j % 64);
        }
    }
}
