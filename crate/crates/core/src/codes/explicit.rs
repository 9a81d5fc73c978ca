use std::path::Path;

use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// A code given directly by parity-check rows. A generator basis of the
/// null space is derived once for encoding.
#[derive(Clone, Debug)]
pub struct ExplicitCode {
    pub rows: Vec<BitBlock>,
    pub generator: Vec<BitBlock>,
}

impl ExplicitCode {
    pub(crate) fn new(rows: Vec<BitBlock>) -> Result<(Self, usize, usize)> {
        let n = rows
            .first()
            .map(BitBlock::len)
            .ok_or_else(|| Error::InvalidCode("parity-check matrix has no rows".into()))?;
        if n == 0 {
            return Err(Error::InvalidCode("parity-check rows are empty".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: bad.len(),
            });
        }
        let generator = null_space(&rows, n);
        let k = generator.len();
        if k == 0 || k >= n {
            return Err(Error::InvalidCode(format!(
                "parity-check matrix gives dimension {k} for length {n}"
            )));
        }
        Ok((ExplicitCode { rows, generator }, n, k))
    }

    pub(crate) fn encode(&self, message: &BitBlock, n: usize) -> BitBlock {
        let mut c = vec![0u8; n];
        for (g, bit) in self.generator.iter().zip(message.iter()) {
            if bit == 1 {
                for (ci, gi) in c.iter_mut().zip(g.iter()) {
                    *ci ^= gi;
                }
            }
        }
        BitBlock::from_bits(c).expect("binary by construction")
    }

    pub(crate) fn checks(&self, x: &BitBlock) -> Vec<u8> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(x.iter()).fold(0, |acc, (a, b)| acc ^ (a & b)))
            .collect()
    }
}

/// Parses one row of `0`/`1` per line; blank lines and `#` comments are
/// skipped, whitespace inside a row is ignored.
pub fn read_parity_check_file(path: &Path) -> Result<Vec<BitBlock>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_parity_check_rows(&text)
}

pub fn parse_parity_check_rows(text: &str) -> Result<Vec<BitBlock>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

/// Basis of `{x : H x = 0}` by reduction to row echelon form.
fn null_space(rows: &[BitBlock], n: usize) -> Vec<BitBlock> {
    let mut m: Vec<Vec<u8>> = rows.iter().map(|r| r.as_slice().to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i][col] == 1) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][col] == 1 {
                let pivot_row = m[r].clone();
                for (a, b) in m[i].iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; n];
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = m[row][f];
            }
            BitBlock::from_bits(v).expect("binary")
        })
        .collect()
}
