use crate::bits::BitBlock;
use crate::codes::gf2::Gf2Poly;
use crate::codes::reliability_sequence::RELIABILITY_SEQUENCE;
use crate::error::{Error, Result};

/// CRC-aided polar code built from the 5G reliability ordering, without
/// bit-reversal.
///
/// The `k_info + deg(crc)` most reliable positions of `u` carry data. The
/// `deg(crc)` least reliable of those hold the CRC (remainder bit `j` at the
/// `j`-th such position in ascending index order); the rest hold the
/// message in ascending index order. The codeword is `polar_transform(u)`.
#[derive(Clone, Debug)]
pub struct PolarCode {
    pub frozen: Vec<bool>,
    pub message_positions: Vec<usize>,
    pub crc_positions: Vec<usize>,
    pub crc_poly: Option<Gf2Poly>,
}

impl PolarCode {
    pub(crate) fn new(n_bits: usize, k_info: usize, crc_poly: Option<Gf2Poly>) -> Result<Self> {
        if n_bits < 2 || !n_bits.is_power_of_two() {
            return Err(Error::InvalidCode(format!("polar length {n_bits} is not a power of two")));
        }
        if n_bits > RELIABILITY_SEQUENCE.len() {
            return Err(Error::InvalidCode(format!(
                "reliability sequence covers lengths up to {}, requested {n_bits}",
                RELIABILITY_SEQUENCE.len()
            )));
        }
        let crc_len = match &crc_poly {
            Some(p) => match p.degree() {
                Some(d) if d >= 1 => d,
                _ => return Err(Error::InvalidCode("CRC polynomial must have degree >= 1".into())),
            },
            None => 0,
        };
        if k_info == 0 || k_info + crc_len >= n_bits {
            return Err(Error::InvalidCode(format!(
                "need 0 < k_info + crc ({k_info} + {crc_len}) < n ({n_bits})"
            )));
        }
        // Least reliable first.
        let order: Vec<usize> = RELIABILITY_SEQUENCE
            .iter()
            .map(|&i| i as usize)
            .filter(|&i| i < n_bits)
            .collect();
        let n_data = k_info + crc_len;
        let data = &order[n_bits - n_data..];
        let mut frozen = vec![true; n_bits];
        for &i in data {
            frozen[i] = false;
        }
        let mut crc_positions: Vec<usize> = data[..crc_len].to_vec();
        let mut message_positions: Vec<usize> = data[crc_len..].to_vec();
        crc_positions.sort_unstable();
        message_positions.sort_unstable();
        Ok(PolarCode {
            frozen,
            message_positions,
            crc_positions,
            crc_poly,
        })
    }

    pub(crate) fn frozen_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.frozen.iter().enumerate().filter_map(|(i, &f)| f.then_some(i))
    }

    pub(crate) fn encode(&self, message: &BitBlock) -> BitBlock {
        let n = self.frozen.len();
        let mut u = vec![0u8; n];
        for (&pos, bit) in self.message_positions.iter().zip(message.iter()) {
            u[pos] = bit;
        }
        if let Some(poly) = &self.crc_poly {
            let crc = crc_remainder(message, poly);
            for (&pos, bit) in self.crc_positions.iter().zip(crc.iter()) {
                u[pos] = bit;
            }
        }
        polar_transform_in_place(&mut u);
        BitBlock::from_bits(u).expect("binary by construction")
    }

    /// Linear check vector: frozen bits of `u`, then CRC mismatch bits.
    /// All-zero iff `x` is a codeword.
    pub(crate) fn check_vector(&self, x: &BitBlock) -> Vec<u8> {
        let mut u = x.as_slice().to_vec();
        polar_transform_in_place(&mut u);
        let mut out: Vec<u8> = self.frozen_positions().map(|i| u[i]).collect();
        if let Some(poly) = &self.crc_poly {
            let payload = BitBlock::from_bits(self.message_positions.iter().map(|&i| u[i]).collect())
                .expect("binary");
            let crc = crc_remainder(&payload, poly);
            out.extend(
                self.crc_positions
                    .iter()
                    .zip(crc.iter())
                    .map(|(&i, c)| u[i] ^ c),
            );
        }
        out
    }
}

/// `x = u F^{(x)n}` with kernel `F = [[1, 0], [1, 1]]`, in place. The map is
/// its own inverse over GF(2).
pub fn polar_transform_in_place(u: &mut [u8]) {
    let n = u.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for j in block..block + half {
                u[j] ^= u[j + half];
            }
        }
        half *= 2;
    }
}

pub fn polar_transform(x: &BitBlock) -> Result<BitBlock> {
    if !x.len().is_power_of_two() {
        return Err(Error::InvalidCode(format!("polar length {} is not a power of two", x.len())));
    }
    let mut u = x.as_slice().to_vec();
    polar_transform_in_place(&mut u);
    BitBlock::from_bits(u)
}

/// Remainder of `payload(x) * x^deg` modulo `poly`, with `payload[0]` the
/// highest-degree coefficient. The returned block is also most-significant
/// first: bit `j` is the coefficient of `x^(deg - 1 - j)`.
pub fn crc_remainder(payload: &BitBlock, poly: &Gf2Poly) -> BitBlock {
    let deg = poly.degree().unwrap_or(0);
    let mut reg = vec![0u8; deg];
    for bit in payload.iter() {
        let feedback = bit ^ reg.first().copied().unwrap_or(0);
        reg.rotate_left(1);
        if let Some(last) = reg.last_mut() {
            *last = 0;
        }
        if feedback == 1 {
            for (j, r) in reg.iter_mut().enumerate() {
                *r ^= poly.coeff(deg - 1 - j);
            }
        }
    }
    BitBlock::from_bits(reg).expect("binary by construction")
}
