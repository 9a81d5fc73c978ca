use crate::bits::BitBlock;
use crate::codes::gf2::{Gf2Poly, Gf2m};
use crate::error::{Error, Result};

/// Narrow-sense binary BCH code in systematic form.
///
/// Codeword bit `i` is the coefficient of `x^i`: the low `n - k` positions
/// hold the parity remainder and the top `k` positions the message.
#[derive(Clone, Debug)]
pub struct BchCode {
    pub m: u32,
    pub t: usize,
    pub generator: Gf2Poly,
}

impl BchCode {
    pub(crate) fn new(m: u32, t: usize) -> Result<(Self, usize, usize)> {
        if t == 0 {
            return Err(Error::InvalidCode("BCH correction capability t must be >= 1".into()));
        }
        let field = Gf2m::new(m)?;
        let n = field.order();
        let mut seen = vec![false; n];
        let mut generator = Gf2Poly::one();
        for i in (1..2 * t).step_by(2) {
            let i = i % n;
            if seen[i] {
                continue;
            }
            for j in field.cyclotomic_coset(i) {
                seen[j] = true;
            }
            generator = generator.mul(&field.minimal_polynomial(i));
        }
        let deg = generator.degree().unwrap_or(0);
        if deg >= n {
            return Err(Error::InvalidCode(format!(
                "BCH(m = {m}, t = {t}) has no message bits"
            )));
        }
        Ok((BchCode { m, t, generator }, n, n - deg))
    }

    pub(crate) fn parity_len(&self) -> usize {
        self.generator.degree().unwrap_or(0)
    }

    pub(crate) fn encode(&self, message: &BitBlock, n: usize) -> BitBlock {
        let r = self.parity_len();
        let mut shifted = vec![0u8; n];
        shifted[r..].copy_from_slice(message.as_slice());
        let rem = Gf2Poly::from_coeffs(shifted.clone()).rem(&self.generator);
        for (i, c) in shifted.iter_mut().enumerate().take(r) {
            *c = rem.coeff(i);
        }
        BitBlock::from_bits(shifted).expect("binary by construction")
    }

    /// Remainder of the received polynomial modulo `g(x)`, coefficient order.
    pub(crate) fn remainder(&self, x: &BitBlock) -> Vec<u8> {
        let rem = Gf2Poly::from_coeffs(x.as_slice().to_vec()).rem(&self.generator);
        (0..self.parity_len()).map(|i| rem.coeff(i)).collect()
    }
}
