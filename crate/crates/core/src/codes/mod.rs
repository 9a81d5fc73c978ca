//! Binary linear block codes: construction, encoding and membership.

mod bch;
mod explicit;
pub mod gf2;
mod polar;
mod reliability_sequence;
mod syndrome;

use std::path::Path;

pub use bch::BchCode;
pub use explicit::{parse_parity_check_rows, read_parity_check_file, ExplicitCode};
pub use gf2::{primitive_polynomial, Gf2Poly};
pub use polar::{crc_remainder, polar_transform, polar_transform_in_place, PolarCode};
pub use syndrome::SyndromeMap;

use crate::bits::BitBlock;
use crate::error::{Error, Result};

pub const BCH_127_113: &str = "bch127_113";
pub const CAPOLAR_128_114_CRC6: &str = "capolar128_114_crc6";

#[derive(Clone, Debug)]
pub enum CodeKind {
    Bch(BchCode),
    CaPolar(PolarCode),
    ExplicitParityCheck(ExplicitCode),
}

/// An `(n, k)` binary linear code. Immutable once built.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    name: String,
    n: usize,
    k: usize,
    kind: CodeKind,
    syndromes: SyndromeMap,
}

impl CodeSpec {
    fn assemble(name: String, n: usize, k: usize, kind: CodeKind) -> Self {
        let (bits, check): (usize, Box<dyn Fn(&BitBlock) -> Vec<u8>>) = match &kind {
            CodeKind::Bch(c) => (c.parity_len(), Box::new(move |x| c.remainder(x))),
            CodeKind::CaPolar(c) => (n - k, Box::new(move |x| c.check_vector(x))),
            CodeKind::ExplicitParityCheck(c) => (c.rows.len(), Box::new(move |x| c.checks(x))),
        };
        let syndromes = SyndromeMap::from_linear_check(n, bits, check);
        CodeSpec {
            name,
            n,
            k,
            kind,
            syndromes,
        }
    }

    /// Narrow-sense BCH code of length `2^m - 1` whose generator is the
    /// least common multiple of the minimal polynomials of
    /// `alpha, alpha^3, ..., alpha^(2t-1)`.
    pub fn build_bch(m: u32, t: usize) -> Result<Self> {
        let (code, n, k) = BchCode::new(m, t)?;
        Ok(Self::assemble(format!("bch{n}_{k}"), n, k, CodeKind::Bch(code)))
    }

    /// CRC-aided polar code; `crc_poly = None` disables the CRC.
    pub fn build_ca_polar(n_bits: usize, k_info: usize, crc_poly: Option<Gf2Poly>) -> Result<Self> {
        let code = PolarCode::new(n_bits, k_info, crc_poly)?;
        let name = match &code.crc_poly {
            Some(p) => format!("capolar{n_bits}_{k_info}_crc{}", p.degree().unwrap_or(0)),
            None => format!("polar{n_bits}_{k_info}"),
        };
        Ok(Self::assemble(name, n_bits, k_info, CodeKind::CaPolar(code)))
    }

    pub fn from_parity_check(rows: Vec<BitBlock>) -> Result<Self> {
        let (code, n, k) = ExplicitCode::new(rows)?;
        Ok(Self::assemble(
            format!("explicit{n}_{k}"),
            n,
            k,
            CodeKind::ExplicitParityCheck(code),
        ))
    }

    pub fn from_parity_check_file(path: &Path) -> Result<Self> {
        let mut code = Self::from_parity_check(read_parity_check_file(path)?)?;
        code.name = path.display().to_string();
        Ok(code)
    }

    /// Resolves a code identifier: `bch127_113`, `capolar128_114_crc6`, or a
    /// path to a parity-check file.
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            BCH_127_113 => Self::build_bch(7, 2),
            CAPOLAR_128_114_CRC6 => {
                Self::build_ca_polar(128, 114, Some(Gf2Poly::from_exponents(&[6, 1, 0])))
            }
            path if Path::new(path).is_file() => Self::from_parity_check_file(Path::new(path)),
            other => Err(Error::InvalidCode(format!(
                "unknown code {other:?}: expected {BCH_127_113}, {CAPOLAR_128_114_CRC6} or a parity-check file"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn kind(&self) -> &CodeKind {
        &self.kind
    }

    pub fn syndrome_map(&self) -> &SyndromeMap {
        &self.syndromes
    }

    pub fn encode(&self, message: &BitBlock) -> Result<BitBlock> {
        check_len(self.k, message)?;
        Ok(match &self.kind {
            CodeKind::Bch(c) => c.encode(message, self.n),
            CodeKind::CaPolar(c) => c.encode(message),
            CodeKind::ExplicitParityCheck(c) => c.encode(message, self.n),
        })
    }

    /// Membership test through each family's native check: remainder
    /// modulo `g(x)` (BCH), inverse transform with frozen-bit and CRC checks
    /// (polar), or the parity-check rows (explicit).
    pub fn is_codeword(&self, x: &BitBlock) -> Result<bool> {
        check_len(self.n, x)?;
        let check = match &self.kind {
            CodeKind::Bch(c) => c.remainder(x),
            CodeKind::CaPolar(c) => c.check_vector(x),
            CodeKind::ExplicitParityCheck(c) => c.checks(x),
        };
        Ok(check.iter().all(|&b| b == 0))
    }

    /// A parity-check matrix realizing the same membership test.
    pub fn parity_check_rows(&self) -> Vec<BitBlock> {
        (0..self.syndromes.bits())
            .map(|j| {
                BitBlock::from_bools(
                    (0..self.n).map(|i| (self.syndromes.column(i)[j / 64] >> (j % 64)) & 1 == 1),
                )
            })
            .collect()
    }
}

fn check_len(expected: usize, x: &BitBlock) -> Result<()> {
    if x.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: x.len(),
        });
    }
    Ok(())
}

pub fn build_bch(m: u32, t: usize) -> Result<CodeSpec> {
    CodeSpec::build_bch(m, t)
}

pub fn build_ca_polar(n_bits: usize, k_info: usize, crc_poly: Option<Gf2Poly>) -> Result<CodeSpec> {
    CodeSpec::build_ca_polar(n_bits, k_info, crc_poly)
}

pub fn encode(code: &CodeSpec, message: &BitBlock) -> Result<BitBlock> {
    code.encode(message)
}

pub fn is_codeword(code: &CodeSpec, x: &BitBlock) -> Result<bool> {
    code.is_codeword(x)
}
