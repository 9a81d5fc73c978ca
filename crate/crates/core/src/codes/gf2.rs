//! Polynomials over GF(2) and the extension field GF(2^m).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A polynomial over GF(2). `coeffs[i]` is the coefficient of `x^i`;
/// the vector never carries trailing zeros, so the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    coeffs: Vec<u8>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly { coeffs: vec![1] }
    }

    pub fn from_coeffs(mut coeffs: Vec<u8>) -> Self {
        for c in coeffs.iter_mut() {
            *c &= 1;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Gf2Poly { coeffs }
    }

    /// `from_exponents(&[6, 1, 0])` is `x^6 + x + 1`.
    pub fn from_exponents(exponents: &[usize]) -> Self {
        let deg = exponents.iter().copied().max().map_or(0, |d| d + 1);
        let mut coeffs = vec![0u8; deg];
        for &e in exponents {
            coeffs[e] ^= 1;
        }
        Gf2Poly::from_coeffs(coeffs)
    }

    /// Bit `i` of `mask` is the coefficient of `x^i`.
    pub fn from_mask(mask: u64) -> Self {
        Gf2Poly::from_coeffs((0..64).map(|i| ((mask >> i) & 1) as u8).collect())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let mut out = vec![0u8; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 1 {
                for (j, &b) in other.coeffs.iter().enumerate() {
                    out[i + j] ^= b;
                }
            }
        }
        Gf2Poly::from_coeffs(out)
    }

    /// Quotient and remainder of long division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Gf2Poly) -> (Gf2Poly, Gf2Poly) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Gf2Poly::zero(), self.clone());
        }
        let mut quot = vec![0u8; rem.len() - d];
        for top in (d..rem.len()).rev() {
            if rem[top] == 1 {
                let shift = top - d;
                quot[shift] = 1;
                for (j, &c) in divisor.coeffs.iter().enumerate() {
                    rem[shift + j] ^= c;
                }
            }
        }
        (Gf2Poly::from_coeffs(quot), Gf2Poly::from_coeffs(rem))
    }

    pub fn rem(&self, divisor: &Gf2Poly) -> Gf2Poly {
        self.div_rem(divisor).1
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            if self.coeffs[i] == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

impl FromStr for Gf2Poly {
    type Err = Error;

    /// Accepts `x^6+x+1` style sums or a hexadecimal mask such as `0x43`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            let mask = u64::from_str_radix(hex, 16)
                .map_err(|e| Error::Parse(format!("bad polynomial mask {s:?}: {e}")))?;
            return Ok(Gf2Poly::from_mask(mask));
        }
        let mut exponents = Vec::new();
        for term in s.split('+') {
            let e = match term {
                "1" => 0,
                "x" => 1,
                t => t
                    .strip_prefix("x^")
                    .and_then(|e| e.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad polynomial term {t:?}")))?,
            };
            exponents.push(e);
        }
        Ok(Gf2Poly::from_exponents(&exponents))
    }
}

/// Primitive polynomials indexed by `m`, as masks (bit `i` = coefficient of `x^i`).
const PRIMITIVE_POLYNOMIALS: [(u32, u32); 15] = [
    (2, 0x7),
    (3, 0xB),
    (4, 0x13),
    (5, 0x25),
    (6, 0x43),
    (7, 0x89), // x^7 + x^3 + 1
    (8, 0x11D),
    (9, 0x211),
    (10, 0x409),
    (11, 0x805),
    (12, 0x1053),
    (13, 0x201B),
    (14, 0x4443),
    (15, 0x8003),
    (16, 0x1100B),
];

pub fn primitive_polynomial(m: u32) -> Result<Gf2Poly> {
    PRIMITIVE_POLYNOMIALS
        .iter()
        .find(|&&(deg, _)| deg == m)
        .map(|&(_, mask)| Gf2Poly::from_mask(u64::from(mask)))
        .ok_or(Error::UnsupportedFieldDegree(m))
}

/// GF(2^m) with elements as integers in polynomial basis, generated by a
/// root `alpha` of the table's primitive polynomial.
pub(crate) struct Gf2m {
    order: usize,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Gf2m {
    pub(crate) fn new(m: u32) -> Result<Self> {
        let (_, mask) = *PRIMITIVE_POLYNOMIALS
            .iter()
            .find(|&&(deg, _)| deg == m)
            .ok_or(Error::UnsupportedFieldDegree(m))?;
        let size = 1usize << m;
        let order = size - 1;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; size];
        let mut v: u32 = 1;
        for i in 0..order {
            if i > 0 && v == 1 {
                return Err(Error::InvalidCode(format!(
                    "table polynomial for m = {m} is not primitive"
                )));
            }
            exp[i] = v;
            log[v as usize] = i as u32;
            v <<= 1;
            if v & (1 << m) != 0 {
                v ^= mask;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Gf2m { order, exp, log })
    }

    pub(crate) fn order(&self) -> usize {
        self.order
    }

    pub(crate) fn alpha_pow(&self, i: usize) -> u32 {
        self.exp[i % self.order]
    }

    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    /// Exponents `{i, 2i, 4i, ...} mod (2^m - 1)`.
    pub(crate) fn cyclotomic_coset(&self, i: usize) -> Vec<usize> {
        let mut coset = Vec::new();
        let mut j = i % self.order;
        loop {
            coset.push(j);
            j = (2 * j) % self.order;
            if j == i % self.order {
                break;
            }
        }
        coset
    }

    /// Minimal polynomial of `alpha^i` over GF(2): the product of
    /// `(x + alpha^j)` over the cyclotomic coset of `i`.
    pub(crate) fn minimal_polynomial(&self, i: usize) -> Gf2Poly {
        let mut acc: Vec<u32> = vec![1];
        for j in self.cyclotomic_coset(i) {
            let root = self.alpha_pow(j);
            let mut next = vec![0u32; acc.len() + 1];
            for (k, &c) in acc.iter().enumerate() {
                next[k + 1] ^= c;
                next[k] ^= self.mul(c, root);
            }
            acc = next;
        }
        debug_assert!(acc.iter().all(|&c| c <= 1));
        Gf2Poly::from_coeffs(acc.into_iter().map(|c| c as u8).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p: Gf2Poly = "x^6 + x + 1".parse().unwrap();
        assert_eq!(p, Gf2Poly::from_mask(0x43));
        assert_eq!(p.to_string(), "x^6 + x + 1");
        assert_eq!("0x43".parse::<Gf2Poly>().unwrap(), p);
        assert!("x^+1".parse::<Gf2Poly>().is_err());
    }

    #[test]
    fn division_identity() {
        let a = Gf2Poly::from_mask(0b1101_0111_0011);
        let b = Gf2Poly::from_mask(0b1011);
        let (q, r) = a.div_rem(&b);
        let back = q.mul(&b);
        let sum: Vec<u8> = (0..a.coeffs().len())
            .map(|i| back.coeff(i) ^ r.coeff(i))
            .collect();
        assert_eq!(Gf2Poly::from_coeffs(sum), a);
        assert!(r.degree().map_or(true, |d| d < 3));
    }

    #[test]
    fn every_table_polynomial_is_primitive() {
        for m in 2..=16 {
            let field = Gf2m::new(m).unwrap();
            assert_eq!(field.order(), (1 << m) - 1);
        }
        assert!(matches!(Gf2m::new(17), Err(Error::UnsupportedFieldDegree(17))));
    }

    #[test]
    fn minimal_polynomial_of_alpha_is_primitive_poly() {
        let field = Gf2m::new(7).unwrap();
        assert_eq!(field.minimal_polynomial(1), primitive_polynomial(7).unwrap());
        assert_eq!(field.cyclotomic_coset(3).len(), 7);
    }
}
