use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Number of reliabilities over all bursts (no partial-burst cap) of a
/// length-`n` block at memory `l`: `sum_i F(i)` with
/// `F(i) = 1 + sum_{j = i-l}^{i-1} F(j)`, `F(j) = 0` for `j < 1`.
///
/// `F(i)` counts bursts ending at position `i` (1-based).
pub fn complexity_tot(n: usize, l: usize) -> Result<BigUint> {
    if n == 0 || l == 0 {
        return Err(Error::Config(format!("complexity needs N >= 1 and L >= 1, got N = {n}, L = {l}")));
    }
    let mut f: Vec<BigUint> = Vec::with_capacity(n + 1);
    f.push(BigUint::ZERO);
    let mut total = BigUint::ZERO;
    for i in 1..=n {
        let mut v = BigUint::from(1u32);
        for j in i.saturating_sub(l).max(1)..i {
            v += &f[j];
        }
        total += &v;
        f.push(v);
    }
    Ok(total)
}

/// Closed form of [`complexity_tot`] at `l = 2`:
/// `((2 phi + 1) phi^(n+1) - (2 psi + 1) psi^(n+1)) / sqrt(5) - n - 3`.
pub fn tot_closed_form_l2(n: usize) -> f64 {
    let s5 = 5f64.sqrt();
    let phi = (1.0 + s5) / 2.0;
    let psi = (1.0 - s5) / 2.0;
    let e = n as i32 + 1;
    ((2.0 * phi + 1.0) * phi.powi(e) - (2.0 * psi + 1.0) * psi.powi(e)) / s5 - n as f64 - 3.0
}
