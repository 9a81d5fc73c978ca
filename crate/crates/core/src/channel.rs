//! BPSK over a real Gaussian intersymbol-interference channel.
//!
//! `y_i = sum_l h_l W_{i-l} + z_i` with `W = 1 - 2x` and symbols before the
//! block taken as zero (no signal before position 0).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::bits::BitBlock;
use crate::error::{Error, Result};

const TAP_NORM_TOLERANCE: f64 = 1e-12;

/// Channel outputs `y`, one per channel use.
#[derive(Clone, Debug, PartialEq)]
pub struct RealBlock(Vec<f64>);

impl RealBlock {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidChannel("non-finite sample".into()));
        }
        Ok(RealBlock(samples))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Index<usize> for RealBlock {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// ISI taps `h_0..h_L` with unit energy, and noise variance `sigma^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    taps: Vec<f64>,
    noise_var: f64,
}

impl ChannelModel {
    /// Requires `sum h_l^2 = 1` within `1e-12` and `sigma^2 > 0`.
    pub fn new(taps: Vec<f64>, noise_var: f64) -> Result<Self> {
        validate_taps(&taps)?;
        let energy: f64 = taps.iter().map(|h| h * h).sum();
        if (energy - 1.0).abs() > TAP_NORM_TOLERANCE {
            return Err(Error::InvalidChannel(format!(
                "tap energy is {energy}, expected 1"
            )));
        }
        Self::checked(taps, noise_var)
    }

    /// Scales the taps to unit energy. The flag reports whether scaling
    /// was needed.
    pub fn normalized(taps: Vec<f64>, noise_var: f64) -> Result<(Self, bool)> {
        validate_taps(&taps)?;
        let energy: f64 = taps.iter().map(|h| h * h).sum();
        if energy <= 0.0 {
            return Err(Error::InvalidChannel("all taps are zero".into()));
        }
        let rescaled = (energy - 1.0).abs() > TAP_NORM_TOLERANCE;
        let taps = if rescaled {
            let s = energy.sqrt();
            taps.into_iter().map(|h| h / s).collect()
        } else {
            taps
        };
        Ok((Self::checked(taps, noise_var)?, rescaled))
    }

    fn checked(taps: Vec<f64>, noise_var: f64) -> Result<Self> {
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "noise variance must be positive and finite, got {noise_var}"
            )));
        }
        Ok(ChannelModel { taps, noise_var })
    }

    /// The same taps at another noise level.
    pub fn with_noise_var(&self, noise_var: f64) -> Result<Self> {
        Self::checked(self.taps.clone(), noise_var)
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Memory order `L = len(taps) - 1`.
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    /// Noise-free output mean at every position for BPSK symbols `w`.
    pub fn mean_output(&self, w: &[f64]) -> Vec<f64> {
        (0..w.len())
            .map(|i| {
                self.taps
                    .iter()
                    .enumerate()
                    .take(i + 1)
                    .map(|(l, h)| h * w[i - l])
                    .sum()
            })
            .collect()
    }
}

fn validate_taps(taps: &[f64]) -> Result<()> {
    if taps.is_empty() {
        return Err(Error::InvalidChannel("at least one tap is required".into()));
    }
    if taps.iter().any(|h| !h.is_finite()) {
        return Err(Error::InvalidChannel("non-finite tap".into()));
    }
    Ok(())
}

/// Bit 0 maps to `+1`, bit 1 to `-1`.
#[inline]
pub fn bpsk_symbol(bit: u8) -> f64 {
    1.0 - 2.0 * f64::from(bit)
}

pub fn bpsk_map(x: &BitBlock) -> RealBlock {
    RealBlock(x.iter().map(bpsk_symbol).collect())
}

/// Sends `x` through the channel, drawing `N(0, sigma^2)` noise from `rng`.
pub fn transmit<R: Rng + ?Sized>(x: &BitBlock, model: &ChannelModel, rng: &mut R) -> RealBlock {
    let w = bpsk_map(x);
    let sigma = model.noise_var().sqrt();
    let mut y = model.mean_output(w.as_slice());
    for v in y.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v += sigma * z;
    }
    RealBlock(y)
}

/// `sigma^2 = 1 / (2 R 10^(Eb/N0 / 10))` for unit-energy symbols.
pub fn ebn0_to_sigma2(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidChannel(format!("code rate must lie in (0, 1], got {rate}")));
    }
    Ok(1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0)))
}
