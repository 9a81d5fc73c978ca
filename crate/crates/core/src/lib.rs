//! Guessing random additive noise decoding for binary block codes sent
//! with BPSK over Gaussian intersymbol-interference channels.
//!
//! The pipeline per received block: Viterbi hard detection
//! ([`detector`]), burst reliabilities ([`reliability`]), then ordered
//! error-pattern queries against the code ([`decoder`]). [`sim`] drives
//! Monte Carlo sweeps over these pieces.

pub mod bits;
pub mod channel;
pub mod codes;
pub mod decoder;
pub mod detector;
pub mod error;
pub mod reliability;
pub mod seed;
pub mod sim;

pub use bits::BitBlock;
pub use channel::{ChannelModel, RealBlock};
pub use codes::CodeSpec;
pub use error::{Error, Result};
