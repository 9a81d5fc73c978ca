//! Empirical distribution of burst reliabilities and its inverse.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::reliability_values;
use crate::bits::BitBlock;
use crate::channel::{transmit, ChannelModel};
use crate::codes::CodeSpec;
use crate::detector::viterbi_hard;
use crate::error::{Error, Result};
use crate::reliability::BurstDictionary;
use crate::seed::derive_seed;

pub const MIN_CDF_TRIALS: usize = 1000;

/// Points on which the two-line fit is evaluated.
const FIT_GRID: usize = 1000;

/// Where a sample set came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfHeader {
    pub code: String,
    pub taps: Vec<f64>,
    pub noise_var: f64,
    pub partial_cap: usize,
    pub trials: usize,
    pub seed: u64,
    pub samples: usize,
}

/// Sorted pooled reliabilities with linear-interpolated quantiles.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfModel {
    header: CdfHeader,
    samples: Vec<f64>,
}

impl CdfModel {
    pub fn from_samples(header: CdfHeader, mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Degenerate("no samples".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite sample".into()));
        }
        samples.sort_unstable_by(f64::total_cmp);
        let header = CdfHeader {
            samples: samples.len(),
            ..header
        };
        Ok(CdfModel { header, samples })
    }

    pub fn header(&self) -> &CdfHeader {
        &self.header
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `Psi^{-1}(p)`: position `p (n - 1)` in the sorted samples, linearly
    /// interpolated. `p` is clamped to `[0, 1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.samples.len();
        let h = p.clamp(0.0, 1.0) * (n - 1) as f64;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let frac = h - lo as f64;
        self.samples[lo] + frac * (self.samples[hi] - self.samples[lo])
    }

    /// Empirical CDF `Psi(v)`: fraction of samples `<= v`.
    pub fn cdf(&self, v: f64) -> f64 {
        self.samples.partition_point(|&s| s <= v) as f64 / self.samples.len() as f64
    }

    /// One JSON header line followed by the samples as little-endian `f64`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let write = || -> std::io::Result<()> {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer(&mut w, &self.header)?;
            w.write_all(b"\n")?;
            for v in &self.samples {
                w.write_all(&v.to_le_bytes())?;
            }
            w.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = BufReader::new(file);
        let mut line = String::new();
        r.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        let header: CdfHeader =
            serde_json::from_str(line.trim_end()).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
        if bytes.len() != header.samples * 8 {
            return Err(Error::Parse(format!(
                "{}: header announces {} samples, file holds {} bytes",
                path.display(),
                header.samples,
                bytes.len()
            )));
        }
        let samples = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Self::from_samples(header, samples)
    }
}

/// Pools the reliabilities of every dictionary burst over `trials` random
/// codeword transmissions. Deterministic in `seed`.
pub fn build_cdf_model(
    code: &CodeSpec,
    model: &ChannelModel,
    partial_cap: usize,
    trials: usize,
    seed: u64,
) -> Result<CdfModel> {
    if trials < MIN_CDF_TRIALS {
        return Err(Error::InsufficientTrials {
            required: MIN_CDF_TRIALS,
            actual: trials,
        });
    }
    let dict = BurstDictionary::enumerate(code.n(), model.memory(), partial_cap);
    let mut samples = Vec::with_capacity(trials * dict.len());
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX, t as u64));
        let msg = BitBlock::from_bools((0..code.k()).map(|_| rng.gen::<bool>()));
        let c = code.encode(&msg)?;
        let y = transmit(&c, model, &mut rng);
        let det = viterbi_hard(&y, model);
        samples.extend(reliability_values(&det.hard_sequence, &y, model, &dict)?);
    }
    let header = CdfHeader {
        code: code.name().to_string(),
        taps: model.taps().to_vec(),
        noise_var: model.noise_var(),
        partial_cap,
        trials,
        seed,
        samples: samples.len(),
    };
    CdfModel::from_samples(header, samples)
}

/// Continuous two-segment line through `(p, Psi^{-1}(p))`: slope `slope1`
/// below `breakpoint`, `slope2` above.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoLineFit {
    pub intercept: f64,
    pub slope1: f64,
    pub slope2: f64,
    pub breakpoint: f64,
    /// Mean squared residual over the fit grid.
    pub residual: f64,
}

impl TwoLineFit {
    pub fn eval(&self, p: f64) -> f64 {
        self.intercept + self.slope1 * p + (self.slope2 - self.slope1) * (p - self.breakpoint).max(0.0)
    }
}

/// Evaluation grid for the fit: `((k + 1/2) / K, Psi^{-1})`.
pub fn fit_grid(cdf: &CdfModel) -> Vec<(f64, f64)> {
    (0..FIT_GRID)
        .map(|k| {
            let p = (k as f64 + 0.5) / FIT_GRID as f64;
            (p, cdf.quantile(p))
        })
        .collect()
}

/// Least-squares continuous two-line fit with the breakpoint searched over
/// the percentiles `0.01, .., 0.99`.
pub fn fit_two_line(cdf: &CdfModel) -> Result<TwoLineFit> {
    let s = cdf.samples();
    if s.is_empty() || s[0] == s[s.len() - 1] {
        return Err(Error::Degenerate("constant reliability samples".into()));
    }
    let grid = fit_grid(cdf);
    let mut best: Option<TwoLineFit> = None;
    for j in 1..100 {
        let t = j as f64 / 100.0;
        let Some((coef, residual)) = least_squares(&grid, |p| [1.0, p, (p - t).max(0.0)]) else {
            continue;
        };
        if best.map_or(true, |b| residual < b.residual) {
            best = Some(TwoLineFit {
                intercept: coef[0],
                slope1: coef[1],
                slope2: coef[1] + coef[2],
                breakpoint: t,
                residual,
            });
        }
    }
    best.ok_or_else(|| Error::Degenerate("singular least-squares system".into()))
}

/// Fits `sum_j c_j phi_j(p)` via the normal equations. Returns the
/// coefficients and the mean squared residual.
fn least_squares(points: &[(f64, f64)], basis: impl Fn(f64) -> [f64; 3]) -> Option<([f64; 3], f64)> {
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for &(p, v) in points {
        let phi = Vector3::from(basis(p));
        ata += phi * phi.transpose();
        atb += phi * v;
    }
    let c = ata.lu().solve(&atb)?;
    let rss: f64 = points
        .iter()
        .map(|&(p, v)| {
            let phi = basis(p);
            (v - (c[0] * phi[0] + c[1] * phi[1] + c[2] * phi[2])).powi(2)
        })
        .sum();
    Some(([c[0], c[1], c[2]], rss / points.len() as f64))
}
