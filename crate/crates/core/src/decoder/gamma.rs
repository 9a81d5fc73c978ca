use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::cdf::{CdfModel, TwoLineFit};
use crate::error::{Error, Result};

/// Which per-burst cost orders the candidate stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProviderKind {
    /// Exact sequence reliability.
    SGrand,
    /// Reliability rank.
    Orb,
    /// Rank mapped through the empirical reliability quantile function.
    CdfOrb,
    /// Rank mapped through a two-segment fit of that quantile function.
    TwoLine,
}

impl ProviderKind {
    pub const ALL: [ProviderKind; 4] = [
        ProviderKind::SGrand,
        ProviderKind::Orb,
        ProviderKind::CdfOrb,
        ProviderKind::TwoLine,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProviderKind::SGrand => "sgrand",
            ProviderKind::Orb => "orb",
            ProviderKind::CdfOrb => "cdforb",
            ProviderKind::TwoLine => "twoline",
        }
    }

    /// Whether the provider needs an empirical reliability model.
    pub fn needs_cdf(self) -> bool {
        matches!(self, ProviderKind::CdfOrb | ProviderKind::TwoLine)
    }
}

impl fmt::Display for ProviderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProviderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "sgrand" => Ok(ProviderKind::SGrand),
            "orb" | "orbgrand" => Ok(ProviderKind::Orb),
            "cdforb" | "cdf" | "cdforbgrand" => Ok(ProviderKind::CdfOrb),
            "twoline" | "2line" => Ok(ProviderKind::TwoLine),
            _ => Err(Error::Parse(format!("unknown provider {s:?}"))),
        }
    }
}

/// The metric `gamma` assigning each dictionary burst a nonnegative cost.
#[derive(Clone, Debug)]
pub enum GammaProvider {
    SGrand,
    Orb,
    CdfOrb(Arc<CdfModel>),
    TwoLine(TwoLineFit),
}

impl GammaProvider {
    pub fn kind(&self) -> ProviderKind {
        match self {
            GammaProvider::SGrand => ProviderKind::SGrand,
            GammaProvider::Orb => ProviderKind::Orb,
            GammaProvider::CdfOrb(_) => ProviderKind::CdfOrb,
            GammaProvider::TwoLine(_) => ProviderKind::TwoLine,
        }
    }

    /// Cost of rank `r = 1..=m` for the rank-based providers, ascending.
    /// `None` for [`GammaProvider::SGrand`], whose costs are the
    /// reliabilities themselves.
    pub fn rank_costs(&self, m: usize) -> Option<Vec<f64>> {
        let denom = (m + 1) as f64;
        match self {
            GammaProvider::SGrand => None,
            GammaProvider::Orb => Some((1..=m).map(|r| r as f64).collect()),
            GammaProvider::CdfOrb(cdf) => Some(
                (1..=m)
                    .map(|r| cdf.quantile(r as f64 / denom).max(0.0))
                    .collect(),
            ),
            GammaProvider::TwoLine(fit) => {
                let mut run = 0.0f64;
                Some(
                    (1..=m)
                        .map(|r| {
                            run = run.max(fit.eval(r as f64 / denom));
                            run
                        })
                        .collect(),
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        for k in ProviderKind::ALL {
            assert_eq!(k.as_str().parse::<ProviderKind>().unwrap(), k);
        }
        assert_eq!("2line".parse::<ProviderKind>().unwrap(), ProviderKind::TwoLine);
        assert!("bogus".parse::<ProviderKind>().is_err());
    }

    #[test]
    fn orb_costs_are_ranks() {
        assert_eq!(GammaProvider::Orb.rank_costs(3).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(GammaProvider::SGrand.rank_costs(3).is_none());
    }

    #[test]
    fn two_line_costs_are_clamped_and_monotone() {
        let fit = TwoLineFit {
            intercept: -1.0,
            slope1: 4.0,
            slope2: -2.0,
            breakpoint: 0.5,
            residual: 0.0,
        };
        let c = GammaProvider::TwoLine(fit).rank_costs(9).unwrap();
        assert!(c.iter().all(|&v| v >= 0.0));
        assert!(c.windows(2).all(|w| w[0] <= w[1]));
    }
}
