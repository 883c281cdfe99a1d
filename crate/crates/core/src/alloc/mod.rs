//! Channel allocation algorithms.
//!
//! Every allocator maps a scenario (plus a valuation context and an rng
//! stream) to an [`Assignment`]. [`Algorithm`] names the eleven methods and
//! [`allocate`] dispatches to them with the default parameters.

pub mod auction;
pub mod baseline;
pub mod matching;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::valuation::{Context, TIE_TOLERANCE};

pub use auction::AuctionConfig;
pub use baseline::BaselineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    R,
    SR1,
    SR2,
    WS,
    ORR,
    GS,
    MRM,
    MRGS,
    TTC,
    CA,
    FECA,
}

impl Algorithm {
    pub const ALL: [Algorithm; 11] = [
        Algorithm::R,
        Algorithm::SR1,
        Algorithm::SR2,
        Algorithm::WS,
        Algorithm::ORR,
        Algorithm::GS,
        Algorithm::MRM,
        Algorithm::MRGS,
        Algorithm::TTC,
        Algorithm::CA,
        Algorithm::FECA,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::R => "R",
            Algorithm::SR1 => "SR1",
            Algorithm::SR2 => "SR2",
            Algorithm::WS => "WS",
            Algorithm::ORR => "ORR",
            Algorithm::GS => "GS",
            Algorithm::MRM => "MRM",
            Algorithm::MRGS => "MRGS",
            Algorithm::TTC => "TTC",
            Algorithm::CA => "CA",
            Algorithm::FECA => "FECA",
        }
    }

    /// Randomized methods whose per-scenario result is averaged over repetitions.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Algorithm::R | Algorithm::SR1 | Algorithm::SR2)
    }

    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let up = s.trim().to_ascii_uppercase();
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == up)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm '{s}'")))
    }
}

/// Parameters of every allocator; defaults follow the reference setup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AllocParams {
    pub baseline: BaselineConfig,
    /// Tenant quota of the one-shot Gale-Shapley matching (GS and MRM's second phase).
    pub gs_tenant_quota: usize,
    pub auction: AuctionConfig,
}

impl Default for AllocParams {
    fn default() -> Self {
        AllocParams {
            baseline: BaselineConfig::default(),
            gs_tenant_quota: 4,
            auction: AuctionConfig::default(),
        }
    }
}

pub fn allocate<R: Rng + ?Sized>(
    algorithm: Algorithm,
    scenario: &Scenario,
    ctx: Context,
    params: &AllocParams,
    rng: &mut R,
) -> Result<Assignment> {
    match algorithm {
        Algorithm::R => baseline::allocate_random(scenario, &params.baseline, rng),
        Algorithm::SR1 => baseline::allocate_sr1(scenario, &params.baseline, rng),
        Algorithm::SR2 => baseline::allocate_sr2(scenario, &params.baseline, rng),
        Algorithm::WS => baseline::allocate_ws(scenario, ctx, rng),
        Algorithm::ORR => baseline::allocate_orr(scenario, ctx, rng),
        Algorithm::GS => matching::allocate_gs(scenario, ctx, params.gs_tenant_quota, rng),
        Algorithm::MRM => {
            let mins = matching::default_min_values(scenario, ctx);
            matching::allocate_mrm(scenario, ctx, &mins, params.gs_tenant_quota, rng)
        }
        Algorithm::MRGS => matching::allocate_mrgs(scenario, ctx, rng),
        Algorithm::TTC => matching::allocate_ttc(scenario, ctx, rng),
        Algorithm::CA => auction::allocate_ca(scenario, ctx, &params.auction, rng),
        Algorithm::FECA => auction::allocate_feca(scenario, ctx, &params.auction, rng),
    }
}

/// Uniform pick among the indices whose score is within tolerance of the
/// minimum (or maximum when `highest`).
pub(crate) fn pick_extreme<R: Rng + ?Sized>(
    candidates: &[(usize, f64)],
    highest: bool,
    rng: &mut R,
) -> Option<usize> {
    let target =
        candidates
            .iter()
            .map(|c| c.1)
            .reduce(|a, b| if highest { a.max(b) } else { a.min(b) })?;
    let ties: Vec<usize> = candidates
        .iter()
        .filter(|c| (c.1 - target).abs() <= TIE_TOLERANCE)
        .map(|c| c.0)
        .collect();
    if ties.len() == 1 {
        Some(ties[0])
    } else {
        Some(ties[rng.random_range(0..ties.len())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.label().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("feca".parse::<Algorithm>().unwrap(), Algorithm::FECA);
        assert!("XYZ".parse::<Algorithm>().is_err());
    }
}
