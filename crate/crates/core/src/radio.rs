//! Radio connectivity model.
//!
//! Log-distance path loss, local mean SIR against a constant worst-case
//! interference power, the Rician/Rayleigh single-channel outage probability
//! and its selection-combining product over independent channels. The
//! connectivity function [`rho`] is the ε-outage capacity of a channel set,
//! obtained by inverting the joint outage probability in the SIR threshold.
//!
//! All ratios entering the outage formula are linear; dB quantities are
//! converted at the boundary. Capacities are reported in Mbps.

use serde::{Deserialize, Serialize};

use crate::channel_set::ChannelSet;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Iteration cap of the threshold bisection.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Doubling steps allowed while searching for the upper bracket.
const MAX_BRACKET_DOUBLINGS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioParams {
    pub bandwidth_hz: f64,
    pub ref_distance_m: f64,
    pub ref_path_loss_db: f64,
    pub path_loss_exponent: f64,
    pub interference_power_dbm: f64,
    /// Outage probability threshold ε.
    pub epsilon: f64,
    pub rician_ref_db: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            bandwidth_hz: 20e6,
            ref_distance_m: 15.0,
            ref_path_loss_db: 70.28,
            path_loss_exponent: 2.0,
            interference_power_dbm: -50.0,
            epsilon: 1e-9,
            rician_ref_db: 14.1,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config("bandwidth_hz must be positive".into()));
        }
        if !(self.ref_distance_m > 0.0) {
            return Err(Error::Config("ref_distance_m must be positive".into()));
        }
        if !(self.path_loss_exponent > 0.0) {
            return Err(Error::Config("path_loss_exponent must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Config("epsilon must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Reference Rician factor as a linear ratio.
    pub fn rician_ref_linear(&self) -> f64 {
        db_to_linear(self.rician_ref_db)
    }
}

/// Link quality of one tenant toward one base station, linear scale.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkState {
    pub mean_sir_linear: f64,
    pub rician_linear: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn path_loss_db(d_m: f64, params: &RadioParams) -> Result<f64> {
    if !(d_m > 0.0) {
        return Err(Error::Domain(format!(
            "distance must be positive, got {d_m}"
        )));
    }
    Ok(params.ref_path_loss_db
        + 10.0 * params.path_loss_exponent * (d_m / params.ref_distance_m).log10())
}

/// Local mean SIR in linear scale for a transmitter at `tx_power_dbm`.
pub fn mean_sir_linear(tx_power_dbm: f64, d_m: f64, params: &RadioParams) -> Result<f64> {
    let pl = path_loss_db(d_m, params)?;
    Ok(db_to_linear(
        tx_power_dbm - pl - params.interference_power_dbm,
    ))
}

/// Outage probability of a single Rician/Rayleigh channel at SIR threshold `gamma_th`.
pub fn outage_prob_single(gamma_th: f64, link: &LinkState) -> f64 {
    let g = link.mean_sir_linear;
    if g <= 0.0 {
        return 1.0;
    }
    let denom = gamma_th + g;
    (gamma_th / denom) * (-link.rician_linear * g / denom).exp()
}

/// Joint outage probability of independent channels under selection combining.
pub fn outage_prob_multi(gamma_th: f64, links: &[LinkState]) -> f64 {
    links
        .iter()
        .map(|l| outage_prob_single(gamma_th, l))
        .product()
}

/// ε-outage capacity in Mbps of a list of independent channels.
pub fn outage_capacity(links: &[LinkState], params: &RadioParams) -> Result<f64> {
    let weighted: Vec<(LinkState, u32)> = links.iter().map(|l| (*l, 1)).collect();
    outage_capacity_weighted(&weighted, params)
}

/// Natural log of the joint outage probability, channels given as
/// `(link, multiplicity)`; zero-SIR links contribute a factor of one.
fn ln_outage(gamma_th: f64, links: &[(LinkState, u32)]) -> f64 {
    let mut acc = 0.0;
    for (link, n) in links {
        let g = link.mean_sir_linear;
        if g <= 0.0 || *n == 0 {
            continue;
        }
        let denom = gamma_th + g;
        let term = (gamma_th / denom).ln() - link.rician_linear * g / denom;
        acc += f64::from(*n) * term;
    }
    acc
}

/// Largest SIR threshold whose joint outage stays at or below ε.
///
/// Bisection on a dyadic grid anchored at the bracketing power of two, run to
/// adjacent floating-point values. The grid does not depend on the link set,
/// which keeps the result monotone under set inclusion.
pub fn threshold_at_epsilon(links: &[(LinkState, u32)], epsilon: f64) -> Result<Option<f64>> {
    if !links.iter().any(|(l, n)| l.mean_sir_linear > 0.0 && *n > 0) {
        return Ok(None);
    }
    let ln_eps = epsilon.ln();
    let below = |g: f64| ln_outage(g, links) <= ln_eps;

    let mut hi = 1.0f64;
    let mut lo = 0.0f64;
    let mut doublings = 0;
    while below(hi) {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::NoConvergence {
                iterations: doublings,
            });
        }
    }

    for _ in 0..MAX_BISECTION_ITERS {
        let mid = if lo == 0.0 {
            hi * 0.5
        } else {
            lo + (hi - lo) * 0.5
        };
        if mid <= lo || mid >= hi {
            return Ok(Some(lo));
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Bracket still wider than one ulp; accept when it is relatively tight.
    if lo > 0.0 && (hi - lo) <= 1e-12 * hi {
        Ok(Some(lo))
    } else {
        Err(Error::NoConvergence {
            iterations: MAX_BISECTION_ITERS,
        })
    }
}

/// ε-outage capacity in Mbps of channels given as `(link, multiplicity)`.
pub fn outage_capacity_weighted(links: &[(LinkState, u32)], params: &RadioParams) -> Result<f64> {
    match threshold_at_epsilon(links, params.epsilon)? {
        None => Ok(0.0),
        Some(gamma) => Ok(params.bandwidth_hz * (1.0 + gamma).log2() / 1e6),
    }
}

/// Connectivity function: ε-outage capacity (Mbps) of tenant `tenant`
/// holding `channels`. Independent of every other tenant's holdings.
pub fn rho(tenant: usize, channels: ChannelSet, scenario: &Scenario) -> Result<f64> {
    if tenant >= scenario.tenants.len() {
        return Err(Error::Lookup {
            kind: "tenant",
            id: tenant,
        });
    }
    if channels.is_empty() {
        return Ok(0.0);
    }
    let n_bs = scenario.base_stations.len();
    let mut counts = vec![0u32; n_bs];
    for ch in channels.iter() {
        let channel = scenario.channels.get(ch).ok_or(Error::Lookup {
            kind: "channel",
            id: ch,
        })?;
        counts[channel.bs_id] += 1;
    }
    let links = scenario.link_states();
    let weighted: Vec<(LinkState, u32)> = (0..n_bs)
        .filter(|&bs| counts[bs] > 0)
        .map(|bs| (links[tenant][bs], counts[bs]))
        .collect();
    outage_capacity_weighted(&weighted, &scenario.params)
}
