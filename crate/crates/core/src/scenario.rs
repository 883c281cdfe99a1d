//! World model and randomized scenario generation.
//!
//! A scenario places base stations on the walls of a rectangular hall and
//! tenants inside it, draws transmit powers, per-BS channel counts and
//! tenant rate requirements, and finally suppresses the Rician factor of a
//! random subset of tenant-BS pairs to model obstructed links. The outage
//! mask is drawn last, so the three outage cases share their geometry for a
//! given seed.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel_set::{ChannelSet, MAX_CHANNELS};
use crate::error::{Error, Result};
use crate::radio::{self, LinkState, RadioParams};
use crate::rng;

/// Obstruction level: fraction of tenant-BS pairs whose Rician factor is 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OutageCase {
    I,
    II,
    III,
}

impl OutageCase {
    pub const ALL: [OutageCase; 3] = [OutageCase::I, OutageCase::II, OutageCase::III];

    pub fn fraction(self) -> f64 {
        match self {
            OutageCase::I => 0.0,
            OutageCase::II => 0.25,
            OutageCase::III => 0.5,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OutageCase::I => "I",
            OutageCase::II => "II",
            OutageCase::III => "III",
        }
    }

    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for OutageCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for OutageCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "1" => Ok(OutageCase::I),
            "II" | "2" => Ok(OutageCase::II),
            "III" | "3" => Ok(OutageCase::III),
            other => Err(Error::Parse(format!("unknown case '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseStation {
    pub id: usize,
    pub position: (f64, f64),
    pub tx_power_dbm: f64,
    pub num_channels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub id: usize,
    pub bs_id: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tenant {
    pub id: usize,
    pub position: (f64, f64),
    pub c_min_mbps: f64,
    pub c_max_mbps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub area: (f64, f64),
    pub n_bs: usize,
    pub n_tenants: usize,
    pub tx_power_interval_dbm: (f64, f64),
    pub channels_per_bs_choices: Vec<usize>,
    pub channel_cap: usize,
    pub c_min_interval: (f64, f64),
    pub c_max_interval: (f64, f64),
    pub case: OutageCase,
    pub params: RadioParams,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            area: (100.0, 50.0),
            n_bs: 8,
            n_tenants: 6,
            tx_power_interval_dbm: (15.0, 25.0),
            channels_per_bs_choices: vec![1, 2, 3],
            channel_cap: 20,
            c_min_interval: (0.1, 0.2),
            c_max_interval: (15.0, 25.0),
            case: OutageCase::I,
            params: RadioParams::default(),
        }
    }
}

impl GeneratorConfig {
    pub fn with_case(&self, case: OutageCase) -> Self {
        GeneratorConfig {
            case,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let (w, h) = self.area;
        if !(w > 0.0 && h > 0.0) {
            return Err(Error::Config("area sides must be positive".into()));
        }
        if self.n_bs == 0 || self.n_tenants == 0 {
            return Err(Error::Config(
                "need at least one base station and one tenant".into(),
            ));
        }
        for (name, (lo, hi)) in [
            ("tx_power_interval_dbm", self.tx_power_interval_dbm),
            ("c_min_interval", self.c_min_interval),
            ("c_max_interval", self.c_max_interval),
        ] {
            if !(lo <= hi) {
                return Err(Error::Config(format!("{name} is empty")));
            }
        }
        if !(self.c_min_interval.0 > 0.0 && self.c_min_interval.1 < self.c_max_interval.0) {
            return Err(Error::Config(
                "require 0 < c_min < c_max for every draw".into(),
            ));
        }
        let min_choice = self
            .channels_per_bs_choices
            .iter()
            .copied()
            .min()
            .unwrap_or(0);
        if min_choice == 0 {
            return Err(Error::Config(
                "channels_per_bs_choices must be nonempty and positive".into(),
            ));
        }
        if self.n_bs * min_choice > self.channel_cap {
            return Err(Error::Config(format!(
                "{} base stations need at least {} channels, cap is {}",
                self.n_bs,
                self.n_bs * min_choice,
                self.channel_cap
            )));
        }
        if self.channel_cap > MAX_CHANNELS {
            return Err(Error::Config(format!("channel_cap above {MAX_CHANNELS}")));
        }
        Ok(())
    }
}

#[derive(Debug, Default)]
struct Cache {
    links: OnceLock<Vec<Vec<LinkState>>>,
    single: OnceLock<Vec<Vec<f64>>>,
}

impl Clone for Cache {
    fn clone(&self) -> Self {
        Cache::default()
    }
}

/// Immutable input to every allocator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub seed: u64,
    #[serde(rename = "case")]
    pub case_label: OutageCase,
    pub params: RadioParams,
    pub base_stations: Vec<BaseStation>,
    pub channels: Vec<Channel>,
    pub tenants: Vec<Tenant>,
    /// Tenant × BS matrix of linear Rician factors (reference value or 0).
    pub rician_mask: Vec<Vec<f64>>,
    #[serde(skip)]
    cache: Cache,
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// Position on the rectangle boundary at arc length `s` measured
/// counter-clockwise from the origin corner.
fn perimeter_point(s: f64, (w, h): (f64, f64)) -> (f64, f64) {
    if s < w {
        (s, 0.0)
    } else if s < w + h {
        (w, s - w)
    } else if s < 2.0 * w + h {
        (w - (s - w - h), h)
    } else {
        (0.0, h - (s - 2.0 * w - h))
    }
}

/// Build a scenario from `config`; a pure function of `(config, seed)`.
pub fn generate(config: &GeneratorConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = rng::from_seed(seed);
    let (w, h) = config.area;
    let perimeter = 2.0 * (w + h);

    let mut base_stations = Vec::with_capacity(config.n_bs);
    for id in 0..config.n_bs {
        let position = perimeter_point(rng.random_range(0.0..perimeter), config.area);
        let tx_power_dbm = uniform(&mut rng, config.tx_power_interval_dbm);
        base_stations.push(BaseStation {
            id,
            position,
            tx_power_dbm,
            num_channels: 0,
        });
    }

    // Sequential clamping; each later BS keeps room for its minimum count.
    let min_choice = *config
        .channels_per_bs_choices
        .iter()
        .min()
        .expect("validated");
    let mut used = 0;
    for i in 0..config.n_bs {
        let draw = config.channels_per_bs_choices
            [rng.random_range(0..config.channels_per_bs_choices.len())];
        let reserve = (config.n_bs - i - 1) * min_choice;
        let count = draw.min(config.channel_cap - used - reserve);
        base_stations[i].num_channels = count;
        used += count;
    }
    let mut channels = Vec::with_capacity(used);
    for bs in &base_stations {
        for _ in 0..bs.num_channels {
            channels.push(Channel {
                id: channels.len(),
                bs_id: bs.id,
            });
        }
    }

    let mut tenants = Vec::with_capacity(config.n_tenants);
    for id in 0..config.n_tenants {
        let mut x = 0.0;
        while x <= 0.0 {
            x = rng.random_range(0.0..w);
        }
        let mut y = 0.0;
        while y <= 0.0 {
            y = rng.random_range(0.0..h);
        }
        let c_min_mbps = uniform(&mut rng, config.c_min_interval);
        let c_max_mbps = uniform(&mut rng, config.c_max_interval);
        tenants.push(Tenant {
            id,
            position: (x, y),
            c_min_mbps,
            c_max_mbps,
        });
    }

    let k_ref = config.params.rician_ref_linear();
    let pairs = config.n_tenants * config.n_bs;
    let suppressed = (config.case.fraction() * pairs as f64).round() as usize;
    let mut rician_mask = vec![vec![k_ref; config.n_bs]; config.n_tenants];
    for idx in index::sample(&mut rng, pairs, suppressed) {
        rician_mask[idx / config.n_bs][idx % config.n_bs] = 0.0;
    }

    let scenario = Scenario {
        seed,
        case_label: config.case,
        params: config.params,
        base_stations,
        channels,
        tenants,
        rician_mask,
        cache: Cache::default(),
    };
    scenario.validate()?;
    Ok(scenario)
}

fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

impl Scenario {
    pub fn n_tenants(&self) -> usize {
        self.tenants.len()
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn n_bs(&self) -> usize {
        self.base_stations.len()
    }

    pub fn all_channels(&self) -> ChannelSet {
        ChannelSet::full(self.channels.len())
    }

    /// Structural checks for scenarios built by hand or loaded from JSON.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.channels.len() > MAX_CHANNELS {
            return Err(Error::Config(format!("more than {MAX_CHANNELS} channels")));
        }
        for (i, ch) in self.channels.iter().enumerate() {
            if ch.id != i {
                return Err(Error::Config(format!(
                    "channel ids must be 0..n, found {} at {i}",
                    ch.id
                )));
            }
            if ch.bs_id >= self.base_stations.len() {
                return Err(Error::Lookup {
                    kind: "base station",
                    id: ch.bs_id,
                });
            }
            if i > 0 && ch.bs_id < self.channels[i - 1].bs_id {
                return Err(Error::Config(
                    "channels must be grouped by base station".into(),
                ));
            }
        }
        for (i, bs) in self.base_stations.iter().enumerate() {
            let n = self.channels.iter().filter(|c| c.bs_id == i).count();
            if bs.id != i || bs.num_channels != n {
                return Err(Error::Config(format!(
                    "base station {i} is inconsistent with its channels"
                )));
            }
        }
        if self.rician_mask.len() != self.tenants.len()
            || self
                .rician_mask
                .iter()
                .any(|row| row.len() != self.base_stations.len())
        {
            return Err(Error::Config(
                "rician_mask must be tenants × base stations".into(),
            ));
        }
        for (i, t) in self.tenants.iter().enumerate() {
            if t.id != i || !(0.0 < t.c_min_mbps && t.c_min_mbps < t.c_max_mbps) {
                return Err(Error::Config(format!("tenant {i} needs 0 < c_min < c_max")));
            }
            for bs in &self.base_stations {
                if !(distance(t.position, bs.position) > 0.0) {
                    return Err(Error::Domain(format!(
                        "tenant {i} coincides with base station {}",
                        bs.id
                    )));
                }
            }
        }
        if self.rician_mask.iter().flatten().any(|k| !(*k >= 0.0)) {
            return Err(Error::Config("rician factors must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn distance(&self, tenant: usize, bs: usize) -> f64 {
        distance(
            self.tenants[tenant].position,
            self.base_stations[bs].position,
        )
    }

    /// Tenant × BS link states (cached).
    pub fn link_states(&self) -> &[Vec<LinkState>] {
        self.cache.links.get_or_init(|| {
            self.tenants
                .iter()
                .enumerate()
                .map(|(k, _)| {
                    self.base_stations
                        .iter()
                        .enumerate()
                        .map(|(i, bs)| LinkState {
                            // validate() rules out coincident positions
                            mean_sir_linear: radio::mean_sir_linear(
                                bs.tx_power_dbm,
                                self.distance(k, i),
                                &self.params,
                            )
                            .unwrap_or(0.0),
                            rician_linear: self.rician_mask[k][i],
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// Tenant × channel matrix of single-connectivity capacities (cached).
    pub fn single_link_capacity_matrix(&self) -> Result<&[Vec<f64>]> {
        if let Some(m) = self.cache.single.get() {
            return Ok(m);
        }
        let mut m = vec![vec![0.0; self.n_channels()]; self.n_tenants()];
        for (k, row) in m.iter_mut().enumerate() {
            for (ch, v) in row.iter_mut().enumerate() {
                *v = radio::rho(k, ChannelSet::single(ch), self)?;
            }
        }
        let _ = self.cache.single.set(m);
        Ok(self.cache.single.get().expect("just set"))
    }

    pub fn single_capacity(&self, tenant: usize, channel: usize) -> Result<f64> {
        Ok(self.single_link_capacity_matrix()?[tenant][channel])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Scenario> {
        let scenario: Scenario = serde_json::from_str(s)?;
        scenario.validate()?;
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn on_boundary(p: (f64, f64), (w, h): (f64, f64)) -> bool {
        let eps = 1e-9;
        (p.0.abs() < eps || (p.0 - w).abs() < eps || p.1.abs() < eps || (p.1 - h).abs() < eps)
            && (-eps..=w + eps).contains(&p.0)
            && (-eps..=h + eps).contains(&p.1)
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = GeneratorConfig::default();
        let a = generate(&cfg, 17).unwrap().to_json().unwrap();
        let b = generate(&cfg, 17).unwrap().to_json().unwrap();
        let c = generate(&cfg, 18).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn case_one_has_no_suppressed_pairs() {
        let s = generate(&GeneratorConfig::default(), 3).unwrap();
        assert!(s.rician_mask.iter().flatten().all(|&k| k > 25.0));
    }

    #[test]
    fn case_three_suppresses_half_the_pairs() {
        for seed in 0..20 {
            let cfg = GeneratorConfig::default().with_case(OutageCase::III);
            let s = generate(&cfg, seed).unwrap();
            let zeros = s
                .rician_mask
                .iter()
                .flatten()
                .filter(|&&k| k == 0.0)
                .count();
            assert_eq!(zeros, 24);
            let cfg = GeneratorConfig::default().with_case(OutageCase::II);
            let s = generate(&cfg, seed).unwrap();
            let zeros = s
                .rician_mask
                .iter()
                .flatten()
                .filter(|&&k| k == 0.0)
                .count();
            assert_eq!(zeros, 12);
        }
    }

    #[test]
    fn cases_share_geometry() {
        let cfg = GeneratorConfig::default();
        let a = generate(&cfg, 5).unwrap();
        let b = generate(&cfg.with_case(OutageCase::III), 5).unwrap();
        assert_eq!(a.base_stations, b.base_stations);
        assert_eq!(a.tenants, b.tenants);
        assert_eq!(a.channels, b.channels);
    }

    #[test]
    fn geometry_and_channel_invariants() {
        let cfg = GeneratorConfig::default();
        for seed in 0..200 {
            let s = generate(&cfg, seed).unwrap();
            assert!(s.n_channels() <= 20);
            for bs in &s.base_stations {
                assert!((1..=3).contains(&bs.num_channels));
                assert!(on_boundary(bs.position, cfg.area), "{:?}", bs.position);
                assert!((15.0..=25.0).contains(&bs.tx_power_dbm));
            }
            for t in &s.tenants {
                assert!(t.position.0 > 0.0 && t.position.0 < 100.0);
                assert!(t.position.1 > 0.0 && t.position.1 < 50.0);
                assert!((0.1..=0.2).contains(&t.c_min_mbps));
                assert!((15.0..=25.0).contains(&t.c_max_mbps));
            }
            for w in s.channels.windows(2) {
                assert!(w[0].bs_id <= w[1].bs_id);
            }
        }
    }

    #[test]
    fn impossible_channel_cap_is_rejected() {
        let cfg = GeneratorConfig {
            n_bs: 21,
            ..GeneratorConfig::default()
        };
        assert!(matches!(generate(&cfg, 0), Err(Error::Config(_))));
    }

    #[test]
    fn single_link_matrix_shape_and_purity() {
        let s = generate(&GeneratorConfig::default().with_case(OutageCase::II), 9).unwrap();
        let m = s.single_link_capacity_matrix().unwrap().to_vec();
        assert_eq!(m.len(), s.n_tenants());
        assert!(m.iter().all(|r| r.len() == s.n_channels()));
        for k in 0..s.n_tenants() {
            for ch in 0..s.n_channels() {
                let direct = radio::rho(k, ChannelSet::single(ch), &s).unwrap();
                assert_eq!(direct.to_bits(), m[k][ch].to_bits());
            }
        }
    }

    #[test]
    fn json_has_documented_keys() {
        let s = generate(&GeneratorConfig::default(), 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "base_stations",
                "case",
                "channels",
                "params",
                "rician_mask",
                "seed",
                "tenants"
            ]
        );
        let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back.to_json().unwrap(), s.to_json().unwrap());
    }
}
