//! Randomized (R, SR1, SR2) and selection-based (WS, ORR) allocators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pick_extreme;
use crate::assignment::Assignment;
use crate::error::Result;
use crate::scenario::Scenario;
use crate::valuation::{bundle_value, tenant_preferences, Context};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Per-tenant channel cap of the randomized methods.
    pub max_channels_per_tenant: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            max_channels_per_tenant: 4,
        }
    }
}

/// Draw an index with probability proportional to `weights`; `None` when
/// all weights are zero.
pub(crate) fn weighted_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return None;
    }
    let mut target = rng.random::<f64>() * total;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        last_positive = Some(i);
        if target < w {
            return Some(i);
        }
        target -= w;
    }
    last_positive
}

/// Channels in index order; each goes to a non-full tenant drawn with
/// probability proportional to `weight(tenant, channel)`, uniform when every
/// weight is zero. A channel stays free only if every tenant is full.
fn allocate_weighted<R, W>(
    scenario: &Scenario,
    cfg: &BaselineConfig,
    rng: &mut R,
    mut weight: W,
) -> Result<Assignment>
where
    R: Rng + ?Sized,
    W: FnMut(usize, usize) -> Result<f64>,
{
    let n_t = scenario.n_tenants();
    let mut a = Assignment::empty(n_t, scenario.n_channels());
    let mut counts = vec![0usize; n_t];
    for ch in 0..scenario.n_channels() {
        let open: Vec<usize> = (0..n_t)
            .filter(|&k| counts[k] < cfg.max_channels_per_tenant)
            .collect();
        if open.is_empty() {
            continue;
        }
        let weights = open
            .iter()
            .map(|&k| weight(k, ch))
            .collect::<Result<Vec<_>>>()?;
        let pick = match weighted_index(&weights, rng) {
            Some(i) => open[i],
            None => open[rng.random_range(0..open.len())],
        };
        a.assign(pick, ch);
        counts[pick] += 1;
    }
    Ok(a)
}

pub fn allocate_random<R: Rng + ?Sized>(
    scenario: &Scenario,
    cfg: &BaselineConfig,
    rng: &mut R,
) -> Result<Assignment> {
    allocate_weighted(scenario, cfg, rng, |_, _| Ok(1.0))
}

/// Selection probability proportional to 1/d to the channel's base station.
pub fn allocate_sr1<R: Rng + ?Sized>(
    scenario: &Scenario,
    cfg: &BaselineConfig,
    rng: &mut R,
) -> Result<Assignment> {
    allocate_weighted(scenario, cfg, rng, |k, ch| {
        Ok(1.0 / scenario.distance(k, scenario.channels[ch].bs_id))
    })
}

/// Selection probability proportional to the single-connectivity capacity.
pub fn allocate_sr2<R: Rng + ?Sized>(
    scenario: &Scenario,
    cfg: &BaselineConfig,
    rng: &mut R,
) -> Result<Assignment> {
    let caps = scenario.single_link_capacity_matrix()?;
    allocate_weighted(scenario, cfg, rng, |k, ch| Ok(caps[k][ch]))
}

/// Weakest selects: the tenant with the lowest current value (largest
/// utility deficit) takes its best remaining channel, until none remain.
pub fn allocate_ws<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    rng: &mut R,
) -> Result<Assignment> {
    let n_t = scenario.n_tenants();
    let mut a = Assignment::empty(n_t, scenario.n_channels());
    let mut available = scenario.all_channels();
    while !available.is_empty() {
        let values = (0..n_t)
            .map(|k| Ok((k, bundle_value(k, a.channels_of(k), scenario, ctx)?)))
            .collect::<Result<Vec<_>>>()?;
        let chooser = pick_extreme(&values, false, rng).expect("at least one tenant");
        let prefs = tenant_preferences(
            chooser,
            available,
            a.channels_of(chooser),
            scenario,
            ctx,
            rng,
        )?;
        let ch = prefs.first().expect("channels available");
        a.assign(chooser, ch);
        available.remove(ch);
    }
    Ok(a)
}

/// Opportunistic round robin: rounds of a fresh random tenant order, each
/// tenant taking its best remaining channel.
pub fn allocate_orr<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    rng: &mut R,
) -> Result<Assignment> {
    use rand::seq::SliceRandom;

    let n_t = scenario.n_tenants();
    let mut a = Assignment::empty(n_t, scenario.n_channels());
    let mut available = scenario.all_channels();
    let mut order: Vec<usize> = (0..n_t).collect();
    while !available.is_empty() {
        order.shuffle(rng);
        for &k in &order {
            if available.is_empty() {
                break;
            }
            let prefs = tenant_preferences(k, available, a.channels_of(k), scenario, ctx, rng)?;
            let ch = prefs.first().expect("channels available");
            a.assign(k, ch);
            available.remove(ch);
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_set::ChannelSet;
    use crate::rng;
    use crate::scenario::{generate, GeneratorConfig, OutageCase};

    fn scenario(seed: u64) -> Scenario {
        generate(&GeneratorConfig::default().with_case(OutageCase::II), seed).unwrap()
    }

    #[test]
    fn randomized_methods_fill_all_channels_under_cap() {
        let cfg = BaselineConfig::default();
        for seed in 0..30 {
            let s = scenario(seed);
            let mut r = rng::from_seed(seed);
            for a in [
                allocate_random(&s, &cfg, &mut r).unwrap(),
                allocate_sr1(&s, &cfg, &mut r).unwrap(),
                allocate_sr2(&s, &cfg, &mut r).unwrap(),
            ] {
                a.validate().unwrap();
                // 6 tenants x 4 >= 20 channels
                assert!(a.unassigned().is_empty());
                assert!(a.row_sums().iter().all(|&n| n <= 4));
            }
        }
    }

    #[test]
    fn zero_cap_gives_empty_assignment() {
        let s = scenario(1);
        let cfg = BaselineConfig {
            max_channels_per_tenant: 0,
        };
        let a = allocate_random(&s, &cfg, &mut rng::from_seed(0)).unwrap();
        assert_eq!(a.assigned(), ChannelSet::EMPTY);
    }

    #[test]
    fn weighted_index_frequencies() {
        // two tenants at 20 m and 40 m: weights 1/20 and 1/40 -> 2/3 vs 1/3
        let mut r = rng::from_seed(5);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| weighted_index(&[1.0 / 20.0, 1.0 / 40.0], &mut r) == Some(0))
            .count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 2.0 / 3.0).abs() < 0.01, "{freq}");
        assert_eq!(weighted_index(&[0.0, 0.0], &mut r), None);
        for _ in 0..100 {
            assert_eq!(weighted_index(&[0.0, 3.0, 0.0], &mut r), Some(1));
        }
    }

    #[test]
    fn ws_and_orr_assign_everything() {
        for seed in 0..10 {
            let s = scenario(seed);
            for ctx in Context::ALL {
                let a = allocate_ws(&s, ctx, &mut rng::from_seed(seed)).unwrap();
                a.validate().unwrap();
                assert!(a.unassigned().is_empty());
                let b = allocate_orr(&s, ctx, &mut rng::from_seed(seed)).unwrap();
                b.validate().unwrap();
                assert!(b.unassigned().is_empty());
            }
        }
    }

    #[test]
    fn ws_single_tenant_takes_all() {
        let cfg = GeneratorConfig {
            n_tenants: 1,
            ..GeneratorConfig::default()
        };
        let s = generate(&cfg, 3).unwrap();
        let a = allocate_ws(&s, Context::Capacity, &mut rng::from_seed(0)).unwrap();
        assert_eq!(a.channels_of(0), s.all_channels());
    }

    #[test]
    fn orr_first_round_with_few_channels() {
        // 8 BSs with one channel each and 10 tenants: round one exhausts the pool
        let cfg = GeneratorConfig {
            n_tenants: 10,
            channels_per_bs_choices: vec![1],
            ..GeneratorConfig::default()
        };
        let s = generate(&cfg, 4).unwrap();
        let a = allocate_orr(&s, Context::Capacity, &mut rng::from_seed(1)).unwrap();
        let rows = a.row_sums();
        assert_eq!(rows.iter().filter(|&&n| n == 1).count(), 8);
        assert!(rows.iter().all(|&n| n <= 1));
    }

    #[test]
    fn deterministic_under_fixed_stream() {
        let s = scenario(12);
        for ctx in Context::ALL {
            let a = allocate_ws(&s, ctx, &mut rng::from_seed(3)).unwrap();
            let b = allocate_ws(&s, ctx, &mut rng::from_seed(3)).unwrap();
            assert_eq!(a, b);
        }
    }
}
