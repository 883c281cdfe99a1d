//! Deferred acceptance (GS, MRM, MRGS), top trading cycles, and the
//! many-to-many matching used to preallocate channels for the auction.
//!
//! The matching kernels take strict preference lists, so all randomness is
//! spent while ranking. A tenant accepts only channels on its list.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pick_extreme;
use crate::assignment::Assignment;
use crate::channel_set::ChannelSet;
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::valuation::{
    bundle_value, channel_preferences, tenant_preferences, Context, PreferenceList, TIE_TOLERANCE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotas {
    pub tenant_quota: usize,
    /// Only used by the many-to-many matching.
    pub channel_quota: usize,
}

impl Quotas {
    pub fn validate(&self) -> Result<()> {
        if self.tenant_quota == 0 || self.channel_quota == 0 {
            return Err(Error::Config("quotas must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-tenant candidate sets; a channel may appear in several.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preallocation {
    pub sets: Vec<ChannelSet>,
}

impl Preallocation {
    pub fn covered(&self) -> ChannelSet {
        self.sets
            .iter()
            .fold(ChannelSet::EMPTY, |acc, s| acc.union(*s))
    }

    pub fn multiplicity(&self, channel: usize) -> usize {
        self.sets.iter().filter(|s| s.contains(channel)).count()
    }
}

/// Remove and return the worst-ranked held item.
fn drop_worst(held: &mut Vec<usize>, ranks: &[usize]) -> usize {
    let (pos, _) = held
        .iter()
        .enumerate()
        .max_by_key(|(_, &x)| ranks[x])
        .expect("nonempty hold set");
    held.swap_remove(pos)
}

/// Channel-proposing deferred acceptance with tenant quotas.
///
/// `channel_prefs[m]` ranks tenants for channel `m`; `tenant_prefs[k]` ranks
/// the channels tenant `k` finds acceptable. Channels with an empty list do
/// not take part.
pub fn gale_shapley_many_to_one(
    channel_prefs: &[PreferenceList],
    tenant_prefs: &[PreferenceList],
    tenant_quota: usize,
) -> Assignment {
    let n_ch = channel_prefs.len();
    let n_t = tenant_prefs.len();
    let ranks: Vec<Vec<usize>> = tenant_prefs.iter().map(|p| p.rank_table(n_ch)).collect();
    let mut next = vec![0usize; n_ch];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); n_t];
    let mut free: Vec<usize> = (0..n_ch).rev().collect();
    let mut proposals = 0usize;

    while let Some(m) = free.pop() {
        let list = &channel_prefs[m].items;
        while next[m] < list.len() {
            let k = list[next[m]];
            next[m] += 1;
            proposals += 1;
            if ranks[k][m] == usize::MAX || tenant_quota == 0 {
                continue;
            }
            held[k].push(m);
            if held[k].len() > tenant_quota {
                let rejected = drop_worst(&mut held[k], &ranks[k]);
                if rejected != m {
                    free.push(rejected);
                    break;
                }
                continue;
            }
            break;
        }
    }
    assert!(
        proposals <= n_ch * n_t,
        "deferred acceptance exceeded its proposal bound"
    );

    let mut a = Assignment::empty(n_t, n_ch);
    for (k, hs) in held.iter().enumerate() {
        for &m in hs {
            a.assign(k, m);
        }
    }
    a
}

/// Blocking pairs of a many-to-one matching: `(channel, tenant)` pairs that
/// would both rather be matched to each other.
pub fn blocking_pairs(
    assignment: &Assignment,
    channel_prefs: &[PreferenceList],
    tenant_prefs: &[PreferenceList],
    tenant_quota: usize,
) -> Vec<(usize, usize)> {
    let n_ch = channel_prefs.len();
    let t_ranks: Vec<Vec<usize>> = tenant_prefs.iter().map(|p| p.rank_table(n_ch)).collect();
    let c_ranks: Vec<Vec<usize>> = channel_prefs
        .iter()
        .map(|p| p.rank_table(tenant_prefs.len()))
        .collect();
    let mut out = Vec::new();
    for m in 0..n_ch {
        let owner = assignment.owner(m);
        for &k in &channel_prefs[m].items {
            if owner == Some(k) || t_ranks[k][m] == usize::MAX {
                continue;
            }
            let channel_wants = match owner {
                None => true,
                Some(o) => c_ranks[m][k] < c_ranks[m][o],
            };
            let held = assignment.channels_of(k);
            let tenant_wants =
                held.len() < tenant_quota || held.iter().any(|h| t_ranks[k][m] < t_ranks[k][h]);
            if channel_wants && tenant_wants {
                out.push((m, k));
            }
        }
    }
    out
}

/// Single-connectivity preferences as `(channel_prefs, tenant_prefs)`: every
/// channel in `channels` over all tenants, all tenants over `channels`.
/// Channels outside the set get empty lists. This is the input of GS.
pub fn single_preferences<R: Rng + ?Sized>(
    scenario: &Scenario,
    channels: ChannelSet,
    ctx: Context,
    rng: &mut R,
) -> Result<(Vec<PreferenceList>, Vec<PreferenceList>)> {
    let n_t = scenario.n_tenants();
    let tenants: Vec<usize> = (0..n_t).collect();
    let tenant_prefs = (0..n_t)
        .map(|k| tenant_preferences(k, channels, ChannelSet::EMPTY, scenario, ctx, rng))
        .collect::<Result<Vec<_>>>()?;
    let channel_prefs = (0..scenario.n_channels())
        .map(|m| {
            if channels.contains(m) {
                channel_preferences(m, &tenants, scenario, ctx, rng)
            } else {
                Ok(PreferenceList::default())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((channel_prefs, tenant_prefs))
}

pub fn allocate_gs<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    tenant_quota: usize,
    rng: &mut R,
) -> Result<Assignment> {
    let (cp, tp) = single_preferences(scenario, scenario.all_channels(), ctx, rng)?;
    Ok(gale_shapley_many_to_one(&cp, &tp, tenant_quota))
}

/// Minimum rate (capacity context) or utility 1/3 (utility context).
pub fn default_min_values(scenario: &Scenario, ctx: Context) -> Vec<f64> {
    scenario
        .tenants
        .iter()
        .map(|t| match ctx {
            Context::Capacity => t.c_min_mbps,
            Context::Utility => 1.0 / 3.0,
        })
        .collect()
}

/// Minimum-rate matching: tenants below their minimum pick channels first,
/// largest deficit first, then GS distributes the rest.
///
/// A tenant whose best remaining channel adds nothing leaves the first
/// phase, otherwise a hopeless tenant would absorb every channel.
pub fn allocate_mrm<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    min_values: &[f64],
    tenant_quota: usize,
    rng: &mut R,
) -> Result<Assignment> {
    let n_t = scenario.n_tenants();
    if min_values.len() != n_t {
        return Err(Error::Domain(format!(
            "{} minimum values for {n_t} tenants",
            min_values.len()
        )));
    }
    let mut a = Assignment::empty(n_t, scenario.n_channels());
    let mut available = scenario.all_channels();
    let mut stuck = vec![false; n_t];
    while !available.is_empty() {
        let mut deficits = Vec::new();
        for k in 0..n_t {
            if stuck[k] {
                continue;
            }
            let v = bundle_value(k, a.channels_of(k), scenario, ctx)?;
            if v < min_values[k] {
                deficits.push((k, min_values[k] - v));
            }
        }
        let Some(chooser) = pick_extreme(&deficits, true, rng) else {
            break;
        };
        let prefs = tenant_preferences(
            chooser,
            available,
            a.channels_of(chooser),
            scenario,
            ctx,
            rng,
        )?;
        if prefs.scores[0] <= TIE_TOLERANCE {
            stuck[chooser] = true;
            continue;
        }
        let ch = prefs.items[0];
        a.assign(chooser, ch);
        available.remove(ch);
    }
    if available.is_empty() {
        return Ok(a);
    }
    let (cp, tp) = single_preferences(scenario, available, ctx, rng)?;
    let second = gale_shapley_many_to_one(&cp, &tp, tenant_quota);
    for k in 0..n_t {
        for m in second.channels_of(k).iter() {
            a.assign(k, m);
        }
    }
    Ok(a)
}

/// Remaining channels grouped by base station, each group ascending.
fn pool_by_bs(scenario: &Scenario) -> Vec<Vec<usize>> {
    let mut pool = vec![Vec::new(); scenario.n_bs()];
    for ch in &scenario.channels {
        pool[ch.bs_id].push(ch.id);
    }
    for p in &mut pool {
        p.sort_unstable();
        p.reverse();
    }
    pool
}

/// Many-to-one GS in rounds: every base station offers one channel per
/// round, every tenant takes at most one, and tenants re-rank the offers by
/// marginal value over what they already hold.
pub fn allocate_mrgs<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    rng: &mut R,
) -> Result<Assignment> {
    let n_t = scenario.n_tenants();
    let n_ch = scenario.n_channels();
    let tenants: Vec<usize> = (0..n_t).collect();
    let mut a = Assignment::empty(n_t, n_ch);
    if n_t == 0 {
        return Ok(a);
    }
    // Pools hold channels in descending order, so `last` is the lowest index.
    let mut pool = pool_by_bs(scenario);
    let mut channel_prefs = vec![PreferenceList::default(); n_ch];
    loop {
        let offered: ChannelSet = pool.iter().filter_map(|p| p.last().copied()).collect();
        if offered.is_empty() {
            break;
        }
        let tenant_prefs = (0..n_t)
            .map(|k| tenant_preferences(k, offered, a.channels_of(k), scenario, ctx, rng))
            .collect::<Result<Vec<_>>>()?;
        for m in 0..n_ch {
            channel_prefs[m] = if offered.contains(m) {
                channel_preferences(m, &tenants, scenario, ctx, rng)?
            } else {
                PreferenceList::default()
            };
        }
        let round = gale_shapley_many_to_one(&channel_prefs, &tenant_prefs, 1);
        for k in 0..n_t {
            for m in round.channels_of(k).iter() {
                a.assign(k, m);
                let bs = scenario.channels[m].bs_id;
                pool[bs].pop();
            }
        }
    }
    Ok(a)
}

/// One round of top trading cycles.
///
/// Participant `i` owns channel `endowment[i]` and ranks the round's channels
/// by `prefs[i]` (which must list every endowed channel). Returns the channel
/// each participant ends up with.
pub fn ttc_round(endowment: &[usize], prefs: &[PreferenceList]) -> Vec<usize> {
    let n = endowment.len();
    assert_eq!(prefs.len(), n, "one preference list per participant");
    let mut result = vec![usize::MAX; n];
    let mut active = vec![true; n];
    let mut remaining = n;
    let owner_of = |ch: usize| endowment.iter().position(|&e| e == ch);
    let mut points = vec![0usize; n];
    while remaining > 0 {
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let top = prefs[i]
                .items
                .iter()
                .filter_map(|&ch| owner_of(ch))
                .find(|&o| active[o])
                .expect("own endowment is always listed");
            points[i] = top;
        }
        // Every node has out-degree one, so following pointers from any
        // active node reaches a cycle.
        let mut traded = false;
        let mut seen = vec![usize::MAX; n];
        for start in 0..n {
            if !active[start] || seen[start] != usize::MAX {
                continue;
            }
            let mut path = Vec::new();
            let mut cur = start;
            while active[cur] && seen[cur] == usize::MAX {
                seen[cur] = start;
                path.push(cur);
                cur = points[cur];
            }
            if active[cur] && seen[cur] == start {
                let from = path
                    .iter()
                    .position(|&x| x == cur)
                    .expect("cycle entry on path");
                for &i in &path[from..] {
                    result[i] = endowment[points[i]];
                }
                for &i in &path[from..] {
                    active[i] = false;
                    remaining -= 1;
                }
                traded = true;
            }
        }
        assert!(traded, "top trading cycles made no progress");
    }
    result
}

/// Rounds of TTC over up to `n_T` channels each, drawn one per base station
/// where possible, handed out at random and traded by marginal value.
pub fn allocate_ttc<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    rng: &mut R,
) -> Result<Assignment> {
    let n_t = scenario.n_tenants();
    let mut a = Assignment::empty(n_t, scenario.n_channels());
    if n_t == 0 {
        return Ok(a);
    }
    let mut pool = pool_by_bs(scenario);
    loop {
        let mut order: Vec<usize> = (0..pool.len()).filter(|&b| !pool[b].is_empty()).collect();
        if order.is_empty() {
            break;
        }
        order.shuffle(rng);
        let mut round = Vec::with_capacity(n_t);
        'fill: while round.len() < n_t {
            let mut took = false;
            for &b in &order {
                if round.len() == n_t {
                    break 'fill;
                }
                if let Some(ch) = pool[b].pop() {
                    round.push(ch);
                    took = true;
                }
            }
            if !took {
                break;
            }
        }
        let mut tenants: Vec<usize> = (0..n_t).collect();
        tenants.shuffle(rng);
        tenants.truncate(round.len());
        let set: ChannelSet = round.iter().copied().collect();
        let prefs = tenants
            .iter()
            .map(|&k| tenant_preferences(k, set, a.channels_of(k), scenario, ctx, rng))
            .collect::<Result<Vec<_>>>()?;
        let traded = ttc_round(&round, &prefs);
        for (i, &k) in tenants.iter().enumerate() {
            a.assign(k, traded[i]);
        }
    }
    Ok(a)
}

/// Many-to-many deferred acceptance: every channel keeps proposing to its
/// next tenant until `q_ch` tenants hold it or its list runs out; tenants
/// hold their best `q_t` proposals.
pub fn gale_shapley_many_to_many(
    channel_prefs: &[PreferenceList],
    tenant_prefs: &[PreferenceList],
    quotas: Quotas,
) -> Preallocation {
    let n_ch = channel_prefs.len();
    let n_t = tenant_prefs.len();
    let ranks: Vec<Vec<usize>> = tenant_prefs.iter().map(|p| p.rank_table(n_ch)).collect();
    let mut next = vec![0usize; n_ch];
    let mut holds = vec![0usize; n_ch];
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); n_t];
    let mut queue: Vec<usize> = (0..n_ch).rev().collect();
    let mut proposals = 0usize;

    while let Some(m) = queue.pop() {
        let list = &channel_prefs[m].items;
        while holds[m] < quotas.channel_quota && next[m] < list.len() {
            let k = list[next[m]];
            next[m] += 1;
            proposals += 1;
            if ranks[k][m] == usize::MAX {
                continue;
            }
            held[k].push(m);
            holds[m] += 1;
            if held[k].len() > quotas.tenant_quota {
                let rejected = drop_worst(&mut held[k], &ranks[k]);
                holds[rejected] -= 1;
                if rejected != m {
                    queue.push(rejected);
                }
            }
        }
    }
    assert!(
        proposals <= n_ch * n_t,
        "deferred acceptance exceeded its proposal bound"
    );

    Preallocation {
        sets: held.iter().map(|h| h.iter().copied().collect()).collect(),
    }
}

/// Many-to-many GS followed by a random fill of the channels nobody holds.
///
/// Each uncovered channel first goes to one random tenant below `cap`; the
/// uncovered channels then gain further random holders until they reach
/// `min(q_ch, tenants with spare room)`.
pub fn preallocate<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    quotas: Quotas,
    cap: usize,
    rng: &mut R,
) -> Result<Preallocation> {
    quotas.validate()?;
    if quotas.tenant_quota > cap {
        return Err(Error::Config(format!(
            "tenant quota {} exceeds the preallocation cap {cap}",
            quotas.tenant_quota
        )));
    }
    let (cp, tp) = single_preferences(scenario, scenario.all_channels(), ctx, rng)?;
    let mut pre = gale_shapley_many_to_many(&cp, &tp, quotas);
    let uncovered: Vec<usize> = scenario
        .all_channels()
        .difference(pre.covered())
        .iter()
        .collect();
    let n_t = scenario.n_tenants();

    let add_random = |pre: &mut Preallocation, m: usize, rng: &mut R| -> bool {
        let open: Vec<usize> = (0..n_t)
            .filter(|&k| pre.sets[k].len() < cap && !pre.sets[k].contains(m))
            .collect();
        if open.is_empty() {
            return false;
        }
        let k = open[rng.random_range(0..open.len())];
        pre.sets[k].insert(m);
        true
    };
    for &m in &uncovered {
        add_random(&mut pre, m, rng);
    }
    for &m in &uncovered {
        while pre.multiplicity(m) < quotas.channel_quota {
            if !add_random(&mut pre, m, rng) {
                break;
            }
        }
    }
    Ok(pre)
}
