//! Combinatorial auction over preallocated channel sets (CA) and its
//! fairness-enhanced variant with per-tenant minimum values (FECA).
//!
//! Pipeline: preallocate, enumerate one bid per nonempty subset of each
//! tenant's set, drop worthless bids, build the winner determination
//! program and solve it exactly.

use std::cmp::Ordering;
use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matching::{default_min_values, preallocate, Quotas};
use crate::assignment::Assignment;
use crate::channel_set::{ChannelSet, MAX_CHANNELS};
use crate::error::{Error, Result};
use crate::ilp::{self, GeRow, SolveStatus, ZeroOneProgram};
use crate::scenario::Scenario;
use crate::valuation::{bundle_value, Context};

/// Largest preallocated set a tenant may bid on (2^8 - 1 bids).
pub const MAX_PREALLOC: usize = 8;
/// FECA gives up relaxing once minima drop below this fraction of the original.
pub const RELAXATION_FLOOR: f64 = 1e-6;
pub const RELAXATION_FACTOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuctionConfig {
    pub q_ch: usize,
    pub q_t: usize,
    pub prealloc_cap: usize,
}

impl Default for AuctionConfig {
    fn default() -> Self {
        AuctionConfig {
            q_ch: 6,
            q_t: 6,
            prealloc_cap: MAX_PREALLOC,
        }
    }
}

impl AuctionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.prealloc_cap > MAX_PREALLOC {
            return Err(Error::Config(format!(
                "preallocation cap {} exceeds {MAX_PREALLOC}",
                self.prealloc_cap
            )));
        }
        if self.q_ch == 0 || self.q_t == 0 || self.q_t > self.prealloc_cap {
            return Err(Error::Config(format!(
                "quotas need 1 <= q_ch and 1 <= q_t <= prealloc_cap, got q_ch {} q_t {} cap {}",
                self.q_ch, self.q_t, self.prealloc_cap
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bid {
    pub bundle: ChannelSet,
    pub value: f64,
    pub bidder: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BidMatrix {
    pub n_channels: usize,
    pub bids: Vec<Bid>,
}

impl BidMatrix {
    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    /// Read the headerless layout: one 0/1 column per channel, then value,
    /// then bidder. Lines starting with `#` are ignored.
    pub fn read_csv<R: Read>(reader: R) -> Result<BidMatrix> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut n_channels = None;
        let mut bids = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 3 {
                return Err(Error::Parse(format!(
                    "bid row {}: need channel flags, value and bidder",
                    line + 1
                )));
            }
            let n = rec.len() - 2;
            if n > MAX_CHANNELS {
                return Err(Error::Parse(format!(
                    "bid row {}: {n} channels exceed {MAX_CHANNELS}",
                    line + 1
                )));
            }
            match n_channels {
                None => n_channels = Some(n),
                Some(m) if m != n => {
                    return Err(Error::Parse(format!(
                        "bid row {}: {n} channel columns, expected {m}",
                        line + 1
                    )))
                }
                _ => {}
            }
            let mut bundle = ChannelSet::EMPTY;
            for ch in 0..n {
                match &rec[ch] {
                    "0" => {}
                    "1" => bundle.insert(ch),
                    other => {
                        return Err(Error::Parse(format!(
                            "bid row {}: channel flag '{other}'",
                            line + 1
                        )))
                    }
                }
            }
            let value: f64 = rec[n].parse().map_err(|_| {
                Error::Parse(format!("bid row {}: bad value '{}'", line + 1, &rec[n]))
            })?;
            let bidder: usize = rec[n + 1].parse().map_err(|_| {
                Error::Parse(format!(
                    "bid row {}: bad bidder '{}'",
                    line + 1,
                    &rec[n + 1]
                ))
            })?;
            if bundle.is_empty() {
                return Err(Error::Parse(format!("bid row {}: empty bundle", line + 1)));
            }
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Parse(format!(
                    "bid row {}: value must be finite and nonnegative",
                    line + 1
                )));
            }
            bids.push(Bid {
                bundle,
                value,
                bidder,
            });
        }
        Ok(BidMatrix {
            n_channels: n_channels.unwrap_or(0),
            bids,
        })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(writer);
        for b in &self.bids {
            let mut row: Vec<String> = (0..self.n_channels)
                .map(|ch| if b.bundle.contains(ch) { "1" } else { "0" }.to_string())
                .collect();
            row.push(b.value.to_string());
            row.push(b.bidder.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One bid per nonempty subset of `prealloc`, valued by `bundle_value`.
pub fn enumerate_bids(
    tenant: usize,
    prealloc: ChannelSet,
    scenario: &Scenario,
    ctx: Context,
) -> Result<Vec<Bid>> {
    if prealloc.len() > MAX_PREALLOC {
        return Err(Error::PreallocTooLarge {
            tenant,
            size: prealloc.len(),
            cap: MAX_PREALLOC,
        });
    }
    prealloc
        .nonempty_subsets()
        .map(|bundle| {
            Ok(Bid {
                bundle,
                value: bundle_value(tenant, bundle, scenario, ctx)?,
                bidder: tenant,
            })
        })
        .collect()
}

pub fn prune_zero_bids(n_channels: usize, bids: Vec<Bid>) -> BidMatrix {
    BidMatrix {
        n_channels,
        bids: bids.into_iter().filter(|b| b.value > 0.0).collect(),
    }
}

/// Winner determination program plus the map from variables back to rows of
/// the bid matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WdpModel {
    pub program: ZeroOneProgram,
    /// `bid_of_var[v]` is the matrix row of variable `v`.
    pub bid_of_var: Vec<usize>,
    /// Bidders with a one-bundle row, ascending.
    pub bidders: Vec<usize>,
    pub n_channels: usize,
}

fn bundle_cmp(a: ChannelSet, b: ChannelSet) -> Ordering {
    a.iter().cmp(b.iter())
}

/// Variables follow the bids by descending value, then bidder, then bundle.
/// Rows: one-bundle rows per bidder (ascending id), then one exclusivity row
/// per channel, then the optional minimum-value rows indexed by bidder id.
pub fn build_wdp(matrix: &BidMatrix, min_values: Option<&[f64]>) -> WdpModel {
    let mut order: Vec<usize> = (0..matrix.bids.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&matrix.bids[i], &matrix.bids[j]);
        b.value
            .total_cmp(&a.value)
            .then(a.bidder.cmp(&b.bidder))
            .then(bundle_cmp(a.bundle, b.bundle))
            .then(i.cmp(&j))
    });
    let objective: Vec<f64> = order.iter().map(|&i| matrix.bids[i].value).collect();

    let mut bidders: Vec<usize> = matrix.bids.iter().map(|b| b.bidder).collect();
    bidders.sort_unstable();
    bidders.dedup();

    let mut le_rows = Vec::with_capacity(bidders.len() + matrix.n_channels);
    for &k in &bidders {
        le_rows.push(
            (0..order.len())
                .filter(|&v| matrix.bids[order[v]].bidder == k)
                .collect(),
        );
    }
    for ch in 0..matrix.n_channels {
        le_rows.push(
            (0..order.len())
                .filter(|&v| matrix.bids[order[v]].bundle.contains(ch))
                .collect(),
        );
    }

    let mut ge_rows = Vec::new();
    if let Some(mins) = min_values {
        for (k, &rhs) in mins.iter().enumerate() {
            if rhs <= 0.0 {
                continue;
            }
            let coefs = (0..order.len())
                .filter(|&v| matrix.bids[order[v]].bidder == k)
                .map(|v| (v, objective[v]))
                .collect();
            ge_rows.push(GeRow { coefs, rhs });
        }
    }

    WdpModel {
        program: ZeroOneProgram {
            objective,
            le_rows,
            ge_rows,
        },
        bid_of_var: order,
        bidders,
        n_channels: matrix.n_channels,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WdpSolution {
    pub objective: f64,
    /// Accepted matrix rows, ascending.
    pub accepted: Vec<usize>,
    pub nodes_explored: u64,
}

/// Solve the program; `None` when infeasible. Accepted bundles are checked
/// to be disjoint and at most one per bidder.
pub fn solve_wdp(model: &WdpModel, matrix: &BidMatrix) -> Result<Option<WdpSolution>> {
    let res = ilp::solve(&model.program)?;
    if res.status == SolveStatus::Infeasible {
        return Ok(None);
    }
    let mut accepted: Vec<usize> = res.selected().map(|v| model.bid_of_var[v]).collect();
    accepted.sort_unstable();
    let mut used = ChannelSet::EMPTY;
    let mut winners = Vec::new();
    for &i in &accepted {
        let b = &matrix.bids[i];
        assert!(b.bundle.is_disjoint(used), "accepted bundles overlap");
        assert!(
            !winners.contains(&b.bidder),
            "bidder {} won twice",
            b.bidder
        );
        used = used.union(b.bundle);
        winners.push(b.bidder);
    }
    Ok(Some(WdpSolution {
        objective: res.objective_value,
        accepted,
        nodes_explored: res.nodes_explored,
    }))
}

/// Bid matrix of a scenario after preallocation and pruning.
pub fn scenario_bids<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    cfg: &AuctionConfig,
    rng: &mut R,
) -> Result<BidMatrix> {
    cfg.validate()?;
    let quotas = Quotas {
        tenant_quota: cfg.q_t,
        channel_quota: cfg.q_ch,
    };
    let pre = preallocate(scenario, ctx, quotas, cfg.prealloc_cap, rng)?;
    let mut bids = Vec::new();
    for (k, &set) in pre.sets.iter().enumerate() {
        bids.extend(enumerate_bids(k, set, scenario, ctx)?);
    }
    Ok(prune_zero_bids(scenario.n_channels(), bids))
}

fn decode(scenario: &Scenario, matrix: &BidMatrix, sol: &WdpSolution) -> Assignment {
    let mut a = Assignment::empty(scenario.n_tenants(), scenario.n_channels());
    for &i in &sol.accepted {
        let b = &matrix.bids[i];
        for ch in b.bundle.iter() {
            a.assign(b.bidder, ch);
        }
    }
    a
}

pub fn allocate_ca<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    cfg: &AuctionConfig,
    rng: &mut R,
) -> Result<Assignment> {
    let matrix = scenario_bids(scenario, ctx, cfg, rng)?;
    let model = build_wdp(&matrix, None);
    let sol = solve_wdp(&model, &matrix)?.expect("packing programs are always feasible");
    Ok(decode(scenario, &matrix, &sol))
}

/// CA with per-tenant minimum values, halved on infeasibility until the
/// program becomes feasible or the minima drop below the relaxation floor,
/// at which point plain CA is solved instead.
pub fn allocate_feca<R: Rng + ?Sized>(
    scenario: &Scenario,
    ctx: Context,
    cfg: &AuctionConfig,
    rng: &mut R,
) -> Result<Assignment> {
    let matrix = scenario_bids(scenario, ctx, cfg, rng)?;
    let sol = solve_feca(&matrix, &default_min_values(scenario, ctx))?;
    Ok(decode(scenario, &matrix, &sol))
}

/// The FECA relaxation loop on a given bid matrix.
pub fn solve_feca(matrix: &BidMatrix, min_values: &[f64]) -> Result<WdpSolution> {
    let mut mins = min_values.to_vec();
    let mut scale = 1.0;
    while scale >= RELAXATION_FLOOR {
        let model = build_wdp(matrix, Some(&mins));
        if let Some(sol) = solve_wdp(&model, matrix)? {
            return Ok(sol);
        }
        scale *= RELAXATION_FACTOR;
        for m in &mut mins {
            *m *= RELAXATION_FACTOR;
        }
    }
    let model = build_wdp(matrix, None);
    Ok(solve_wdp(&model, matrix)?.expect("packing programs are always feasible"))
}
