//! Evaluation metrics of an assignment and box-plot style aggregation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alloc::Algorithm;
use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::radio::rho;
use crate::scenario::{OutageCase, Scenario};
use crate::valuation::{utility, Context, UtilityParams};

/// F_C is reported divided by this factor.
pub const FC_REPORT_SCALE: f64 = 1e6;

/// One evaluated allocation. Field order is the records CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub scenario_seed: u64,
    pub case: OutageCase,
    pub context: Context,
    pub algorithm: Algorithm,
    pub tc_mbps: f64,
    pub tu: f64,
    pub f_c: f64,
    pub f_u: f64,
    pub mc_mbps: f64,
    pub mu: f64,
    /// Fractional when averaged over repetitions.
    pub n_outage: f64,
    pub overcapacity_mbps: f64,
    pub wall_time_s: f64,
}

/// The numeric part of a record.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub tc_mbps: f64,
    pub tu: f64,
    pub f_c: f64,
    pub f_u: f64,
    pub mc_mbps: f64,
    pub mu: f64,
    pub n_outage: f64,
    pub overcapacity_mbps: f64,
}

/// All metrics of `assignment`; they do not depend on the context the
/// allocation was made in.
pub fn evaluate(scenario: &Scenario, assignment: &Assignment) -> Result<Metrics> {
    assignment.validate()?;
    if assignment.n_tenants() != scenario.n_tenants()
        || assignment.n_channels() != scenario.n_channels()
    {
        return Err(Error::Domain(
            "assignment does not match the scenario".into(),
        ));
    }
    let mut m = Metrics {
        f_c: 1.0,
        f_u: 1.0,
        mc_mbps: f64::INFINITY,
        mu: f64::INFINITY,
        ..Metrics::default()
    };
    for (k, t) in scenario.tenants.iter().enumerate() {
        let c = rho(k, assignment.channels_of(k), scenario)?;
        let u = utility(c, &UtilityParams::of(scenario, k));
        m.tc_mbps += c;
        m.tu += u;
        m.f_c *= c;
        m.f_u *= u;
        m.mc_mbps = m.mc_mbps.min(c);
        m.mu = m.mu.min(u);
        if c < t.c_min_mbps {
            m.n_outage += 1.0;
        }
        m.overcapacity_mbps += (c - t.c_max_mbps).max(0.0);
    }
    if scenario.n_tenants() == 0 {
        m.mc_mbps = 0.0;
        m.mu = 0.0;
    }
    Ok(m)
}

impl Metrics {
    /// Component-wise mean.
    pub fn mean(items: &[Metrics]) -> Result<Metrics> {
        if items.is_empty() {
            return Err(Error::EmptyGroup("no metrics to average".into()));
        }
        let n = items.len() as f64;
        let mut s = Metrics::default();
        for m in items {
            s.tc_mbps += m.tc_mbps;
            s.tu += m.tu;
            s.f_c += m.f_c;
            s.f_u += m.f_u;
            s.mc_mbps += m.mc_mbps;
            s.mu += m.mu;
            s.n_outage += m.n_outage;
            s.overcapacity_mbps += m.overcapacity_mbps;
        }
        Ok(Metrics {
            tc_mbps: s.tc_mbps / n,
            tu: s.tu / n,
            f_c: s.f_c / n,
            f_u: s.f_u / n,
            mc_mbps: s.mc_mbps / n,
            mu: s.mu / n,
            n_outage: s.n_outage / n,
            overcapacity_mbps: s.overcapacity_mbps / n,
        })
    }

    pub fn into_record(
        self,
        scenario_seed: u64,
        case: OutageCase,
        context: Context,
        algorithm: Algorithm,
        wall_time_s: f64,
    ) -> MetricRecord {
        MetricRecord {
            scenario_seed,
            case,
            context,
            algorithm,
            tc_mbps: self.tc_mbps,
            tu: self.tu,
            f_c: self.f_c,
            f_u: self.f_u,
            mc_mbps: self.mc_mbps,
            mu: self.mu,
            n_outage: self.n_outage,
            overcapacity_mbps: self.overcapacity_mbps,
            wall_time_s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    Tc,
    Tu,
    Fc,
    Fu,
    Mc,
    Mu,
    NOutage,
    Overcapacity,
    WallTime,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::Tc,
        Metric::Tu,
        Metric::Fc,
        Metric::Fu,
        Metric::Mc,
        Metric::Mu,
        Metric::NOutage,
        Metric::Overcapacity,
        Metric::WallTime,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Tc => "tc_mbps",
            Metric::Tu => "tu",
            Metric::Fc => "f_c",
            Metric::Fu => "f_u",
            Metric::Mc => "mc_mbps",
            Metric::Mu => "mu",
            Metric::NOutage => "n_outage",
            Metric::Overcapacity => "overcapacity_mbps",
            Metric::WallTime => "wall_time_s",
        }
    }

    /// Value as reported: F_C is scaled down by [`FC_REPORT_SCALE`].
    pub fn reported(self, r: &MetricRecord) -> f64 {
        match self {
            Metric::Tc => r.tc_mbps,
            Metric::Tu => r.tu,
            Metric::Fc => r.f_c / FC_REPORT_SCALE,
            Metric::Fu => r.f_u,
            Metric::Mc => r.mc_mbps,
            Metric::Mu => r.mu,
            Metric::NOutage => r.n_outage,
            Metric::Overcapacity => r.overcapacity_mbps,
            Metric::WallTime => r.wall_time_s,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.label() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown metric '{s}'")))
    }
}

/// Linear-interpolation quantile of sorted data (`p` in [0, 1]).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    /// Most extreme data points within 1.5 IQR of the quartiles.
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptyGroup("cannot summarize an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&v, 0.25);
    let q3 = quantile_sorted(&v, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || {
        v.iter()
            .copied()
            .filter(|&x| x >= lo_fence && x <= hi_fence)
    };
    let whisker_lo = inside().next().unwrap_or(q1);
    let whisker_hi = inside().next_back().unwrap_or(q3);
    Ok(Summary {
        n: v.len(),
        mean: v.iter().sum::<f64>() / v.len() as f64,
        median: quantile_sorted(&v, 0.5),
        q1,
        q3,
        whisker_lo,
        whisker_hi,
        outliers: v
            .iter()
            .copied()
            .filter(|&x| x < lo_fence || x > hi_fence)
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub case: OutageCase,
    pub context: Context,
    pub algorithm: Algorithm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub key: GroupKey,
    pub metric: Metric,
    pub summary: Summary,
}

/// Summaries per (case, context, algorithm) and metric, sorted by key.
pub fn aggregate(records: &[MetricRecord]) -> Result<Vec<AggregateRow>> {
    let mut groups: BTreeMap<GroupKey, Vec<&MetricRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry(GroupKey {
                case: r.case,
                context: r.context,
                algorithm: r.algorithm,
            })
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for (key, rs) in groups {
        for metric in Metric::ALL {
            let values: Vec<f64> = rs.iter().map(|r| metric.reported(r)).collect();
            out.push(AggregateRow {
                key,
                metric,
                summary: summarize(&values)?,
            });
        }
    }
    Ok(out)
}

/// Mean of one metric per group, for quick lookups.
pub fn group_means(records: &[MetricRecord], metric: Metric) -> BTreeMap<GroupKey, f64> {
    let mut acc: BTreeMap<GroupKey, (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = acc
            .entry(GroupKey {
                case: r.case,
                context: r.context,
                algorithm: r.algorithm,
            })
            .or_insert((0.0, 0));
        e.0 += metric.reported(r);
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (s, n))| (k, s / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_set::ChannelSet;
    use crate::scenario::{generate, GeneratorConfig};

    #[test]
    fn quartiles_of_one_to_hundred() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let s = summarize(&v).unwrap();
        assert_eq!(s.median, 50.5);
        assert_eq!(s.q1, 25.75);
        assert_eq!(s.q3, 75.25);
        assert_eq!(s.whisker_lo, 1.0);
        assert_eq!(s.whisker_hi, 100.0);
        assert!(s.outliers.is_empty());
    }

    #[test]
    fn constant_and_single_samples() {
        let s = summarize(&[3.0; 7]).unwrap();
        assert_eq!((s.mean, s.median, s.q1, s.q3), (3.0, 3.0, 3.0, 3.0));
        assert!(s.outliers.is_empty());
        let one = summarize(&[2.5]).unwrap();
        assert_eq!(
            (one.mean, one.median, one.whisker_lo, one.whisker_hi),
            (2.5, 2.5, 2.5, 2.5)
        );
        assert!(summarize(&[]).is_err());
    }

    #[test]
    fn outliers_beyond_whiskers() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(s.outliers, vec![100.0]);
        assert_eq!(s.whisker_hi, 4.0);
    }

    #[test]
    fn empty_assignment_metrics() {
        let s = generate(&GeneratorConfig::default(), 1).unwrap();
        let a = Assignment::empty(s.n_tenants(), s.n_channels());
        let m = evaluate(&s, &a).unwrap();
        assert_eq!(m.tc_mbps, 0.0);
        assert_eq!(m.f_c, 0.0);
        assert_eq!(m.f_u, 0.0);
        assert_eq!(m.n_outage, s.n_tenants() as f64);
    }

    #[test]
    fn overlapping_assignment_is_rejected() {
        let s = generate(&GeneratorConfig::default(), 1).unwrap();
        let mut rows = vec![ChannelSet::EMPTY; s.n_tenants()];
        rows[0] = ChannelSet::single(0);
        rows[1] = ChannelSet::single(0);
        let a = Assignment::from_rows(s.n_channels(), rows);
        assert!(evaluate(&s, &a).is_err());
    }
}
