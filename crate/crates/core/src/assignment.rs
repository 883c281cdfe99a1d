//! Binary tenant × channel assignment matrix.

use serde::{Deserialize, Serialize};

use crate::channel_set::ChannelSet;
use crate::error::{Error, Result};

/// Row `k` holds the channel set of tenant `k`. A valid assignment gives
/// each channel to at most one tenant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    n_channels: usize,
    rows: Vec<ChannelSet>,
}

impl Assignment {
    pub fn empty(n_tenants: usize, n_channels: usize) -> Self {
        Assignment {
            n_channels,
            rows: vec![ChannelSet::EMPTY; n_tenants],
        }
    }

    pub fn from_rows(n_channels: usize, rows: Vec<ChannelSet>) -> Self {
        Assignment { n_channels, rows }
    }

    pub fn n_tenants(&self) -> usize {
        self.rows.len()
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn assign(&mut self, tenant: usize, channel: usize) {
        debug_assert!(channel < self.n_channels);
        debug_assert!(
            self.owner(channel).is_none(),
            "channel {channel} assigned twice"
        );
        self.rows[tenant].insert(channel);
    }

    pub fn channels_of(&self, tenant: usize) -> ChannelSet {
        self.rows[tenant]
    }

    pub fn rows(&self) -> &[ChannelSet] {
        &self.rows
    }

    /// First tenant holding `channel`.
    pub fn owner(&self, channel: usize) -> Option<usize> {
        self.rows.iter().position(|r| r.contains(channel))
    }

    pub fn assigned(&self) -> ChannelSet {
        self.rows
            .iter()
            .fold(ChannelSet::EMPTY, |acc, r| acc.union(*r))
    }

    pub fn unassigned(&self) -> ChannelSet {
        ChannelSet::full(self.n_channels).difference(self.assigned())
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.n_channels)
            .map(|m| self.rows.iter().filter(|r| r.contains(m)).count())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.len()).collect()
    }

    /// Check that every column sums to at most one and no row names a
    /// channel beyond the matrix width.
    pub fn validate(&self) -> Result<()> {
        let width = ChannelSet::full(self.n_channels);
        for row in &self.rows {
            if let Some(ch) = row.difference(width).iter().next() {
                return Err(Error::Lookup {
                    kind: "channel",
                    id: ch,
                });
            }
        }
        for (channel, &holders) in self.column_sums().iter().enumerate() {
            if holders > 1 {
                return Err(Error::ColumnSum { channel, holders });
            }
        }
        Ok(())
    }

    /// Dense 0/1 matrix view.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                (0..self.n_channels)
                    .map(|m| u8::from(r.contains(m)))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_rows_fail_validation() {
        let a = Assignment::from_rows(3, vec![ChannelSet::single(1), ChannelSet::single(1)]);
        assert!(matches!(
            a.validate(),
            Err(Error::ColumnSum {
                channel: 1,
                holders: 2
            })
        ));
    }

    #[test]
    fn bookkeeping() {
        let mut a = Assignment::empty(2, 4);
        a.assign(0, 0);
        a.assign(1, 3);
        a.assign(0, 2);
        assert!(a.validate().is_ok());
        assert_eq!(a.owner(2), Some(0));
        assert_eq!(a.owner(1), None);
        assert_eq!(a.unassigned(), ChannelSet::single(1));
        assert_eq!(a.row_sums(), vec![2, 1]);
        assert_eq!(a.matrix(), vec![vec![1, 0, 1, 0], vec![0, 0, 0, 1]]);
    }
}
