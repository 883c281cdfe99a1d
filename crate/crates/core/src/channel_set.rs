//! Compact set of channel indices.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Maximum number of channels a [`ChannelSet`] can address.
pub const MAX_CHANNELS: usize = 64;

/// A set of global channel indices stored as a 64-bit membership mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChannelSet(u64);

impl ChannelSet {
    pub const EMPTY: ChannelSet = ChannelSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ChannelSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn single(channel: usize) -> Self {
        debug_assert!(channel < MAX_CHANNELS);
        ChannelSet(1u64 << channel)
    }

    /// The first `n` channels.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_CHANNELS);
        if n == MAX_CHANNELS {
            ChannelSet(u64::MAX)
        } else {
            ChannelSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, channel: usize) -> bool {
        channel < MAX_CHANNELS && self.0 & (1u64 << channel) != 0
    }

    pub fn insert(&mut self, channel: usize) {
        debug_assert!(channel < MAX_CHANNELS);
        self.0 |= 1u64 << channel;
    }

    pub fn remove(&mut self, channel: usize) {
        if channel < MAX_CHANNELS {
            self.0 &= !(1u64 << channel);
        }
    }

    #[must_use]
    pub fn with(self, channel: usize) -> Self {
        let mut s = self;
        s.insert(channel);
        s
    }

    pub fn union(self, other: Self) -> Self {
        ChannelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ChannelSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ChannelSet(self.0 & !other.0)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Channel indices in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let idx = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(idx)
            }
        })
    }

    /// All nonempty subsets of `self`, in increasing order of their masks.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = ChannelSet> {
        // Enumerate by walking the sub-masks upward: (s - mask) & mask.
        let mask = self.0;
        let mut sub: u64 = 0;
        let mut done = mask == 0;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            sub = sub.wrapping_sub(mask) & mask;
            if sub == 0 {
                done = true;
                None
            } else {
                Some(ChannelSet(sub))
            }
        })
    }
}

impl FromIterator<usize> for ChannelSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ChannelSet::EMPTY;
        for c in iter {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for ChannelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_of_three() {
        let s: ChannelSet = [1, 4, 6].into_iter().collect();
        let subs: Vec<_> = s.nonempty_subsets().collect();
        assert_eq!(subs.len(), 7);
        assert!(subs.iter().all(|x| x.is_subset(s) && !x.is_empty()));
        assert_eq!(*subs.last().unwrap(), s);
    }

    #[test]
    fn empty_has_no_subsets() {
        assert_eq!(ChannelSet::EMPTY.nonempty_subsets().count(), 0);
    }

    #[test]
    fn iter_is_sorted() {
        let s: ChannelSet = [9, 0, 3].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 9]);
        assert_eq!(s.len(), 3);
        assert!(s.contains(3) && !s.contains(4));
    }

    #[test]
    fn full_64() {
        assert_eq!(ChannelSet::full(64).len(), 64);
        assert_eq!(ChannelSet::full(0), ChannelSet::EMPTY);
    }
}
