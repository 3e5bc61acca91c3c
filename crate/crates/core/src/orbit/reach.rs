use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Membership bits over `s` in `[0, bound]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReachSet {
    bound: u64,
    words: Vec<u64>,
}

impl ReachSet {
    pub fn new(bound: u64) -> Self {
        let len = (bound / 64 + 1) as usize;
        ReachSet { bound, words: vec![0; len] }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Values above the bound are ignored.
    pub fn insert(&mut self, s: u64) {
        if s <= self.bound {
            self.words[(s / 64) as usize] |= 1 << (s % 64);
        }
    }

    pub fn contains(&self, s: u64) -> bool {
        s <= self.bound && self.words[(s / 64) as usize] >> (s % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &ReachSet) {
        assert_eq!(self.bound, other.bound, "reach sets over different bounds");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.bound).filter(move |&s| self.contains(s))
    }

    pub fn missing(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.bound).filter(move |&s| !self.contains(s))
    }

    pub(crate) fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.words.len() * 16);
        for w in &self.words {
            write!(out, "{w:016x}").expect("writing to a string");
        }
        out
    }

    pub(crate) fn from_hex(bound: u64, hex: &str) -> Result<Self> {
        let mut set = ReachSet::new(bound);
        if hex.len() != set.words.len() * 16 {
            return Err(Error::CheckpointFormat(format!(
                "reach bitmap has {} hex digits, expected {}",
                hex.len(),
                set.words.len() * 16
            )));
        }
        for (i, w) in set.words.iter_mut().enumerate() {
            let chunk = &hex[i * 16..(i + 1) * 16];
            *w = u64::from_str_radix(chunk, 16)
                .map_err(|e| Error::CheckpointFormat(format!("reach bitmap: {e}")))?;
        }
        if set.words.last().map_or(0, |w| w >> (bound % 64) >> 1) != 0 {
            return Err(Error::CheckpointFormat("reach bitmap has bits above the bound".into()));
        }
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_query() {
        let mut r = ReachSet::new(130);
        for s in [0, 1, 63, 64, 129, 130, 131] {
            r.insert(s);
        }
        assert!(r.contains(0) && r.contains(64) && r.contains(130));
        assert!(!r.contains(2) && !r.contains(131));
        assert_eq!(r.count(), 6);
        assert_eq!(r.iter().collect::<Vec<_>>(), vec![0, 1, 63, 64, 129, 130]);
    }

    #[test]
    fn hex_roundtrip_and_validation() {
        let mut r = ReachSet::new(200);
        for s in (0..=200).step_by(7) {
            r.insert(s);
        }
        let back = ReachSet::from_hex(200, &r.to_hex()).unwrap();
        assert_eq!(back, r);
        assert!(ReachSet::from_hex(200, &r.to_hex()[1..]).is_err());
        assert!(ReachSet::from_hex(10, "ffffffffffffffff").is_err());
    }
}
