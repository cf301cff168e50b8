//! Coalitions over a fixed agent index set `{1..n}`.
//!
//! A coalition is stored as a bitmask (agent `i` occupies bit `i-1`), which
//! bounds the supported agent count to [`MAX_AGENTS`]. Ordering is by size
//! first, then lexicographically on the sorted member list, so `{1,4}` sorts
//! before `{2,3}`.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Hard cap on the agent count so every coalition label fits a bitmask.
pub const MAX_AGENTS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoalitionError {
    #[error("agent index {0} out of range 1..={1}")]
    AgentOutOfRange(usize, usize),
    #[error("agent count {0} exceeds the supported maximum {MAX_AGENTS}")]
    TooManyAgents(usize),
    #[error("malformed coalition literal `{0}`")]
    BadLiteral(String),
}

/// A set of agents out of `{1..n}`, canonically represented.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Coalition(u16);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    /// The grand coalition `{1..n}`.
    pub fn grand(n: usize) -> Coalition {
        debug_assert!(n <= MAX_AGENTS);
        Coalition(((1u32 << n) - 1) as u16)
    }

    /// Builds a coalition from 1-based agent indices, deduplicating.
    pub fn from_members<I: IntoIterator<Item = usize>>(
        members: I,
        n: usize,
    ) -> Result<Coalition, CoalitionError> {
        if n > MAX_AGENTS {
            return Err(CoalitionError::TooManyAgents(n));
        }
        let mut mask = 0u16;
        for i in members {
            if i == 0 || i > n {
                return Err(CoalitionError::AgentOutOfRange(i, n));
            }
            mask |= 1 << (i - 1);
        }
        Ok(Coalition(mask))
    }

    /// Singleton coalition `{i}` (1-based, unchecked against an ambient n).
    pub fn singleton(i: usize) -> Coalition {
        debug_assert!(i >= 1 && i <= MAX_AGENTS);
        Coalition(1 << (i - 1))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, agent: usize) -> bool {
        agent >= 1 && agent <= MAX_AGENTS && self.0 & (1 << (agent - 1)) != 0
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Coalition {
        Coalition(self.0 & !other.0)
    }

    /// Complement with respect to the grand coalition on `n` agents.
    pub fn complement(self, n: usize) -> Coalition {
        Coalition(Coalition::grand(n).0 & !self.0)
    }

    pub fn is_subset(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// 1-based members in ascending order.
    pub fn members(self) -> Vec<usize> {
        (1..=MAX_AGENTS).filter(|&i| self.contains(i)).collect()
    }

    /// Largest member, or 0 for the empty coalition.
    pub fn max_member(self) -> usize {
        (16 - self.0.leading_zeros()) as usize
    }

    /// All `2^n` coalition labels in size-then-lex order.
    pub fn all(n: usize) -> Vec<Coalition> {
        assert!(n <= MAX_AGENTS);
        let mut labels: Vec<Coalition> = (0..(1u32 << n)).map(|m| Coalition(m as u16)).collect();
        labels.sort();
        labels
    }

    /// Parses a literal like `{1,3}` or `{}`.
    pub fn parse(text: &str, n: usize) -> Result<Coalition, CoalitionError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| CoalitionError::BadLiteral(text.to_string()))?;
        let inner = inner.trim();
        if inner.is_empty() {
            return Ok(Coalition::EMPTY);
        }
        let mut members = Vec::new();
        for part in inner.split(',') {
            let i: usize = part
                .trim()
                .parse()
                .map_err(|_| CoalitionError::BadLiteral(text.to_string()))?;
            members.push(i);
        }
        Coalition::from_members(members, n)
    }
}

impl Ord for Coalition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.members().cmp(&other.members()))
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_then_lex_order() {
        let c14 = Coalition::from_members([1, 4], 4).unwrap();
        let c23 = Coalition::from_members([2, 3], 4).unwrap();
        assert!(c14 < c23, "{{1,4}} sorts before {{2,3}}");
        let all = Coalition::all(2);
        let shown: Vec<String> = all.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, ["{}", "{1}", "{2}", "{1,2}"]);
    }

    #[test]
    fn set_algebra_closed() {
        let n = 5;
        let c = Coalition::from_members([1, 3], n).unwrap();
        let d = Coalition::from_members([3, 5], n).unwrap();
        assert_eq!(c.union(d).members(), vec![1, 3, 5]);
        assert_eq!(c.difference(d).members(), vec![1]);
        assert!(c.intersection(d).contains(3));
        assert_eq!(c.complement(n).members(), vec![2, 4, 5]);
        assert!(Coalition::EMPTY.is_subset(c));
        assert!(c.is_subset(Coalition::grand(n)));
    }

    #[test]
    fn grand_and_empty_representable() {
        assert_eq!(Coalition::grand(0), Coalition::EMPTY);
        assert_eq!(Coalition::grand(3).members(), vec![1, 2, 3]);
        assert_eq!(Coalition::all(3).len(), 8);
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["{}", "{1}", "{1,3}", "{2,4,5}"] {
            let c = Coalition::parse(text, 5).unwrap();
            assert_eq!(c.to_string(), text.replace(' ', ""));
        }
        assert!(Coalition::parse("{0}", 3).is_err());
        assert!(Coalition::parse("{4}", 3).is_err());
        assert!(Coalition::parse("1,2", 3).is_err());
    }
}
