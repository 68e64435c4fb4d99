use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Answer of a same-cluster query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn from_same(same: bool) -> Sign {
        if same {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn is_pos(self) -> bool {
        self == Sign::Pos
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn from_i64(value: i64) -> Result<Sign> {
        match value {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            other => Err(Error::Parse(format!("answer must be 1 or -1, got {other}"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = i64::deserialize(deserializer)?;
        Sign::from_i64(raw).map_err(serde::de::Error::custom)
    }
}

/// Unordered pair of distinct elements, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    u: usize,
    v: usize,
}

impl Pair {
    pub fn new(a: usize, b: usize) -> Result<Pair> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Pair { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(Pair { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(Error::SelfPair(a)),
        }
    }

    /// Like [`Pair::new`] but also checks both endpoints lie in `0..n`.
    pub fn within(a: usize, b: usize, n: usize) -> Result<Pair> {
        let pair = Pair::new(a, b)?;
        if pair.v >= n {
            return Err(Error::OutOfRange { element: pair.v, n });
        }
        Ok(pair)
    }

    pub fn u(self) -> usize {
        self.u
    }

    pub fn v(self) -> usize {
        self.v
    }

    /// Position of the pair in the row-major upper triangle of an `n x n` matrix.
    pub fn index(self, n: usize) -> usize {
        self.u * (2 * n - self.u - 1) / 2 + (self.v - self.u - 1)
    }

    pub fn contains(self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    /// All pairs of `0..n` in lexicographic order (matching [`Pair::index`]).
    pub fn all(n: usize) -> impl Iterator<Item = Pair> {
        (0..n).flat_map(move |u| ((u + 1)..n).map(move |v| Pair { u, v }))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_matches_enumeration_order() {
        for n in 2..8 {
            for (i, p) in Pair::all(n).enumerate() {
                assert_eq!(p.index(n), i);
            }
            assert_eq!(Pair::all(n).count(), num_pairs(n));
        }
    }

    #[test]
    fn rejects_self_pairs_and_out_of_range() {
        assert_eq!(Pair::new(3, 3), Err(Error::SelfPair(3)));
        assert!(matches!(Pair::within(0, 5, 5), Err(Error::OutOfRange { .. })));
        assert_eq!(Pair::new(4, 1).unwrap(), Pair::new(1, 4).unwrap());
    }

    #[test]
    fn sign_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&Sign::Neg).unwrap(), "-1");
        let s: Sign = serde_json::from_str("1").unwrap();
        assert_eq!(s, Sign::Pos);
        assert!(serde_json::from_str::<Sign>("0").is_err());
    }
}
