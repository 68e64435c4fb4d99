//! Two-sign weighted instances built from recorded answers, with exact
//! disagreement cost and exhaustive consistency checks.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coloring::SimpleGraph;
use crate::error::{Error, Result};
use crate::pair::{num_pairs, Pair, Sign};
use crate::partition::{enumerate_k_partitions, enumerate_partitions, Limits, Partition, Uniqueness};

/// Positive and negative response counts per unordered pair. A pair may
/// carry weight of both signs at once.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedInstance {
    n: usize,
    pos: Vec<u32>,
    neg: Vec<u32>,
}

impl SignedInstance {
    pub fn new(n: usize) -> SignedInstance {
        SignedInstance {
            n,
            pos: vec![0; num_pairs(n)],
            neg: vec![0; num_pairs(n)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, pair: Pair) -> Result<()> {
        if pair.v() >= self.n {
            return Err(Error::OutOfRange {
                element: pair.v(),
                n: self.n,
            });
        }
        Ok(())
    }

    /// Increments the weight matching `answer` on `pair`.
    pub fn record(&mut self, pair: Pair, answer: Sign) -> Result<()> {
        self.check(pair)?;
        let i = pair.index(self.n);
        match answer {
            Sign::Pos => self.pos[i] += 1,
            Sign::Neg => self.neg[i] += 1,
        }
        Ok(())
    }

    /// Value-style variant of [`SignedInstance::record`].
    pub fn with_response(&self, pair: Pair, answer: Sign) -> Result<SignedInstance> {
        let mut next = self.clone();
        next.record(pair, answer)?;
        Ok(next)
    }

    pub fn pos_weight(&self, pair: Pair) -> u32 {
        self.pos[pair.index(self.n)]
    }

    pub fn neg_weight(&self, pair: Pair) -> u32 {
        self.neg[pair.index(self.n)]
    }

    pub fn weight(&self, pair: Pair, sign: Sign) -> u32 {
        match sign {
            Sign::Pos => self.pos_weight(pair),
            Sign::Neg => self.neg_weight(pair),
        }
    }

    /// Equals the number of recorded responses.
    pub fn total_weight(&self) -> u64 {
        self.pos.iter().chain(&self.neg).map(|&w| u64::from(w)).sum()
    }

    pub fn total_pos_weight(&self) -> u64 {
        self.pos.iter().map(|&w| u64::from(w)).sum()
    }

    /// Unweighted support of the negative edges.
    pub fn negative_support(&self) -> SimpleGraph {
        let edges: Vec<Pair> = Pair::all(self.n).filter(|p| self.neg[p.index(self.n)] > 0).collect();
        SimpleGraph::from_pairs(self.n, edges)
    }

    /// Disagreement of `p` with the instance: positive weight on split
    /// pairs plus negative weight on joined pairs.
    pub fn cost(&self, p: &Partition) -> Result<u64> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: p.n(),
            });
        }
        Ok(self.cost_unchecked(p))
    }

    pub(crate) fn cost_unchecked(&self, p: &Partition) -> u64 {
        Pair::all(self.n)
            .enumerate()
            .map(|(i, pair)| {
                if p.joins(pair) {
                    u64::from(self.neg[i])
                } else {
                    u64::from(self.pos[i])
                }
            })
            .sum()
    }

    fn min_over<I: Iterator<Item = Partition>>(&self, partitions: I) -> (u64, Partition) {
        let mut best: Option<(u64, Partition)> = None;
        for p in partitions {
            let c = self.cost_unchecked(&p);
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, p));
            }
        }
        best.expect("partition enumeration is never empty")
    }

    /// Exhaustive minimum-cost partition; ties go to the first in canonical order.
    pub fn cc_min(&self, limits: &Limits) -> Result<(u64, Partition)> {
        Ok(self.min_over(enumerate_partitions(self.n, limits)?))
    }

    /// As [`SignedInstance::cc_min`], restricted to exactly `k` clusters.
    pub fn cc_min_k(&self, k: usize, limits: &Limits) -> Result<(u64, Partition)> {
        Ok(self.min_over(enumerate_k_partitions(self.n, k, limits)?))
    }

    /// `(l, k)`-consistency: some `k`-partition has cost at most `l`.
    pub fn is_consistent(&self, l: u64, k: usize, limits: &Limits) -> Result<bool> {
        Ok(enumerate_k_partitions(self.n, k, limits)?.any(|p| self.cost_unchecked(&p) <= l))
    }

    /// Whether exactly one `k`-partition has cost at most `l`.
    pub fn unique_consistency_witness(&self, l: u64, k: usize, limits: &Limits) -> Result<Uniqueness> {
        Ok(Uniqueness::from_candidates(
            enumerate_k_partitions(self.n, k, limits)?.filter(|p| self.cost_unchecked(p) <= l),
        ))
    }

    /// Nonzero weights as `(u, v, weight)` triples in pair order.
    pub fn triples(&self, sign: Sign) -> Vec<[u64; 3]> {
        let weights = match sign {
            Sign::Pos => &self.pos,
            Sign::Neg => &self.neg,
        };
        Pair::all(self.n)
            .zip(weights)
            .filter(|(_, &w)| w > 0)
            .map(|(p, &w)| [p.u() as u64, p.v() as u64, u64::from(w)])
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    n: usize,
    #[serde(default)]
    pos: Vec<[u64; 3]>,
    #[serde(default)]
    neg: Vec<[u64; 3]>,
}

impl Serialize for SignedInstance {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        InstanceRepr {
            n: self.n,
            pos: self.triples(Sign::Pos),
            neg: self.triples(Sign::Neg),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SignedInstance {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = InstanceRepr::deserialize(deserializer)?;
        let mut g = SignedInstance::new(repr.n);
        for (sign, triples) in [(Sign::Pos, &repr.pos), (Sign::Neg, &repr.neg)] {
            for &[u, v, w] in triples {
                let pair = Pair::within(u as usize, v as usize, repr.n).map_err(D::Error::custom)?;
                let w = u32::try_from(w).map_err(D::Error::custom)?;
                let i = pair.index(repr.n);
                match sign {
                    Sign::Pos => g.pos[i] += w,
                    Sign::Neg => g.neg[i] += w,
                }
            }
        }
        Ok(g)
    }
}
