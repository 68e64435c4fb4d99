//! Partitions of the ground set `0..n`, their enumeration, and the Bell and
//! Stirling counts that go with them.
//!
//! A partition is stored as its restricted growth string: `labels[i]` is the
//! index of the cluster holding `i`, where clusters are numbered in order of
//! their smallest element. Every partition has exactly one such string, so
//! structural equality is canonical equality.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pair::{Pair, Sign};

pub const DEFAULT_ENUMERATION_LIMIT: usize = 12;
pub const DEFAULT_PERMUTATION_LIMIT: usize = 8;

pub const ENUMERATION_LIMIT_ENV: &str = "FPL_ENUMERATION_LIMIT";
pub const PERMUTATION_LIMIT_ENV: &str = "FPL_PERMUTATION_LIMIT";

/// Desk-scale guards for the exhaustive operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest `n` for which partitions are enumerated.
    pub enumeration: usize,
    /// Largest `n` for which all `n!` processing orders are enumerated.
    pub permutation: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: DEFAULT_ENUMERATION_LIMIT,
            permutation: DEFAULT_PERMUTATION_LIMIT,
        }
    }
}

impl Limits {
    /// Defaults overridden by `FPL_ENUMERATION_LIMIT` / `FPL_PERMUTATION_LIMIT`.
    pub fn from_env() -> Limits {
        let read = |key: &str, default: usize| {
            std::env::var(key)
                .ok()
                .and_then(|s| s.trim().parse().ok())
                .unwrap_or(default)
        };
        Limits {
            enumeration: read(ENUMERATION_LIMIT_ENV, DEFAULT_ENUMERATION_LIMIT),
            permutation: read(PERMUTATION_LIMIT_ENV, DEFAULT_PERMUTATION_LIMIT),
        }
    }

    pub fn check_enumeration(&self, n: usize) -> Result<()> {
        if n > self.enumeration {
            return Err(Error::OverLimit {
                n,
                limit: self.enumeration,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<usize>,
    num_clusters: usize,
}

impl Partition {
    /// Builds a partition from arbitrary cluster labels, one per element.
    pub fn from_labels<L: AsRef<[usize]>>(labels: L) -> Partition {
        let labels = labels.as_ref();
        let mut remap: Vec<Option<usize>> = Vec::new();
        let mut next = 0;
        let canon = labels
            .iter()
            .map(|&l| {
                if l >= remap.len() {
                    remap.resize(l + 1, None);
                }
                *remap[l].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Partition {
            labels: canon,
            num_clusters: next,
        }
    }

    /// Builds a partition from clusters given in any order; validates that
    /// they are nonempty, disjoint and cover `0..n`.
    pub fn from_clusters<C: AsRef<[usize]>>(n: usize, clusters: &[C]) -> Result<Partition> {
        let mut labels = vec![usize::MAX; n];
        for (c, cluster) in clusters.iter().enumerate() {
            let cluster = cluster.as_ref();
            if cluster.is_empty() {
                return Err(Error::InvalidPartition(format!("cluster {c} is empty")));
            }
            for &x in cluster {
                if x >= n {
                    return Err(Error::OutOfRange { element: x, n });
                }
                if labels[x] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} appears in more than one cluster"
                    )));
                }
                labels[x] = c;
            }
        }
        if let Some(x) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("element {x} is not covered")));
        }
        Ok(Partition::from_labels(labels))
    }

    pub fn singletons(n: usize) -> Partition {
        Partition {
            labels: (0..n).collect(),
            num_clusters: n,
        }
    }

    pub fn single_cluster(n: usize) -> Partition {
        Partition {
            labels: vec![0; n],
            num_clusters: usize::from(n > 0),
        }
    }

    /// Contiguous clusters with the given sizes: `(2, 1)` gives `{{0,1},{2}}`.
    pub fn from_sizes(sizes: &[usize]) -> Result<Partition> {
        if sizes.contains(&0) {
            return Err(Error::InvalidPartition("cluster sizes must be positive".into()));
        }
        let labels: Vec<usize> = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &s)| std::iter::repeat_n(c, s))
            .collect();
        Ok(Partition::from_labels(labels))
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.num_clusters
    }

    /// Canonical label of each element (a restricted growth string).
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> usize {
        self.labels[x]
    }

    /// Clusters sorted by minimum element, each sorted ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters];
        for (x, &l) in self.labels.iter().enumerate() {
            out[l].push(x);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.num_clusters];
        for &l in &self.labels {
            out[l] += 1;
        }
        out
    }

    /// Unchecked membership test for an already validated pair.
    #[inline]
    pub fn joins(&self, pair: Pair) -> bool {
        self.labels[pair.u()] == self.labels[pair.v()]
    }

    #[inline]
    pub fn sign_of(&self, pair: Pair) -> Sign {
        Sign::from_same(self.joins(pair))
    }

    /// Same-cluster oracle semantics: `+1` iff `u` and `v` share a cluster.
    pub fn same_cluster(&self, u: usize, v: usize) -> Result<Sign> {
        let pair = Pair::within(u, v, self.n())?;
        Ok(self.sign_of(pair))
    }

    /// Relabels elements: element `x` of `self` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> Partition {
        let mut labels = vec![0; self.n()];
        for (x, &l) in self.labels.iter().enumerate() {
            labels[perm[x]] = l;
        }
        Partition::from_labels(labels)
    }

    /// Restriction to the listed elements, renumbered `0..subset.len()`.
    pub fn restrict(&self, subset: &[usize]) -> Partition {
        Partition::from_labels(subset.iter().map(|&x| self.labels[x]).collect::<Vec<_>>())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.clusters().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, x) in c.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

/// Three-way outcome of the exhaustive uniqueness checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "partition", rename_all = "lowercase")]
pub enum Uniqueness {
    None,
    Unique(Partition),
    Multiple,
}

impl Uniqueness {
    pub fn is_unique(&self) -> bool {
        matches!(self, Uniqueness::Unique(_))
    }

    pub fn unique(&self) -> Option<&Partition> {
        match self {
            Uniqueness::Unique(p) => Some(p),
            _ => None,
        }
    }

    /// Collects candidates, stopping as soon as a second one appears.
    pub fn from_candidates<I: IntoIterator<Item = Partition>>(candidates: I) -> Uniqueness {
        let mut iter = candidates.into_iter();
        match (iter.next(), iter.next()) {
            (None, _) => Uniqueness::None,
            (Some(p), None) => Uniqueness::Unique(p),
            (Some(_), Some(_)) => Uniqueness::Multiple,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    n: usize,
    clusters: Vec<Vec<usize>>,
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PartitionRepr {
            n: self.n(),
            clusters: self.clusters(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PartitionRepr::deserialize(deserializer)?;
        Partition::from_clusters(repr.n, &repr.clusters).map_err(serde::de::Error::custom)
    }
}

/// Restricted growth strings of length `n` in lexicographic order, with
/// every value below `max_blocks`.
#[derive(Debug, Clone)]
pub struct RgsIter {
    labels: Vec<usize>,
    // prefix_max[i] = max(labels[..=i])
    prefix_max: Vec<usize>,
    max_blocks: usize,
    exact_blocks: Option<usize>,
    started: bool,
    done: bool,
}

impl RgsIter {
    fn new(n: usize, max_blocks: usize, exact_blocks: Option<usize>) -> RgsIter {
        RgsIter {
            labels: vec![0; n],
            prefix_max: vec![0; n],
            max_blocks,
            exact_blocks,
            started: false,
            done: n == 0 || max_blocks == 0,
        }
    }

    fn advance(&mut self) -> bool {
        let n = self.labels.len();
        for i in (1..n).rev() {
            let bound = (self.prefix_max[i - 1] + 1).min(self.max_blocks - 1);
            if self.labels[i] < bound {
                self.labels[i] += 1;
                self.prefix_max[i] = self.prefix_max[i - 1].max(self.labels[i]);
                for j in (i + 1)..n {
                    self.labels[j] = 0;
                    self.prefix_max[j] = self.prefix_max[i];
                }
                return true;
            }
        }
        false
    }
}

impl Iterator for RgsIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        loop {
            if self.done {
                return None;
            }
            if self.started {
                if !self.advance() {
                    self.done = true;
                    return None;
                }
            } else {
                self.started = true;
            }
            let blocks = self.prefix_max.last().map_or(0, |m| m + 1);
            if self.exact_blocks.is_none_or(|k| k == blocks) {
                return Some(Partition {
                    labels: self.labels.clone(),
                    num_clusters: blocks,
                });
            }
        }
    }
}

/// Every partition of `0..n`, each once, in canonical order.
pub fn enumerate_partitions(n: usize, limits: &Limits) -> Result<RgsIter> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    limits.check_enumeration(n)?;
    Ok(RgsIter::new(n, n, None))
}

/// Every partition of `0..n` into exactly `k` clusters, in canonical order.
pub fn enumerate_k_partitions(n: usize, k: usize, limits: &Limits) -> Result<RgsIter> {
    if k == 0 || k > n {
        return Err(Error::InvalidK { n, k });
    }
    limits.check_enumeration(n)?;
    Ok(RgsIter::new(n, k, Some(k)))
}

/// Row `n` of the Stirling triangle: `S(n, 0..=n)`.
fn stirling_row(n: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m + 1];
        for j in 1..=m {
            let mut value = if j < m {
                &row[j] * BigUint::from(j)
            } else {
                BigUint::zero()
            };
            value += &row[j - 1];
            next[j] = value;
        }
        row = next;
    }
    row
}

/// Stirling number of the second kind: partitions of `n` items into `k` blocks.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    stirling_row(n).swap_remove(k)
}

/// Bell number: all partitions of `n` items.
pub fn bell(n: usize) -> BigUint {
    stirling_row(n).into_iter().sum()
}
