//! Proper colorings of small graphs by backtracking.
//!
//! Colors are introduced in first-use order (vertex 0 takes color 0, and a
//! vertex may only open the next unused color), so every color-class
//! partition is visited exactly once and the color vector of a complete
//! assignment is already its canonical label string.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pair::Pair;
use crate::partition::{Partition, Uniqueness};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<bool>,
    edge_count: usize,
}

impl SimpleGraph {
    pub fn new(n: usize) -> SimpleGraph {
        SimpleGraph {
            n,
            adj: vec![false; n * n],
            edge_count: 0,
        }
    }

    pub fn from_pairs<I: IntoIterator<Item = Pair>>(n: usize, pairs: I) -> SimpleGraph {
        let mut g = SimpleGraph::new(n);
        for p in pairs {
            g.add_edge(p);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<SimpleGraph> {
        let mut g = SimpleGraph::new(n);
        for &(u, v) in edges {
            g.add_edge(Pair::within(u, v, n)?);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> SimpleGraph {
        SimpleGraph::from_pairs(n, Pair::all(n))
    }

    /// Adds `pair`; returns false if it was already present.
    pub fn add_edge(&mut self, pair: Pair) -> bool {
        let (u, v) = (pair.u(), pair.v());
        assert!(v < self.n, "edge {pair} outside 0..{}", self.n);
        if self.adj[u * self.n + v] {
            return false;
        }
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
        self.edge_count += 1;
        true
    }

    pub fn with_edge(&self, pair: Pair) -> SimpleGraph {
        let mut g = self.clone();
        g.add_edge(pair);
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn edges(&self) -> Vec<Pair> {
        Pair::all(self.n).filter(|p| self.has_edge(p.u(), p.v())).collect()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            return Err(Error::InvalidK { n: self.n, k });
        }
        Ok(())
    }

    /// Whether a proper coloring using all `k` colors exists.
    pub fn has_surjective_k_coloring(&self, k: usize) -> Result<bool> {
        self.check_k(k)?;
        Ok(!self.color_classes(k, true, 1).is_empty())
    }

    /// Uniqueness of the color-class partition over surjective proper `k`-colorings.
    pub fn unique_surjective_k_coloring(&self, k: usize) -> Result<Uniqueness> {
        self.check_k(k)?;
        Ok(Uniqueness::from_candidates(self.color_classes(k, true, 2)))
    }

    /// Classical notion: proper colorings with at most `k` colors, counted
    /// up to renaming of colors.
    pub fn unique_k_coloring(&self, k: usize) -> Result<Uniqueness> {
        if k == 0 {
            return Err(Error::InvalidK { n: self.n, k });
        }
        Ok(Uniqueness::from_candidates(self.color_classes(k, false, 2)))
    }

    /// True iff no surjective `k`-coloring gives `u` and `v` different
    /// colors. Vacuously true when the graph has no surjective `k`-coloring.
    pub fn k_inseparable(&self, k: usize, u: usize, v: usize) -> Result<bool> {
        let pair = Pair::within(u, v, self.n)?;
        self.check_k(k)?;
        if !self.has_surjective_k_coloring(k)? {
            return Ok(true);
        }
        Ok(!self.with_edge(pair).has_surjective_k_coloring(k)?)
    }

    /// Edge-count bound for uniquely colorable graphs:
    /// `m >= n(k-1) - C(k,2)`. Rejects graphs that are not uniquely
    /// surjectively `k`-colorable and `k >= n`.
    pub fn shaoji_bound_holds(&self, k: usize) -> Result<bool> {
        self.check_k(k)?;
        if k >= self.n {
            return Err(Error::Precondition(format!(
                "requires k < n, got k = {k}, n = {}",
                self.n
            )));
        }
        if !self.unique_surjective_k_coloring(k)?.is_unique() {
            return Err(Error::Precondition(
                "graph is not uniquely surjectively k-colorable".into(),
            ));
        }
        let bound = self.n * (k - 1) - k * (k - 1) / 2;
        Ok(self.edge_count >= bound)
    }

    /// Up to `limit` distinct color-class partitions of proper colorings with
    /// at most `k` colors (exactly `k` when `surjective`).
    pub fn color_classes(&self, k: usize, surjective: bool, limit: usize) -> Vec<Partition> {
        let mut search = Backtrack {
            g: self,
            k,
            surjective,
            limit,
            colors: vec![0; self.n],
            found: Vec::new(),
        };
        if self.n > 0 && limit > 0 {
            search.assign(0, 0);
        }
        search.found
    }
}

struct Backtrack<'a> {
    g: &'a SimpleGraph,
    k: usize,
    surjective: bool,
    limit: usize,
    colors: Vec<usize>,
    found: Vec<Partition>,
}

impl Backtrack<'_> {
    // `used` is the number of colors opened by vertices before `i`.
    fn assign(&mut self, i: usize, used: usize) {
        let n = self.g.n;
        if i == n {
            if !self.surjective || used == self.k {
                self.found.push(Partition::from_labels(&self.colors));
            }
            return;
        }
        if self.surjective && used + (n - i) < self.k {
            return;
        }
        let max_color = (used + 1).min(self.k);
        for c in 0..max_color {
            if (0..i).any(|j| self.colors[j] == c && self.g.has_edge(i, j)) {
                continue;
            }
            self.colors[i] = c;
            self.assign(i + 1, used.max(c + 1));
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for SimpleGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges().into_iter().map(|p| [p.u(), p.v()]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SimpleGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        let edges: Vec<(usize, usize)> = repr.edges.iter().map(|e| (e[0], e[1])).collect();
        SimpleGraph::from_edges(repr.n, &edges).map_err(serde::de::Error::custom)
    }
}
