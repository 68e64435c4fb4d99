//! Learners: the adaptive Reyzin–Srivastava family, the repetition wrapper
//! that makes any of them tolerate `l` lies, and non-adaptive query plans.
//!
//! Adaptive learners talk to the oracle through [`Querier`], which accepts a
//! batch of pairs per call. Every call is one adaptive round: all pairs of a
//! batch are fixed before any of their answers is seen.

mod adaptive;
pub mod plans;
mod robust;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::SameClusterOracle;
use crate::pair::{Pair, Sign};
use crate::partition::Partition;

pub use adaptive::{rs_with_order, seeded_order};
pub use plans::{build_plan, decode_plan, majority_decode, plan_decodable, robust_plan, DecoderId, KMode, QueryPlan};
pub use robust::Repeater;

/// One oracle call: `[u, v, answer, round]` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "(usize, usize, Sign, usize)", from = "(usize, usize, Sign, usize)")]
pub struct QueryRecord {
    pub pair: Pair,
    pub answer: Sign,
    pub round: usize,
}

impl From<QueryRecord> for (usize, usize, Sign, usize) {
    fn from(r: QueryRecord) -> Self {
        (r.pair.u(), r.pair.v(), r.answer, r.round)
    }
}

impl From<(usize, usize, Sign, usize)> for QueryRecord {
    fn from((u, v, answer, round): (usize, usize, Sign, usize)) -> Self {
        // Pair::new only fails on u == v, which no transcript we emit contains.
        let pair = Pair::new(u, v).unwrap_or_else(|_| panic!("self-pair ({u}, {u}) in transcript"));
        QueryRecord { pair, answer, round }
    }
}

/// Everything a learner asked and concluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub records: Vec<QueryRecord>,
    pub rounds: usize,
    pub result: Partition,
    /// Comparisons as seen by the base learner (differs from the record
    /// count only under repetition).
    #[serde(default)]
    pub logical_queries: usize,
    /// Answers outvoted by the `l + 1` agreeing ones, summed over the run.
    #[serde(default)]
    pub spurious: u64,
}

impl Transcript {
    pub fn queries(&self) -> usize {
        self.records.len()
    }

    /// Number of records disagreeing with `truth`.
    pub fn disagreements(&self, truth: &Partition) -> usize {
        self.records
            .iter()
            .filter(|r| truth.sign_of(r.pair) != r.answer)
            .count()
    }
}

/// Batched access to an answer source; each call is one adaptive round.
pub trait Querier {
    fn n(&self) -> usize;
    fn ask(&mut self, batch: &[Pair]) -> Result<Vec<Sign>>;
}

/// Forwards queries to an oracle, records them, and enforces a query cap.
pub struct Recorder<'a> {
    oracle: &'a mut dyn SameClusterOracle,
    records: Vec<QueryRecord>,
    rounds: usize,
    cap: Option<usize>,
}

impl<'a> Recorder<'a> {
    pub fn new(oracle: &'a mut dyn SameClusterOracle, cap: Option<usize>) -> Recorder<'a> {
        Recorder {
            oracle,
            records: Vec::new(),
            rounds: 0,
            cap,
        }
    }

    pub fn records(&self) -> &[QueryRecord] {
        &self.records
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn finish(self, result: Partition, logical_queries: usize, spurious: u64) -> Transcript {
        Transcript {
            records: self.records,
            rounds: self.rounds,
            result,
            logical_queries,
            spurious,
        }
    }
}

impl Querier for Recorder<'_> {
    fn n(&self) -> usize {
        self.oracle.n()
    }

    fn ask(&mut self, batch: &[Pair]) -> Result<Vec<Sign>> {
        if let Some(cap) = self.cap {
            if self.records.len() + batch.len() > cap {
                return Err(Error::QueryCapExceeded { cap });
            }
        }
        let round = self.rounds;
        self.rounds += 1;
        let mut out = Vec::with_capacity(batch.len());
        for &pair in batch {
            let answer = self.oracle.answer(pair)?;
            self.records.push(QueryRecord { pair, answer, round });
            out.push(answer);
        }
        Ok(out)
    }
}

/// Counts logical queries for learners that are not wrapped.
struct Counting<'q, Q: Querier + ?Sized> {
    inner: &'q mut Q,
    queries: usize,
}

impl<Q: Querier + ?Sized> Querier for Counting<'_, Q> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn ask(&mut self, batch: &[Pair]) -> Result<Vec<Sign>> {
        self.queries += batch.len();
        self.inner.ask(batch)
    }
}

/// An error-free learning algorithm, optionally wrapped to tolerate `l` lies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "learner", rename_all = "snake_case")]
pub enum Learner {
    Rs,
    RsK {
        k: usize,
    },
    ParallelRs,
    ParallelRsK {
        k: usize,
    },
    RandomizedRs {
        seed: u64,
    },
    RandomizedRsK {
        k: usize,
        seed: u64,
    },
    /// Runs an explicit processing order (a permutation of `0..n`).
    Ordered {
        order: Vec<usize>,
        k: Option<usize>,
    },
    /// Repeats every comparison of `base` until `l + 1` answers agree.
    Robust {
        base: Box<Learner>,
        l: u64,
    },
}

impl Learner {
    /// Number of clusters the learner is told, if any.
    pub fn known_k(&self) -> Option<usize> {
        match self {
            Learner::Rs | Learner::ParallelRs | Learner::RandomizedRs { .. } => None,
            Learner::RsK { k } | Learner::ParallelRsK { k } | Learner::RandomizedRsK { k, .. } => Some(*k),
            Learner::Ordered { k, .. } => *k,
            Learner::Robust { base, .. } => base.known_k(),
        }
    }

    /// Error budget the learner is built to tolerate.
    pub fn tolerance(&self) -> u64 {
        match self {
            Learner::Robust { base, l } => l + base.tolerance(),
            _ => 0,
        }
    }

    /// Runs the learner on an oracle over `0..n`, failing once more than
    /// `cap` queries would be made.
    pub fn run(&self, oracle: &mut dyn SameClusterOracle, cap: Option<usize>) -> Result<Transcript> {
        let mut recorder = Recorder::new(oracle, cap);
        let (result, logical, spurious) = self.drive(&mut recorder)?;
        Ok(recorder.finish(result, logical, spurious))
    }

    // Returns the result, the logical query count and the spurious-answer count.
    fn drive(&self, q: &mut dyn Querier) -> Result<(Partition, usize, u64)> {
        let n = q.n();
        if let Learner::Robust { base, l } = self {
            let mut rep = Repeater::new(q, *l);
            let (result, logical, inner_spurious) = base.drive(&mut rep)?;
            return Ok((result, logical, inner_spurious + rep.spurious()));
        }
        let mut counting = Counting { inner: q, queries: 0 };
        let q = &mut counting;
        let result = match self {
            Learner::Rs => adaptive::rs_with_order(q, &identity(n), None)?,
            Learner::RsK { k } => adaptive::rs_with_order(q, &identity(n), Some(*k))?,
            Learner::ParallelRs => adaptive::parallel(q, None)?,
            Learner::ParallelRsK { k } => adaptive::parallel(q, Some(*k))?,
            Learner::RandomizedRs { seed } => adaptive::rs_with_order(q, &seeded_order(n, *seed), None)?,
            Learner::RandomizedRsK { k, seed } => adaptive::rs_with_order(q, &seeded_order(n, *seed), Some(*k))?,
            Learner::Ordered { order, k } => adaptive::rs_with_order(q, order, *k)?,
            Learner::Robust { .. } => unreachable!("handled above"),
        };
        Ok((result, counting.queries, 0))
    }
}

fn identity(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Wraps `base` so that it tolerates `l` lies.
pub fn robustify(base: Learner, l: u64) -> Learner {
    if l == 0 {
        return base;
    }
    Learner::Robust {
        base: Box::new(base),
        l,
    }
}

pub fn rs(oracle: &mut dyn SameClusterOracle) -> Result<Transcript> {
    Learner::Rs.run(oracle, None)
}

pub fn rs_k(k: usize, oracle: &mut dyn SameClusterOracle) -> Result<Transcript> {
    Learner::RsK { k }.run(oracle, None)
}

pub fn parallel_rs(oracle: &mut dyn SameClusterOracle) -> Result<Transcript> {
    Learner::ParallelRs.run(oracle, None)
}

pub fn parallel_rs_k(k: usize, oracle: &mut dyn SameClusterOracle) -> Result<Transcript> {
    Learner::ParallelRsK { k }.run(oracle, None)
}

pub fn randomized_rs(oracle: &mut dyn SameClusterOracle, seed: u64) -> Result<Transcript> {
    Learner::RandomizedRs { seed }.run(oracle, None)
}

pub fn randomized_rs_k(k: usize, oracle: &mut dyn SameClusterOracle, seed: u64) -> Result<Transcript> {
    Learner::RandomizedRsK { k, seed }.run(oracle, None)
}

pub fn robust_rs(l: u64, oracle: &mut dyn SameClusterOracle) -> Result<Transcript> {
    robustify(Learner::Rs, l).run(oracle, None)
}

pub fn robust_rs_k(k: usize, l: u64, oracle: &mut dyn SameClusterOracle) -> Result<Transcript> {
    robustify(Learner::RsK { k }, l).run(oracle, None)
}
