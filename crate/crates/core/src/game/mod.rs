//! The correlation-clustering liar game.
//!
//! A questioner names pairs, a responder answers `+1`/`-1`, and the answers
//! accumulate into a [`SignedInstance`]. The responder must keep the instance
//! `(l, k)`-consistent; the game ends once exactly one `k`-partition is within
//! `l` disagreements of the answers. Its minimax length equals the query
//! complexity of recovering a `k`-partition from an `l`-faulty oracle.

mod minimax;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::SignedInstance;
use crate::pair::{Pair, Sign};
use crate::partition::{enumerate_k_partitions, Limits, Partition, Uniqueness};

pub use minimax::{exact_game_value, GameValue, DEFAULT_NODE_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameParams {
    pub n: usize,
    pub k: usize,
    pub l: u64,
}

impl GameParams {
    pub fn new(n: usize, k: usize, l: u64) -> Result<GameParams> {
        if k == 0 || k > n {
            return Err(Error::InvalidK { n, k });
        }
        Ok(GameParams { n, k, l })
    }
}

/// A position of the game: the recorded answers plus the running cost of
/// every candidate `k`-partition.
#[derive(Debug, Clone)]
pub struct GameState {
    params: GameParams,
    instance: SignedInstance,
    candidates: Arc<Vec<Partition>>,
    costs: Vec<u64>,
    history: Vec<(Pair, Sign)>,
}

impl GameState {
    pub fn new(params: GameParams, limits: &Limits) -> Result<GameState> {
        let candidates: Vec<Partition> = enumerate_k_partitions(params.n, params.k, limits)?.collect();
        let costs = vec![0; candidates.len()];
        Ok(GameState {
            params,
            instance: SignedInstance::new(params.n),
            candidates: Arc::new(candidates),
            costs,
            history: Vec::new(),
        })
    }

    pub fn params(&self) -> GameParams {
        self.params
    }

    pub fn instance(&self) -> &SignedInstance {
        &self.instance
    }

    pub fn history(&self) -> &[(Pair, Sign)] {
        &self.history
    }

    pub fn queries(&self) -> usize {
        self.history.len()
    }

    /// All `k`-partitions, in canonical enumeration order.
    pub fn candidates(&self) -> &[Partition] {
        &self.candidates
    }

    /// Current disagreement of each candidate with the instance.
    pub fn costs(&self) -> &[u64] {
        &self.costs
    }

    fn alive_after(&self, pair: Pair, answer: Sign) -> impl Iterator<Item = usize> + '_ {
        let l = self.params.l;
        self.candidates
            .iter()
            .zip(&self.costs)
            .enumerate()
            .filter(move |(_, (p, &c))| c + u64::from(p.sign_of(pair) != answer) <= l)
            .map(|(i, _)| i)
    }

    pub fn alive(&self) -> impl Iterator<Item = usize> + '_ {
        let l = self.params.l;
        self.costs
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c <= l)
            .map(|(i, _)| i)
    }

    pub fn is_consistent(&self) -> bool {
        self.alive().next().is_some()
    }

    pub fn witness(&self) -> Uniqueness {
        Uniqueness::from_candidates(self.alive().map(|i| self.candidates[i].clone()))
    }

    /// The game is over once exactly one candidate is within budget.
    pub fn is_terminal(&self) -> bool {
        let mut alive = self.alive();
        alive.next().is_some() && alive.next().is_none()
    }

    /// Whether recording `answer` on `pair` keeps the instance consistent.
    pub fn admits(&self, pair: Pair, answer: Sign) -> bool {
        self.alive_after(pair, answer).next().is_some()
    }

    /// Whether recording `answer` on `pair` would end the game.
    pub fn would_terminate(&self, pair: Pair, answer: Sign) -> bool {
        let mut alive = self.alive_after(pair, answer);
        alive.next().is_some() && alive.next().is_none()
    }

    /// Records a response. Answers that would leave no candidate within
    /// budget are rejected: the responder may not make the game inconsistent.
    pub fn record(&mut self, pair: Pair, answer: Sign) -> Result<()> {
        if pair.v() >= self.params.n {
            return Err(Error::OutOfRange {
                element: pair.v(),
                n: self.params.n,
            });
        }
        if !self.admits(pair, answer) {
            return Err(Error::Precondition(format!(
                "answer {answer} on {pair} leaves no k-partition within {} disagreements",
                self.params.l
            )));
        }
        self.instance.record(pair, answer)?;
        for (p, c) in self.candidates.iter().zip(self.costs.iter_mut()) {
            if p.sign_of(pair) != answer {
                *c += 1;
            }
        }
        self.history.push((pair, answer));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResponderMode {
    Base,
    Endgame,
}

/// Adversarial responder: answers `-1` whenever the pair can still be split
/// by a surjective `k`-coloring of the negative answers, and `+1` otherwise.
/// One answer before that strategy would end the game, it commits to the
/// runner-up partition and answers according to it from then on.
#[derive(Debug, Clone)]
pub struct Responder {
    mode: ResponderMode,
    committed: Option<Partition>,
}

impl Default for Responder {
    fn default() -> Self {
        Responder::new()
    }
}

impl Responder {
    pub fn new() -> Responder {
        Responder {
            mode: ResponderMode::Base,
            committed: None,
        }
    }

    pub fn mode(&self) -> ResponderMode {
        self.mode
    }

    pub fn committed(&self) -> Option<&Partition> {
        self.committed.as_ref()
    }

    /// The strategy's answer before any endgame consideration.
    pub fn base_answer(game: &GameState, pair: Pair) -> Result<Sign> {
        let negatives = game.instance().negative_support();
        let inseparable = negatives.k_inseparable(game.params().k, pair.u(), pair.v())?;
        Ok(Sign::from_same(inseparable))
    }

    /// Chooses the answer for `pair` without recording it.
    ///
    /// Once the game is already over the answer follows the unique witness,
    /// so the responder stays usable as an oracle for learners that keep
    /// querying past the end of the game.
    pub fn answer(&mut self, game: &GameState, pair: Pair) -> Result<Sign> {
        if let Some(c1) = &self.committed {
            return Ok(c1.sign_of(pair));
        }
        if let Uniqueness::Unique(w) = game.witness() {
            return Ok(w.sign_of(pair));
        }
        let base = Responder::base_answer(game, pair)?;
        if !game.admits(pair, base) {
            return Err(Error::Precondition(format!(
                "no consistent answer for {pair}; base strategy invariant broken"
            )));
        }
        if game.params().l >= 1 && game.would_terminate(pair, base) {
            if let Some(c1) = Responder::runner_up(game, pair, base) {
                let answer = c1.sign_of(pair);
                self.mode = ResponderMode::Endgame;
                self.committed = Some(c1);
                return Ok(answer);
            }
        }
        Ok(base)
    }

    // Among the candidates within budget other than the one the base answer
    // would leave standing, the costliest one (first in canonical order).
    fn runner_up(game: &GameState, pair: Pair, base: Sign) -> Option<Partition> {
        let survivor = game.alive_after(pair, base).next()?;
        let l = game.params().l;
        let mut best: Option<(u64, usize)> = None;
        for (i, &c) in game.costs().iter().enumerate() {
            if i == survivor || c > l {
                continue;
            }
            if best.is_none_or(|(bc, _)| c > bc) {
                best = Some((c, i));
            }
        }
        best.map(|(_, i)| game.candidates()[i].clone())
    }
}
