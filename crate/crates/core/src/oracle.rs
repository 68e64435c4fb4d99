//! Same-cluster oracle sessions with an error budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameParams, GameState, Responder};
use crate::pair::{Pair, Sign};
use crate::partition::{Limits, Partition, Uniqueness};

/// Anything that answers same-cluster queries over `0..n`.
pub trait SameClusterOracle {
    fn n(&self) -> usize;
    fn answer(&mut self, pair: Pair) -> Result<Sign>;
}

/// Serializable description of an oracle, as used in experiment configs:
/// `{"oracle":"rucc","l":1}` or
/// `{"oracle":"liar","l":2,"p":0.1,"seed":7,"partition":{...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "oracle", rename_all = "lowercase")]
pub enum OracleSpec {
    Truthful {
        #[serde(default)]
        partition: Option<Partition>,
    },
    Liar {
        l: u64,
        p: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        partition: Option<Partition>,
    },
    Rucc {
        l: u64,
    },
}

impl OracleSpec {
    pub fn budget(&self) -> u64 {
        match self {
            OracleSpec::Truthful { .. } => 0,
            OracleSpec::Liar { l, .. } | OracleSpec::Rucc { l } => *l,
        }
    }

    pub fn hidden(&self) -> Option<&Partition> {
        match self {
            OracleSpec::Truthful { partition } | OracleSpec::Liar { partition, .. } => partition.as_ref(),
            OracleSpec::Rucc { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
enum Strategy {
    Truthful,
    RandomLiar { p: f64, rng: Box<ChaCha8Rng> },
    Rucc { game: Box<GameState>, responder: Responder },
}

/// A stateful answer source. Truthful and liar sessions hold a hidden
/// partition; the adversarial session has none and decides answers online.
#[derive(Debug, Clone)]
pub struct OracleSession {
    n: usize,
    hidden: Option<Partition>,
    budget: u64,
    lies_used: u64,
    strategy: Strategy,
    answers: usize,
}

impl OracleSession {
    pub fn truthful(hidden: Partition) -> OracleSession {
        OracleSession {
            n: hidden.n(),
            hidden: Some(hidden),
            budget: 0,
            lies_used: 0,
            strategy: Strategy::Truthful,
            answers: 0,
        }
    }

    /// Lies with probability `p` on each query while budget remains.
    pub fn random_liar(hidden: Partition, l: u64, p: f64, seed: u64) -> Result<OracleSession> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Precondition(format!("lie probability {p} outside [0, 1]")));
        }
        Ok(OracleSession {
            n: hidden.n(),
            hidden: Some(hidden),
            budget: l,
            lies_used: 0,
            strategy: Strategy::RandomLiar {
                p,
                rng: Box::new(ChaCha8Rng::seed_from_u64(seed)),
            },
            answers: 0,
        })
    }

    /// The game responder acting as an `l`-faulty oracle for `k`-partitions of `0..n`.
    pub fn rucc(n: usize, k: usize, l: u64, limits: &Limits) -> Result<OracleSession> {
        let game = GameState::new(GameParams::new(n, k, l)?, limits)?;
        Ok(OracleSession {
            n,
            hidden: None,
            budget: l,
            lies_used: 0,
            strategy: Strategy::Rucc {
                game: Box::new(game),
                responder: Responder::new(),
            },
            answers: 0,
        })
    }

    /// Builds a session from a spec. `hidden` fills in a missing partition;
    /// `k` is required for the adversary.
    pub fn from_spec(
        spec: &OracleSpec,
        n: usize,
        k: Option<usize>,
        hidden: Option<&Partition>,
        seed: u64,
        limits: &Limits,
    ) -> Result<OracleSession> {
        let pick = |own: &Option<Partition>| -> Result<Partition> {
            let p = own
                .clone()
                .or_else(|| hidden.cloned())
                .ok_or_else(|| Error::Incompatible("oracle needs a hidden partition".into()))?;
            if p.n() != n {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: p.n(),
                });
            }
            Ok(p)
        };
        match spec {
            OracleSpec::Truthful { partition } => Ok(OracleSession::truthful(pick(partition)?)),
            OracleSpec::Liar {
                l,
                p,
                seed: own_seed,
                partition,
            } => OracleSession::random_liar(pick(partition)?, *l, *p, own_seed ^ seed),
            OracleSpec::Rucc { l } => {
                let k =
                    k.ok_or_else(|| Error::Incompatible("the adversarial oracle needs the cluster count k".into()))?;
                OracleSession::rucc(n, k, *l, limits)
            }
        }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn hidden(&self) -> Option<&Partition> {
        self.hidden.as_ref()
    }

    pub fn answers_given(&self) -> usize {
        self.answers
    }

    pub fn game(&self) -> Option<&GameState> {
        match &self.strategy {
            Strategy::Rucc { game, .. } => Some(game),
            _ => None,
        }
    }

    pub fn responder(&self) -> Option<&Responder> {
        match &self.strategy {
            Strategy::Rucc { responder, .. } => Some(responder),
            _ => None,
        }
    }

    /// Lies told so far. For the adversary, the disagreement of the answers
    /// with the cheapest partition still within budget.
    pub fn lies_used(&self) -> u64 {
        match &self.strategy {
            Strategy::Rucc { game, .. } => game.alive().map(|i| game.costs()[i]).min().unwrap_or(u64::MAX),
            _ => self.lies_used,
        }
    }

    /// The partition the answers certify: the hidden one, or the unique
    /// witness of a finished game.
    pub fn truth(&self) -> Option<Partition> {
        match &self.strategy {
            Strategy::Rucc { game, .. } => match game.witness() {
                Uniqueness::Unique(p) => Some(p),
                _ => None,
            },
            _ => self.hidden.clone(),
        }
    }

    pub fn verify_budget(&self) -> bool {
        self.lies_used() <= self.budget
    }
}

impl SameClusterOracle for OracleSession {
    fn n(&self) -> usize {
        self.n
    }

    fn answer(&mut self, pair: Pair) -> Result<Sign> {
        if pair.v() >= self.n {
            return Err(Error::OutOfRange {
                element: pair.v(),
                n: self.n,
            });
        }
        let remaining = self.budget - self.lies_used.min(self.budget);
        let answer = match &mut self.strategy {
            Strategy::Truthful => self
                .hidden
                .as_ref()
                .expect("truthful session has a partition")
                .sign_of(pair),
            Strategy::RandomLiar { p, rng } => {
                let truth = self
                    .hidden
                    .as_ref()
                    .expect("liar session has a partition")
                    .sign_of(pair);
                // draw on every query so the stream does not depend on the budget
                let fire = rng.gen_bool(*p);
                if fire && remaining > 0 {
                    self.lies_used += 1;
                    truth.flip()
                } else {
                    truth
                }
            }
            Strategy::Rucc { game, responder } => {
                let a = responder.answer(game, pair)?;
                game.record(pair, a)?;
                a
            }
        };
        self.answers += 1;
        Ok(answer)
    }
}
