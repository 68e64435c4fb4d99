//! Exact game value for tiny parameters.
//!
//! A position is summarized by the disagreement count of every candidate
//! `k`-partition, capped at `l + 1` ("dead"). Two instances with the same
//! capped vector are interchangeable for the rest of the game, so this is an
//! exact reduction of the signed instance. Positions are further identified
//! up to relabeling of the ground set before hitting the transposition table.
//!
//! The search is iterative deepening on the question "can the questioner
//! force the end within `d` more queries?", pruned by the chip-weight
//! argument: a candidate at cost `c` with `d` queries left carries weight
//! `sum_{j <= l-c} C(d, j)`, every query splits the total weight between the
//! two answers, and a forced win in `d` needs total weight at most `2^d`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pair::{Pair, Sign};
use crate::partition::{enumerate_k_partitions, Limits, Partition};

use super::GameParams;

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

const MAX_N: usize = 6;
const MAX_L: u64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameValue {
    pub n: usize,
    pub k: usize,
    pub l: u64,
    pub value: u32,
    /// Transposition-table entries created while solving.
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    // value >= lower, value <= upper
    lower: u8,
    upper: u8,
}

struct Solver {
    l: u8,
    num_pairs: usize,
    // joins[p][i]: candidate i puts pair p in one cluster
    joins: Vec<Vec<bool>>,
    // relabel[s][i]: index of candidate i after the s-th vertex permutation
    relabel: Vec<Vec<usize>>,
    // binom[d][j] for d up to the search horizon
    binom: Vec<Vec<u128>>,
    table: HashMap<Box<[u8]>, Bounds>,
    budget: usize,
    scratch: Vec<u8>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

impl Solver {
    fn new(params: GameParams, budget: usize, horizon: usize) -> Result<Solver> {
        let limits = Limits::default();
        let candidates: Vec<Partition> = enumerate_k_partitions(params.n, params.k, &limits)?.collect();
        let index: HashMap<&[usize], usize> = candidates.iter().enumerate().map(|(i, p)| (p.labels(), i)).collect();
        let joins = Pair::all(params.n)
            .map(|pair| candidates.iter().map(|p| p.joins(pair)).collect())
            .collect();
        let relabel = permutations(params.n)
            .into_iter()
            .map(|perm| candidates.iter().map(|p| index[p.permuted(&perm).labels()]).collect())
            .collect();
        let mut binom = vec![vec![0u128; horizon + 2]; horizon + 2];
        for d in 0..binom.len() {
            binom[d][0] = 1;
            for j in 1..=d {
                binom[d][j] = binom[d - 1][j - 1] + if j < d { binom[d - 1][j] } else { 0 };
            }
        }
        let l = params.l as u8;
        Ok(Solver {
            l,
            num_pairs: Pair::all(params.n).count(),
            joins,
            relabel,
            binom,
            table: HashMap::new(),
            budget,
            scratch: vec![0; candidates.len()],
        })
    }

    fn initial(&self) -> Vec<u8> {
        vec![0; self.scratch.len()]
    }

    fn alive(&self, state: &[u8]) -> usize {
        state.iter().filter(|&&c| c <= self.l).count()
    }

    fn weight(&self, state: &[u8], d: usize) -> u128 {
        state
            .iter()
            .filter(|&&c| c <= self.l)
            .map(|&c| {
                let slack = usize::from(self.l - c).min(d);
                self.binom[d][..=slack].iter().sum::<u128>()
            })
            .sum()
    }

    fn child(&self, state: &[u8], pair: usize, answer: Sign) -> Vec<u8> {
        let joins = &self.joins[pair];
        state
            .iter()
            .zip(joins)
            .map(|(&c, &j)| if c <= self.l && j != answer.is_pos() { c + 1 } else { c })
            .collect()
    }

    fn canonical(&mut self, state: &[u8]) -> Box<[u8]> {
        let mut best: Option<Vec<u8>> = None;
        for map in &self.relabel {
            for (i, &j) in map.iter().enumerate() {
                self.scratch[j] = state[i];
            }
            if best.as_ref().is_none_or(|b| self.scratch[..] < b[..]) {
                best = Some(self.scratch.clone());
            }
        }
        best.expect("at least the identity permutation").into_boxed_slice()
    }

    /// Whether the questioner can force the end within `d` queries.
    fn wins_within(&mut self, state: &[u8], d: usize) -> Result<bool> {
        let alive = self.alive(state);
        if alive == 1 {
            return Ok(true);
        }
        debug_assert!(alive > 1, "responder kept the game consistent");
        if d == 0 || self.weight(state, d) > 1u128 << d {
            return Ok(false);
        }
        let key = self.canonical(state);
        let entry = match self.table.get(&key) {
            Some(b) if usize::from(b.upper) <= d => return Ok(true),
            Some(b) if usize::from(b.lower) > d => return Ok(false),
            Some(b) => *b,
            None => {
                if self.table.len() >= self.budget {
                    return Err(Error::BudgetExhausted {
                        lower_bound: 0,
                        budget: self.budget,
                    });
                }
                Bounds {
                    lower: 0,
                    upper: u8::MAX,
                }
            }
        };

        // Moves the responder cannot punish by leaving the position unchanged,
        // ordered so the most even weight split is tried first.
        let cap = 1u128 << (d - 1);
        let mut moves: Vec<(u128, Vec<Vec<u8>>)> = Vec::new();
        for p in 0..self.num_pairs {
            let mut children = Vec::with_capacity(2);
            let mut stalls = false;
            for answer in [Sign::Pos, Sign::Neg] {
                let c = self.child(state, p, answer);
                if self.alive(&c) == 0 {
                    continue;
                }
                if c[..] == state[..] {
                    stalls = true;
                    break;
                }
                children.push(c);
            }
            if stalls {
                continue;
            }
            let heaviest = children.iter().map(|c| self.weight(c, d - 1)).max().unwrap_or(0);
            if heaviest > cap {
                continue;
            }
            children.sort_by_key(|c| std::cmp::Reverse(self.weight(c, d - 1)));
            moves.push((heaviest, children));
        }
        moves.sort_by_key(|(w, _)| *w);

        let mut won = false;
        for (_, children) in &moves {
            let mut all = true;
            for c in children {
                if !self.wins_within(c, d - 1)? {
                    all = false;
                    break;
                }
            }
            if all {
                won = true;
                break;
            }
        }
        let mut updated = entry;
        if won {
            updated.upper = updated.upper.min(d as u8);
        } else {
            updated.lower = updated.lower.max(d as u8 + 1);
        }
        self.table.insert(key, updated);
        Ok(won)
    }
}

/// Minimax length of the game for `(n, k, l)`, searched exactly.
///
/// Supports `n <= 6` and `l <= 3`; in practice the node budget is what
/// bounds the feasible range. On budget exhaustion the error carries the
/// largest depth already refuted as a lower bound on the value.
pub fn exact_game_value(n: usize, k: usize, l: u64, node_budget: usize) -> Result<GameValue> {
    let params = GameParams::new(n, k, l)?;
    if n > MAX_N || l > MAX_L {
        return Err(Error::Precondition(format!(
            "exact game value is limited to n <= {MAX_N}, l <= {MAX_L}"
        )));
    }
    // Repeating every pair of a complete query set (2l + 1) times always ends the game.
    let horizon = (2 * l as usize + 1) * n * (n - 1) / 2 + 1;
    let mut solver = Solver::new(params, node_budget, horizon)?;
    let root = solver.initial();
    if solver.alive(&root) == 1 {
        return Ok(GameValue {
            n,
            k,
            l,
            value: 0,
            nodes: 0,
        });
    }
    let mut d = (0..=horizon)
        .find(|&d| solver.weight(&root, d) <= 1u128 << d)
        .unwrap_or(horizon);
    loop {
        match solver.wins_within(&root, d) {
            Ok(true) => {
                return Ok(GameValue {
                    n,
                    k,
                    l,
                    value: d as u32,
                    nodes: solver.table.len(),
                })
            }
            Ok(false) => d += 1,
            Err(Error::BudgetExhausted { budget, .. }) => {
                return Err(Error::BudgetExhausted {
                    lower_bound: d as u32,
                    budget,
                })
            }
            Err(e) => return Err(e),
        }
        if d > horizon {
            return Err(Error::Precondition(format!("no forced end within {horizon} queries")));
        }
    }
}
