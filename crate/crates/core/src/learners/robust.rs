//! Repetition until `l + 1` answers agree.

use crate::error::Result;
use crate::pair::{Pair, Sign};

use super::Querier;

/// Turns an `l`-faulty answer source into an error-free one for the learner
/// above it. Each logical query is repeated until one sign has been received
/// `l + 1` times; since at most `l` answers are wrong, that sign is right.
///
/// A batch is resolved in waves: every wave asks each still-undecided pair
/// once, in one round. A one-pair batch is therefore plain repetition.
pub struct Repeater<'q> {
    inner: &'q mut dyn Querier,
    l: u64,
    spurious: u64,
}

impl<'q> Repeater<'q> {
    pub fn new(inner: &'q mut dyn Querier, l: u64) -> Repeater<'q> {
        Repeater { inner, l, spurious: 0 }
    }

    /// Answers outvoted so far. Each is an oracle error, so this never
    /// exceeds the oracle's budget.
    pub fn spurious(&self) -> u64 {
        self.spurious
    }
}

impl Querier for Repeater<'_> {
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn ask(&mut self, batch: &[Pair]) -> Result<Vec<Sign>> {
        if batch.is_empty() {
            return self.inner.ask(batch);
        }
        let mut counts = vec![(0u64, 0u64); batch.len()];
        let mut decided: Vec<Option<Sign>> = vec![None; batch.len()];
        loop {
            let open: Vec<usize> = (0..batch.len()).filter(|&i| decided[i].is_none()).collect();
            if open.is_empty() {
                break;
            }
            let wave: Vec<Pair> = open.iter().map(|&i| batch[i]).collect();
            for (&i, a) in open.iter().zip(self.inner.ask(&wave)?) {
                let (pos, neg) = &mut counts[i];
                match a {
                    Sign::Pos => *pos += 1,
                    Sign::Neg => *neg += 1,
                }
                if *pos > self.l {
                    decided[i] = Some(Sign::Pos);
                    self.spurious += *neg;
                } else if *neg > self.l {
                    decided[i] = Some(Sign::Neg);
                    self.spurious += *pos;
                }
            }
        }
        Ok(decided
            .into_iter()
            .map(|d| d.expect("loop ends when all are decided"))
            .collect())
    }
}
