//! The error-free adaptive learners.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pair::{Pair, Sign};
use crate::partition::Partition;

use super::Querier;

/// A uniformly random permutation of `0..n` determined by `seed`.
pub fn seeded_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Processes vertices in `order`, comparing each against one representative
/// (the first member) of every cluster found so far. With `k` known, at most
/// `k - 1` clusters are tried and a vertex that fits none of them joins the
/// `k`-th cluster once it exists.
pub fn rs_with_order(q: &mut dyn Querier, order: &[usize], k: Option<usize>) -> Result<Partition> {
    let n = q.n();
    check_order(order, n)?;
    if let Some(k) = k {
        if k == 0 || k > n.max(1) {
            return Err(Error::InvalidK { n, k });
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &v in order {
        let tries = match k {
            Some(k) => clusters.len().min(k - 1),
            None => clusters.len(),
        };
        let mut placed = false;
        for cluster in clusters.iter_mut().take(tries) {
            let w = cluster[0];
            let pair = Pair::new(v, w)?;
            if q.ask(&[pair])?[0] == Sign::Pos {
                cluster.push(v);
                placed = true;
                break;
            }
        }
        if !placed {
            match k {
                Some(k) if clusters.len() >= k => clusters.last_mut().expect("k >= 1").push(v),
                _ => clusters.push(vec![v]),
            }
        }
    }
    Partition::from_clusters(n, &clusters)
}

/// Each round fixes the smallest unassigned vertex and compares it with every
/// other unassigned vertex at once. With `k` known, stops after `k - 1`
/// rounds and puts the remainder in the last cluster.
///
/// Every iteration counts as a round, including a final one that has a lone
/// vertex left and therefore sends no query.
pub(super) fn parallel(q: &mut dyn Querier, k: Option<usize>) -> Result<Partition> {
    let n = q.n();
    if let Some(k) = k {
        if k == 0 || k > n.max(1) {
            return Err(Error::InvalidK { n, k });
        }
    }
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let max_rounds = k.map_or(usize::MAX, |k| k - 1);
    while !remaining.is_empty() && clusters.len() < max_rounds {
        let v = remaining[0];
        let others = &remaining[1..];
        let batch: Vec<Pair> = others.iter().map(|&u| Pair::new(u, v)).collect::<Result<_>>()?;
        // a lone vertex still takes its (empty) round
        let answers = q.ask(&batch)?;
        let mut cluster = vec![v];
        let mut rest = Vec::new();
        for (&u, a) in others.iter().zip(&answers) {
            if a.is_pos() {
                cluster.push(u);
            } else {
                rest.push(u);
            }
        }
        clusters.push(cluster);
        remaining = rest;
    }
    if !remaining.is_empty() {
        clusters.push(remaining);
    }
    Partition::from_clusters(n, &clusters)
}

fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &x in order {
        if x >= n {
            return Err(Error::OutOfRange { element: x, n });
        }
        if std::mem::replace(&mut seen[x], true) {
            return Err(Error::Precondition(format!("order repeats element {x}")));
        }
    }
    if order.len() != n {
        return Err(Error::SizeMismatch {
            expected: n,
            got: order.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use crate::bounds::binom;
    use crate::oracle::OracleSession;
    use crate::partition::{enumerate_partitions, Limits};

    fn truthful(p: &Partition) -> OracleSession {
        OracleSession::truthful(p.clone())
    }

    fn adversary(n: usize, k: usize) -> OracleSession {
        OracleSession::rucc(n, k, 0, &Limits::default()).unwrap()
    }

    #[test]
    fn rs_on_singletons_asks_every_earlier_cluster() {
        let t = rs(&mut truthful(&Partition::singletons(3))).unwrap();
        assert_eq!(t.queries(), 3);
        assert_eq!(t.result, Partition::singletons(3));
    }

    #[test]
    fn all_learners_recover_every_partition_of_six() {
        let lim = Limits::default();
        for hidden in enumerate_partitions(6, &lim).unwrap() {
            let k = hidden.num_clusters();
            let learners = [
                Learner::Rs,
                Learner::RsK { k },
                Learner::ParallelRs,
                Learner::ParallelRsK { k },
                Learner::RandomizedRs { seed: 3 },
                Learner::RandomizedRsK { k, seed: 4 },
            ];
            for l in learners {
                let t = l.run(&mut truthful(&hidden), None).unwrap();
                assert_eq!(t.result, hidden, "{l:?}");
                assert_eq!(t.disagreements(&hidden), 0);
                assert!(t.queries() <= 6 * k - binom(k + 1, 2));
                if l.known_k().is_some() {
                    assert!(t.queries() <= 6 * (k - 1) - binom(k, 2));
                }
            }
            assert!(parallel_rs(&mut truthful(&hidden)).unwrap().rounds == k);
            assert!(parallel_rs_k(k, &mut truthful(&hidden)).unwrap().rounds <= k.saturating_sub(1));
        }
    }

    #[test]
    fn worst_cases_against_the_adversary() {
        let t = rs_k(3, &mut adversary(6, 3)).unwrap();
        assert_eq!(t.queries(), 9);
        let t = rs(&mut adversary(6, 3)).unwrap();
        assert_eq!(t.result.num_clusters(), 3);
        assert_eq!(t.queries(), 6 * 3 - binom(4, 2));
        // k unknown: the adversary for k = 4 reveals four clusters.
        let t = rs(&mut adversary(6, 4)).unwrap();
        assert_eq!(t.result.num_clusters(), 4);
        assert_eq!(t.queries(), 6 * 4 - binom(5, 2));
    }

    #[test]
    fn parallel_k2_is_a_star() {
        let hidden = Partition::from_clusters(5, &[vec![0, 3], vec![1, 2, 4]]).unwrap();
        let t = parallel_rs_k(2, &mut truthful(&hidden)).unwrap();
        assert_eq!(t.rounds, 1);
        assert_eq!(t.queries(), 4);
        assert!(t.records.iter().all(|r| r.pair.contains(0)));
        assert_eq!(t.result, hidden);
    }

    #[test]
    fn parallel_worst_case_singletons() {
        let t = parallel_rs(&mut truthful(&Partition::singletons(5))).unwrap();
        assert_eq!(t.queries(), 4 + 3 + 2 + 1);
        assert_eq!(t.queries(), 5 * 5 - binom(6, 2));
        assert_eq!(t.rounds, 5);
    }

    #[test]
    fn randomized_is_a_seeded_permutation() {
        assert_eq!(seeded_order(7, 1), seeded_order(7, 1));
        let mut o = seeded_order(7, 2);
        o.sort();
        assert_eq!(o, (0..7).collect::<Vec<_>>());
        let hidden = Partition::from_sizes(&[3, 2, 2]).unwrap();
        let a = randomized_rs(&mut truthful(&hidden), 5).unwrap();
        let b = Learner::Ordered {
            order: seeded_order(7, 5),
            k: None,
        }
        .run(&mut truthful(&hidden), None)
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_orders_and_k() {
        let hidden = Partition::singletons(3);
        let bad = Learner::Ordered {
            order: vec![0, 0, 1],
            k: None,
        };
        assert!(bad.run(&mut truthful(&hidden), None).is_err());
        assert!(rs_k(0, &mut truthful(&hidden)).is_err());
    }
}
