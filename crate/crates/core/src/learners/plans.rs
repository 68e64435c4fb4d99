//! Non-adaptive query plans: one batch of pairs chosen up front, then a
//! decoder that turns the answers into the partition.
//!
//! Answers are given as one sign per query slot: the plan's entries in order,
//! each repeated as many times as its multiplicity.

use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pair::{num_pairs, Pair, Sign};
use crate::partition::{enumerate_k_partitions, enumerate_partitions, Limits, Partition, Uniqueness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KMode {
    Known(usize),
    Unknown,
}

impl KMode {
    pub fn k(self) -> Option<usize> {
        match self {
            KMode::Known(k) => Some(k),
            KMode::Unknown => None,
        }
    }
}

/// Which decoding routine a plan is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderId {
    /// One cluster, nothing to ask.
    Trivial,
    /// Two clusters; a star centred at 0.
    Star,
    /// Three clusters; everything except a matching across a balanced split.
    K3Matching,
    /// Everything except one pair.
    AllButOne,
    /// Every pair.
    Complete,
    /// Exhaustive search over candidate partitions (small `n` only).
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPlan {
    pub n: usize,
    pub k_mode: KMode,
    /// Distinct pairs with their repetition counts (each at least 1).
    pub queries: Vec<(Pair, u32)>,
    pub decoder: DecoderId,
}

impl QueryPlan {
    pub fn new(n: usize, k_mode: KMode, queries: Vec<(Pair, u32)>, decoder: DecoderId) -> Result<QueryPlan> {
        let mut seen = HashSet::new();
        for &(p, m) in &queries {
            if p.v() >= n {
                return Err(Error::OutOfRange { element: p.v(), n });
            }
            if m == 0 {
                return Err(Error::Precondition(format!("pair {p} has multiplicity 0")));
            }
            if !seen.insert(p) {
                return Err(Error::Precondition(format!("pair {p} listed twice")));
            }
        }
        if let KMode::Known(k) = k_mode {
            if k == 0 || k > n {
                return Err(Error::InvalidK { n, k });
            }
        }
        Ok(QueryPlan {
            n,
            k_mode,
            queries,
            decoder,
        })
    }

    /// Total number of queries, counting repetitions.
    pub fn cost(&self) -> u64 {
        self.queries.iter().map(|&(_, m)| u64::from(m)).sum()
    }

    /// The query slots in answer order.
    pub fn slots(&self) -> Vec<Pair> {
        self.queries
            .iter()
            .flat_map(|&(p, m)| std::iter::repeat_n(p, m as usize))
            .collect()
    }

    /// Pairs that are never asked.
    pub fn unqueried(&self) -> Vec<Pair> {
        let asked: HashSet<Pair> = self.queries.iter().map(|&(p, _)| p).collect();
        Pair::all(self.n).filter(|p| !asked.contains(p)).collect()
    }

    /// Truthful answers for `hidden`, one per slot.
    pub fn answers_for(&self, hidden: &Partition) -> Vec<Sign> {
        self.slots().into_iter().map(|p| hidden.sign_of(p)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PlanRepr {
    n: usize,
    k_mode: KMode,
    queries: Vec<(usize, usize, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decoder: Option<DecoderId>,
}

impl Serialize for QueryPlan {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PlanRepr {
            n: self.n,
            k_mode: self.k_mode,
            queries: self.queries.iter().map(|&(p, m)| (p.u(), p.v(), m)).collect(),
            decoder: Some(self.decoder),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QueryPlan {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = PlanRepr::deserialize(deserializer)?;
        let queries = repr
            .queries
            .iter()
            .map(|&(u, v, m)| Pair::within(u, v, repr.n).map(|p| (p, m)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let decoder = match repr.decoder {
            Some(d) => d,
            None => infer_decoder(repr.n, repr.k_mode, &queries),
        };
        QueryPlan::new(repr.n, repr.k_mode, queries, decoder).map_err(D::Error::custom)
    }
}

// A plan read without a decoder gets the structured one if its pair set is
// exactly what `build_plan` would produce, and exhaustive search otherwise.
fn infer_decoder(n: usize, k_mode: KMode, queries: &[(Pair, u32)]) -> DecoderId {
    let ours: HashSet<Pair> = queries.iter().map(|&(p, _)| p).collect();
    match build_plan(n, k_mode) {
        Ok(plan) if plan.queries.iter().map(|&(p, _)| p).collect::<HashSet<_>>() == ours => plan.decoder,
        _ => DecoderId::Exhaustive,
    }
}

/// The `k = 3, n = 4` plan: the first five-pair set, in lexicographic order
/// of pair combinations, that determines every 3-partition of four items.
/// It leaves out pair (2, 3).
pub const K3_N4_PLAN: [(usize, usize); 5] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)];

/// The cheapest single-round plan for the given setting.
///
/// - one cluster: no queries;
/// - two clusters: a star from element 0 (`n - 1` queries);
/// - three clusters, `n = 4`: [`K3_N4_PLAN`] (5 queries);
/// - three clusters, `n >= 5`: all pairs except `U[i]-L[i]`, where `U` is the
///   first `ceil(n/2)` elements and `L` the rest (`C(n,2) - floor(n/2)`);
/// - four or more clusters: all pairs except `(n-2, n-1)` (`C(n,2) - 1`);
/// - unknown count: all `C(n,2)` pairs.
pub fn build_plan(n: usize, k_mode: KMode) -> Result<QueryPlan> {
    if n < 2 {
        return Err(Error::Precondition(format!("plans need n >= 2, got {n}")));
    }
    let once = |pairs: Vec<Pair>| pairs.into_iter().map(|p| (p, 1)).collect::<Vec<_>>();
    let (pairs, decoder) = match k_mode {
        KMode::Unknown => (Pair::all(n).collect(), DecoderId::Complete),
        KMode::Known(k) if k == 0 || k >= n => return Err(Error::InvalidK { n, k }),
        KMode::Known(1) => (Vec::new(), DecoderId::Trivial),
        KMode::Known(2) => ((1..n).map(|v| Pair::new(0, v)).collect::<Result<_>>()?, DecoderId::Star),
        KMode::Known(3) if n == 4 => (
            K3_N4_PLAN
                .iter()
                .map(|&(u, v)| Pair::new(u, v))
                .collect::<Result<_>>()?,
            DecoderId::AllButOne,
        ),
        KMode::Known(3) => {
            let matching = k3_matching(n);
            (
                Pair::all(n).filter(|p| !matching.contains(p)).collect(),
                DecoderId::K3Matching,
            )
        }
        KMode::Known(_) => {
            let omitted = Pair::new(n - 2, n - 1)?;
            (Pair::all(n).filter(|&p| p != omitted).collect(), DecoderId::AllButOne)
        }
    };
    QueryPlan::new(n, k_mode, once(pairs), decoder)
}

fn split(n: usize) -> usize {
    n.div_ceil(2)
}

fn k3_matching(n: usize) -> Vec<Pair> {
    let upper = split(n);
    (0..n / 2)
        .map(|i| Pair::new(i, upper + i).expect("distinct halves"))
        .collect()
}

/// Multiplies every multiplicity by `2l + 1`.
pub fn robust_plan(plan: &QueryPlan, l: u64) -> Result<QueryPlan> {
    let factor = u32::try_from(2 * l + 1).map_err(|_| Error::Precondition(format!("l = {l} too large")))?;
    let queries = plan
        .queries
        .iter()
        .map(|&(p, m)| {
            m.checked_mul(factor)
                .map(|m| (p, m))
                .ok_or_else(|| Error::Precondition("multiplicity overflow".into()))
        })
        .collect::<Result<_>>()?;
    QueryPlan::new(plan.n, plan.k_mode, queries, plan.decoder)
}

/// Error-free decoding: repeated answers must agree.
pub fn decode_plan(plan: &QueryPlan, answers: &[Sign], limits: &Limits) -> Result<Partition> {
    majority_decode(plan, answers, 0, limits)
}

/// Takes the majority answer on every pair, then runs the plan's decoder.
///
/// Fails with `Infeasible` if no partition is within `l` disagreements of
/// the answers, and with `Ambiguous` if a pair's vote is tied or the
/// decoder cannot single out one partition.
pub fn majority_decode(plan: &QueryPlan, answers: &[Sign], l: u64, limits: &Limits) -> Result<Partition> {
    if answers.len() as u64 != plan.cost() {
        return Err(Error::SizeMismatch {
            expected: plan.cost() as usize,
            got: answers.len(),
        });
    }
    let mut votes = Votes::new(plan.n);
    let mut minority = 0u64;
    let mut slot = 0;
    for &(p, m) in &plan.queries {
        let (mut pos, mut neg) = (0u64, 0u64);
        for a in &answers[slot..slot + m as usize] {
            match a {
                Sign::Pos => pos += 1,
                Sign::Neg => neg += 1,
            }
        }
        slot += m as usize;
        minority += pos.min(neg);
        if pos == neg {
            return Err(Error::Ambiguous(format!("tied vote on {p}")));
        }
        votes.set(p, Sign::from_same(pos > neg));
    }
    // every partition disagrees with at least the minority on each pair
    if minority > l {
        return Err(Error::Infeasible(format!(
            "{minority} answers are outvoted, more than the {l} allowed errors"
        )));
    }
    let result = match plan.decoder {
        DecoderId::Trivial => Partition::single_cluster(plan.n),
        DecoderId::Star => decode_star(&votes),
        DecoderId::K3Matching => decode_k3_matching(&votes)?,
        DecoderId::AllButOne => {
            let omitted = plan.unqueried();
            let [p] = omitted[..] else {
                return Err(Error::Incompatible(format!(
                    "all-but-one decoder needs exactly one unqueried pair, found {}",
                    omitted.len()
                )));
            };
            decode_all_but_one(&votes, p, plan.k_mode.k())?
        }
        DecoderId::Complete => components(&votes, &(0..plan.n).collect::<Vec<_>>()),
        DecoderId::Exhaustive => decode_exhaustive(&votes, plan.k_mode, limits)?,
    };
    if !votes.agrees(&result) || plan.k_mode.k().is_some_and(|k| result.num_clusters() != k) {
        return Err(Error::Infeasible(format!(
            "no partition{} agrees with the answers",
            plan.k_mode.k().map_or(String::new(), |k| format!(" into {k} clusters"))
        )));
    }
    Ok(result)
}

/// Whether the plan recovers every candidate partition despite `l` lies:
/// the answer vectors (with multiplicity) of any two candidates must be more
/// than `2l` apart in Hamming distance.
pub fn plan_decodable(plan: &QueryPlan, k_mode: KMode, l: u64, limits: &Limits) -> Result<bool> {
    limits.check_enumeration(plan.n)?;
    if plan.queries.len() > 128 {
        return Err(Error::OverLimit {
            n: plan.n,
            limit: limits.enumeration,
        });
    }
    let candidates: Vec<Partition> = match k_mode {
        KMode::Known(k) => enumerate_k_partitions(plan.n, k, limits)?.collect(),
        KMode::Unknown => enumerate_partitions(plan.n, limits)?.collect(),
    };
    let masks: Vec<u128> = candidates
        .iter()
        .map(|c| {
            plan.queries
                .iter()
                .enumerate()
                .filter(|(_, (p, _))| c.joins(*p))
                .fold(0u128, |acc, (i, _)| acc | 1 << i)
        })
        .collect();
    if l == 0 {
        let mut seen = HashSet::with_capacity(masks.len());
        return Ok(masks.iter().all(|m| seen.insert(*m)));
    }
    let weights: Vec<u64> = plan.queries.iter().map(|&(_, m)| u64::from(m)).collect();
    let uniform = weights.windows(2).all(|w| w[0] == w[1]);
    let distance = |x: u128| -> u64 {
        if uniform {
            u64::from(x.count_ones()) * weights.first().copied().unwrap_or(0)
        } else {
            let mut d = 0;
            let mut x = x;
            while x != 0 {
                d += weights[x.trailing_zeros() as usize];
                x &= x - 1;
            }
            d
        }
    };
    for (i, a) in masks.iter().enumerate() {
        for b in &masks[i + 1..] {
            if distance(a ^ b) <= 2 * l {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Majority answers per pair; `None` for pairs not in the plan.
struct Votes {
    n: usize,
    signs: Vec<Option<Sign>>,
}

impl Votes {
    fn new(n: usize) -> Votes {
        Votes {
            n,
            signs: vec![None; num_pairs(n)],
        }
    }

    fn set(&mut self, p: Pair, s: Sign) {
        self.signs[p.index(self.n)] = Some(s);
    }

    fn get(&self, a: usize, b: usize) -> Option<Sign> {
        let p = Pair::new(a, b).ok()?;
        self.signs[p.index(self.n)]
    }

    fn is_pos(&self, a: usize, b: usize) -> bool {
        self.get(a, b) == Some(Sign::Pos)
    }

    fn agrees(&self, p: &Partition) -> bool {
        Pair::all(self.n)
            .zip(&self.signs)
            .all(|(pair, s)| s.is_none_or(|s| p.sign_of(pair) == s))
    }
}

// Groups `subset` by the connected components of its positive answers.
// Consistency is checked by the caller's final validation.
fn components(votes: &Votes, subset: &[usize]) -> Partition {
    let mut label = vec![usize::MAX; votes.n];
    let mut next = 0;
    for &s in subset {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = next;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in subset {
                if label[y] == usize::MAX && votes.is_pos(x, y) {
                    label[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    // elements outside `subset` get their own labels so the result is a partition of 0..n
    for l in label.iter_mut().filter(|l| **l == usize::MAX) {
        *l = next;
        next += 1;
    }
    Partition::from_labels(label)
}

fn decode_star(votes: &Votes) -> Partition {
    let labels: Vec<usize> = (0..votes.n)
        .map(|v| usize::from(v != 0 && !votes.is_pos(0, v)))
        .collect();
    Partition::from_labels(labels)
}

// Cluster ids for `subset`, read off the positive components.
fn restrict_labels(votes: &Votes, subset: &[usize]) -> (Vec<Option<usize>>, usize) {
    let p = components(votes, subset);
    let mut ids = vec![None; votes.n];
    let mut remap = std::collections::HashMap::new();
    for &s in subset {
        let next = remap.len();
        ids[s] = Some(*remap.entry(p.label(s)).or_insert(next));
    }
    (ids, remap.len())
}

fn decode_k3_matching(votes: &Votes) -> Result<Partition> {
    let n = votes.n;
    let upper: Vec<usize> = (0..split(n)).collect();
    let lower: Vec<usize> = (split(n)..n).collect();
    let (u_ids, u_count) = restrict_labels(votes, &upper);
    let (l_ids, l_count) = restrict_labels(votes, &lower);
    // Extend from the side whose restriction shows at least two clusters.
    let (ids, count, source, target) = if u_count >= 2 {
        (u_ids, u_count, upper, lower)
    } else if l_count >= 2 {
        (l_ids, l_count, lower, upper)
    } else {
        return Err(Error::Infeasible("both halves show a single cluster".into()));
    };
    if count > 3 {
        return Err(Error::Infeasible(format!("a half shows {count} clusters")));
    }
    let mut label = ids;
    // The target half is fully queried too, so its own clusters are known:
    // placing any member of a target cluster places all of it.
    let (t_ids, t_count) = restrict_labels(votes, &target);
    let mut placed: Vec<Option<usize>> = vec![None; t_count];
    let mut options: Vec<Option<HashSet<usize>>> = vec![None; t_count];
    for &v in &target {
        let t = t_ids[v].expect("target is labelled");
        let (found, untouched) = place(votes, &source, &label, v)?;
        match (found, placed[t]) {
            (Some(c), Some(d)) if c != d => return Err(Error::Infeasible(format!("{v} is placed in two clusters"))),
            (Some(c), _) => placed[t] = Some(c),
            (None, _) => {
                let here: HashSet<usize> = untouched.into_iter().collect();
                options[t] = Some(match options[t].take() {
                    Some(prev) => prev.intersection(&here).copied().collect(),
                    None => here,
                });
            }
        }
    }
    let open: Vec<usize> = (0..t_count).filter(|&t| placed[t].is_none()).collect();
    match (count, &open[..]) {
        (_, []) => {}
        // Case 1: three source clusters leave no target vertex open.
        (3, _) => return Err(Error::Infeasible("a target vertex fits no cluster".into())),
        // Case 2: the source shows clusters 0 and 1 and cluster 2 is new. A
        // target cluster stays open only when all its members answered
        // negatively and met a single source cluster; it is either in the
        // other source cluster or in cluster 2. If cluster 2 already shows up
        // elsewhere in the target, it cannot be this one.
        (_, &[t]) => {
            let elsewhere = placed.contains(&Some(2));
            placed[t] = Some(if elsewhere {
                let choices: Vec<usize> = options[t]
                    .as_ref()
                    .map(|o| o.iter().copied().filter(|&c| c < 2).collect())
                    .unwrap_or_default();
                match choices[..] {
                    [c] => c,
                    _ => return Err(Error::Infeasible("an open target cluster fits no cluster".into())),
                }
            } else {
                2
            });
        }
        _ => return Err(Error::Ambiguous("several target clusters are undetermined".into())),
    }
    for &v in &target {
        label[v] = placed[t_ids[v].expect("target is labelled")];
    }
    Ok(Partition::from_labels(
        label
            .into_iter()
            .map(|l| l.expect("every vertex placed"))
            .collect::<Vec<_>>(),
    ))
}

// Determines v from the source vertices it was compared with: a positive
// answer names the cluster; all-negative answers that touch every source
// cluster but one name the missing one. Otherwise returns the clusters v
// was not compared against.
fn place(votes: &Votes, source: &[usize], label: &[Option<usize>], v: usize) -> Result<(Option<usize>, Vec<usize>)> {
    let asked: Vec<usize> = source.iter().copied().filter(|&s| votes.get(v, s).is_some()).collect();
    let hits: HashSet<usize> = asked
        .iter()
        .filter(|&&s| votes.is_pos(v, s))
        .map(|&s| label[s].expect("source is labelled"))
        .collect();
    if hits.len() > 1 {
        return Err(Error::Infeasible(format!("{v} joins two clusters")));
    }
    if let Some(&c) = hits.iter().next() {
        return Ok((Some(c), Vec::new()));
    }
    let touched: HashSet<usize> = asked.iter().map(|&s| label[s].expect("labelled")).collect();
    let untouched: Vec<usize> = (0..3).filter(|c| !touched.contains(c)).collect();
    Ok(match untouched[..] {
        [c] => (Some(c), untouched),
        _ => (None, untouched),
    })
}

fn decode_all_but_one(votes: &Votes, omitted: Pair, k: Option<usize>) -> Result<Partition> {
    let (a, b) = (omitted.u(), omitted.v());
    let rest: Vec<usize> = (0..votes.n).filter(|&x| x != a && x != b).collect();
    let (mut label, count) = restrict_labels(votes, &rest);
    let matched = |v: usize| -> Result<Option<usize>> {
        let hits: HashSet<usize> = rest
            .iter()
            .filter(|&&w| votes.is_pos(v, w))
            .map(|&w| label[w].expect("labelled"))
            .collect();
        match hits.len() {
            0 => Ok(None),
            1 => Ok(hits.into_iter().next()),
            _ => Err(Error::Infeasible(format!("{v} joins two clusters"))),
        }
    };
    let (ma, mb) = (matched(a)?, matched(b)?);
    let k = k.ok_or_else(|| Error::Incompatible("all-but-one decoding needs k".into()))?;
    let (la, lb) = match (count + 2).checked_sub(k) {
        // k clusters in the rest: both ends join existing clusters
        Some(2) => match (ma, mb) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::Infeasible("an end of the missing pair fits no cluster".into())),
        },
        // k - 1 clusters: exactly one new cluster
        Some(1) => match (ma, mb) {
            (None, None) => (count, count),
            (Some(x), None) => (x, count),
            (None, Some(y)) => (count, y),
            (Some(_), Some(_)) => return Err(Error::Infeasible("no room for the k-th cluster".into())),
        },
        // k - 2 clusters: both ends are singletons
        Some(0) => match (ma, mb) {
            (None, None) => (count, count + 1),
            _ => return Err(Error::Infeasible("too few clusters".into())),
        },
        _ => {
            return Err(Error::Infeasible(format!(
                "{count} clusters among the fully queried elements cannot extend to {k}"
            )))
        }
    };
    label[a] = Some(la);
    label[b] = Some(lb);
    Ok(Partition::from_labels(
        label
            .into_iter()
            .map(|l| l.expect("every vertex placed"))
            .collect::<Vec<_>>(),
    ))
}

fn decode_exhaustive(votes: &Votes, k_mode: KMode, limits: &Limits) -> Result<Partition> {
    let candidates: Box<dyn Iterator<Item = Partition>> = match k_mode {
        KMode::Known(k) => Box::new(enumerate_k_partitions(votes.n, k, limits)?),
        KMode::Unknown => Box::new(enumerate_partitions(votes.n, limits)?),
    };
    match Uniqueness::from_candidates(candidates.filter(|p| votes.agrees(p))) {
        Uniqueness::Unique(p) => Ok(p),
        Uniqueness::None => Err(Error::Infeasible("no partition agrees with the answers".into())),
        Uniqueness::Multiple => Err(Error::Ambiguous("several partitions agree with the answers".into())),
    }
}
