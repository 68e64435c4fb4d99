//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every expected value is recomputed here from its closed form or by brute
//! force, independently of the library routine under test. A criterion
//! whose statement is false for some cells is reported as FAIL with those
//! cells listed; the process exits non-zero only if a failure falls outside
//! that documented set (see `KNOWN_UNATTAINABLE`).

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use faulty_partition::bounds::{
    adaptive_lower_bound, binary_entropy, hamming_volume, info_lower_known, info_lower_unknown,
};
use faulty_partition::coloring::SimpleGraph;
use faulty_partition::game::{exact_game_value, DEFAULT_NODE_BUDGET};
use faulty_partition::harness::{self, ExperimentConfig, OutputFormat};
use faulty_partition::learners::{
    build_plan, decode_plan, majority_decode, plan_decodable, robust_plan, robustify, seeded_order, DecoderId, KMode,
    Learner, QueryPlan,
};
use faulty_partition::oracle::{OracleSession, OracleSpec, SameClusterOracle};
use faulty_partition::partition::{bell, enumerate_k_partitions, enumerate_partitions, stirling2};
use faulty_partition::{Limits, Pair, Partition, Sign, Uniqueness};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

/// Criteria whose statement includes cells where it cannot hold, with the
/// reason. Only failures confined to these cells are tolerated.
const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[
    (
        4,
        "k = 1, l >= 1: a single candidate is known without queries, yet the bound is positive",
    ),
    (
        5,
        "k = 1, l >= 1: a single candidate is known without queries, yet the bound is positive",
    ),
];

struct Outcome {
    pass: bool,
    detail: String,
    /// Failing cells that lie outside the documented exceptions.
    unexpected: Vec<String>,
}

impl Outcome {
    fn exact(failures: Vec<String>, summary: String) -> Outcome {
        Outcome {
            pass: failures.is_empty(),
            detail: if failures.is_empty() {
                summary
            } else {
                format!("{summary}; failing: {}", preview(&failures))
            },
            unexpected: failures,
        }
    }
}

fn preview(cells: &[String]) -> String {
    let shown: Vec<&str> = cells.iter().take(6).map(String::as_str).collect();
    if cells.len() > shown.len() {
        format!("{} (+{} more)", shown.join(", "), cells.len() - shown.len())
    } else {
        shown.join(", ")
    }
}

fn lim() -> Limits {
    Limits::default()
}

fn choose(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `ceil(n(k-1) - C(k,2) + max((l-1)n/2 + k/2, 0) + l)` in integers.
fn lower_ceiling(n: usize, k: usize, l: u64) -> u64 {
    let (n, k, l) = (n as i64, k as i64, l as i64);
    let twice = 2 * (n * (k - 1) - k * (k - 1) / 2) + ((l - 1) * n + k).max(0) + 2 * l;
    ((twice + 1) / 2) as u64
}

fn repetition_known(n: usize, k: usize, l: u64) -> u64 {
    (l + 1) * (n * (k - 1) - choose(k, 2)) as u64 + l
}

fn repetition_unknown(n: usize, k: usize, l: u64) -> u64 {
    (l + 1) * (n * k - choose(k + 1, 2)) as u64 + l
}

fn sign(p: &Partition, u: usize, v: usize) -> Sign {
    if p.label(u) == p.label(v) {
        Sign::Pos
    } else {
        Sign::Neg
    }
}

fn slot_answers(plan: &QueryPlan, hidden: &Partition) -> Vec<Sign> {
    plan.queries
        .iter()
        .flat_map(|&(pair, m)| std::iter::repeat_n(sign(hidden, pair.u(), pair.v()), m as usize))
        .collect()
}

fn hidden_set(n: usize, mode: KMode) -> Vec<Partition> {
    match mode {
        KMode::Known(k) => enumerate_k_partitions(n, k, &lim()).unwrap().collect(),
        KMode::Unknown => enumerate_partitions(n, &lim()).unwrap().collect(),
    }
}

fn modes(n: usize) -> Vec<KMode> {
    (1..n).map(KMode::Known).chain([KMode::Unknown]).collect()
}

// 1. Error-free adaptive optima against the adversary.
fn criterion_1() -> Outcome {
    let mut failures = Vec::new();
    let mut slowest = 0f64;
    let mut cells = 0;
    for n in 3..=7 {
        for k in 2..n {
            let start = Instant::now();
            let mut o = OracleSession::rucc(n, k, 0, &lim()).unwrap();
            let known = Learner::RsK { k }.run(&mut o, None).unwrap();
            let known_ok = known.queries() == n * (k - 1) - choose(k, 2) && o.truth() == Some(known.result.clone());
            let mut o = OracleSession::rucc(n, k, 0, &lim()).unwrap();
            let unknown = Learner::Rs.run(&mut o, None).unwrap();
            let unknown_ok = unknown.queries() == n * k - choose(k + 1, 2) && o.truth() == Some(unknown.result.clone());
            let secs = start.elapsed().as_secs_f64();
            slowest = slowest.max(secs);
            cells += 1;
            if !known_ok || !unknown_ok || secs >= 1.0 {
                failures.push(format!(
                    "(n={n},k={k}): {} / {} in {secs:.2}s",
                    known.queries(),
                    unknown.queries()
                ));
            }
        }
    }
    Outcome::exact(failures, format!("{cells} cells exact, slowest {slowest:.3}s"))
}

// 2. Non-adaptive plan sizes, decodability and exhaustive decoding.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut decoded = 0;
    for n in 2..=7 {
        for mode in modes(n) {
            let plan = build_plan(n, mode).unwrap();
            let pairs = choose(n, 2);
            let expected = match mode {
                KMode::Known(1) => 0,
                KMode::Known(2) => n - 1,
                KMode::Known(3) if n == 4 => 5,
                KMode::Known(3) => pairs - n / 2,
                KMode::Known(_) => pairs - 1,
                KMode::Unknown => pairs,
            };
            if plan.cost() as usize != expected {
                failures.push(format!("n={n} {mode:?}: {} queries, expected {expected}", plan.cost()));
            }
            if !plan_decodable(&plan, mode, 0, &lim()).unwrap() {
                failures.push(format!("n={n} {mode:?}: not decodable"));
            }
            for hidden in hidden_set(n, mode) {
                decoded += 1;
                match decode_plan(&plan, &slot_answers(&plan, &hidden), &lim()) {
                    Ok(p) if p == hidden => {}
                    other => failures.push(format!("n={n} {mode:?} {hidden}: {other:?}")),
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 30.0 {
        failures.push(format!("took {secs:.1}s"));
    }
    Outcome::exact(failures, format!("n <= 7, {decoded} decodes, {secs:.2}s"))
}

// Whether two candidates agree on every pair of `pairs`.
fn some_pair_confused(pairs: &[Pair], candidates: &[Partition]) -> bool {
    let mut seen = HashSet::new();
    candidates.iter().any(|c| {
        let key: Vec<bool> = pairs.iter().map(|p| sign(c, p.u(), p.v()).is_pos()).collect();
        !seen.insert(key)
    })
}

// 3. Minimality: no smaller plan works.
fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let all: Vec<Pair> = Pair::all(5).collect();
    let mut checked = 0;
    for (k, size) in [(3usize, 7usize), (4, 8)] {
        let candidates = hidden_set(5, KMode::Known(k));
        let mut subset_count = 0;
        for mask in 0u32..(1 << all.len()) {
            if mask.count_ones() as usize != size {
                continue;
            }
            subset_count += 1;
            let pairs: Vec<Pair> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
            let plan = QueryPlan::new(
                5,
                KMode::Known(k),
                pairs.iter().map(|&p| (p, 1)).collect(),
                DecoderId::Exhaustive,
            )
            .unwrap();
            let confused = some_pair_confused(&pairs, &candidates);
            let decodable = plan_decodable(&plan, KMode::Known(k), 0, &lim()).unwrap();
            if !confused || decodable {
                failures.push(format!("n=5 k={k} {pairs:?}"));
            }
        }
        if subset_count != choose(10, size) {
            failures.push(format!("k={k}: {subset_count} subsets"));
        }
        checked += subset_count;
    }
    for n in 2..=6 {
        let candidates = hidden_set(n, KMode::Unknown);
        let all: Vec<Pair> = Pair::all(n).collect();
        for skip in 0..all.len() {
            let pairs: Vec<Pair> = all
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &p)| p)
                .collect();
            let plan = QueryPlan::new(
                n,
                KMode::Unknown,
                pairs.iter().map(|&p| (p, 1)).collect(),
                DecoderId::Exhaustive,
            )
            .unwrap();
            checked += 1;
            if !some_pair_confused(&pairs, &candidates) || plan_decodable(&plan, KMode::Unknown, 0, &lim()).unwrap() {
                failures.push(format!("unknown k, n={n} without {:?}", all[skip]));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 120.0 {
        failures.push(format!("took {secs:.1}s"));
    }
    Outcome::exact(failures, format!("{checked} smaller plans all fail, {secs:.2}s"))
}

fn split_known(failures: Vec<String>, cells: Vec<(usize, usize, u64)>, summary: String) -> Outcome {
    // failures and cells are parallel: cells[i] is the (n,k,l) of failures[i]
    let unexpected: Vec<String> = failures
        .iter()
        .zip(&cells)
        .filter(|(_, &(_, k, l))| !(k == 1 && l >= 1))
        .map(|(f, _)| f.clone())
        .collect();
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            summary
        } else {
            format!("{summary}; {} cells violate: {}", failures.len(), preview(&failures))
        },
        unexpected,
    }
}

// 4. Exact game values between the lower bound and the repetition bound.
fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (mut failures, mut cells) = (Vec::new(), Vec::new());
    let mut count = 0;
    for n in 2..=5 {
        for k in 1..n {
            for l in 0..=2 {
                let v = exact_game_value(n, k, l, DEFAULT_NODE_BUDGET).unwrap().value as u64;
                let (lo, hi) = (lower_ceiling(n, k, l), repetition_known(n, k, l));
                assert_eq!(lo, adaptive_lower_bound(n, k, l).unwrap().ceiling);
                count += 1;
                if v < lo || v > hi {
                    failures.push(format!("(n={n},k={k},l={l}) value {v} not in [{lo},{hi}]"));
                    cells.push((n, k, l));
                }
            }
        }
    }
    for (n, expected) in [(3, 2), (4, 3)] {
        let v = exact_game_value(n, 2, 0, DEFAULT_NODE_BUDGET).unwrap().value as u64;
        if v != expected || v != lower_ceiling(n, 2, 0) {
            failures.push(format!("(n={n},k=2,l=0) value {v}, expected {expected}"));
            cells.push((n, 2, 0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    split_known(
        failures,
        cells,
        format!("{count} cells, every k >= 2 cell inside, {secs:.1}s"),
    )
}

// 5. The adversary forces at least the lower bound on the robust learner.
fn criterion_5() -> Outcome {
    let (mut failures, mut cells) = (Vec::new(), Vec::new());
    let mut count = 0;
    for n in 2..=6 {
        for k in 1..n {
            for l in 0..=2 {
                let mut o = OracleSession::rucc(n, k, l, &lim()).unwrap();
                let t = harness::run_game(&robustify(Learner::RsK { k }, l), &mut o, None).unwrap();
                let lo = lower_ceiling(n, k, l);
                count += 1;
                if (t.queries() as u64) < lo || o.truth() != Some(t.result.clone()) {
                    failures.push(format!("(n={n},k={k},l={l}) {} < {lo}", t.queries()));
                    cells.push((n, k, l));
                }
            }
        }
    }
    split_known(
        failures,
        cells,
        format!("{count} cells, every k >= 2 cell at or above the bound"),
    )
}

// 6. Robust learners against random liars: always right, never above the ceilings.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut cells = Vec::new();
    for n in 2..=8usize {
        for k in 1..=n.min(4) {
            for l in 0..=3u64 {
                cells.push((n, k, l));
            }
        }
    }
    let failures: Vec<String> = cells
        .par_iter()
        .flat_map_iter(|&(n, k, l)| {
            let mut out = Vec::new();
            for (learner, ceiling) in [
                (robustify(Learner::RsK { k }, l), repetition_known(n, k, l)),
                (robustify(Learner::Rs, l), repetition_unknown(n, k, l)),
            ] {
                // half the runs lie at random, half lie at the first chance
                for (p, trials) in [(0.3, 5000), (1.0, 5000)] {
                    let config = ExperimentConfig {
                        learner: learner.clone(),
                        oracle: OracleSpec::Liar {
                            l,
                            p,
                            seed: 0,
                            partition: None,
                        },
                        n,
                        k,
                        trials,
                        seed: (n * 1000 + k * 100 + l as usize) as u64,
                        hidden: None,
                        cap: None,
                        format: OutputFormat::Json,
                    };
                    let r = harness::simulate(&config, &lim()).unwrap();
                    if !r.summary.all_correct || r.summary.max_queries as u64 > ceiling {
                        out.push(format!(
                            "(n={n},k={k},l={l},p={p}) {:?}: max {} > {ceiling} or wrong",
                            learner.known_k(),
                            r.summary.max_queries
                        ));
                    }
                }
            }
            out
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    Outcome::exact(
        failures,
        format!("{} cells x 2 learners x 10^4 runs, {secs:.1}s", cells.len()),
    )
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn expected_formula(sizes: &[usize]) -> BigRational {
    let n: usize = sizes.iter().sum();
    let mut total = BigRational::from_integer(BigInt::from(n - sizes.len()));
    for (a, &x) in sizes.iter().enumerate() {
        for (b, &y) in sizes.iter().enumerate() {
            if a != b {
                total += BigRational::new(BigInt::from(x * y), BigInt::from(x + y));
            }
        }
    }
    total
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..n)
                    .filter(|x| !p.contains(x))
                    .map(|x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

// 7. Expected queries of the randomized learner.
fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut comps = 0;
    for n in 1..=8 {
        let results: Vec<(Vec<usize>, BigRational)> = compositions(n)
            .into_par_iter()
            .map(|sizes| {
                let hidden = Partition::from_sizes(&sizes).unwrap();
                let e = harness::exact_expected_queries(&Learner::RandomizedRs { seed: 0 }, &hidden, &lim()).unwrap();
                (sizes, e)
            })
            .collect();
        for (sizes, e) in results {
            comps += 1;
            if e != expected_formula(&sizes) {
                failures.push(format!("{sizes:?}: {e} != {}", expected_formula(&sizes)));
            }
        }
    }

    let r = harness::monte_carlo_expected(
        &Learner::RandomizedRs { seed: 0 },
        &[4, 4, 4],
        None,
        100_000,
        2024,
        &lim(),
    )
    .unwrap();
    let target = expected_formula(&[4, 4, 4]).to_f64().unwrap();
    let (mean, se) = (r.mean.unwrap(), r.stderr.unwrap());
    if (mean - target).abs() > 3.0 * se {
        failures.push(format!("(4,4,4): mean {mean:.4} vs {target:.4}, stderr {se:.4}"));
    }

    // With repetition: a liar that spends its whole budget at once makes the
    // expectation over all orders exactly (l+1) E[Q] + l; random liars may
    // not exceed (l+1) Q + l on any single run.
    let mut robust_runs = 0;
    for n in 2..=6 {
        let orders = permutations(n);
        for sizes in compositions(n) {
            let k = sizes.len();
            let hidden = Partition::from_sizes(&sizes).unwrap();
            for l in 1..=3u64 {
                let bound =
                    BigRational::new(BigInt::from(n * (k + 1)), BigInt::from(2)) - BigRational::from_integer(k.into());
                let bound = bound * BigRational::from_integer((l + 1).into()) + BigRational::from_integer(l.into());
                let mut total = 0u64;
                for order in &orders {
                    let base = Learner::Ordered {
                        order: order.clone(),
                        k: None,
                    };
                    let q_base = base
                        .run(&mut OracleSession::truthful(hidden.clone()), None)
                        .unwrap()
                        .queries() as u64;
                    let mut eager = OracleSession::random_liar(hidden.clone(), l, 1.0, 0).unwrap();
                    let t = robustify(base, l).run(&mut eager, None).unwrap();
                    total += t.queries() as u64;
                    robust_runs += 1;
                    if t.result != hidden || t.queries() as u64 > (l + 1) * q_base + l {
                        failures.push(format!("{sizes:?} l={l} order {order:?}: {}", t.queries()));
                    }
                }
                let e = BigRational::new(BigInt::from(total), BigInt::from(orders.len()));
                if e > bound {
                    failures.push(format!("{sizes:?} l={l}: expectation {e} > {bound}"));
                }
            }
        }
    }
    for seed in 0..20_000u64 {
        let sizes = [3, 2, 2, 1];
        let hidden = Partition::from_sizes(&sizes).unwrap();
        let l = 1 + seed % 3;
        let q_base = Learner::Ordered {
            order: seeded_order(8, seed),
            k: None,
        }
        .run(&mut OracleSession::truthful(hidden.clone()), None)
        .unwrap()
        .queries() as u64;
        let mut liar = OracleSession::random_liar(hidden.clone(), l, 0.3, seed).unwrap();
        let t = robustify(Learner::RandomizedRs { seed }, l)
            .run(&mut liar, None)
            .unwrap();
        robust_runs += 1;
        if t.result != hidden || t.queries() as u64 > (l + 1) * q_base + l {
            failures.push(format!("random liar seed {seed}: {}", t.queries()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 120.0 {
        failures.push(format!("took {secs:.1}s"));
    }
    Outcome::exact(
        failures,
        format!(
            "{comps} compositions exact; (4,4,4) mean {mean:.4} vs {target:.4} (se {se:.4}); {robust_runs} robust runs; {secs:.1}s"
        ),
    )
}

/// Truthful for `hidden` except at the answer positions in `flips`.
struct FlipAt {
    hidden: Partition,
    flips: Vec<usize>,
    given: usize,
}

impl SameClusterOracle for FlipAt {
    fn n(&self) -> usize {
        self.hidden.n()
    }

    fn answer(&mut self, pair: Pair) -> faulty_partition::Result<Sign> {
        let truth = sign(&self.hidden, pair.u(), pair.v());
        let i = self.given;
        self.given += 1;
        Ok(if self.flips.contains(&i) { truth.flip() } else { truth })
    }
}

// Runs the robust learner under `flips` and every extension of it by later
// positions, up to `l` flips in total. Returns the number of runs.
fn every_flip_set(
    learner: &Learner,
    hidden: &Partition,
    q_base: u64,
    l: u64,
    flips: Vec<usize>,
    bad: &mut Vec<String>,
) -> usize {
    let mut o = FlipAt {
        hidden: hidden.clone(),
        flips: flips.clone(),
        given: 0,
    };
    let t = learner.run(&mut o, None).unwrap();
    if t.result != *hidden || t.queries() as u64 > (l + 1) * q_base + l {
        bad.push(format!("{hidden} l={l} flips {flips:?}: {} queries", t.queries()));
    }
    let mut runs = 1;
    if (flips.len() as u64) < l {
        let from = flips.last().map_or(0, |&f| f + 1);
        for next in from..t.queries() {
            let mut more = flips.clone();
            more.push(next);
            runs += every_flip_set(learner, hidden, q_base, l, more, bad);
        }
    }
    runs
}

// 8. Repetition costs at most (l+1) q + l against every oracle strategy.
//
// Against a deterministic learner any strategy yields one answer sequence,
// which is some partition's truth with at most l positions flipped, so
// enumerating partitions and flip positions covers every strategy.
fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut work = Vec::new();
    for n in 2..=7usize {
        for l in 0..=3u64 {
            // the largest cell is sampled instead of enumerated
            if n == 7 && l == 3 {
                continue;
            }
            for hidden in enumerate_partitions(n, &lim()).unwrap() {
                work.push((hidden, l));
            }
        }
    }
    let results: Vec<(usize, Vec<String>)> = work
        .into_par_iter()
        .map(|(hidden, l)| {
            let k = hidden.num_clusters();
            let q_base = Learner::RsK { k }
                .run(&mut OracleSession::truthful(hidden.clone()), None)
                .unwrap()
                .queries() as u64;
            let mut bad = Vec::new();
            let runs = every_flip_set(&robustify(Learner::RsK { k }, l), &hidden, q_base, l, vec![], &mut bad);
            (runs, bad)
        })
        .collect();
    let mut runs: usize = results.iter().map(|r| r.0).sum();
    let mut failures: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();

    let l = 3;
    for (i, hidden) in enumerate_partitions(7, &lim()).unwrap().enumerate() {
        let k = hidden.num_clusters();
        let q_base = Learner::RsK { k }
            .run(&mut OracleSession::truthful(hidden.clone()), None)
            .unwrap()
            .queries() as u64;
        for (j, p) in [0.1, 0.5, 1.0].into_iter().enumerate() {
            let mut o = OracleSession::random_liar(hidden.clone(), l, p, (i * 3 + j) as u64).unwrap();
            let t = robustify(Learner::RsK { k }, l).run(&mut o, None).unwrap();
            runs += 1;
            if t.result != hidden || t.queries() as u64 > (l + 1) * q_base + l {
                failures.push(format!("n=7 l=3 {hidden} p={p}: {}", t.queries()));
            }
        }
    }
    for n in 2..=7 {
        for k in 1..n {
            for l in 0..=3 {
                let mut o = OracleSession::rucc(n, k, l, &lim()).unwrap();
                let t = harness::run_game(&robustify(Learner::RsK { k }, l), &mut o, None).unwrap();
                runs += 1;
                if t.queries() as u64 > (l + 1) * t.logical_queries as u64 + l {
                    failures.push(format!("adversary (n={n},k={k},l={l}): {}", t.queries()));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome::exact(
        failures,
        format!("{runs} runs: every flip placement for n <= 7 (n = 7, l = 3 sampled), plus the adversary; {secs:.1}s"),
    )
}

// 9. Repeated plans with majority decoding tolerate l flips.
fn criterion_9() -> Outcome {
    let l = 1;
    let mut failures = Vec::new();
    let mut decodes = 0;
    for n in 2..=5 {
        for mode in modes(n) {
            let plan = robust_plan(&build_plan(n, mode).unwrap(), l).unwrap();
            let candidates = hidden_set(n, mode);
            // minimum weighted distance between candidates' answer vectors
            let mut min_dist = u64::MAX;
            for (i, a) in candidates.iter().enumerate() {
                for b in &candidates[i + 1..] {
                    let d: u64 = plan
                        .queries
                        .iter()
                        .filter(|(p, _)| sign(a, p.u(), p.v()) != sign(b, p.u(), p.v()))
                        .map(|&(_, m)| m as u64)
                        .sum();
                    min_dist = min_dist.min(d);
                }
            }
            let decodable = plan_decodable(&plan, mode, l, &lim()).unwrap();
            if decodable != (min_dist > 2 * l) || !decodable {
                failures.push(format!("n={n} {mode:?}: distance {min_dist}, decodable {decodable}"));
            }
            for hidden in &candidates {
                let truth = slot_answers(&plan, hidden);
                for flip in std::iter::once(None).chain((0..truth.len()).map(Some)) {
                    let mut answers = truth.clone();
                    if let Some(i) = flip {
                        answers[i] = answers[i].flip();
                    }
                    decodes += 1;
                    match majority_decode(&plan, &answers, l, &lim()) {
                        Ok(p) if p == *hidden => {}
                        other => failures.push(format!("n={n} {mode:?} {hidden} flip {flip:?}: {other:?}")),
                    }
                }
            }
        }
    }
    Outcome::exact(
        failures,
        format!("n <= 5, l = 1: {decodes} decodes under every single flip"),
    )
}

fn proper(edges: &[(usize, usize)], p: &Partition) -> bool {
    edges.iter().all(|&(u, v)| p.label(u) != p.label(v))
}

fn brute_uniqueness(found: &[&Partition]) -> Uniqueness {
    match found {
        [] => Uniqueness::None,
        [only] => Uniqueness::Unique((*only).clone()),
        _ => Uniqueness::Multiple,
    }
}

// 10. Unique surjective colorability against brute force over partitions.
fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut graphs = 0usize;
    let mut unique_checked = 0usize;
    for n in 1..=6 {
        let all: Vec<(usize, usize)> = Pair::all(n).map(|p| (p.u(), p.v())).collect();
        let partitions: Vec<Partition> = enumerate_partitions(n, &lim()).unwrap().collect();
        let results: Vec<(Vec<String>, usize)> = (0u32..(1 << all.len()))
            .into_par_iter()
            .map(|mask| {
                let edges: Vec<(usize, usize)> =
                    (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
                let g = SimpleGraph::from_edges(n, &edges).unwrap();
                let colorings: Vec<&Partition> = partitions.iter().filter(|p| proper(&edges, p)).collect();
                let mut bad = Vec::new();
                let mut uniques = 0;
                for k in 1..=n {
                    let surjective = g.unique_surjective_k_coloring(k).unwrap();
                    let classical = g.unique_k_coloring(k).unwrap();
                    let exactly: Vec<&Partition> =
                        colorings.iter().copied().filter(|p| p.num_clusters() == k).collect();
                    let at_most: Vec<&Partition> =
                        colorings.iter().copied().filter(|p| p.num_clusters() <= k).collect();
                    let brute_surjective = brute_uniqueness(&exactly);
                    let brute_classical = brute_uniqueness(&at_most);
                    if surjective != brute_surjective || classical != brute_classical {
                        bad.push(format!("n={n} k={k} {edges:?}: library disagrees with brute force"));
                    }
                    if k < n && surjective != classical {
                        bad.push(format!(
                            "n={n} k={k} {edges:?}: surjective {surjective:?} vs classical {classical:?}"
                        ));
                    }
                    if k == n && surjective != Uniqueness::Unique(Partition::singletons(n)) {
                        bad.push(format!("n={n} k=n {edges:?}: {surjective:?}"));
                    }
                    if k < n && surjective.is_unique() {
                        uniques += 1;
                        let bound = n * (k - 1) - choose(k, 2);
                        if edges.len() < bound || !g.shaoji_bound_holds(k).unwrap() {
                            bad.push(format!("n={n} k={k} {edges:?}: {} edges < {bound}", edges.len()));
                        }
                    }
                }
                (bad, uniques)
            })
            .collect();
        graphs += results.len();
        for (bad, uniques) in results {
            unique_checked += uniques;
            failures.extend(bad);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 300.0 {
        failures.push(format!("took {secs:.1}s"));
    }
    Outcome::exact(
        failures,
        format!("{graphs} labelled graphs, {unique_checked} uniquely colorable (k < n) cases bounded, {secs:.1}s"),
    )
}

// 11. Formula evaluators.
fn criterion_11() -> Outcome {
    let mut failures = Vec::new();
    let h = binary_entropy(0.25);
    if (h - 0.811_278_124_5).abs() > 1e-9 {
        failures.push(format!("H2(1/4) = {h}"));
    }
    let vol = hamming_volume(2, 4).unwrap();
    if vol != 11u32.into() {
        failures.push(format!("Vol(2,4) = {vol}"));
    }
    let cs: Vec<f64> = (0..50).map(|i| i as f64 / 100.0).collect();
    for n in 2..=20 {
        let at_zero = info_lower_unknown(n, 0.0).unwrap();
        let direct = (bell(n).to_f64().unwrap()).log2();
        if (at_zero - direct).abs() > 1e-9 * direct.max(1.0) {
            failures.push(format!("unknown k at c=0, n={n}: {at_zero} vs {direct}"));
        }
        let ys: Vec<f64> = cs.iter().map(|&c| info_lower_unknown(n, c).unwrap()).collect();
        if ys.windows(2).any(|w| w[1] < w[0]) {
            failures.push(format!("unknown k, n={n}: not monotone in c"));
        }
        for k in 1..=n {
            let at_zero = info_lower_known(n, k, 0.0).unwrap();
            let direct = (stirling2(n, k).to_f64().unwrap()).log2();
            if (at_zero - direct).abs() > 1e-9 * direct.max(1.0) {
                failures.push(format!("known k at c=0, (n={n},k={k}): {at_zero} vs {direct}"));
            }
            let ys: Vec<f64> = cs.iter().map(|&c| info_lower_known(n, k, c).unwrap()).collect();
            if ys.windows(2).any(|w| w[1] < w[0]) {
                failures.push(format!("known k, (n={n},k={k}): not monotone in c"));
            }
        }
    }
    Outcome::exact(
        failures,
        format!("H2(1/4) = {h:.10}, Vol(2,4) = {vol}, c-monotonicity for n <= 20"),
    )
}

fn main() -> ExitCode {
    // accept and ignore libtest flags such as --nocapture
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [(u8, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut unexpected = 0;
    let mut documented = 0;
    for (id, run) in criteria {
        if filter.as_ref().is_some_and(|f| f != &id.to_string()) {
            continue;
        }
        let outcome = run();
        let mark = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{mark} criterion {id}: {}", outcome.detail);
        if !outcome.pass {
            match KNOWN_UNATTAINABLE.iter().find(|(c, _)| *c == id) {
                Some((_, why)) if outcome.unexpected.is_empty() => {
                    documented += 1;
                    println!("     documented exception: {why}");
                }
                _ => unexpected += 1,
            }
        }
    }
    println!("acceptance: {unexpected} unexpected failures, {documented} documented exceptions");
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
