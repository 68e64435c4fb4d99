//! Running learners against oracles: single games, seeded batches of
//! trials, expected-query estimates, and audits of the three complexity tables.
//!
//! Randomness: trial `i` of a run with seed `s` draws everything it needs
//! (the hidden partition, the learner's order seed, the liar's seed) from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`, in that order.
//! Trials are therefore independent of each other and of thread scheduling.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, binom};
use crate::error::{Error, Result};
use crate::game::{exact_game_value, DEFAULT_NODE_BUDGET};
use crate::learners::{build_plan, plan_decodable, robust_plan, KMode, Learner, Transcript};
use crate::oracle::{OracleSession, OracleSpec};
use crate::partition::{enumerate_k_partitions, Limits, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// A batch of seeded trials of one learner against one oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub learner: Learner,
    pub oracle: OracleSpec,
    pub n: usize,
    /// Cluster count of the hidden partition (and of the adversary's game).
    pub k: usize,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Fixed hidden partition; otherwise one is drawn per trial.
    #[serde(default)]
    pub hidden: Option<Partition>,
    /// Query cap per trial; defaults to four times the relevant upper bound.
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidK { n: self.n, k: self.k });
        }
        if let Some(k) = self.learner.known_k() {
            if k != self.k {
                return Err(Error::Incompatible(format!(
                    "learner expects {k} clusters, experiment has {}",
                    self.k
                )));
            }
        }
        if self.learner.tolerance() < self.oracle.budget() {
            return Err(Error::Incompatible(format!(
                "learner tolerates {} errors but the oracle may make {}",
                self.learner.tolerance(),
                self.oracle.budget()
            )));
        }
        for p in [self.hidden.as_ref(), self.oracle.hidden()].into_iter().flatten() {
            if p.n() != self.n || p.num_clusters() != self.k {
                return Err(Error::Incompatible(format!(
                    "hidden partition {p} is not a {}-partition of {} items",
                    self.k, self.n
                )));
            }
        }
        Ok(())
    }

    /// The cap used when none is configured.
    pub fn default_cap(&self) -> Result<usize> {
        default_cap(&self.learner, self.n, self.k)
    }
}

/// Four times the worst-case bound for the learner's setting.
pub fn default_cap(learner: &Learner, n: usize, k: usize) -> Result<usize> {
    let l = learner.tolerance();
    let upper = match learner.known_k() {
        Some(k) => bounds::upper_bound_known(n, k, l)?,
        None => bounds::upper_bound_unknown(n, k, l)?,
    };
    Ok(4 * upper.max(1) as usize)
}

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A uniformly random partition of `0..n` with exactly `k` clusters,
/// drawn by rejection from uniform labelings.
pub fn random_k_partition(n: usize, k: usize, rng: &mut impl Rng) -> Result<Partition> {
    if k == 0 || k > n {
        return Err(Error::InvalidK { n, k });
    }
    loop {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let p = Partition::from_labels(&labels);
        if p.num_clusters() == k {
            return Ok(p);
        }
    }
}

/// Replaces the seed of every randomized component with `seed`.
pub fn reseed(learner: &Learner, seed: u64) -> Learner {
    match learner {
        Learner::RandomizedRs { .. } => Learner::RandomizedRs { seed },
        Learner::RandomizedRsK { k, .. } => Learner::RandomizedRsK { k: *k, seed },
        Learner::Robust { base, l } => Learner::Robust {
            base: Box::new(reseed(base, seed)),
            l: *l,
        },
        other => other.clone(),
    }
}

/// Plays one game. Against the adversary the game must be over when the
/// learner stops, otherwise the learner's answer is not certified.
pub fn run_game(learner: &Learner, oracle: &mut OracleSession, cap: Option<usize>) -> Result<Transcript> {
    let transcript = learner.run(oracle, cap)?;
    if let Some(game) = oracle.game() {
        if !game.is_terminal() {
            return Err(Error::Precondition(format!(
                "learner stopped after {} queries with the game still open",
                transcript.queries()
            )));
        }
    }
    Ok(transcript)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub queries: usize,
    pub rounds: usize,
    pub lies_used: u64,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub mean_queries: f64,
    pub stderr: f64,
    pub max_queries: usize,
    pub max_rounds: usize,
    pub all_correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config: ExperimentConfig,
    pub cap: usize,
    pub summary: Summary,
    pub outcomes: Vec<TrialOutcome>,
}

impl SimulationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,queries,rounds,lies_used,correct\n");
        for o in &self.outcomes {
            // writing to a String cannot fail
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                o.trial, o.queries, o.rounds, o.lies_used, o.correct
            );
        }
        out
    }
}

fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Runs one trial of `config`.
pub fn run_trial(config: &ExperimentConfig, trial: usize, cap: usize, limits: &Limits) -> Result<TrialOutcome> {
    let mut rng = trial_rng(config.seed, trial as u64);
    let hidden = match (&config.hidden, config.oracle.hidden()) {
        (Some(p), _) | (None, Some(p)) => p.clone(),
        (None, None) => random_k_partition(config.n, config.k, &mut rng)?,
    };
    let learner = reseed(&config.learner, rng.next_u64());
    let oracle_seed = rng.next_u64();
    let mut oracle = OracleSession::from_spec(
        &config.oracle,
        config.n,
        Some(config.k),
        Some(&hidden),
        oracle_seed,
        limits,
    )?;
    let t = run_game(&learner, &mut oracle, Some(cap))?;
    if !oracle.verify_budget() {
        return Err(Error::Precondition("oracle exceeded its error budget".into()));
    }
    Ok(TrialOutcome {
        trial,
        queries: t.queries(),
        rounds: t.rounds,
        lies_used: oracle.lies_used(),
        correct: oracle.truth().as_ref() == Some(&t.result),
    })
}

/// Runs every trial of `config` (in parallel) and summarizes them.
pub fn simulate(config: &ExperimentConfig, limits: &Limits) -> Result<SimulationReport> {
    config.validate()?;
    let cap = match config.cap {
        Some(c) => c,
        None => config.default_cap()?,
    };
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i, cap, limits))
        .collect::<Result<Vec<_>>>()?;
    let qs: Vec<f64> = outcomes.iter().map(|o| o.queries as f64).collect();
    let (mean, stderr) = mean_stderr(&qs);
    Ok(SimulationReport {
        config: config.clone(),
        cap,
        summary: Summary {
            trials: outcomes.len(),
            mean_queries: mean,
            stderr,
            max_queries: outcomes.iter().map(|o| o.queries).max().unwrap_or(0),
            max_rounds: outcomes.iter().map(|o| o.rounds).max().unwrap_or(0),
            all_correct: outcomes.iter().all(|o| o.correct),
        },
        outcomes,
    })
}

/// Sample mean of a randomized learner's query count, plus the exact
/// expectation over all processing orders when that is affordable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedReport {
    pub sizes: Vec<usize>,
    pub trials: usize,
    /// Sample mean and its standard error; absent when no trials were run.
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    /// Exact expectation over all `n!` orders (truthful oracle only).
    #[serde(serialize_with = "opt_rational")]
    pub exact: Option<BigRational>,
    /// Closed-form expectation for the unknown-`k` learner.
    #[serde(serialize_with = "opt_rational")]
    pub formula: Option<BigRational>,
}

fn opt_rational<S: serde::Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(r) => s.serialize_str(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// The learner with its random order replaced by a fixed one.
fn with_order(learner: &Learner, order: &[usize]) -> Result<Learner> {
    Ok(match learner {
        Learner::RandomizedRs { .. } => Learner::Ordered {
            order: order.to_vec(),
            k: None,
        },
        Learner::RandomizedRsK { k, .. } => Learner::Ordered {
            order: order.to_vec(),
            k: Some(*k),
        },
        Learner::Robust { base, l } => Learner::Robust {
            base: Box::new(with_order(base, order)?),
            l: *l,
        },
        other => {
            return Err(Error::Incompatible(format!(
                "{other:?} has no random order to enumerate"
            )))
        }
    })
}

/// Average query count of `learner` over every processing order of `0..n`
/// against a truthful oracle for `hidden`.
pub fn exact_expected_queries(learner: &Learner, hidden: &Partition, limits: &Limits) -> Result<BigRational> {
    let n = hidden.n();
    if n > limits.permutation {
        return Err(Error::OverLimit {
            n,
            limit: limits.permutation,
        });
    }
    with_order(learner, &(0..n).collect::<Vec<_>>())?;
    // split the n! orders by their first element for parallelism
    let firsts: Vec<usize> = (0..n.max(1)).collect();
    let total: u64 = firsts
        .into_par_iter()
        .map(|first| -> Result<u64> {
            let rest: Vec<usize> = (0..n).filter(|&x| x != first).collect();
            let mut sum = 0u64;
            let mut order = Vec::with_capacity(n);
            let mut err = None;
            for_each_permutation(&rest, |perm| {
                if err.is_some() {
                    return;
                }
                order.clear();
                if n > 0 {
                    order.push(first);
                }
                order.extend_from_slice(perm);
                let run =
                    with_order(learner, &order).and_then(|l| l.run(&mut OracleSession::truthful(hidden.clone()), None));
                match run {
                    Ok(t) => sum += t.queries() as u64,
                    Err(e) => err = Some(e),
                }
            });
            match err {
                Some(e) => Err(e),
                None => Ok(sum),
            }
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let count: BigUint = (1..=n as u64).product();
    Ok(BigRational::new(BigInt::from(total), BigInt::from(count)))
}

// Heap's algorithm over a copy of `items`.
fn for_each_permutation(items: &[usize], mut f: impl FnMut(&[usize])) {
    let mut a = items.to_vec();
    let n = a.len();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Monte Carlo estimate of a randomized learner's expected query count on
/// clusters of the given sizes, with trial `i` using stream `i` of `seed`.
/// `oracle` defaults to truthful; the exact value is added when the oracle
/// is truthful and `n` is within the permutation limit.
pub fn monte_carlo_expected(
    learner: &Learner,
    sizes: &[usize],
    oracle: Option<&OracleSpec>,
    trials: usize,
    seed: u64,
    limits: &Limits,
) -> Result<ExpectedReport> {
    let hidden = Partition::from_sizes(sizes)?;
    let truthful = oracle.is_none_or(|o| matches!(o, OracleSpec::Truthful { .. }));
    let spec = oracle.cloned().unwrap_or(OracleSpec::Truthful { partition: None });
    let (mean, stderr) = if trials > 0 {
        let config = ExperimentConfig {
            learner: learner.clone(),
            oracle: spec,
            n: hidden.n(),
            k: hidden.num_clusters(),
            trials,
            seed,
            hidden: Some(hidden.clone()),
            cap: None,
            format: OutputFormat::Json,
        };
        let report = simulate(&config, limits)?;
        (Some(report.summary.mean_queries), Some(report.summary.stderr))
    } else {
        (None, None)
    };
    let exact = if truthful && hidden.n() <= limits.permutation {
        Some(exact_expected_queries(learner, &hidden, limits)?)
    } else {
        None
    };
    let formula = match learner {
        Learner::RandomizedRs { .. } => Some(bounds::expected_queries(sizes)?),
        _ => None,
    };
    Ok(ExpectedReport {
        sizes: sizes.to_vec(),
        trials,
        mean,
        stderr,
        exact,
        formula,
    })
}

/// One checked cell of a complexity table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditCell {
    pub cell: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub table: u8,
    pub cells: Vec<AuditCell>,
    pub passed: bool,
}

/// Parameter ranges for the table audits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditGrid {
    pub max_n: usize,
    pub max_l: u64,
    /// Largest `n` for exact game values.
    pub game_max_n: usize,
    /// Largest `n` for exhaustive smaller-plan checks.
    pub minimality_max_n: usize,
}

impl Default for AuditGrid {
    fn default() -> Self {
        AuditGrid {
            max_n: 7,
            max_l: 2,
            game_max_n: 4,
            minimality_max_n: 5,
        }
    }
}

fn cell(cells: &mut Vec<AuditCell>, name: String, expected: impl ToString, observed: impl ToString, pass: bool) {
    cells.push(AuditCell {
        cell: name,
        expected: expected.to_string(),
        observed: observed.to_string(),
        pass,
    });
}

/// Reproduces the checkable cells of table 1 (bounds with `l` errors),
/// 2 (error-free adaptivity) or 3 (non-adaptive, `k` known). Failures are
/// reported in the cells, not as errors.
pub fn audit_table(table: u8, grid: &AuditGrid, limits: &Limits) -> Result<AuditReport> {
    let mut cells = Vec::new();
    match table {
        1 => audit_table1(grid, limits, &mut cells)?,
        2 => audit_table2(grid, limits, &mut cells)?,
        3 => audit_table3(grid, limits, &mut cells)?,
        other => return Err(Error::Precondition(format!("no table {other}; expected 1, 2 or 3"))),
    }
    let passed = cells.iter().all(|c| c.pass);
    Ok(AuditReport { table, cells, passed })
}

fn adversary_run(learner: &Learner, n: usize, k: usize, l: u64, limits: &Limits) -> Result<Transcript> {
    let mut oracle = OracleSession::rucc(n, k, l, limits)?;
    run_game(learner, &mut oracle, Some(default_cap(learner, n, k)?))
}

fn table3_size(n: usize, mode: KMode) -> usize {
    match mode {
        KMode::Known(1) => 0,
        KMode::Known(2) => n - 1,
        KMode::Known(3) if n == 4 => 5,
        KMode::Known(3) => binom(n, 2) - n / 2,
        KMode::Known(_) => binom(n, 2) - 1,
        KMode::Unknown => binom(n, 2),
    }
}

fn modes(n: usize) -> impl Iterator<Item = KMode> {
    (2..n).map(KMode::Known).chain([KMode::Unknown])
}

// Whether every plan that drops one pair from `plan` fails the audit.
fn drop_one_fails(plan: &crate::learners::QueryPlan, mode: KMode, limits: &Limits) -> Result<bool> {
    for i in 0..plan.queries.len() {
        let mut smaller = plan.clone();
        smaller.queries.remove(i);
        if plan_decodable(&smaller, mode, 0, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn audit_table3(grid: &AuditGrid, limits: &Limits, cells: &mut Vec<AuditCell>) -> Result<()> {
    for n in 4..=grid.max_n {
        for mode in modes(n) {
            let plan = build_plan(n, mode)?;
            let expected = table3_size(n, mode);
            let decodable = plan_decodable(&plan, mode, 0, limits)?;
            let name = format!("n={n} {mode:?}");
            cell(
                cells,
                format!("{name} size"),
                expected,
                plan.cost(),
                plan.cost() as usize == expected && decodable,
            );
            if n <= grid.minimality_max_n {
                let tight = drop_one_fails(&plan, mode, limits)?;
                cell(cells, format!("{name} one fewer query fails"), true, tight, tight);
            }
        }
    }
    Ok(())
}

fn audit_table2(grid: &AuditGrid, limits: &Limits, cells: &mut Vec<AuditCell>) -> Result<()> {
    for n in 3..=grid.max_n {
        for k in 2..n {
            let known = n * (k - 1) - binom(k, 2);
            let unknown = n * k - binom(k + 1, 2);
            let q_known = adversary_run(&Learner::RsK { k }, n, k, 0, limits)?.queries();
            let q_unknown = adversary_run(&Learner::Rs, n, k, 0, limits)?.queries();
            cell(
                cells,
                format!("adaptive known n={n} k={k}"),
                known,
                q_known,
                q_known == known,
            );
            cell(
                cells,
                format!("adaptive unknown n={n} k={k}"),
                unknown,
                q_unknown,
                q_unknown == unknown,
            );
            // round-limited versions: worst case over every hidden k-partition
            let (mut pk_q, mut pk_r, mut p_q, mut p_r) = (0, 0, 0, 0);
            for hidden in enumerate_k_partitions(n, k, limits)? {
                let t = Learner::ParallelRsK { k }.run(&mut OracleSession::truthful(hidden.clone()), None)?;
                let u = Learner::ParallelRs.run(&mut OracleSession::truthful(hidden.clone()), None)?;
                if t.result != hidden || u.result != hidden {
                    cell(
                        cells,
                        format!("parallel n={n} k={k} {hidden}"),
                        "recovered",
                        "wrong",
                        false,
                    );
                }
                pk_q = pk_q.max(t.queries());
                pk_r = pk_r.max(t.rounds);
                p_q = p_q.max(u.queries());
                p_r = p_r.max(u.rounds);
            }
            cell(
                cells,
                format!("at most k-1 rounds, known n={n} k={k}"),
                format!("{known} queries, <= {} rounds", k - 1),
                format!("{pk_q} queries, {pk_r} rounds"),
                pk_q == known && pk_r < k,
            );
            cell(
                cells,
                format!("at most k rounds, unknown n={n} k={k}"),
                format!("{unknown} queries, <= {k} rounds"),
                format!("{p_q} queries, {p_r} rounds"),
                p_q == unknown && p_r <= k,
            );
        }
        let plan = build_plan(n, KMode::Unknown)?;
        let ok = plan.cost() as usize == binom(n, 2) && plan_decodable(&plan, KMode::Unknown, 0, limits)?;
        let tight = n > grid.minimality_max_n || drop_one_fails(&plan, KMode::Unknown, limits)?;
        cell(
            cells,
            format!("non-adaptive unknown n={n}"),
            binom(n, 2),
            plan.cost(),
            ok && tight,
        );
    }
    Ok(())
}

fn audit_table1(grid: &AuditGrid, limits: &Limits, cells: &mut Vec<AuditCell>) -> Result<()> {
    for n in 3..=grid.max_n.min(6) {
        for k in 2..n {
            for l in 0..=grid.max_l {
                let lower = bounds::adaptive_lower_bound(n, k, l)?.ceiling;
                let upper_k = bounds::upper_bound_known(n, k, l)?;
                let upper_u = bounds::upper_bound_unknown(n, k, l)?;
                let q_known = adversary_run(&crate::learners::robustify(Learner::RsK { k }, l), n, k, l, limits)?
                    .queries() as u64;
                let q_unknown =
                    adversary_run(&crate::learners::robustify(Learner::Rs, l), n, k, l, limits)?.queries() as u64;
                cell(
                    cells,
                    format!("adaptive known n={n} k={k} l={l}"),
                    format!("[{lower}, {upper_k}]"),
                    q_known,
                    lower <= q_known && q_known <= upper_k,
                );
                cell(
                    cells,
                    format!("adaptive unknown n={n} k={k} l={l}"),
                    format!("[{lower}, {upper_u}]"),
                    q_unknown,
                    lower <= q_unknown && q_unknown <= upper_u,
                );
                if n <= grid.game_max_n {
                    let v = exact_game_value(n, k, l, DEFAULT_NODE_BUDGET)?.value as u64;
                    cell(
                        cells,
                        format!("game value n={n} k={k} l={l}"),
                        format!("[{lower}, {upper_k}]"),
                        v,
                        lower <= v && v <= upper_k,
                    );
                }
            }
        }
    }
    // non-adaptive rows: (2l+1)-fold plans separate every pair of candidates
    for n in 4..=grid.max_n.min(5) {
        for mode in modes(n) {
            for l in 1..=grid.max_l.min(1) {
                let base = build_plan(n, mode)?;
                let plan = robust_plan(&base, l)?;
                let expected = (2 * l + 1) * table3_size(n, mode) as u64;
                let ok = plan.cost() == expected && plan_decodable(&plan, mode, l, limits)?;
                cell(
                    cells,
                    format!("non-adaptive n={n} {mode:?} l={l}"),
                    expected,
                    plan.cost(),
                    ok,
                );
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::expected_queries;
    use crate::learners::robustify;

    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn run_game_examples() {
        let hidden = Partition::from_clusters(6, &[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let t = run_game(
            &Learner::RsK { k: 3 },
            &mut OracleSession::truthful(hidden.clone()),
            None,
        )
        .unwrap();
        assert_eq!(t.result, hidden);
        assert!(t.queries() <= 9);

        let mut adv = OracleSession::rucc(4, 2, 1, &lim()).unwrap();
        let t = run_game(&robustify(Learner::RsK { k: 2 }, 1), &mut adv, None).unwrap();
        assert!(t.queries() as u64 >= bounds::adaptive_lower_bound(4, 2, 1).unwrap().ceiling);

        let three = Partition::from_sizes(&[2, 2, 2]).unwrap();
        let t = run_game(&Learner::ParallelRs, &mut OracleSession::truthful(three), None).unwrap();
        assert_eq!(t.rounds, 3);
    }

    #[test]
    fn unfinished_games_are_reported() {
        // a learner told the wrong k stops before the game is decided
        let mut adv = OracleSession::rucc(4, 3, 0, &lim()).unwrap();
        assert!(run_game(&Learner::RsK { k: 2 }, &mut adv, None).is_err());
    }

    #[test]
    fn trial_streams_are_independent_and_reproducible() {
        let mut a = trial_rng(7, 3);
        let mut b = trial_rng(7, 3);
        assert_eq!(a.next_u64(), b.next_u64());
        assert_ne!(trial_rng(7, 3).next_u64(), trial_rng(7, 4).next_u64());
    }

    #[test]
    fn simulation_is_deterministic() {
        let config = ExperimentConfig {
            learner: robustify(Learner::RandomizedRsK { k: 3, seed: 0 }, 1),
            oracle: OracleSpec::Liar {
                l: 1,
                p: 0.2,
                seed: 5,
                partition: None,
            },
            n: 6,
            k: 3,
            trials: 200,
            seed: 42,
            hidden: None,
            cap: None,
            format: OutputFormat::Csv,
        };
        let a = simulate(&config, &lim()).unwrap();
        let b = simulate(&config, &lim()).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.summary.all_correct);
        assert!(a.outcomes.iter().any(|o| o.lies_used > 0));
        assert!(a.to_csv().starts_with("trial,queries,rounds,lies_used,correct\n"));
        assert_eq!(a.cap, 4 * 2 * 9 + 4);
    }

    #[test]
    fn config_mismatches_are_rejected() {
        let mut config = ExperimentConfig {
            learner: Learner::RsK { k: 2 },
            oracle: OracleSpec::Rucc { l: 0 },
            n: 5,
            k: 3,
            trials: 1,
            seed: 0,
            hidden: None,
            cap: None,
            format: OutputFormat::Json,
        };
        assert!(matches!(simulate(&config, &lim()), Err(Error::Incompatible(_))));
        config.learner = Learner::RsK { k: 3 };
        config.oracle = OracleSpec::Rucc { l: 1 };
        assert!(matches!(simulate(&config, &lim()), Err(Error::Incompatible(_))));
        config.learner = robustify(Learner::RsK { k: 3 }, 1);
        assert!(simulate(&config, &lim()).unwrap().summary.all_correct);
        config.trials = 0;
        assert!(simulate(&config, &lim()).is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let text =
            r#"{"learner":{"learner":"rs_k","k":2},"oracle":{"oracle":"rucc","l":0},"n":4,"k":2,"trials":3,"seed":1}"#;
        let config: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(config.format, OutputFormat::Json);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&config).unwrap()).unwrap();
        assert_eq!(back, config);
    }

    #[test]
    fn exact_expectation_matches_closed_form() {
        let learner = Learner::RandomizedRs { seed: 0 };
        let e = exact_expected_queries(&learner, &Partition::from_sizes(&[2, 1]).unwrap(), &lim()).unwrap();
        assert_eq!(e, BigRational::new(7.into(), 3.into()));
        for sizes in [vec![2, 2], vec![3, 1], vec![1, 1, 1, 1], vec![3, 2, 1]] {
            let e = exact_expected_queries(&learner, &Partition::from_sizes(&sizes).unwrap(), &lim()).unwrap();
            assert_eq!(e, expected_queries(&sizes).unwrap(), "{sizes:?}");
        }
    }

    #[test]
    fn monte_carlo_report() {
        let r = monte_carlo_expected(&Learner::RandomizedRs { seed: 0 }, &[2, 2], None, 2000, 1, &lim()).unwrap();
        assert_eq!(r.exact, Some(BigRational::from_integer(4.into())));
        assert_eq!(r.formula, r.exact);
        assert!((r.mean.unwrap() - 4.0).abs() <= 3.0 * r.stderr.unwrap() + 1e-12);
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["exact"], "4");
    }

    #[test]
    fn known_k_never_costs_more_under_a_shared_order() {
        let hidden = Partition::from_sizes(&[3, 2, 2, 1]).unwrap();
        for seed in 0..200 {
            let q = Learner::RandomizedRs { seed }
                .run(&mut OracleSession::truthful(hidden.clone()), None)
                .unwrap();
            let qk = Learner::RandomizedRsK { k: 4, seed }
                .run(&mut OracleSession::truthful(hidden.clone()), None)
                .unwrap();
            assert!(qk.queries() <= q.queries());
        }
    }

    #[test]
    fn audits_pass_on_a_small_grid() {
        let grid = AuditGrid {
            max_n: 5,
            max_l: 1,
            game_max_n: 4,
            minimality_max_n: 5,
        };
        for table in 1..=3 {
            let r = audit_table(table, &grid, &lim()).unwrap();
            let failed: Vec<_> = r.cells.iter().filter(|c| !c.pass).collect();
            assert!(r.passed, "table {table}: {failed:?}");
        }
        assert!(audit_table(4, &grid, &lim()).is_err());
    }

    #[test]
    fn table3_row_at_five() {
        let r = audit_table(3, &AuditGrid::default(), &lim()).unwrap();
        for (name, size) in [
            ("n=5 Known(2) size", "4"),
            ("n=5 Known(3) size", "8"),
            ("n=5 Known(4) size", "9"),
        ] {
            let c = r.cells.iter().find(|c| c.cell == name).unwrap();
            assert!(c.pass);
            assert_eq!(c.observed, size);
        }
    }
}
