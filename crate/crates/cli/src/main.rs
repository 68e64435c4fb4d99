//! `fpl`: learn partitions from faulty same-cluster queries.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use faulty_partition::bounds::BoundsReport;
use faulty_partition::game::{exact_game_value, DEFAULT_NODE_BUDGET};
use faulty_partition::harness::{self, AuditGrid, ExperimentConfig, OutputFormat};
use faulty_partition::learners::{
    build_plan, majority_decode, plan_decodable, robust_plan, robustify, KMode, Learner, QueryPlan,
};
use faulty_partition::oracle::OracleSpec;
use faulty_partition::{Limits, Partition, Sign};

#[derive(Parser)]
#[command(
    name = "fpl",
    version,
    about = "Partition learning from same-cluster queries with bounded errors"
)]
struct Cli {
    /// Largest n for which partitions are enumerated exhaustively.
    #[arg(long, global = true, env = "FPL_ENUMERATION_LIMIT")]
    enumeration_limit: Option<usize>,
    /// Largest n for which all n! processing orders are enumerated.
    #[arg(long, global = true, env = "FPL_PERMUTATION_LIMIT")]
    permutation_limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LearnerId {
    Rs,
    RsK,
    ParallelRs,
    ParallelRsK,
    RandomizedRs,
    RandomizedRsK,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleId {
    Truthful,
    Liar,
    Rucc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials of a learner against an oracle.
    Simulate {
        #[arg(long, value_enum)]
        learner: LearnerId,
        #[arg(long, value_enum)]
        oracle: OracleId,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Error budget; the learner is made robust to it.
        #[arg(long, default_value_t = 0)]
        l: u64,
        /// Lie probability per query for the random liar.
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hidden partition as JSON labels, e.g. [0,0,1,1]; random otherwise.
        #[arg(long)]
        hidden: Option<String>,
        /// Per-trial query cap; defaults to four times the upper bound.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Print only the summary, not every trial (json only).
        #[arg(long)]
        summary: bool,
    },
    /// Evaluate the lower and upper bounds for (n, k, l).
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        l: u64,
        /// Fraction of lies for the asymptotic lower bounds.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Print the cheapest one-round plan as JSON.
    Plan {
        /// `known:K` or `unknown`.
        #[arg(long, value_parser = parse_k_mode)]
        k_mode: KMode,
        #[arg(long)]
        n: usize,
        /// Repeat every query 2l+1 times.
        #[arg(long, default_value_t = 0)]
        l: u64,
    },
    /// Check that a plan determines every candidate partition.
    CheckPlan {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        l: u64,
    },
    /// Decode plan answers (a JSON array of +1/-1, one per query slot).
    Decode {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        answers: PathBuf,
        /// Number of answers that may be wrong.
        #[arg(long, default_value_t = 0)]
        l: u64,
    },
    /// Solve the adversary game exactly.
    GameValue {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        l: u64,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
    },
    /// Expected query count of the randomized learner.
    Expected {
        /// Cluster sizes, e.g. 4,4,4.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Exact value over all processing orders only.
        #[arg(long, conflicts_with = "trials")]
        exact: bool,
        #[arg(long)]
        trials: Option<usize>,
        /// Learner that knows k.
        #[arg(long)]
        known_k: bool,
        #[arg(long, default_value_t = 0)]
        l: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recheck a complexity table (1: with errors, 2: error-free adaptivity,
    /// 3: one round); exits 1 if any cell fails.
    Audit {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        table: u8,
        #[arg(long, default_value_t = AuditGrid::default().max_n)]
        max_n: usize,
        #[arg(long, default_value_t = AuditGrid::default().max_l)]
        max_l: u64,
        /// Show every cell, not only failures.
        #[arg(long)]
        verbose: bool,
    },
}

fn parse_k_mode(s: &str) -> Result<KMode, String> {
    if s == "unknown" {
        return Ok(KMode::Unknown);
    }
    s.strip_prefix("known:")
        .and_then(|k| k.parse().ok())
        .map(KMode::Known)
        .ok_or_else(|| format!("expected `known:K` or `unknown`, got `{s}`"))
}

fn learner(id: LearnerId, k: usize, l: u64, seed: u64) -> Learner {
    let base = match id {
        LearnerId::Rs => Learner::Rs,
        LearnerId::RsK => Learner::RsK { k },
        LearnerId::ParallelRs => Learner::ParallelRs,
        LearnerId::ParallelRsK => Learner::ParallelRsK { k },
        LearnerId::RandomizedRs => Learner::RandomizedRs { seed },
        LearnerId::RandomizedRsK => Learner::RandomizedRsK { k, seed },
    };
    robustify(base, l)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(value: &impl serde::Serialize) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut limits = Limits::default();
    if let Some(e) = cli.enumeration_limit {
        limits.enumeration = e;
    }
    if let Some(p) = cli.permutation_limit {
        limits.permutation = p;
    }
    match cli.command {
        Command::Simulate {
            learner: id,
            oracle,
            n,
            k,
            l,
            p,
            trials,
            seed,
            hidden,
            cap,
            format,
            summary,
        } => {
            let hidden: Option<Partition> = hidden
                .map(|h| serde_json::from_str::<Vec<usize>>(&h).map(Partition::from_labels))
                .transpose()
                .context("--hidden must be a JSON array of labels")?;
            let oracle = match oracle {
                OracleId::Truthful => OracleSpec::Truthful { partition: None },
                OracleId::Liar => OracleSpec::Liar {
                    l,
                    p,
                    seed: 0,
                    partition: None,
                },
                OracleId::Rucc => OracleSpec::Rucc { l },
            };
            let config = ExperimentConfig {
                learner: learner(id, k, l, 0),
                oracle,
                n,
                k,
                trials,
                seed,
                hidden,
                cap,
                format: match format {
                    Format::Json => OutputFormat::Json,
                    Format::Csv => OutputFormat::Csv,
                },
            };
            let report = harness::simulate(&config, &limits)?;
            match format {
                Format::Csv => print!("{}", report.to_csv()),
                Format::Json if summary => print_json(&report.summary)?,
                Format::Json => print_json(&report)?,
            }
        }
        Command::Bounds { n, k, l, c } => print_json(&BoundsReport::new(n, k, l, c)?)?,
        Command::Plan { k_mode, n, l } => print_json(&robust_plan(&build_plan(n, k_mode)?, l)?)?,
        Command::CheckPlan { file, l } => {
            let plan: QueryPlan = read_json(&file)?;
            let ok = plan_decodable(&plan, plan.k_mode, l, &limits)?;
            print_json(&serde_json::json!({ "queries": plan.cost(), "l": l, "decodable": ok }))?;
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Decode { plan, answers, l } => {
            let plan: QueryPlan = read_json(&plan)?;
            let answers: Vec<Sign> = read_json(&answers)?;
            print_json(&majority_decode(&plan, &answers, l, &limits)?)?;
        }
        Command::GameValue { n, k, l, budget } => print_json(&exact_game_value(n, k, l, budget)?)?,
        Command::Expected {
            sizes,
            exact,
            trials,
            known_k,
            l,
            seed,
        } => {
            let id = if known_k {
                LearnerId::RandomizedRsK
            } else {
                LearnerId::RandomizedRs
            };
            let learner = learner(id, sizes.len(), l, 0);
            let trials = if exact { 0 } else { trials.unwrap_or(10_000) };
            if trials == 0 && sizes.iter().sum::<usize>() > limits.permutation {
                bail!("n exceeds the permutation limit {}; use --trials", limits.permutation);
            }
            let report = harness::monte_carlo_expected(&learner, &sizes, None, trials, seed, &limits)?;
            print_json(&report)?;
        }
        Command::Audit {
            table,
            max_n,
            max_l,
            verbose,
        } => {
            let grid = AuditGrid {
                max_n,
                max_l,
                ..AuditGrid::default()
            };
            let report = harness::audit_table(table, &grid, &limits)?;
            for c in report.cells.iter().filter(|c| verbose || !c.pass) {
                let mark = if c.pass { "PASS" } else { "FAIL" };
                println!("{mark} {}: expected {}, observed {}", c.cell, c.expected, c.observed);
            }
            let failed = report.cells.iter().filter(|c| !c.pass).count();
            println!("table {table}: {} cells, {failed} failed", report.cells.len());
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
