use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use scopone::experiments::{measure_timing, run_plan, sweep, sweep_csv, ExperimentPlan, SweepAxis};
use scopone::strategy::Strategy;
use scopone_arena::{audit, write_results, PlanFile};

#[derive(Parser)]
#[command(name = "arena", about = "Scopone tournaments, parameter sweeps and timing")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a tournament plan; writes results.csv, summary.txt and logs/.
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the plan's deck count.
        #[arg(long)]
        decks: Option<usize>,
        #[arg(long)]
        threads: Option<usize>,
        /// Skip writing per-match logs.
        #[arg(long)]
        no_logs: bool,
    },
    /// Vary one parameter of a search player against a fixed opponent.
    Sweep {
        /// uct_c | reward | sim | epsilon | iterations | determinizer
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        #[arg(long, default_value = "mcts:iters=1000")]
        subject: Strategy,
        #[arg(long, default_value = "greedy")]
        baseline: Strategy,
        #[arg(long, default_value_t = 200)]
        decks: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-move decision time at several iteration counts.
    Timing {
        #[arg(long, default_value = "ismcts:iters=1000")]
        strategy: Strategy,
        #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000")]
        iterations: Vec<u32>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Recompute a run's table from its logs and compare with results.csv.
    Audit {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().cmd {
        Cmd::Run { plan, out, decks, threads, no_logs } => {
            let mut plan = PlanFile::load(&plan)?.into_plan()?;
            if let Some(d) = decks {
                plan.deck_count = d;
            }
            if let Some(t) = threads {
                plan.threads = t;
            }
            plan.keep_logs = !no_logs;
            let table = run_plan(&plan)?;
            write_results(&table, &out)?;
            print!("{}", table.summary());
        }
        Cmd::Sweep { axis, values, subject, baseline, decks, seed, repeats, threads, out } => {
            let axis: SweepAxis = axis.parse()?;
            if values.is_empty() {
                bail!("--values needs at least one value");
            }
            let plan = ExperimentPlan { deck_count: decks, deck_seed: seed, repeats, threads, ..ExperimentPlan::default() };
            let points = sweep(axis, &values, &subject, &baseline, &plan)?;
            let csv = sweep_csv(axis, &points);
            match out {
                Some(path) => fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
        Cmd::Timing { strategy, iterations, samples, seed } => {
            println!("iterations,samples,mean_s,median_s,std_err_s");
            for (it, t) in measure_timing(&strategy, &iterations, samples, seed)? {
                println!("{it},{},{:.6},{:.6},{:.6}", t.samples, t.mean, t.median, t.std_err);
            }
        }
        Cmd::Audit { out } => {
            let table = audit(&out)?;
            let recorded = fs::read_to_string(out.join(scopone_arena::RESULTS_CSV))?;
            let recomputed = table.to_csv();
            // timing columns are not recoverable from logs
            let counts = |csv: &str| csv.lines().map(|l| l.rsplitn(5, ',').last().unwrap_or_default().to_string()).collect::<Vec<_>>();
            let mut a = counts(&recorded);
            let mut b = counts(&recomputed);
            a.sort();
            b.sort();
            if a != b {
                bail!("logs do not reproduce results.csv");
            }
            println!("ok: {} cells reproduced from logs", table.cells.len());
        }
    }
    Ok(())
}
