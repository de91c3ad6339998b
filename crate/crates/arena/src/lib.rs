//! Plan files and result directories for the `arena` command.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use scopone::experiments::{ExperimentPlan, Pairing, ResultTable};
use scopone::matchlog::MatchLog;
use scopone::strategy::Strategy;
use serde::Deserialize;

/// On-disk plan: either explicit pairings or a roster expanded to a full
/// round robin (both roles, self-play included).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    #[serde(default = "default_decks")]
    pub deck_count: usize,
    #[serde(default)]
    pub deck_seed: u64,
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub roster: Vec<Strategy>,
    #[serde(default)]
    pub pairings: Vec<Pairing>,
}

fn default_decks() -> usize {
    200
}
fn one() -> usize {
    1
}

impl PlanFile {
    pub fn parse(text: &str) -> Result<PlanFile> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<PlanFile> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        PlanFile::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn into_plan(self) -> Result<ExperimentPlan> {
        if self.roster.is_empty() == self.pairings.is_empty() {
            bail!("a plan needs exactly one of `roster` or `pairings`");
        }
        if self.deck_count == 0 {
            bail!("deck_count must be positive");
        }
        let mut plan = if self.roster.is_empty() {
            ExperimentPlan { pairings: self.pairings, ..ExperimentPlan::default() }
        } else {
            ExperimentPlan::round_robin(&self.roster, self.deck_count, self.deck_seed)
        };
        plan.deck_count = self.deck_count;
        plan.deck_seed = self.deck_seed;
        plan.repeats = self.repeats.max(1);
        plan.symmetric = self.symmetric;
        plan.threads = self.threads;
        Ok(plan)
    }
}

pub const RESULTS_CSV: &str = "results.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const LOG_DIR: &str = "logs";

/// Writes `results.csv`, `summary.txt` and one log file per match.
pub fn write_results(table: &ResultTable, out: &Path) -> Result<()> {
    fs::create_dir_all(out.join(LOG_DIR)).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join(RESULTS_CSV), table.to_csv())?;
    fs::write(out.join(SUMMARY_TXT), table.summary())?;
    for (i, log) in table.logs.iter().enumerate() {
        fs::write(out.join(LOG_DIR).join(format!("{i:06}.log")), log.to_text())?;
    }
    Ok(())
}

/// Log files of a result directory, in name order.
pub fn log_files(out: &Path) -> Result<Vec<PathBuf>> {
    let dir = out.join(LOG_DIR);
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "log"))
        .collect();
    files.sort();
    Ok(files)
}

/// Recomputes the result table from the logs alone.
pub fn audit(out: &Path) -> Result<ResultTable> {
    let logs = log_files(out)?
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p)?;
            MatchLog::parse(&text).with_context(|| format!("parsing {}", p.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable::from_logs(&logs)?)
}
