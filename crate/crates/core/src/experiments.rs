//! Tournament harness: fixed deck lists, role swapping, repeats,
//! aggregation with confidence intervals, parameter sweeps and timing.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::cards::{deal, Team};
use crate::engine::{MatchScore, MatchState};
use crate::error::EngineError;
use crate::ismcts::DeterminizerKind;
use crate::matchlog::{DealSpec, MatchLog};
use crate::players::greedy_move;
use crate::search::{RewardFn, SimStrategy};
use crate::strategy::{mix, Strategy};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error("timing needs at least one sample")]
    NoSamples,
    #[error("sweep value `{value}` does not apply to axis {axis}: {why}")]
    SweepValue { axis: String, value: String, why: String },
    #[error("match {index} failed: {source}")]
    Match { index: usize, source: EngineError },
    #[error("log {0}: {1}")]
    Log(usize, String),
}

/// Seed of the `i`-th deck of a plan.
pub fn deck_seed(base: u64, i: usize) -> u64 {
    mix(base, i as u64)
}

/// One played match.
#[derive(Debug, Clone)]
pub struct MatchRun {
    pub state: MatchState,
    pub score: MatchScore,
    /// Per-move decision times in seconds, by team.
    pub timings: [Vec<f64>; 2],
}

impl MatchRun {
    pub fn winner(&self) -> Option<Team> {
        self.score.winner()
    }
}

/// Plays a full match: even seats use `hand`, odd seats use `deck`.
/// Fair strategies only ever see their own view.
pub fn run_match(deal: crate::cards::DealResult, hand: &Strategy, deck: &Strategy, salt: u64) -> Result<MatchRun, EngineError> {
    let mut st = MatchState::new(deal);
    let mut timings = [Vec::with_capacity(18), Vec::with_capacity(18)];
    while !st.is_over() {
        let team = st.current().team();
        let strat = if team == Team::Hand { hand } else { deck };
        let t = Instant::now();
        let mv = strat.choose(&st, mix(salt, team.index() as u64));
        timings[team.index()].push(t.elapsed().as_secs_f64());
        st.apply(mv)?;
    }
    let score = st.score()?;
    Ok(MatchRun { state: st, score, timings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pairing {
    pub hand: Strategy,
    pub deck: Strategy,
}

fn default_decks() -> usize {
    200
}
fn default_repeats() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    #[serde(default = "default_decks")]
    pub deck_count: usize,
    #[serde(default)]
    pub deck_seed: u64,
    /// Repeats per deck for pairings with a stochastic side.
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub pairings: Vec<Pairing>,
    /// Also play every pairing with the roles exchanged.
    #[serde(default)]
    pub symmetric: bool,
    /// Worker threads; 0 means all cores.
    #[serde(default)]
    pub threads: usize,
    /// Keep full logs in the result (needed for auditing and `--out`).
    #[serde(default)]
    pub keep_logs: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            deck_count: default_decks(),
            deck_seed: 0,
            repeats: 1,
            pairings: Vec::new(),
            symmetric: false,
            threads: 0,
            keep_logs: false,
        }
    }
}

impl ExperimentPlan {
    /// All pairings of `roster` with each other, both roles, self-play included.
    pub fn round_robin(roster: &[Strategy], deck_count: usize, deck_seed: u64) -> ExperimentPlan {
        let mut pairings = Vec::new();
        for h in roster {
            for d in roster {
                pairings.push(Pairing { hand: *h, deck: *d });
            }
        }
        ExperimentPlan { deck_count, deck_seed, pairings, ..ExperimentPlan::default() }
    }

    /// Pairings actually played, after role swapping (duplicates removed).
    pub fn expanded_pairings(&self) -> Vec<Pairing> {
        let mut out: Vec<Pairing> = Vec::new();
        for p in &self.pairings {
            let mut add = |p: Pairing| {
                if !out.contains(&p) {
                    out.push(p);
                }
            };
            add(p.clone());
            if self.symmetric {
                add(Pairing { hand: p.deck, deck: p.hand });
            }
        }
        out
    }

    fn repeats_for(&self, p: &Pairing) -> usize {
        if is_stochastic(&p.hand) || is_stochastic(&p.deck) {
            self.repeats.max(1)
        } else {
            1
        }
    }

    fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::new();
        for (pi, p) in self.expanded_pairings().into_iter().enumerate() {
            for deck in 0..self.deck_count {
                for repeat in 0..self.repeats_for(&p) {
                    jobs.push(Job { pairing: pi, hand: p.hand, deck_strategy: p.deck, deck, repeat });
                }
            }
        }
        jobs
    }
}

/// Rule players are deterministic; repeating them adds nothing.
pub fn is_stochastic(s: &Strategy) -> bool {
    !matches!(s, Strategy::Rule(_))
}

#[derive(Debug, Clone, Copy)]
struct Job {
    pairing: usize,
    hand: Strategy,
    deck_strategy: Strategy,
    deck: usize,
    repeat: usize,
}

/// Summary of a sample of per-move times, in seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TimingStats {
    pub samples: usize,
    pub mean: f64,
    pub median: f64,
    pub std_err: f64,
}

impl TimingStats {
    pub fn from_samples(xs: &[f64]) -> TimingStats {
        if xs.is_empty() {
            return TimingStats::default();
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = if xs.len() > 1 { xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        let mut v = xs.to_vec();
        v.sort_by(f64::total_cmp);
        let median = if v.len() % 2 == 1 { v[v.len() / 2] } else { 0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2]) };
        TimingStats { samples: xs.len(), mean, median, std_err: (var / n).sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interval {
    Wald,
    Wilson,
}

/// 95% confidence interval of a binomial proportion.
pub fn proportion_ci(successes: usize, n: usize, method: Interval) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    let z = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = successes as f64 / nf;
    match method {
        Interval::Wald => {
            let h = z * (p * (1.0 - p) / nf).sqrt();
            ((p - h).max(0.0), (p + h).min(1.0))
        }
        Interval::Wilson => {
            let d = 1.0 + z * z / nf;
            let centre = (p + z * z / (2.0 * nf)) / d;
            let h = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / d;
            ((centre - h).max(0.0), (centre + h).min(1.0))
        }
    }
}

/// Two-sided two-proportion z-test with a pooled variance: (z, p-value).
pub fn two_proportion_z(x1: usize, n1: usize, x2: usize, n2: usize) -> (f64, f64) {
    if n1 == 0 || n2 == 0 {
        return (0.0, 1.0);
    }
    let (p1, p2) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return (0.0, if p1 == p2 { 1.0 } else { 0.0 });
    }
    let z = (p1 - p2) / se;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (z, 2.0 * (1.0 - normal.cdf(z.abs())))
}

/// Aggregated results of one (hand, deck) pairing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub hand: String,
    pub deck: String,
    pub matches: usize,
    pub hand_wins: usize,
    pub deck_wins: usize,
    pub ties: usize,
    pub hand_points: u64,
    pub deck_points: u64,
    #[serde(skip)]
    pub timing_samples: [Vec<f64>; 2],
}

impl Cell {
    fn new(hand: &str, deck: &str) -> Cell {
        Cell {
            hand: hand.to_string(),
            deck: deck.to_string(),
            matches: 0,
            hand_wins: 0,
            deck_wins: 0,
            ties: 0,
            hand_points: 0,
            deck_points: 0,
            timing_samples: [Vec::new(), Vec::new()],
        }
    }

    fn add(&mut self, points: [u32; 2]) {
        self.matches += 1;
        match points[0].cmp(&points[1]) {
            std::cmp::Ordering::Greater => self.hand_wins += 1,
            std::cmp::Ordering::Less => self.deck_wins += 1,
            std::cmp::Ordering::Equal => self.ties += 1,
        }
        self.hand_points += points[0] as u64;
        self.deck_points += points[1] as u64;
    }

    /// Counts and scores only; timing samples are not compared.
    pub fn same_counts(&self, other: &Cell) -> bool {
        (&self.hand, &self.deck, self.matches, self.hand_wins, self.deck_wins, self.ties, self.hand_points, self.deck_points)
            == (&other.hand, &other.deck, other.matches, other.hand_wins, other.deck_wins, other.ties, other.hand_points, other.deck_points)
    }

    fn rate(&self, k: usize) -> f64 {
        if self.matches == 0 {
            0.0
        } else {
            k as f64 / self.matches as f64
        }
    }

    pub fn hand_win_rate(&self) -> f64 {
        self.rate(self.hand_wins)
    }
    pub fn deck_win_rate(&self) -> f64 {
        self.rate(self.deck_wins)
    }
    pub fn tie_rate(&self) -> f64 {
        self.rate(self.ties)
    }

    /// Win rate of one team with its 95% interval.
    pub fn win_rate(&self, team: Team, method: Interval) -> (f64, f64, f64) {
        let k = if team == Team::Hand { self.hand_wins } else { self.deck_wins };
        let (lo, hi) = proportion_ci(k, self.matches, method);
        (self.rate(k), lo, hi)
    }

    pub fn mean_points(&self) -> (f64, f64) {
        let n = self.matches.max(1) as f64;
        (self.hand_points as f64 / n, self.deck_points as f64 / n)
    }

    pub fn timing(&self, team: Team) -> TimingStats {
        TimingStats::from_samples(&self.timing_samples[team.index()])
    }
}

#[derive(Debug, Clone, Default)]
pub struct ResultTable {
    pub cells: Vec<Cell>,
    /// Full logs, kept when the plan asks for them.
    pub logs: Vec<MatchLog>,
}

impl ResultTable {
    pub fn cell(&self, hand: &str, deck: &str) -> Option<&Cell> {
        self.cells.iter().find(|c| c.hand == hand && c.deck == deck)
    }

    fn cell_mut(&mut self, hand: &str, deck: &str) -> &mut Cell {
        if let Some(i) = self.cells.iter().position(|c| c.hand == hand && c.deck == deck) {
            &mut self.cells[i]
        } else {
            self.cells.push(Cell::new(hand, deck));
            self.cells.last_mut().unwrap()
        }
    }

    /// Rebuilds the counts from logs alone, replaying every match.
    pub fn from_logs(logs: &[MatchLog]) -> Result<ResultTable, ExperimentError> {
        let mut t = ResultTable::default();
        for (i, log) in logs.iter().enumerate() {
            let hand = log.meta("hand").ok_or_else(|| ExperimentError::Log(i, "no hand strategy".into()))?;
            let deck = log.meta("deck").ok_or_else(|| ExperimentError::Log(i, "no deck strategy".into()))?;
            let st = log.replay().map_err(|e| ExperimentError::Log(i, e.to_string()))?;
            let score = st.score().map_err(|e| ExperimentError::Log(i, e.to_string()))?;
            let (hand, deck) = (hand.to_string(), deck.to_string());
            t.cell_mut(&hand, &deck).add(score.points());
        }
        Ok(t)
    }

    /// Overall results per strategy across both roles: (wins, losses, ties).
    pub fn per_strategy(&self) -> BTreeMap<String, (usize, usize, usize)> {
        let mut m: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
        for c in &self.cells {
            let h = m.entry(c.hand.clone()).or_default();
            h.0 += c.hand_wins;
            h.1 += c.deck_wins;
            h.2 += c.ties;
            let d = m.entry(c.deck.clone()).or_default();
            d.0 += c.deck_wins;
            d.1 += c.hand_wins;
            d.2 += c.ties;
        }
        m
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "hand,deck,matches,hand_wins,deck_wins,ties,hand_win_rate,hand_ci_lo,hand_ci_hi,deck_win_rate,deck_ci_lo,deck_ci_hi,tie_rate,hand_mean_points,deck_mean_points,hand_move_mean_s,hand_move_median_s,deck_move_mean_s,deck_move_median_s\n",
        );
        for c in &self.cells {
            let (hr, hlo, hhi) = c.win_rate(Team::Hand, Interval::Wald);
            let (dr, dlo, dhi) = c.win_rate(Team::Deck, Interval::Wald);
            let (hp, dp) = c.mean_points();
            let (ht, dt) = (c.timing(Team::Hand), c.timing(Team::Deck));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.3},{:.3},{:.6},{:.6},{:.6},{:.6}",
                csv_field(&c.hand),
                csv_field(&c.deck),
                c.matches,
                c.hand_wins,
                c.deck_wins,
                c.ties,
                hr,
                hlo,
                hhi,
                dr,
                dlo,
                dhi,
                c.tie_rate(),
                hp,
                dp,
                ht.mean,
                ht.median,
                dt.mean,
                dt.median
            );
        }
        out
    }

    /// Hand-team win/loss/tie grids, hand strategies down, deck across.
    pub fn summary(&self) -> String {
        let mut rows: Vec<&str> = Vec::new();
        let mut cols: Vec<&str> = Vec::new();
        for c in &self.cells {
            if !rows.contains(&c.hand.as_str()) {
                rows.push(&c.hand);
            }
            if !cols.contains(&c.deck.as_str()) {
                cols.push(&c.deck);
            }
        }
        let mut out = String::new();
        type Count = fn(&Cell) -> usize;
        let grids: [(&str, Count); 3] =
            [("wins of the hand team", |c| c.hand_wins), ("losses of the hand team", |c| c.deck_wins), ("ties", |c| c.ties)];
        for (title, count) in grids {
            let _ = writeln!(out, "== {title} (rows: hand, columns: deck) ==");
            for r in &rows {
                let _ = writeln!(out, "{r}");
                for col in &cols {
                    if let Some(c) = self.cell(r, col) {
                        let (lo, hi) = proportion_ci(count(c), c.matches, Interval::Wald);
                        let p = c.rate(count(c));
                        let _ = writeln!(out, "    vs {col}: {:5.1}% [{:.1} - {:.1}]  n={}", 100.0 * p, 100.0 * lo, 100.0 * hi, c.matches);
                    }
                }
            }
        }
        let _ = writeln!(out, "== scoreboard (both roles) ==");
        for (s, (w, l, t)) in self.per_strategy() {
            let n = (w + l + t).max(1) as f64;
            let _ = writeln!(
                out,
                "{s}: won {:.1}%  lost {:.1}%  tied {:.1}%",
                100.0 * w as f64 / n,
                100.0 * l as f64 / n,
                100.0 * t as f64 / n
            );
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn run_job(plan: &ExperimentPlan, job: &Job) -> Result<(usize, MatchRun, u64), EngineError> {
    let seed = deck_seed(plan.deck_seed, job.deck);
    let salt = mix(mix(seed, job.repeat as u64), job.pairing as u64);
    let run = run_match(deal(seed, 3), &job.hand, &job.deck_strategy, salt)?;
    Ok((job.pairing, run, seed))
}

/// Runs every pairing on the same deck list and aggregates the results.
pub fn run_plan(plan: &ExperimentPlan) -> Result<ResultTable, ExperimentError> {
    let jobs = plan.jobs();
    let pairings = plan.expanded_pairings();
    let results = execute(plan, &jobs);
    let mut table = ResultTable::default();
    for p in &pairings {
        table.cell_mut(&p.hand.to_string(), &p.deck.to_string());
    }
    for (index, r) in results.into_iter().enumerate() {
        let (pi, run, seed) = r.map_err(|source| ExperimentError::Match { index, source })?;
        let p = &pairings[pi];
        let (hand, deck) = (p.hand.to_string(), p.deck.to_string());
        let cell = table.cell_mut(&hand, &deck);
        cell.add(run.score.points());
        for t in 0..2 {
            cell.timing_samples[t].extend_from_slice(&run.timings[t]);
        }
        if plan.keep_logs {
            let log =
                MatchLog::from_state(DealSpec::Seed { seed, dealer: 3 }, &run.state).with_meta("hand", &hand).with_meta("deck", &deck);
            table.logs.push(log);
        }
    }
    Ok(table)
}

#[cfg(feature = "parallel")]
fn execute(plan: &ExperimentPlan, jobs: &[Job]) -> Vec<Result<(usize, MatchRun, u64), EngineError>> {
    use rayon::prelude::*;
    let work = || jobs.par_iter().map(|j| run_job(plan, j)).collect();
    if plan.threads == 1 {
        return jobs.iter().map(|j| run_job(plan, j)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(plan.threads).build() {
        Ok(pool) => pool.install(work),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running sequentially");
            jobs.iter().map(|j| run_job(plan, j)).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn execute(plan: &ExperimentPlan, jobs: &[Job]) -> Vec<Result<(usize, MatchRun, u64), EngineError>> {
    jobs.iter().map(|j| run_job(plan, j)).collect()
}

/// Parameters that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    UctC,
    Reward,
    Sim,
    Epsilon,
    Iterations,
    Determinizer,
}

impl std::str::FromStr for SweepAxis {
    type Err = ExperimentError;
    fn from_str(s: &str) -> Result<SweepAxis, ExperimentError> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uct_c" | "c" => SweepAxis::UctC,
            "reward" => SweepAxis::Reward,
            "sim" => SweepAxis::Sim,
            "epsilon" | "eps" => SweepAxis::Epsilon,
            "iterations" | "iters" => SweepAxis::Iterations,
            "determinizer" | "determinizator" | "det" => SweepAxis::Determinizer,
            other => return Err(ExperimentError::InvalidPlan(format!("unknown sweep axis {other:?}"))),
        })
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::UctC => "uct_c",
            SweepAxis::Reward => "reward",
            SweepAxis::Sim => "sim",
            SweepAxis::Epsilon => "epsilon",
            SweepAxis::Iterations => "iterations",
            SweepAxis::Determinizer => "determinizer",
        }
    }

    /// `subject` with this axis set to `value`.
    pub fn apply(self, subject: &Strategy, value: &str) -> Result<Strategy, ExperimentError> {
        let bad = |why: &str| ExperimentError::SweepValue { axis: self.name().into(), value: value.into(), why: why.into() };
        let mut s = *subject;
        if self == SweepAxis::Determinizer {
            return match &mut s {
                Strategy::Ismcts(c) => {
                    c.det = value.parse::<DeterminizerKind>().map_err(|e| bad(&e.to_string()))?;
                    Ok(s)
                }
                _ => Err(bad("only ismcts has a determinizer")),
            };
        }
        let cfg = s.search_config_mut().ok_or_else(|| bad("only search strategies have this parameter"))?;
        match self {
            SweepAxis::UctC => cfg.uct_c = value.parse().map_err(|_| bad("not a number"))?,
            SweepAxis::Reward => cfg.reward = value.parse::<RewardFn>().map_err(|e| bad(&e.to_string()))?,
            SweepAxis::Sim => cfg.sim = value.parse::<SimStrategy>().map_err(|e| bad(&e.to_string()))?,
            SweepAxis::Epsilon => {
                let e: f64 = value.parse().map_err(|_| bad("not a number"))?;
                if !(0.0..=1.0).contains(&e) {
                    return Err(bad("ε must lie in [0, 1]"));
                }
                cfg.sim = SimStrategy::EpsilonGreedy(e);
            }
            SweepAxis::Iterations => cfg.iterations = value.parse().ok().filter(|n| *n > 0).ok_or_else(|| bad("not a positive integer"))?,
            SweepAxis::Determinizer => unreachable!(),
        }
        Ok(s)
    }
}

/// One row of a sweep: the subject's results at one value in one role.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: String,
    pub role: Team,
    pub matches: usize,
    pub wins: usize,
    pub ties: usize,
    pub win_rate: f64,
    pub std_err: f64,
}

/// Plays `subject` (with the axis set to each value) against `baseline`
/// in both roles, on the plan's decks.
pub fn sweep(
    axis: SweepAxis,
    values: &[String],
    subject: &Strategy,
    baseline: &Strategy,
    plan: &ExperimentPlan,
) -> Result<Vec<SweepPoint>, ExperimentError> {
    let mut out = Vec::new();
    for v in values {
        let s = axis.apply(subject, v)?;
        let p = ExperimentPlan { pairings: vec![Pairing { hand: s, deck: *baseline }], symmetric: true, ..plan.clone() };
        let table = run_plan(&p)?;
        for role in Team::BOTH {
            let cell = match role {
                Team::Hand => table.cell(&s.to_string(), &baseline.to_string()),
                Team::Deck => table.cell(&baseline.to_string(), &s.to_string()),
            };
            let Some(c) = cell else { continue };
            let wins = if role == Team::Hand { c.hand_wins } else { c.deck_wins };
            let n = c.matches.max(1) as f64;
            let p = wins as f64 / n;
            out.push(SweepPoint {
                value: v.clone(),
                role,
                matches: c.matches,
                wins,
                ties: c.ties,
                win_rate: p,
                std_err: (p * (1.0 - p) / n).sqrt(),
            });
        }
    }
    Ok(out)
}

pub fn sweep_csv(axis: SweepAxis, points: &[SweepPoint]) -> String {
    let mut out = format!("{},role,matches,wins,ties,win_rate,std_err\n", axis.name());
    for p in points {
        let role = if p.role == Team::Hand { "hand" } else { "deck" };
        let _ = writeln!(out, "{},{},{},{},{},{:.4},{:.4}", csv_field(&p.value), role, p.matches, p.wins, p.ties, p.win_rate, p.std_err);
    }
    out
}

/// Mid-game states reached by greedy play, one per sample, at assorted turns.
pub fn sample_states(samples: usize, seed: u64) -> Vec<MatchState> {
    let mut buf = Vec::new();
    (0..samples)
        .map(|i| {
            let s = mix(seed, i as u64);
            let mut st = MatchState::new(deal(s, 3));
            let stop = (s % 28) as u8;
            while st.turn() < stop {
                st.apply(greedy_move(&st.pos, &mut buf)).expect("greedy moves are legal");
            }
            st
        })
        .collect()
}

/// Per-move decision time of `strategy` at each iteration count.
pub fn measure_timing(
    strategy: &Strategy,
    iterations: &[u32],
    samples: usize,
    seed: u64,
) -> Result<Vec<(u32, TimingStats)>, ExperimentError> {
    if samples == 0 {
        return Err(ExperimentError::NoSamples);
    }
    let states = sample_states(samples, seed);
    let configs: Vec<Strategy> = iterations
        .iter()
        .map(|&it| {
            let mut s = *strategy;
            if let Some(cfg) = s.search_config_mut() {
                cfg.iterations = it.max(1);
            }
            s
        })
        .collect();
    // warm caches and the allocator before anything is timed
    if let (Some(st), Some(s)) = (states.first(), configs.first()) {
        let _ = s.choose(st, u64::MAX);
    }
    // interleaved, so a stall on the machine hits every count alike
    let mut times = vec![Vec::with_capacity(samples); configs.len()];
    for (i, st) in states.iter().enumerate() {
        for (k, s) in configs.iter().enumerate() {
            let t = Instant::now();
            let mv = s.choose(st, i as u64);
            times[k].push(t.elapsed().as_secs_f64());
            debug_assert!(st.pos.is_legal(&mv));
        }
    }
    let out = iterations.iter().zip(&times).map(|(&it, t)| (it, TimingStats::from_samples(t))).collect();
    Ok(out)
}
