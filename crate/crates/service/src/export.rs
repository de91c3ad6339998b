//! Study export: one record per finished game, recomputed from the logs.

use std::collections::BTreeMap;
use std::fmt::Write;

use scopone::Seat;
use serde::Serialize;

use crate::live::Outcome;
use crate::store::Store;
use crate::ServiceError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRecord {
    pub id: String,
    pub strategy: String,
    pub mode: String,
    pub human_seat: u8,
    pub deals: u32,
    pub human_points: u32,
    pub ai_points: u32,
    pub outcome: Outcome,
    pub duration_s: f64,
}

/// Human results against one strategy.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub matches: usize,
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
}

pub fn records(store: &Store) -> Result<Vec<StudyRecord>, ServiceError> {
    let mut out = Vec::new();
    for (id, entry) in store.index()? {
        let Some(finished) = entry.finished_ms else { continue };
        let mut points = [0u32; 2];
        let mut first = None;
        for k in 0..entry.deals {
            let log = store.read_log(id, k)?;
            let st = log.replay().map_err(|e| ServiceError::Corrupt(format!("game {id} deal {k}: {e}")))?;
            let score = st.score().map_err(|_| ServiceError::Corrupt(format!("game {id} deal {k} unfinished")))?;
            let seat: Seat = log
                .meta("human_seat")
                .and_then(|s| s.parse::<u8>().ok())
                .and_then(|s| Seat::new(s).ok())
                .ok_or_else(|| ServiceError::Corrupt(format!("game {id}: bad human seat")))?;
            let p = score.points();
            points[0] += p[seat.team().index()];
            points[1] += p[1 - seat.team().index()];
            if first.is_none() {
                first =
                    Some((log.meta("strategy").unwrap_or("").to_string(), log.meta("mode").unwrap_or("").to_string(), seat.index() as u8));
            }
        }
        let Some((strategy, mode, human_seat)) = first else { continue };
        out.push(StudyRecord {
            id: id.to_string(),
            strategy,
            mode,
            human_seat,
            deals: entry.deals,
            human_points: points[0],
            ai_points: points[1],
            outcome: Outcome::of(points),
            duration_s: finished.saturating_sub(entry.created_ms) as f64 / 1000.0,
        });
    }
    Ok(out)
}

pub fn summary(records: &[StudyRecord]) -> Vec<StrategyRow> {
    let mut rows: BTreeMap<&str, StrategyRow> = BTreeMap::new();
    for r in records {
        let row = rows.entry(&r.strategy).or_insert_with(|| StrategyRow { strategy: r.strategy.clone(), ..StrategyRow::default() });
        row.matches += 1;
        match r.outcome {
            Outcome::Win => row.wins += 1,
            Outcome::Loss => row.losses += 1,
            Outcome::Tie => row.ties += 1,
        }
    }
    rows.into_values().collect()
}

fn quoted(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn records_csv(records: &[StudyRecord]) -> String {
    let mut out = String::from("id,strategy,mode,human_seat,deals,human_points,ai_points,outcome,duration_s\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.id,
            quoted(&r.strategy),
            r.mode,
            r.human_seat,
            r.deals,
            r.human_points,
            r.ai_points,
            r.outcome.id(),
            r.duration_s
        );
    }
    out
}

/// Human wins, losses and ties per strategy, with rates.
pub fn summary_csv(rows: &[StrategyRow]) -> String {
    let mut out = String::from("strategy,matches,human_wins,human_losses,ties,win_rate,loss_rate,tie_rate\n");
    for r in rows {
        let n = r.matches.max(1) as f64;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.4},{:.4},{:.4}",
            quoted(&r.strategy),
            r.matches,
            r.wins,
            r.losses,
            r.ties,
            r.wins as f64 / n,
            r.losses as f64 / n,
            r.ties as f64 / n
        );
    }
    out
}
