//! Plain-text match log: one record per line, replayable.
//!
//! ```text
//! scopone-log 1
//! meta hand greedy
//! deal seed 42 dealer 3
//! 0 Jd 3s 5d
//! 1 4h
//! 2 7d 7s scopa
//! ...
//! score 4 3
//! ```
//!
//! A deal may instead be spelled out with `hand <seat> <cards>` lines and a
//! `table <cards>` line. Move records are `seat played [captured...] [scopa]`.
//! Logs without a `score` line describe unfinished matches.

use std::fmt::Write as _;

use crate::cards::{deal, Card, CardSet, DealResult, Seat};
use crate::engine::{HistoryEntry, MatchState, Move};
use crate::error::ParseError;

pub const MAGIC: &str = "scopone-log 1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DealSpec {
    Seed { seed: u64, dealer: u8 },
    Explicit(DealResult),
}

impl DealSpec {
    pub fn resolve(&self) -> DealResult {
        match *self {
            DealSpec::Seed { seed, dealer } => deal(seed, dealer),
            DealSpec::Explicit(d) => d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveRecord {
    pub seat: Seat,
    pub mv: Move,
    pub scopa: bool,
}

impl From<&HistoryEntry> for MoveRecord {
    fn from(h: &HistoryEntry) -> MoveRecord {
        MoveRecord { seat: h.seat, mv: h.mv, scopa: h.scopa }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchLog {
    pub meta: Vec<(String, String)>,
    pub deal: DealSpec,
    pub moves: Vec<MoveRecord>,
    /// Team points, present once the match is over.
    pub score: Option<[u32; 2]>,
}

impl MatchLog {
    pub fn new(deal: DealSpec) -> MatchLog {
        MatchLog { meta: Vec::new(), deal, moves: Vec::new(), score: None }
    }

    /// Log of a played match; the score is filled in when it is over.
    pub fn from_state(deal: DealSpec, state: &MatchState) -> MatchLog {
        let score = state.score().ok().map(|s| s.points());
        MatchLog { meta: Vec::new(), deal, moves: state.history.iter().map(MoveRecord::from).collect(), score }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> MatchLog {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Header lines: magic, metadata and the deal.
    pub fn header(&self) -> String {
        let mut out = String::new();
        out.push_str(MAGIC);
        out.push('\n');
        for (k, v) in &self.meta {
            let _ = writeln!(out, "meta {k} {v}");
        }
        match self.deal {
            DealSpec::Seed { seed, dealer } => {
                let _ = writeln!(out, "deal seed {seed} dealer {dealer}");
            }
            DealSpec::Explicit(d) => {
                for s in Seat::ALL {
                    let _ = writeln!(out, "hand {} {}", s.index(), d.hands[s.index()]);
                }
                let _ = writeln!(out, "table {}", d.table);
                let _ = writeln!(out, "dealer {}", d.dealer_seat);
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = self.header();
        for r in &self.moves {
            out.push_str(&move_line(r));
        }
        if let Some(s) = self.score {
            out.push_str(&score_line(s));
        }
        out
    }

    pub fn parse(text: &str) -> Result<MatchLog, ParseError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let err = |line: usize, msg: &str| ParseError::Log { line, msg: msg.to_string() };
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            Some((n, _)) => return Err(err(n, "missing log header")),
            None => return Err(err(0, "empty log")),
        }
        let mut meta = Vec::new();
        let mut seed_deal = None;
        let mut hands: [Option<CardSet>; 4] = [None; 4];
        let mut table = None;
        let mut dealer = 3u8;
        let mut moves = Vec::new();
        let mut score = None;
        for (n, line) in lines {
            if score.is_some() {
                return Err(err(n, "records after score"));
            }
            let (head, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match head {
                "meta" => {
                    let (k, v) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    meta.push((k.to_string(), v.trim().to_string()));
                }
                "deal" => {
                    let f: Vec<&str> = rest.split_whitespace().collect();
                    match f.as_slice() {
                        ["seed", s] | ["seed", s, "dealer", _] => {
                            let seed = s.parse().map_err(|_| err(n, "bad seed"))?;
                            if let ["seed", _, "dealer", d] = f.as_slice() {
                                dealer = d.parse().ok().filter(|d| *d < 4).ok_or_else(|| err(n, "bad dealer"))?;
                            }
                            seed_deal = Some(seed);
                        }
                        _ => return Err(err(n, "expected `deal seed <n> [dealer <seat>]`")),
                    }
                }
                "hand" => {
                    let (s, cards) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                    let s: u8 = s.parse().ok().filter(|s| *s < 4).ok_or_else(|| err(n, "bad seat"))?;
                    hands[s as usize] = Some(cards.parse().map_err(|e: ParseError| err(n, &e.to_string()))?);
                }
                "table" => table = Some(rest.parse::<CardSet>().map_err(|e| err(n, &e.to_string()))?),
                "dealer" => dealer = rest.parse().ok().filter(|d| *d < 4).ok_or_else(|| err(n, "bad dealer"))?,
                "score" => {
                    let f: Vec<u32> =
                        rest.split_whitespace().map(|x| x.parse().map_err(|_| err(n, "bad score"))).collect::<Result<_, _>>()?;
                    if f.len() != 2 {
                        return Err(err(n, "score needs two numbers"));
                    }
                    score = Some([f[0], f[1]]);
                }
                _ => moves.push(parse_move_line(line).map_err(|e| err(n, &e.to_string()))?),
            }
        }
        let deal = match (seed_deal, table, hands) {
            (Some(seed), None, [None, None, None, None]) => DealSpec::Seed { seed, dealer },
            (None, Some(table), [Some(a), Some(b), Some(c), Some(d)]) => {
                let d = DealResult { hands: [a, b, c, d], table, dealer_seat: dealer };
                if !d.is_valid() {
                    return Err(err(0, "explicit deal is not a partition of the deck"));
                }
                DealSpec::Explicit(d)
            }
            _ => return Err(err(0, "need either a deal seed or four hands and a table")),
        };
        Ok(MatchLog { meta, deal, moves, score })
    }

    /// Replays the moves, checking seats, scopa flags and the recorded score.
    pub fn replay(&self) -> Result<MatchState, ParseError> {
        let mut st = MatchState::new(self.deal.resolve());
        for (i, r) in self.moves.iter().enumerate() {
            let bad = |msg: String| ParseError::Log { line: 0, msg: format!("move {}: {msg}", i + 1) };
            if r.seat != st.current() {
                return Err(bad(format!("seat {} out of turn", r.seat.index())));
            }
            let scopa = st.apply(r.mv).map_err(|e| bad(e.to_string()))?;
            if scopa != r.scopa {
                return Err(bad("scopa flag disagrees with the rules".into()));
            }
        }
        if let Some(recorded) = self.score {
            let actual =
                st.score().map_err(|_| ParseError::Log { line: 0, msg: "score recorded for an unfinished match".into() })?.points();
            if actual != recorded {
                return Err(ParseError::Log { line: 0, msg: format!("recorded score {recorded:?} but replay gives {actual:?}") });
            }
        }
        Ok(st)
    }
}

pub fn move_line(r: &MoveRecord) -> String {
    let mut s = format!("{} {}", r.seat.index(), r.mv.played);
    for c in r.mv.captured {
        let _ = write!(s, " {c}");
    }
    if r.scopa {
        s.push_str(" scopa");
    }
    s.push('\n');
    s
}

pub fn score_line(points: [u32; 2]) -> String {
    format!("score {} {}\n", points[0], points[1])
}

fn parse_move_line(line: &str) -> Result<MoveRecord, ParseError> {
    let mut f = line.split_whitespace();
    let seat: u8 =
        f.next().and_then(|s| s.parse().ok()).ok_or_else(|| ParseError::Log { line: 0, msg: format!("unknown record {line:?}") })?;
    let seat = Seat::new(seat)?;
    let played: Card = f.next().ok_or_else(|| ParseError::Log { line: 0, msg: "missing card".into() })?.parse()?;
    let mut captured = CardSet::EMPTY;
    let mut scopa = false;
    for tok in f {
        if tok == "scopa" {
            scopa = true;
            continue;
        }
        if scopa {
            return Err(ParseError::Log { line: 0, msg: "cards after scopa marker".into() });
        }
        let c: Card = tok.parse()?;
        if captured.contains(c) || c == played {
            return Err(ParseError::DuplicateCard(c.to_string()));
        }
        captured.insert(c);
    }
    Ok(MoveRecord { seat, mv: Move { played, captured }, scopa })
}
