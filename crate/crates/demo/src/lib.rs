//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Everything crosses the boundary as JSON strings, so the page needs no
//! generated TypeScript types. Search runs synchronously; keep iteration
//! counts modest.

use scopone::engine::TURNS;
use scopone::strategy::{mix, Strategy};
use scopone::{capture_combinations, deal, Card, CardSet, MatchState, Move};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn names(set: CardSet) -> Vec<String> {
    set.iter().map(|c| c.to_string()).collect()
}

#[derive(Serialize)]
struct MoveOut {
    text: String,
    played: String,
    captured: Vec<String>,
    scopa: bool,
}

fn move_out(m: Move, table: CardSet) -> MoveOut {
    MoveOut {
        text: m.to_string(),
        played: m.played.to_string(),
        captured: names(m.captured),
        scopa: m.captured == table && !m.captured.is_empty(),
    }
}

/// Capture explorer: every legal move for `hand` against `table`, both
/// given as card lists like `"7d Ks 3c"`. A move that clears the table is
/// flagged as a scopa (the engine withholds it on the very last play).
#[wasm_bindgen]
pub fn explore(hand: &str, table: &str) -> Result<String, JsError> {
    let hand: CardSet = hand.parse().map_err(err)?;
    let table: CardSet = table.parse().map_err(err)?;
    if !hand.is_disjoint(table) {
        return Err(JsError::new("a card cannot be both in hand and on the table"));
    }
    let mut moves = Vec::new();
    for card in hand {
        let caps = capture_combinations(card, table);
        if caps.is_empty() {
            moves.push(move_out(Move::place(card), table));
        }
        moves.extend(caps.into_iter().map(|c| move_out(Move::capture(card, c), table)));
    }
    Ok(serde_json::to_string(&moves)?)
}

/// Validates a strategy string and returns its canonical form.
#[wasm_bindgen]
pub fn canonical_strategy(s: &str) -> Result<String, JsError> {
    Ok(s.parse::<Strategy>().map_err(err)?.to_string())
}

/// One deal between two configured teams, stepped from the page.
#[wasm_bindgen]
pub struct Autoplay {
    state: MatchState,
    teams: [Strategy; 2],
    seed: u64,
}

#[wasm_bindgen]
impl Autoplay {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64, hand_team: &str, deck_team: &str) -> Result<Autoplay, JsError> {
        let teams = [hand_team.parse().map_err(err)?, deck_team.parse().map_err(err)?];
        Ok(Autoplay { state: MatchState::new(deal(seed, 3)), teams, seed })
    }

    pub fn is_over(&self) -> bool {
        self.state.is_over()
    }

    /// Lets the configured strategy of the seat to act move; returns the
    /// move as JSON, or `null` once the deal is over.
    pub fn step(&mut self) -> Result<String, JsError> {
        if self.state.is_over() {
            return Ok("null".into());
        }
        let seat = self.state.current();
        let mv = self.teams[seat.team().index()].choose(&self.state, self.seed);
        self.apply(mv)
    }

    /// What `strategy` would play for the seat to act, without playing it.
    pub fn suggest(&self, strategy: &str) -> Result<String, JsError> {
        if self.state.is_over() {
            return Err(JsError::new("the deal is over"));
        }
        let s: Strategy = strategy.parse().map_err(err)?;
        let mv = s.choose(&self.state, mix(self.seed, 0xd0e));
        Ok(serde_json::to_string(&move_out(mv, self.state.pos.table))?)
    }

    /// Plays a move written as in the legal list (`"7d"`, `"7d x 3s 4c"`)
    /// for the seat to act.
    pub fn play(&mut self, text: &str) -> Result<String, JsError> {
        let (played, captured) = text.split_once(" x ").unwrap_or((text, ""));
        let played: Card = played.trim().parse().map_err(err)?;
        let captured: CardSet = captured.parse().map_err(err)?;
        self.apply(Move { played, captured })
    }

    fn apply(&mut self, mv: Move) -> Result<String, JsError> {
        let seat = self.state.current();
        let table = self.state.pos.table;
        let scopa = self.state.apply(mv).map_err(err)?;
        let mut out = serde_json::to_value(move_out(mv, table))?;
        out["scopa"] = json!(scopa);
        out["seat"] = json!(seat.index());
        Ok(out.to_string())
    }

    /// Full open-hand state for the spectator view, plus the score
    /// breakdown once the deal is over.
    pub fn state(&self) -> Result<String, JsError> {
        let p = &self.state.pos;
        let score = self.state.score().ok();
        let v = json!({
            "turn": p.turn,
            "turns": TURNS,
            "current": p.current.index(),
            "hands": p.hands.iter().map(|h| names(*h)).collect::<Vec<_>>(),
            "table": names(p.table),
            "piles": [names(p.piles[0]), names(p.piles[1])],
            "scope": [p.scope[0].len(), p.scope[1].len()],
            "running_points": p.points(),
            "legal": self.state.legal_moves().unwrap_or_default().into_iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "score": score,
            "teams": [self.teams[0].to_string(), self.teams[1].to_string()],
        });
        Ok(v.to_string())
    }
}
