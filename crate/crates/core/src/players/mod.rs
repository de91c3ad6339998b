//! Rule-based players: Greedy, Chitarrella-Saracino and Cicuti-Guardamagna.
//!
//! All three are fair players: they see a [`PlayerView`] and nothing else.

mod expert;

use std::fmt;
use std::str::FromStr;

use crate::cards::{Card, CardSet, Seat, SETTEBELLO};
use crate::engine::{Move, PlayerView, Position, TURNS};
use crate::error::ParseError;
use crate::guessing::GuessState;

pub use expert::{cg_choose, cg_choose_traced, cs_choose, cs_choose_traced, CgRule, CsRule};

/// Card importance: primiera value ×10, +5 for coins, +40 more for the
/// settebello. Knave, horse and king are split by one point each so the
/// order is total.
#[inline]
pub fn importance(card: Card) -> u32 {
    let mut v = card.primiera_value() * 10;
    if card.is_coin() {
        v += 5;
    }
    if card == SETTEBELLO {
        v += 40;
    }
    if card.rank() >= 8 {
        v += (card.rank() - 8) as u32;
    }
    v
}

#[inline]
pub fn set_importance(set: CardSet) -> u32 {
    set.iter().map(importance).sum()
}

/// What a rule player needs to rank moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Situation {
    pub table: CardSet,
    pub turn: u8,
    /// Ranks an opponent may still hold (bit `r` for rank `r`).
    pub threats: u16,
}

impl Situation {
    pub fn from_view(view: &PlayerView) -> Situation {
        Situation { table: view.table, turn: view.turn, threats: view.unseen().rank_mask() }
    }

    /// Threats restricted to what the guessing module lets the opponents hold.
    pub fn from_guess(view: &PlayerView, gs: &GuessState) -> Situation {
        let left = view.seat.next();
        let right = view.seat.offset(3);
        let pool = gs.candidates[left.index()] | gs.candidates[right.index()];
        Situation { table: view.table, turn: view.turn, threats: pool.rank_mask() }
    }

    #[inline]
    pub fn table_after(&self, mv: &Move) -> CardSet {
        if mv.captured.is_empty() {
            self.table.union(CardSet::single(mv.played))
        } else {
            self.table - mv.captured
        }
    }

    /// Whether the next player could sweep the table this move leaves.
    #[inline]
    pub fn leaves_scopa(&self, mv: &Move) -> bool {
        if self.turn + 1 >= TURNS - 1 {
            return false;
        }
        let after = self.table_after(mv);
        if after.is_empty() {
            return false;
        }
        let sum = after.rank_sum();
        sum <= 10 && self.threats & (1 << sum) != 0
    }

    #[inline]
    pub fn is_scopa(&self, mv: &Move) -> bool {
        mv.is_capture() && mv.captured == self.table && self.turn < TURNS - 1
    }
}

/// Picks the element with the largest key; ties go to the smallest move.
fn best_by<K: Ord>(moves: impl Iterator<Item = Move>, mut key: impl FnMut(&Move) -> K) -> Option<Move> {
    let mut best: Option<(K, Move)> = None;
    for mv in moves {
        let k = key(&mv);
        best = match best {
            None => Some((k, mv)),
            Some((bk, bm)) => {
                if k > bk || (k == bk && mv < bm) {
                    Some((k, mv))
                } else {
                    Some((bk, bm))
                }
            }
        };
    }
    best.map(|(_, m)| m)
}

/// Ranking of a capture: captured importance, then the importance of the
/// card that goes to the pile with it.
#[inline]
fn capture_key(mv: &Move) -> (u32, u32) {
    (set_importance(mv.captured), importance(mv.played))
}

/// Greedy choice among captures, including the scopa decision.
///
/// A scopa is taken unless another capture would bring the settebello
/// home by playing it without leaving a sweep behind; a settebello lying
/// on the table is swept anyway.
pub fn greedy_capture(moves: &[Move], sit: &Situation) -> Option<Move> {
    let captures = moves.iter().filter(|m| m.is_capture()).copied();
    if let Some(s) = best_by(captures.clone().filter(|m| sit.is_scopa(m)), capture_key) {
        let settebello =
            best_by(captures.clone().filter(|m| m.played == SETTEBELLO && !sit.is_scopa(m) && !sit.leaves_scopa(m)), capture_key);
        return Some(settebello.unwrap_or(s));
    }
    best_by(captures, |m| (!sit.leaves_scopa(m), capture_key(m)))
}

/// Greedy choice among placements: safe first, then least important.
pub fn greedy_place(moves: &[Move], sit: &Situation) -> Option<Move> {
    best_by(moves.iter().filter(|m| !m.is_capture()).copied(), |m| (!sit.leaves_scopa(m), std::cmp::Reverse(importance(m.played))))
}

/// The Greedy decision over an explicit move list: moves that leave no
/// scopa to the opponents come first, then captures before placements.
pub fn greedy_pick(moves: &[Move], sit: &Situation) -> Move {
    if moves.len() == 1 {
        return moves[0];
    }
    match (greedy_capture(moves, sit), greedy_place(moves, sit)) {
        (Some(c), Some(p)) if sit.leaves_scopa(&c) && !sit.leaves_scopa(&p) => p,
        (c, p) => c.or(p).expect("at least one legal move"),
    }
}

/// Greedy player over a view.
pub fn greedy_choose(view: &PlayerView) -> Move {
    let moves = view.legal_moves();
    greedy_pick(&moves, &Situation::from_view(view))
}

/// Greedy move for the player to act in a full position, treating the other
/// hands as unseen. Used inside simulations; `buf` is scratch space.
#[inline]
pub fn greedy_move(pos: &Position, buf: &mut Vec<Move>) -> Move {
    buf.clear();
    pos.legal_moves_into(buf);
    let sit = Situation { table: pos.table, turn: pos.turn, threats: pos.unseen_by(pos.current).rank_mask() };
    greedy_pick(buf, &sit)
}

/// Identifier of a rule-based strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleStrategy {
    Greedy,
    Cs,
    Cg,
}

impl RuleStrategy {
    pub fn id(self) -> &'static str {
        match self {
            RuleStrategy::Greedy => "greedy",
            RuleStrategy::Cs => "cs",
            RuleStrategy::Cg => "cg",
        }
    }
}

impl fmt::Display for RuleStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for RuleStrategy {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<RuleStrategy, ParseError> {
        match s {
            "greedy" => Ok(RuleStrategy::Greedy),
            "cs" => Ok(RuleStrategy::Cs),
            "cg" => Ok(RuleStrategy::Cg),
            _ => Err(ParseError::Strategy(s.into(), "expected greedy|cs|cg".into())),
        }
    }
}

/// A rule player. CS and CG rebuild their guess state from the view's
/// history on every decision, so the player itself holds no match state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RulePlayer {
    pub strategy: RuleStrategy,
}

impl RulePlayer {
    pub fn new(strategy: RuleStrategy) -> RulePlayer {
        RulePlayer { strategy }
    }

    pub fn choose(&self, view: &PlayerView) -> Move {
        match self.strategy {
            RuleStrategy::Greedy => greedy_choose(view),
            RuleStrategy::Cs => cs_choose(view, &GuessState::from_view(view)),
            RuleStrategy::Cg => cg_choose(view, &GuessState::from_view(view)),
        }
    }
}

/// Team-relative helper: seat 1 is the dealer's teammate.
pub(crate) fn is_dealers_teammate(seat: Seat) -> bool {
    seat.index() == 1
}
