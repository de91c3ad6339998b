//! Rules engine: capture enumeration, legal moves, move application,
//! end-of-match settlement and scoring.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet, DealResult, Seat, Suit, Team, SETTEBELLO};
use crate::error::EngineError;

/// Number of turns in a match (nine rounds of four).
pub const TURNS: u8 = 36;

/// A played card together with the cards it captures (empty for a placement).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub played: Card,
    pub captured: CardSet,
}

impl Move {
    pub fn place(played: Card) -> Move {
        Move { played, captured: CardSet::EMPTY }
    }

    pub fn capture(played: Card, captured: CardSet) -> Move {
        Move { played, captured }
    }

    #[inline]
    pub fn is_capture(&self) -> bool {
        !self.captured.is_empty()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.captured.is_empty() {
            write!(f, "{}", self.played)
        } else {
            write!(f, "{} x {}", self.played, self.captured)
        }
    }
}

impl fmt::Debug for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Calls `f` once per capture available to a card of `rank` on `table`.
///
/// Same-rank table cards take precedence: when any exist only the singleton
/// captures are produced.
#[inline]
pub fn for_each_capture(rank: u8, table: CardSet, mut f: impl FnMut(CardSet)) {
    let same = table & CardSet::of_rank(rank);
    if !same.is_empty() {
        for c in same {
            f(CardSet::single(c));
        }
        return;
    }
    // lower-ranked table cards, in ascending rank so the search can prune
    let mut cards = [0u8; 40];
    let mut n = 0;
    for r in 1..rank {
        for c in table & CardSet::of_rank(r) {
            cards[n] = c.index();
            n += 1;
        }
    }
    if n < 2 {
        return;
    }
    subset_sums(&cards[..n], 0, rank, 0, 0, &mut f);
}

fn subset_sums(cards: &[u8], start: usize, remaining: u8, acc: u64, picked: u8, f: &mut impl FnMut(CardSet)) {
    for i in start..cards.len() {
        let r = cards[i] % 10 + 1;
        if r > remaining {
            // sorted ascending: nothing further fits
            break;
        }
        let next = acc | 1u64 << cards[i];
        if r == remaining {
            if picked >= 1 {
                f(CardSet::from_bits(next));
            }
        } else {
            subset_sums(cards, i + 1, remaining - r, next, picked + 1, f);
        }
    }
}

/// Every capture available to `played` on `table`.
pub fn capture_combinations(played: Card, table: CardSet) -> Vec<CardSet> {
    let mut out = Vec::new();
    for_each_capture(played.rank(), table, |s| out.push(s));
    out
}

/// True when a card of this rank could capture something on the table.
#[inline]
pub fn can_capture(rank: u8, table: CardSet) -> bool {
    let mut any = false;
    if !(table & CardSet::of_rank(rank)).is_empty() {
        return true;
    }
    for_each_capture(rank, table, |_| any = true);
    any
}

/// Compact, copyable game state without history; used by search and rollouts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Position {
    pub hands: [CardSet; 4],
    pub table: CardSet,
    /// Per-team capture piles (scopa cards included).
    pub piles: [CardSet; 2],
    /// Per-team cards that scored a scopa.
    pub scope: [CardSet; 2],
    pub current: Seat,
    pub last_capturer: Option<Seat>,
    pub turn: u8,
}

impl Position {
    pub fn from_deal(deal: &DealResult) -> Position {
        Position {
            hands: deal.hands,
            table: deal.table,
            piles: [CardSet::EMPTY; 2],
            scope: [CardSet::EMPTY; 2],
            current: Seat::ELDEST,
            last_capturer: None,
            turn: 0,
        }
    }

    #[inline]
    pub fn is_over(&self) -> bool {
        self.turn >= TURNS
    }

    #[inline]
    pub fn hand(&self, seat: Seat) -> CardSet {
        self.hands[seat.index()]
    }

    #[inline]
    pub fn current_hand(&self) -> CardSet {
        self.hands[self.current.index()]
    }

    pub fn scopa_count(&self, team: Team) -> u32 {
        self.scope[team.index()].len() as u32
    }

    /// Appends every legal move for the player to act.
    pub fn legal_moves_into(&self, out: &mut Vec<Move>) {
        let table = self.table;
        for card in self.current_hand() {
            let before = out.len();
            for_each_capture(card.rank(), table, |s| out.push(Move::capture(card, s)));
            if out.len() == before {
                out.push(Move::place(card));
            }
        }
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out = Vec::with_capacity(16);
        self.legal_moves_into(&mut out);
        out
    }

    /// Checks a move against the rules without generating the full list.
    pub fn is_legal(&self, mv: &Move) -> bool {
        if self.is_over() || !self.current_hand().contains(mv.played) {
            return false;
        }
        let mut found = false;
        let mut any = false;
        for_each_capture(mv.played.rank(), self.table, |s| {
            any = true;
            found |= s == mv.captured;
        });
        if any {
            found
        } else {
            mv.captured.is_empty()
        }
    }

    /// Applies a move assumed legal. Returns whether it scored a scopa.
    #[inline]
    pub fn apply_unchecked(&mut self, mv: Move) -> bool {
        let seat = self.current;
        let team = seat.team().index();
        self.hands[seat.index()].remove(mv.played);
        let mut scopa = false;
        if mv.captured.is_empty() {
            self.table.insert(mv.played);
        } else {
            self.table = self.table - mv.captured;
            self.piles[team] = self.piles[team] | mv.captured;
            self.piles[team].insert(mv.played);
            self.last_capturer = Some(seat);
            if self.table.is_empty() && self.turn < TURNS - 1 {
                self.scope[team].insert(mv.played);
                scopa = true;
            }
        }
        self.turn += 1;
        self.current = seat.next();
        if self.turn == TURNS {
            self.settle();
        }
        scopa
    }

    /// Leftover table cards go to the team of the last capturer.
    fn settle(&mut self) {
        if let Some(seat) = self.last_capturer {
            let team = seat.team().index();
            self.piles[team] = self.piles[team] | self.table;
            self.table = CardSet::EMPTY;
        }
    }

    /// Team points of a finished position.
    #[inline]
    pub fn points(&self) -> [u32; 2] {
        fast_points(self.piles, self.scope)
    }

    /// Cards the given seat cannot see: the other three hands.
    #[inline]
    pub fn unseen_by(&self, seat: Seat) -> CardSet {
        let mut s = CardSet::EMPTY;
        for other in Seat::ALL {
            if other != seat {
                s = s | self.hands[other.index()];
            }
        }
        s
    }
}

/// One entry of the public move history.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub seat: Seat,
    pub table_before: CardSet,
    pub mv: Move,
    pub scopa: bool,
}

/// Complete authoritative state of a match.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatchState {
    pub deal: DealResult,
    pub pos: Position,
    pub history: Vec<HistoryEntry>,
}

impl MatchState {
    pub fn new(deal: DealResult) -> MatchState {
        let pos = Position::from_deal(&deal);
        MatchState { deal, pos, history: Vec::with_capacity(TURNS as usize) }
    }

    pub fn is_over(&self) -> bool {
        self.pos.is_over()
    }

    pub fn current(&self) -> Seat {
        self.pos.current
    }

    pub fn turn(&self) -> u8 {
        self.pos.turn
    }

    pub fn legal_moves(&self) -> Result<Vec<Move>, EngineError> {
        if self.is_over() {
            return Err(EngineError::MatchOver);
        }
        if self.pos.current_hand().is_empty() {
            return Err(EngineError::InvalidState(format!("seat {} has no cards at turn {}", self.pos.current, self.pos.turn)));
        }
        Ok(self.pos.legal_moves())
    }

    /// Applies a legal move in place.
    pub fn apply(&mut self, mv: Move) -> Result<bool, EngineError> {
        if self.is_over() {
            return Err(EngineError::MatchOver);
        }
        if !self.pos.is_legal(&mv) {
            return Err(EngineError::IllegalMove(mv.to_string()));
        }
        let seat = self.pos.current;
        let table_before = self.pos.table;
        let scopa = self.pos.apply_unchecked(mv);
        self.history.push(HistoryEntry { seat, table_before, mv, scopa });
        Ok(scopa)
    }

    /// Returns the successor state, leaving `self` untouched.
    pub fn apply_move(&self, mv: Move) -> Result<MatchState, EngineError> {
        let mut next = self.clone();
        next.apply(mv)?;
        Ok(next)
    }

    pub fn score(&self) -> Result<MatchScore, EngineError> {
        score_match(&self.pos)
    }

    /// The information available to `seat`.
    pub fn view(&self, seat: Seat) -> PlayerView {
        let mut hand_sizes = [0u8; 4];
        for s in Seat::ALL {
            hand_sizes[s.index()] = self.pos.hand(s).len() as u8;
        }
        PlayerView {
            seat,
            hand: self.pos.hand(seat),
            table: self.pos.table,
            piles: self.pos.piles,
            scope: self.pos.scope,
            hand_sizes,
            current: self.pos.current,
            turn: self.pos.turn,
            last_capturer: self.pos.last_capturer,
            history: self.history.clone(),
        }
    }

    /// Replays a move list from a deal.
    pub fn replay(deal: DealResult, moves: impl IntoIterator<Item = Move>) -> Result<MatchState, EngineError> {
        let mut st = MatchState::new(deal);
        for mv in moves {
            st.apply(mv)?;
        }
        Ok(st)
    }

    /// Checks card conservation and turn bookkeeping.
    pub fn check_invariants(&self) -> Result<(), String> {
        let p = &self.pos;
        let mut seen = CardSet::EMPTY;
        let parts = p.hands.iter().chain(std::iter::once(&p.table)).chain(p.piles.iter());
        let mut total = 0;
        for part in parts {
            if !part.is_disjoint(seen) {
                return Err(format!("overlapping card sets at turn {}", p.turn));
            }
            seen = seen | *part;
            total += part.len();
        }
        let uncaptured_at_end = p.is_over() && p.last_capturer.is_none();
        if seen != CardSet::FULL && !uncaptured_at_end {
            return Err(format!("{} cards accounted for at turn {}", total, p.turn));
        }
        let in_hands: usize = p.hands.iter().map(|h| h.len()).sum();
        if p.turn as usize != 36 - in_hands {
            return Err(format!("turn {} with {} cards in hands", p.turn, in_hands));
        }
        if p.history_len_mismatch(self.history.len()) {
            return Err("history length differs from turn".into());
        }
        for t in Team::BOTH {
            if !p.scope[t.index()].is_subset(p.piles[t.index()]) {
                return Err("scopa card missing from pile".into());
            }
        }
        if p.is_over() && !p.table.is_empty() && p.last_capturer.is_some() {
            return Err("table not settled".into());
        }
        Ok(())
    }
}

impl Position {
    fn history_len_mismatch(&self, len: usize) -> bool {
        len != self.turn as usize
    }
}

/// What one seat knows: its own hand plus everything public.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PlayerView {
    pub seat: Seat,
    pub hand: CardSet,
    pub table: CardSet,
    pub piles: [CardSet; 2],
    pub scope: [CardSet; 2],
    pub hand_sizes: [u8; 4],
    pub current: Seat,
    pub turn: u8,
    pub last_capturer: Option<Seat>,
    pub history: Vec<HistoryEntry>,
}

impl PlayerView {
    /// Cards held by the other three seats, as a pool.
    pub fn unseen(&self) -> CardSet {
        CardSet::FULL - self.hand - self.table - self.piles[0] - self.piles[1]
    }

    pub fn is_my_turn(&self) -> bool {
        self.current == self.seat && self.turn < TURNS
    }

    /// Legal moves for the viewing seat (meaningful on its turn).
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out = Vec::with_capacity(16);
        for card in self.hand {
            let before = out.len();
            for_each_capture(card.rank(), self.table, |s| out.push(Move::capture(card, s)));
            if out.len() == before {
                out.push(Move::place(card));
            }
        }
        out
    }

    /// Cards this seat played so far.
    pub fn own_played(&self) -> CardSet {
        self.history.iter().filter(|h| h.seat == self.seat).map(|h| h.mv.played).collect()
    }
}

/// Per-team breakdown of a finished match.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct TeamScore {
    pub scope: u32,
    pub cards: u32,
    pub coins: u32,
    pub settebello: bool,
    /// Sum of the best primiera value of each suit held.
    pub primiera: u32,
    pub has_all_suits: bool,
    pub points: u32,
}

/// Which team took each deck point (`None` when withheld).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct DeckPoints {
    pub cards: Option<Team>,
    pub coins: Option<Team>,
    pub settebello: Option<Team>,
    pub primiera: Option<Team>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MatchScore {
    pub teams: [TeamScore; 2],
    pub deck_points: DeckPoints,
}

impl MatchScore {
    pub fn points(&self) -> [u32; 2] {
        [self.teams[0].points, self.teams[1].points]
    }

    pub fn winner(&self) -> Option<Team> {
        let [h, d] = self.points();
        match h.cmp(&d) {
            std::cmp::Ordering::Greater => Some(Team::Hand),
            std::cmp::Ordering::Less => Some(Team::Deck),
            std::cmp::Ordering::Equal => None,
        }
    }
}

fn majority(a: u32, b: u32) -> Option<Team> {
    match a.cmp(&b) {
        std::cmp::Ordering::Greater => Some(Team::Hand),
        std::cmp::Ordering::Less => Some(Team::Deck),
        std::cmp::Ordering::Equal => None,
    }
}

/// Best primiera value per 10-bit suit mask.
static SUIT_PRIMIERA: [u8; 1024] = {
    let vals: [u8; 10] = [16, 12, 13, 14, 15, 18, 21, 10, 10, 10];
    let mut t = [0u8; 1024];
    let mut m = 1;
    while m < 1024 {
        let mut best = 0;
        let mut i = 0;
        while i < 10 {
            if m & (1 << i) != 0 && vals[i] > best {
                best = vals[i];
            }
            i += 1;
        }
        t[m] = best;
        m += 1;
    }
    t
};

/// (primiera sum, holds every suit) for a pile.
#[inline]
pub fn primiera_of(pile: CardSet) -> (u32, bool) {
    let b = pile.bits();
    let mut sum = 0u32;
    let mut all = true;
    for s in 0..4 {
        let v = SUIT_PRIMIERA[((b >> (s * 10)) & 0x3ff) as usize] as u32;
        all &= v > 0;
        sum += v;
    }
    (sum, all)
}

fn primiera_point(a: (u32, bool), b: (u32, bool)) -> Option<Team> {
    match (a.1, b.1) {
        (true, true) => majority(a.0, b.0),
        (true, false) => Some(Team::Hand),
        (false, true) => Some(Team::Deck),
        (false, false) => None,
    }
}

/// Points only; the hot path for search rewards.
#[inline]
pub fn fast_points(piles: [CardSet; 2], scope: [CardSet; 2]) -> [u32; 2] {
    let mut pts = [scope[0].len() as u32, scope[1].len() as u32];
    let mut award = |t: Option<Team>| {
        if let Some(t) = t {
            pts[t.index()] += 1;
        }
    };
    award(majority(piles[0].len() as u32, piles[1].len() as u32));
    award(majority((piles[0] & CardSet::COINS).len() as u32, (piles[1] & CardSet::COINS).len() as u32));
    award(if piles[0].contains(SETTEBELLO) {
        Some(Team::Hand)
    } else if piles[1].contains(SETTEBELLO) {
        Some(Team::Deck)
    } else {
        None
    });
    award(primiera_point(primiera_of(piles[0]), primiera_of(piles[1])));
    pts
}

/// Scores a finished match.
pub fn score_match(pos: &Position) -> Result<MatchScore, EngineError> {
    if !pos.is_over() {
        return Err(EngineError::MatchNotOver);
    }
    Ok(score_piles(pos.piles, [pos.scope[0].len() as u32, pos.scope[1].len() as u32]))
}

/// Scores two piles given each team's scopa count.
pub fn score_piles(piles: [CardSet; 2], scope: [u32; 2]) -> MatchScore {
    let mut teams = [TeamScore::default(); 2];
    for t in Team::BOTH {
        let pile = piles[t.index()];
        let (primiera, has_all_suits) = primiera_of(pile);
        teams[t.index()] = TeamScore {
            scope: scope[t.index()],
            cards: pile.len() as u32,
            coins: (pile & CardSet::of_suit(Suit::Coins)).len() as u32,
            settebello: pile.contains(SETTEBELLO),
            primiera,
            has_all_suits,
            points: scope[t.index()],
        };
    }
    let deck_points = DeckPoints {
        cards: majority(teams[0].cards, teams[1].cards),
        coins: majority(teams[0].coins, teams[1].coins),
        settebello: Team::BOTH.into_iter().find(|t| teams[t.index()].settebello),
        primiera: primiera_point((teams[0].primiera, teams[0].has_all_suits), (teams[1].primiera, teams[1].has_all_suits)),
    };
    for t in [deck_points.cards, deck_points.coins, deck_points.settebello, deck_points.primiera].into_iter().flatten() {
        teams[t.index()].points += 1;
    }
    MatchScore { teams, deck_points }
}
