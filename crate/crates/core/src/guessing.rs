//! Card guessing: per-seat sets of cards a player may (or must) hold,
//! narrowed from the public move history.
//!
//! Three inference classes are applied to moves by other seats:
//!
//! * `ScopaNegative`: a capture that left cards on a table whose rank sum
//!   was at most ten means the mover held no card of that rank.
//! * `PlacementSweep`: the same reasoning applied to a placement.
//! * `CoinPreference`: capturing with a non-coin card means the mover does
//!   not hold the coin card of the same rank.
//!
//! When the combined exclusions make the hidden hands impossible to fill,
//! coin-preference exclusions are dropped first, then scopa-negative ones.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use thiserror::Error;

use crate::cards::{Card, CardSet, Seat, Suit};
use crate::engine::{HistoryEntry, Move, PlayerView, TURNS};

/// Rejection-sampling attempts before switching to constructive sampling.
pub const REJECTION_ATTEMPTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inference {
    ScopaNegative = 0,
    PlacementSweep = 1,
    CoinPreference = 2,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuessError {
    #[error("hand sizes sum to {sizes} but {unseen} cards are unseen")]
    SizeMismatch { sizes: usize, unseen: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuessConfig {
    pub coin_preference: bool,
}

impl Default for GuessConfig {
    fn default() -> Self {
        GuessConfig { coin_preference: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessState {
    pub observer: Seat,
    pub unseen: CardSet,
    pub hand_sizes: [u8; 4],
    /// Cards each seat may hold (empty for the observer).
    pub candidates: [CardSet; 4],
    /// Cards each seat must hold.
    pub certain: [CardSet; 4],
    excluded: [[CardSet; 3]; 4],
    /// Inference classes dropped by feasibility repair.
    dropped: [bool; 3],
    turn: u8,
    config: GuessConfig,
}

impl GuessState {
    /// Everything the observer cannot see is possible for every other seat.
    pub fn init(view: &PlayerView) -> GuessState {
        GuessState::init_with(view, GuessConfig::default())
    }

    pub fn init_with(view: &PlayerView, config: GuessConfig) -> GuessState {
        let unseen = view.unseen();
        GuessState::fresh(view.seat, unseen, view.hand_sizes, view.turn, config)
    }

    fn fresh(observer: Seat, unseen: CardSet, hand_sizes: [u8; 4], turn: u8, config: GuessConfig) -> GuessState {
        let mut gs = GuessState {
            observer,
            unseen,
            hand_sizes,
            candidates: [CardSet::EMPTY; 4],
            certain: [CardSet::EMPTY; 4],
            excluded: [[CardSet::EMPTY; 3]; 4],
            dropped: [false, false, !config.coin_preference],
            turn,
            config,
        };
        gs.refresh();
        gs
    }

    /// Rebuilds the state by replaying the view's history from the deal.
    pub fn from_view(view: &PlayerView) -> GuessState {
        GuessState::from_view_with(view, GuessConfig::default())
    }

    pub fn from_view_with(view: &PlayerView, config: GuessConfig) -> GuessState {
        let Some(first) = view.history.first() else {
            return GuessState::init_with(view, config);
        };
        if view.history.len() != view.turn as usize {
            return GuessState::init_with(view, config);
        }
        let start_hand = view.hand | view.own_played();
        let unseen = CardSet::FULL - start_hand - first.table_before;
        let mut gs = GuessState::fresh(view.seat, unseen, [9; 4], 0, config);
        for h in &view.history {
            gs.observe(h);
        }
        gs
    }

    pub fn observe(&mut self, entry: &HistoryEntry) {
        self.observe_move(entry.seat, entry.table_before, entry.mv);
    }

    /// Updates the state after `seat` played `mv` on `table_before`.
    pub fn observe_move(&mut self, seat: Seat, table_before: CardSet, mv: Move) {
        let s = seat.index();
        self.hand_sizes[s] = self.hand_sizes[s].saturating_sub(1);
        let turn = self.turn;
        self.turn += 1;
        if seat == self.observer {
            self.refresh();
            return;
        }
        self.unseen.remove(mv.played);

        let sum = table_before.rank_sum();
        let swept = !mv.captured.is_empty() && mv.captured == table_before;
        if !table_before.is_empty() && sum <= 10 && !swept && turn < TURNS - 1 {
            let class = if mv.is_capture() { Inference::ScopaNegative } else { Inference::PlacementSweep };
            let sweepers = CardSet::of_rank(sum as u8) & self.unseen;
            self.excluded[s][class as usize] = self.excluded[s][class as usize] | sweepers;
        }
        if mv.is_capture() && !mv.played.is_coin() {
            let coin = CardSet::of_rank(mv.played.rank()) & CardSet::of_suit(Suit::Coins);
            let coin = coin & self.unseen;
            let c = Inference::CoinPreference as usize;
            self.excluded[s][c] = self.excluded[s][c] | coin;
        }
        self.refresh();
    }

    /// Candidate sets from the active exclusions, repaired until feasible.
    fn refresh(&mut self) {
        loop {
            if self.propagate() {
                return;
            }
            if !self.dropped[Inference::CoinPreference as usize] {
                self.dropped[Inference::CoinPreference as usize] = true;
            } else if !self.dropped[Inference::ScopaNegative as usize] {
                self.dropped[Inference::ScopaNegative as usize] = true;
            } else if !self.dropped[Inference::PlacementSweep as usize] {
                self.dropped[Inference::PlacementSweep as usize] = true;
            } else {
                // only reachable with inconsistent input
                self.propagate_unconstrained();
                return;
            }
            log::debug!("guessing: dropped inference class, dropped={:?}", self.dropped);
        }
    }

    fn hidden_seats(&self) -> impl Iterator<Item = Seat> + '_ {
        Seat::ALL.into_iter().filter(move |s| *s != self.observer)
    }

    fn propagate_unconstrained(&mut self) {
        for s in Seat::ALL {
            let i = s.index();
            self.candidates[i] = if s == self.observer || self.hand_sizes[i] == 0 { CardSet::EMPTY } else { self.unseen };
            self.certain[i] = CardSet::EMPTY;
        }
        self.derive_certain();
    }

    /// Returns false when the constraints admit no assignment.
    fn propagate(&mut self) -> bool {
        for s in Seat::ALL {
            let i = s.index();
            if s == self.observer || self.hand_sizes[i] == 0 {
                self.candidates[i] = CardSet::EMPTY;
                self.certain[i] = CardSet::EMPTY;
                continue;
            }
            let mut excl = CardSet::EMPTY;
            for class in 0..3 {
                if !self.dropped[class] {
                    excl = excl | self.excluded[i][class];
                }
            }
            self.candidates[i] = self.unseen - excl;
            self.certain[i] = CardSet::EMPTY;
        }
        if !feasible(self.unseen, &self.candidates, &self.hand_sizes, self.observer) {
            return false;
        }
        self.derive_certain();
        true
    }

    fn derive_certain(&mut self) {
        let seats: Vec<Seat> = self.hidden_seats().collect();
        loop {
            let mut changed = false;
            for card in self.unseen {
                let holders: Vec<Seat> = seats.iter().copied().filter(|s| self.candidates[s.index()].contains(card)).collect();
                if holders.len() == 1 && !self.certain[holders[0].index()].contains(card) {
                    self.certain[holders[0].index()].insert(card);
                    changed = true;
                }
            }
            for &s in &seats {
                let i = s.index();
                let size = self.hand_sizes[i] as usize;
                if self.candidates[i].len() == size && self.certain[i] != self.candidates[i] {
                    self.certain[i] = self.candidates[i];
                    changed = true;
                }
                if self.certain[i].len() == size && self.candidates[i] != self.certain[i] {
                    self.candidates[i] = self.certain[i];
                    changed = true;
                }
                let mine = self.certain[i];
                for &o in &seats {
                    if o != s && !self.candidates[o.index()].is_disjoint(mine) {
                        self.candidates[o.index()] = self.candidates[o.index()] - mine;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub fn is_dropped(&self, class: Inference) -> bool {
        self.dropped[class as usize]
    }

    pub fn config(&self) -> GuessConfig {
        self.config
    }

    /// Checks the structural invariants.
    pub fn check_invariants(&self) -> Result<(), String> {
        for s in Seat::ALL {
            let i = s.index();
            if s == self.observer {
                if !self.candidates[i].is_empty() {
                    return Err("observer has candidates".into());
                }
                continue;
            }
            if !self.certain[i].is_subset(self.candidates[i]) || !self.candidates[i].is_subset(self.unseen) {
                return Err(format!("seat {s}: certain ⊄ candidates ⊄ unseen"));
            }
            let size = self.hand_sizes[i] as usize;
            if self.certain[i].len() > size || self.candidates[i].len() < size {
                return Err(format!(
                    "seat {s}: |certain|={} size={} |candidates|={}",
                    self.certain[i].len(),
                    size,
                    self.candidates[i].len()
                ));
            }
        }
        Ok(())
    }

    /// Whether a concrete assignment of hidden hands satisfies the constraints.
    pub fn admits(&self, hands: &[CardSet; 4]) -> bool {
        self.hidden_seats().all(|s| {
            let i = s.index();
            self.certain[i].is_subset(hands[i]) && hands[i].is_subset(self.candidates[i])
        })
    }

    /// Candidate sets in card text form, one seat per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in self.hidden_seats() {
            let i = s.index();
            out.push_str(&format!("seat {s} size {}: may [{}] must [{}]\n", self.hand_sizes[i], self.candidates[i], self.certain[i]));
        }
        out
    }

    /// Samples hidden hands consistent with the constraints.
    ///
    /// Uniform over the feasible assignments while rejection sampling
    /// succeeds; afterwards a constructive sampler keeps the constraints,
    /// and only infeasible constraints fall back to hand sizes alone.
    pub fn plausible_hands<R: Rng + ?Sized>(&self, hand_sizes: &[u8; 4], rng: &mut R) -> Result<[CardSet; 4], GuessError> {
        let sizes: usize = Seat::ALL.iter().filter(|s| **s != self.observer).map(|s| hand_sizes[s.index()] as usize).sum();
        if sizes != self.unseen.len() {
            return Err(GuessError::SizeMismatch { sizes, unseen: self.unseen.len() });
        }
        let mut forced = CardSet::EMPTY;
        for s in self.hidden_seats() {
            forced = forced | self.certain[s.index()];
        }
        let pool: Vec<Card> = (self.unseen - forced).iter().collect();
        let mut need = [0usize; 4];
        for s in self.hidden_seats() {
            let i = s.index();
            need[i] = (hand_sizes[i] as usize).saturating_sub(self.certain[i].len());
        }
        let constrained = self.hidden_seats().any(|s| self.candidates[s.index()] != self.unseen || !self.certain[s.index()].is_empty());
        let consistent = need.iter().sum::<usize>() == pool.len()
            && self.hidden_seats().all(|s| self.certain[s.index()].len() <= hand_sizes[s.index()] as usize);

        if consistent {
            let mut buf = pool.clone();
            let attempts = if constrained { REJECTION_ATTEMPTS } else { 1 };
            for _ in 0..attempts {
                buf.shuffle(rng);
                let hands = self.split(&buf, &need);
                if self.admits(&hands) {
                    return Ok(hands);
                }
            }
            if let Some(hands) = self.constructive(&pool, &need, rng) {
                return Ok(hands);
            }
        }
        log::debug!("guessing: infeasible constraints, sampling by hand size only");
        let mut all: Vec<Card> = self.unseen.iter().collect();
        all.shuffle(rng);
        let mut sizes = [0usize; 4];
        for s in self.hidden_seats() {
            sizes[s.index()] = hand_sizes[s.index()] as usize;
        }
        let mut hands = [CardSet::EMPTY; 4];
        let mut it = all.into_iter();
        for s in self.hidden_seats() {
            hands[s.index()] = it.by_ref().take(sizes[s.index()]).collect();
        }
        Ok(hands)
    }

    fn split(&self, cards: &[Card], need: &[usize; 4]) -> [CardSet; 4] {
        let mut hands = [CardSet::EMPTY; 4];
        let mut at = 0;
        for s in self.hidden_seats() {
            let i = s.index();
            hands[i] = self.certain[i] | cards[at..at + need[i]].iter().copied().collect();
            at += need[i];
        }
        hands
    }

    /// Assigns cards one at a time to a random seat that keeps the rest feasible.
    fn constructive<R: Rng + ?Sized>(&self, pool: &[Card], need: &[usize; 4], rng: &mut R) -> Option<[CardSet; 4]> {
        let mut order = pool.to_vec();
        order.shuffle(rng);
        let mut remaining: CardSet = pool.iter().copied().collect();
        let mut cap = *need;
        let mut hands = self.certain;
        hands[self.observer.index()] = CardSet::EMPTY;
        for card in order {
            remaining.remove(card);
            let mut options = Vec::with_capacity(3);
            for s in self.hidden_seats() {
                let i = s.index();
                if cap[i] == 0 || !self.candidates[i].contains(card) {
                    continue;
                }
                cap[i] -= 1;
                if feasible_caps(remaining, &self.candidates, &cap, self.observer) {
                    options.push(s);
                }
                cap[i] += 1;
            }
            let &seat = options.choose(rng)?;
            cap[seat.index()] -= 1;
            hands[seat.index()].insert(card);
        }
        Some(hands)
    }
}

/// Hall-type condition for filling every hidden hand exactly.
fn feasible(unseen: CardSet, candidates: &[CardSet; 4], sizes: &[u8; 4], observer: Seat) -> bool {
    let mut caps = [0usize; 4];
    for s in Seat::ALL {
        if s != observer {
            caps[s.index()] = sizes[s.index()] as usize;
        }
    }
    feasible_caps(unseen, candidates, &caps, observer)
}

fn feasible_caps(cards: CardSet, candidates: &[CardSet; 4], caps: &[usize; 4], observer: Seat) -> bool {
    let seats: Vec<usize> = Seat::ALL.iter().filter(|s| **s != observer).map(|s| s.index()).collect();
    if caps.iter().enumerate().filter(|(i, _)| seats.contains(i)).map(|(_, c)| c).sum::<usize>() != cards.len() {
        return false;
    }
    let n = seats.len();
    for mask in 0u32..(1 << n) {
        let mut inside = CardSet::EMPTY;
        let mut cap = 0;
        for (k, &i) in seats.iter().enumerate() {
            if mask & (1 << k) != 0 {
                inside = inside | candidates[i];
                cap += caps[i];
            }
        }
        // seats in the subset must be fillable from cards they accept
        if (cards & inside).len() < cap {
            return false;
        }
        // cards accepted only inside the subset must fit in it
        let mut outside = CardSet::EMPTY;
        for (k, &i) in seats.iter().enumerate() {
            if mask & (1 << k) == 0 && caps[i] > 0 {
                outside = outside | candidates[i];
            }
        }
        if (cards - outside).len() > cap {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::DealResult;
    use crate::engine::MatchState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cs(s: &str) -> CardSet {
        s.parse().unwrap()
    }

    fn c(s: &str) -> Card {
        s.parse().unwrap()
    }

    fn fresh_view() -> PlayerView {
        MatchState::new(crate::cards::deal(7, 3)).view(Seat::ELDEST)
    }

    #[test]
    fn fresh_deal_has_27_candidates() {
        let gs = GuessState::init(&fresh_view());
        for s in 1..4 {
            assert_eq!(gs.candidates[s].len(), 27);
            assert!(gs.certain[s].is_empty());
        }
        assert!(gs.candidates[0].is_empty());
        gs.check_invariants().unwrap();
    }

    /// A state where seat 0 observes; the table is set by hand.
    fn custom(table: &str, observer_hand: &str) -> (GuessState, CardSet) {
        let table = cs(table);
        let hand = cs(observer_hand);
        // two more cards already captured, so the three hidden hands hold 27
        let unseen = CardSet::FULL - table - hand - cs("Js Qs");
        let gs = GuessState::fresh(Seat::ELDEST, unseen, [hand.len() as u8, 9, 9, 9], 4, GuessConfig::default());
        (gs, unseen)
    }

    #[test]
    fn placement_on_small_table_excludes_sweep_rank() {
        let (mut gs, _) = custom("3s 4c", "Ad 2d 3d 4d 5d 6d Jd Qd Kd");
        gs.observe_move(Seat::new(1).unwrap(), cs("3s 4c"), Move::place(c("Kh")));
        let sevens = CardSet::of_rank(7) & gs.unseen;
        assert_eq!(sevens.len(), 4);
        assert!(gs.candidates[1].is_disjoint(sevens));
        assert!(sevens.is_subset(gs.candidates[2]));
        gs.check_invariants().unwrap();
    }

    #[test]
    fn non_coin_capture_excludes_coin_card() {
        let (mut gs, _) = custom("5s Kh", "Ad 2d 3d 4d 6d Jd Qd Kd As");
        gs.observe_move(Seat::new(1).unwrap(), cs("5s Kh"), Move::capture(c("5c"), cs("5s")));
        assert!(!gs.candidates[1].contains(c("5d")));
        assert!(gs.candidates[2].contains(c("5d")));
        assert!(!gs.candidates[2].contains(c("5c")));
    }

    #[test]
    fn played_card_leaves_every_candidate_set() {
        let (mut gs, _) = custom("Ks Kh", "Ad 2d 3d 4d 6d Jd Qd Kd As");
        gs.observe_move(Seat::new(2).unwrap(), cs("Ks Kh"), Move::place(c("6c")));
        for s in 0..4 {
            assert!(!gs.candidates[s].contains(c("6c")));
        }
        assert!(!gs.unseen.contains(c("6c")));
        assert_eq!(gs.hand_sizes[2], 8);
    }

    #[test]
    fn infeasible_inference_is_repaired() {
        // seat 1 holds one card; the coin inference would remove the only card left for it
        let unseen = cs("5d 6h 7h");
        let mut gs = GuessState::fresh(Seat::ELDEST, unseen, [1, 1, 1, 1], 32, GuessConfig::default());
        gs.excluded[1][Inference::CoinPreference as usize] = cs("5d");
        gs.excluded[2][Inference::CoinPreference as usize] = cs("5d");
        gs.excluded[3][Inference::CoinPreference as usize] = cs("5d");
        gs.refresh();
        assert!(gs.is_dropped(Inference::CoinPreference));
        gs.check_invariants().unwrap();
    }

    #[test]
    fn forced_assignment() {
        let unseen = cs("Ad 2d 3d 4d 5d 6d");
        let mut gs = GuessState::fresh(Seat::ELDEST, unseen, [2, 2, 2, 2], 28, GuessConfig::default());
        gs.excluded[2][1] = cs("Ad 2d");
        gs.excluded[3][1] = cs("Ad 2d");
        gs.refresh();
        assert_eq!(gs.certain[1], cs("Ad 2d"));
        assert_eq!(gs.candidates[1], cs("Ad 2d"));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let hands = gs.plausible_hands(&[2, 2, 2, 2], &mut rng).unwrap();
            assert_eq!(hands[1], cs("Ad 2d"));
            assert_eq!(hands[0], CardSet::EMPTY);
        }
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let gs = GuessState::fresh(Seat::ELDEST, cs("Ad 2d 3d"), [1, 1, 1, 1], 32, GuessConfig::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(gs.plausible_hands(&[1, 2, 2, 2], &mut rng).is_err());
    }

    #[test]
    fn unconstrained_sampling_partitions_unseen() {
        let view = fresh_view();
        let gs = GuessState::init(&view);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hands = gs.plausible_hands(&view.hand_sizes, &mut rng).unwrap();
        assert_eq!(hands[1] | hands[2] | hands[3], gs.unseen);
        assert!(hands.iter().skip(1).all(|h| h.len() == 9));
    }

    #[test]
    fn replay_matches_incremental() {
        let mut st = MatchState::new(DealResult { ..crate::cards::deal(11, 3) });
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..14 {
            let moves = st.legal_moves().unwrap();
            let mv = *moves.choose(&mut rng).unwrap();
            st.apply(mv).unwrap();
        }
        let view = st.view(Seat::new(2).unwrap());
        let gs = GuessState::from_view(&view);
        gs.check_invariants().unwrap();
        assert_eq!(gs.unseen, view.unseen());
        assert_eq!(gs.hand_sizes, view.hand_sizes);
    }
}
