//! Expert strategies built from the published Chitarrella-Saracino and
//! Cicuti-Guardamagna rules, as an ordered rule list.

use crate::cards::{Card, CardSet, Team, SETTEBELLO};
use crate::engine::{Move, PlayerView};
use crate::guessing::GuessState;

use super::{best_by, capture_key, greedy_capture, greedy_pick, importance, is_dealers_teammate, Situation};

/// Which CS rule produced a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsRule {
    OnlyMove,
    /// Dealer's teammate takes the 7 on the table (spariglio when holding at most one 7).
    Sevens,
    Capture,
    /// Hand team repeats a plain pair capture on the lowest rank.
    Mulinello,
    DoubleCard,
    /// Answer a teammate's double card that the opponents captured.
    TeammateDouble,
    /// Hand team plays its highest decoupled card.
    Decoupling,
    Fallback,
}

/// Which CG sevens rule fired, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgRule {
    /// Three 7s including the settebello: play a 7 now.
    ThreeSevens,
    /// Two 7s without the settebello: hold them back.
    HoldTwoSevens,
    /// The last two 7s with the settebello.
    LastTwoSevens,
}

pub fn cs_choose(view: &PlayerView, gs: &GuessState) -> Move {
    cs_choose_traced(view, gs).0
}

pub fn cs_choose_traced(view: &PlayerView, gs: &GuessState) -> (Move, CsRule) {
    let moves = view.legal_moves();
    cs_over(view, gs, &moves)
}

fn rank_count(set: CardSet, rank: u8) -> usize {
    (set & CardSet::of_rank(rank)).len()
}

fn cs_over(view: &PlayerView, gs: &GuessState, moves: &[Move]) -> (Move, CsRule) {
    if moves.len() == 1 {
        return (moves[0], CsRule::OnlyMove);
    }
    let sit = Situation::from_guess(view, gs);
    let team = view.seat.team();

    // sevens: the dealer's teammate never lets a 7 stay on the table
    if is_dealers_teammate(view.seat) {
        let table_sevens = view.table & CardSet::of_rank(7);
        let takes_seven: Vec<Move> = moves.iter().copied().filter(|m| !m.captured.is_disjoint(table_sevens)).collect();
        if !takes_seven.is_empty() {
            let own_sevens = rank_count(view.hand, 7);
            let spariglio: Vec<Move> = takes_seven.iter().copied().filter(|m| m.captured.len() >= 2).collect();
            let pool = if own_sevens <= 1 && !spariglio.is_empty() { spariglio } else { takes_seven };
            let mv = greedy_capture(&pool, &sit).expect("captures present");
            return (mv, CsRule::Sevens);
        }
    }

    let safe = |m: &Move| !sit.leaves_scopa(m);
    let safe_placement = moves.iter().any(|m| !m.is_capture() && safe(m));
    if let Some(best) = greedy_capture(moves, &sit).filter(|b| safe(b) || !safe_placement) {
        if team == Team::Hand && is_plain_pair_capture(&best) && !sit.leaves_scopa(&best) && !sit.is_scopa(&best) {
            let low =
                best_by(moves.iter().copied().filter(|m| is_plain_pair_capture(m) && !sit.leaves_scopa(m) && !sit.is_scopa(m)), |m| {
                    (std::cmp::Reverse(m.played.rank()), capture_key(m))
                })
                .expect("best itself qualifies");
            if low.played.rank() < best.played.rank() {
                return (low, CsRule::Mulinello);
            }
        }
        return (best, CsRule::Capture);
    }

    // placements from here on; captures were rejected as unsafe
    let placements: Vec<Move> = moves.iter().copied().filter(|m| !m.is_capture()).collect();

    let doubles: Vec<Move> = placements.iter().copied().filter(|m| rank_count(view.hand, m.played.rank()) >= 2 && safe(m)).collect();
    if let Some(mv) = best_by(doubles.into_iter(), |m| std::cmp::Reverse(importance(m.played))) {
        return (mv, CsRule::DoubleCard);
    }

    if let Some(rank) = teammate_double_rank(view) {
        let answer = placements.iter().copied().filter(|m| m.played.rank() == rank && safe(m));
        if let Some(mv) = best_by(answer, |m| std::cmp::Reverse(importance(m.played))) {
            return (mv, CsRule::TeammateDouble);
        }
    }

    if team == Team::Hand {
        let captured = view.piles[0] | view.piles[1];
        let decoupled = placements.iter().copied().filter(|m| rank_count(captured, m.played.rank()) % 2 == 1 && safe(m));
        if let Some(mv) = best_by(decoupled, |m| (m.played.rank(), std::cmp::Reverse(importance(m.played)))) {
            return (mv, CsRule::Decoupling);
        }
    }

    (greedy_pick(moves, &Situation::from_view(view)), CsRule::Fallback)
}

/// Same-rank capture of a single card that is neither a coin nor a 7.
fn is_plain_pair_capture(mv: &Move) -> bool {
    if mv.captured.len() != 1 {
        return false;
    }
    let taken = mv.captured.first().expect("one card");
    !taken.is_coin() && taken.rank() != 7 && !mv.played.is_coin() && mv.played.rank() != 7
}

/// A rank the teammate placed that an opponent then captured, when this
/// seat holds another card of it and none is on the table.
fn teammate_double_rank(view: &PlayerView) -> Option<u8> {
    let partner = view.seat.partner();
    let mut found = None;
    for (i, placed) in view.history.iter().enumerate() {
        if placed.seat != partner || placed.mv.is_capture() {
            continue;
        }
        let card = placed.mv.played;
        let taken_by_opponent = view.history[i + 1..].iter().any(|h| h.seat.team() != view.seat.team() && h.mv.captured.contains(card));
        let rank = card.rank();
        if taken_by_opponent && rank_count(view.hand, rank) >= 1 && rank_count(view.table, rank) == 0 {
            found = Some(rank);
        }
    }
    found
}

pub fn cg_choose(view: &PlayerView, gs: &GuessState) -> Move {
    cg_choose_traced(view, gs).0
}

/// CG decision plus the sevens rule that fired (`None` means the CS rule list decided alone).
pub fn cg_choose_traced(view: &PlayerView, gs: &GuessState) -> (Move, Option<CgRule>) {
    let moves = view.legal_moves();
    if moves.len() == 1 {
        return (moves[0], None);
    }
    let sevens = view.hand & CardSet::of_rank(7);
    let holds_settebello = sevens.contains(SETTEBELLO);
    let sit = Situation::from_guess(view, gs);

    if sevens.len() == 3 && holds_settebello {
        let seven_moves: Vec<Move> = moves.iter().copied().filter(|m| m.played.rank() == 7).collect();
        return (greedy_pick(&seven_moves, &sit), Some(CgRule::ThreeSevens));
    }

    if sevens.len() == 2 && holds_settebello {
        let others_gone = (CardSet::of_rank(7) - sevens).is_subset(view.piles[0] | view.piles[1]);
        if others_gone {
            let card: Card = if view.seat.team() == Team::Hand {
                SETTEBELLO
            } else {
                (sevens - CardSet::single(SETTEBELLO)).first().expect("second seven")
            };
            let card_moves: Vec<Move> = moves.iter().copied().filter(|m| m.played == card).collect();
            return (greedy_pick(&card_moves, &sit), Some(CgRule::LastTwoSevens));
        }
    }

    if sevens.len() == 2 && !holds_settebello {
        let rest: Vec<Move> = moves.iter().copied().filter(|m| m.played.rank() != 7).collect();
        if !rest.is_empty() {
            return (cs_over(view, gs, &rest).0, Some(CgRule::HoldTwoSevens));
        }
    }

    (cs_over(view, gs, &moves).0, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::{DealResult, Seat};
    use crate::engine::MatchState;

    fn seat_of(i: u8) -> Seat {
        Seat::new(i).expect("valid seat")
    }

    fn cs(s: &str) -> CardSet {
        s.parse().unwrap()
    }

    fn c(s: &str) -> Card {
        s.parse().unwrap()
    }

    /// A position at `turn` with `seat` to move holding `hand` over `table`,
    /// and the given cards already captured by the hand team.
    fn position(seat: u8, turn: u8, hand: &str, table: &str, captured: &str) -> MatchState {
        let hand = cs(hand);
        let table = cs(table);
        let captured = cs(captured);
        let rest: Vec<Card> = (CardSet::FULL - hand - table - captured).iter().collect();
        let mut st = MatchState::new(DealResult { hands: [CardSet::EMPTY; 4], table, dealer_seat: 3 });
        st.pos.piles[0] = captured;
        st.pos.turn = turn;
        st.pos.current = seat_of(seat);
        st.pos.hands[seat as usize] = hand;
        // distribute the rest to the other seats by remaining hand size
        let mut at = 0;
        for s in Seat::ALL {
            if s.index() == seat as usize {
                continue;
            }
            let size = rest.len() / 3 + usize::from(s.index() < (rest.len() % 3));
            st.pos.hands[s.index()] = rest[at..at + size].iter().copied().collect();
            at += size;
        }
        st
    }

    fn decide_cs(st: &MatchState) -> (Move, CsRule) {
        let view = st.view(st.pos.current);
        let gs = GuessState::init(&view);
        cs_choose_traced(&view, &gs)
    }

    fn decide_cg(st: &MatchState) -> (Move, Option<CgRule>) {
        let view = st.view(st.pos.current);
        let gs = GuessState::init(&view);
        cg_choose_traced(&view, &gs)
    }

    #[test]
    fn dealers_teammate_does_spariglio_on_seven() {
        // 7♥ and A♣ on the table; holding J♣ (8 = 7+1) and a single 7
        let st = position(1, 13, "Jc 7s 2h Kd", "7h Ac Qs", "");
        let (mv, rule) = decide_cs(&st);
        assert_eq!(rule, CsRule::Sevens);
        assert_eq!(mv, Move::capture(c("Jc"), cs("7h Ac")));
    }

    #[test]
    fn dealers_teammate_with_two_sevens_takes_the_seven() {
        let st = position(1, 13, "Jc 7s 7c Kd", "7h Ac Qs", "");
        let (mv, rule) = decide_cs(&st);
        assert_eq!(rule, CsRule::Sevens);
        assert!(mv.captured.contains(c("7h")));
    }

    #[test]
    fn double_card_played_without_capture() {
        let st = position(2, 14, "4s 4h Kd", "Qc Jc", "");
        let (mv, rule) = decide_cs(&st);
        assert_eq!(rule, CsRule::DoubleCard);
        assert_eq!(mv.played.rank(), 4);
    }

    #[test]
    fn single_legal_move_for_all_players() {
        let st = position(0, 32, "Kd", "Qc Jc", "");
        let view = st.view(Seat::ELDEST);
        let gs = GuessState::init(&view);
        let only = Move::place(c("Kd"));
        assert_eq!(cs_choose(&view, &gs), only);
        assert_eq!(cg_choose(&view, &gs), only);
        assert_eq!(super::super::greedy_choose(&view), only);
    }

    #[test]
    fn three_sevens_with_settebello_play_a_seven() {
        let st = position(0, 0, "7d 7s 7h 2c 3c 4c Jh Qh Kh", "Ks Kc Qs Js", "");
        let (mv, rule) = decide_cg(&st);
        assert_eq!(rule, Some(CgRule::ThreeSevens));
        assert_eq!(mv.played.rank(), 7);
    }

    #[test]
    fn last_two_sevens_deck_team_plays_the_other() {
        let st = position(3, 23, "7d 7c Qh", "Ks Jh", "7s 7h");
        let (mv, rule) = decide_cg(&st);
        assert_eq!(rule, Some(CgRule::LastTwoSevens));
        assert_eq!(mv.played, c("7c"));
        let st = position(2, 22, "7d 7c Qh", "Ks Jh", "7s 7h");
        let (mv, rule) = decide_cg(&st);
        assert_eq!(rule, Some(CgRule::LastTwoSevens));
        assert_eq!(mv.played, SETTEBELLO);
    }

    #[test]
    fn two_sevens_without_settebello_are_held() {
        let st = position(2, 14, "7s 7c Kh", "Qd Jd", "");
        let (mv, rule) = decide_cg(&st);
        assert_eq!(rule, Some(CgRule::HoldTwoSevens));
        assert_eq!(mv.played, c("Kh"));
    }

    #[test]
    fn cg_equals_cs_when_no_sevens_rule() {
        let st = position(2, 14, "4s 4h Kd", "Qc Jc", "");
        let view = st.view(st.pos.current);
        let gs = GuessState::init(&view);
        let (mv, rule) = cg_choose_traced(&view, &gs);
        assert_eq!(rule, None);
        assert_eq!(mv, cs_choose(&view, &gs));
    }

    #[test]
    fn hand_team_decoupling_plays_highest_odd_rank() {
        // one 5 and one 6 captured so far: both ranks decoupled
        let st = position(0, 12, "5h 6h Jh", "Kc", "5s 6s Ks Qs");
        let (mv, rule) = decide_cs(&st);
        assert_eq!(rule, CsRule::Decoupling);
        assert_eq!(mv.played, c("6h"));
    }
}
