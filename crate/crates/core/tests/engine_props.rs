mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scopone::engine::{score_piles, TURNS};
use scopone::{deal, CardSet, MatchState, Seat};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn legal_moves_match_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (hand, table) = random_hand_table(&mut rng);
        let mut pos = MatchState::new(deal(seed, 3)).pos;
        pos.hands[0] = hand;
        pos.table = table;
        prop_assert_eq!(sorted(pos.legal_moves()), brute_force_moves(hand, table));
    }

    #[test]
    fn games_keep_their_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        let mut st = MatchState::new(deal(seed, 3));
        let mut turn = 0u8;
        while !st.is_over() {
            prop_assert_eq!(st.turn(), turn);
            prop_assert_eq!(st.current(), Seat::new(turn % 4).unwrap());
            prop_assert_eq!(sorted(st.legal_moves().unwrap()), brute_force_moves(st.pos.current_hand(), st.pos.table));
            st.check_invariants().map_err(TestCaseError::fail)?;
            let moves = st.legal_moves().unwrap();
            let mv = moves[rand::Rng::random_range(&mut rng, 0..moves.len())];
            let before = st.pos;
            let scopa = st.apply(mv).unwrap();
            // a scopa empties the table and is never scored on the last play
            if scopa {
                prop_assert!(before.turn < TURNS - 1);
                prop_assert_eq!(mv.captured, before.table);
            }
            turn += 1;
        }
        prop_assert_eq!(turn, TURNS);
        prop_assert!(st.pos.hands.iter().all(|h| h.is_empty()));
        prop_assert!(st.pos.table.is_empty() || st.pos.last_capturer.is_none());
        prop_assert_eq!(st.pos.piles[0] | st.pos.piles[1] | st.pos.table, CardSet::FULL);
        prop_assert!(st.pos.piles[0].is_disjoint(st.pos.piles[1]));
        let score = st.score().unwrap();
        prop_assert_eq!(score.points(), position_points(&st.pos));
    }

    #[test]
    fn scorer_matches_longhand_oracle(bits in any::<u64>(), s0 in 0u32..5, s1 in 0u32..5) {
        let p0 = CardSet::from_bits(bits & CardSet::FULL.bits());
        let p1 = CardSet::FULL - p0;
        let score = score_piles([p0, p1], [s0, s1]);
        prop_assert_eq!(score.points(), oracle_points([p0, p1], [s0, s1]));
    }

    #[test]
    fn replay_reproduces_state(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_game(seed, &mut rng);
        let re = MatchState::replay(st.deal, st.history.iter().map(|h| h.mv)).unwrap();
        prop_assert_eq!(re.pos, st.pos);
        prop_assert_eq!(re.history, st.history);
    }

    #[test]
    fn deals_are_valid(seed in any::<u64>()) {
        let d = deal(seed, 3);
        prop_assert!(d.is_valid());
        prop_assert!(d.kings_on_table() < 3);
        prop_assert_eq!(d, deal(seed, 3));
    }
}

#[test]
fn deal_of_seed_zero_is_frozen() {
    let d = deal(0, 3);
    let mut text = String::new();
    for s in Seat::ALL {
        text.push_str(&format!("hand {} {}\n", s.index(), d.hands[s.index()]));
    }
    text.push_str(&format!("table {}\n", d.table));
    let fixture = include_str!("fixtures/deal_seed0.txt");
    assert_eq!(text, fixture);
}

#[test]
fn illegal_moves_leave_the_state_untouched() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..200 {
        let mut st = random_position(seed, (seed % 30) as usize, &mut rng);
        let legal = st.legal_moves().unwrap();
        let snapshot = st.clone();
        for card in st.pos.current_hand() {
            for captured in [CardSet::EMPTY, st.pos.table] {
                let mv = scopone::Move { played: card, captured };
                if !legal.contains(&mv) {
                    assert!(st.apply(mv).is_err());
                    assert_eq!(st, snapshot);
                }
            }
        }
        // cards that are not in the hand are never playable
        let foreign = (CardSet::FULL - st.pos.current_hand()).first().unwrap();
        assert!(st.apply(scopone::Move::place(foreign)).is_err());
    }
}
