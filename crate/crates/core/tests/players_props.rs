mod common;

use std::collections::HashMap;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scopone::cards::SETTEBELLO;
use scopone::guessing::{GuessState, Inference};
use scopone::players::{cg_choose_traced, cs_choose_traced, greedy_choose, greedy_move, RulePlayer, RuleStrategy};
use scopone::{deal, CardSet, MatchState, Seat};

const RULES: [RuleStrategy; 3] = [RuleStrategy::Greedy, RuleStrategy::Cs, RuleStrategy::Cg];

#[test]
fn rule_players_always_choose_legal_moves() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0usize;
    for seed in 0..1000u64 {
        let mut st = MatchState::new(deal(seed, 3));
        while !st.is_over() {
            let view = st.view(st.current());
            let legal = st.legal_moves().unwrap();
            for r in RULES {
                let mv = RulePlayer::new(r).choose(&view);
                assert!(legal.contains(&mv), "{r} chose illegal {mv} at seed {seed}");
                checked += 1;
            }
            let pick = legal[rand::Rng::random_range(&mut rng, 0..legal.len())];
            st.apply(pick).unwrap();
        }
    }
    assert!(checked >= 100_000);
}

#[test]
fn cg_matches_cs_whenever_no_sevens_rule_fires() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut compared = 0;
    for seed in 0..400u64 {
        let st = random_position(seed, (seed % 36) as usize, &mut rng);
        if st.is_over() {
            continue;
        }
        let view = st.view(st.current());
        let gs = GuessState::from_view(&view);
        let (cg, rule) = cg_choose_traced(&view, &gs);
        if rule.is_none() {
            assert_eq!(cg, cs_choose_traced(&view, &gs).0);
            compared += 1;
        }
    }
    assert!(compared > 300);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rule_players_are_deterministic(seed in any::<u64>(), plies in 0usize..36) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_position(seed, plies, &mut rng);
        prop_assume!(!st.is_over());
        let view = st.view(st.current());
        for r in RULES {
            let p = RulePlayer::new(r);
            prop_assert_eq!(p.choose(&view), p.choose(&view.clone()));
        }
    }

    #[test]
    fn guess_state_invariants_hold_for_every_observer(seed in any::<u64>(), plies in 0usize..36) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_position(seed, plies, &mut rng);
        for s in Seat::ALL {
            let view = st.view(s);
            let gs = GuessState::from_view(&view);
            gs.check_invariants().map_err(TestCaseError::fail)?;
            prop_assert_eq!(gs.unseen, view.unseen());
            prop_assert_eq!(gs.hand_sizes, view.hand_sizes);
            // whatever was repaired, the sampler honours sizes and the pool
            let hands = gs.plausible_hands(&view.hand_sizes, &mut rng).unwrap();
            let mut union = CardSet::EMPTY;
            for o in Seat::ALL {
                if o == s { continue; }
                prop_assert_eq!(hands[o.index()].len(), view.hand_sizes[o.index()] as usize);
                prop_assert!(union.is_disjoint(hands[o.index()]));
                union = union | hands[o.index()];
            }
            prop_assert_eq!(union, view.unseen());
            prop_assert!(gs.admits(&hands) || gs.is_dropped(Inference::PlacementSweep));
        }
    }
}

/// With four Greedy players every inference is a true statement about the
/// hands, except right after Greedy kept a settebello over a sweep.
#[test]
fn inferences_are_sound_against_greedy_players() {
    let mut checked = 0;
    let mut buf = Vec::new();
    'games: for seed in 0..300u64 {
        let mut st = MatchState::new(deal(seed, 3));
        while !st.is_over() {
            let mv = greedy_move(&st.pos, &mut buf);
            if mv.played == SETTEBELLO && mv.is_capture() && mv.captured != st.pos.table && st.pos.table.rank_sum() <= 10 {
                continue 'games;
            }
            st.apply(mv).unwrap();
            for s in Seat::ALL {
                let view = st.view(s);
                let gs = GuessState::from_view(&view);
                assert!(gs.admits(&st.pos.hands), "seed {seed} turn {} observer {s}\n{}", st.turn(), gs.dump());
                checked += 1;
            }
        }
    }
    assert!(checked > 30_000);
}

/// Hidden hands with 6 unseen cards: sampling frequencies against the
/// uniform distribution over all admitted assignments (enumerated).
#[test]
fn plausible_hands_are_uniform_over_admitted_assignments() {
    let mut buf = Vec::new();
    let mut tested = 0;
    for seed in 0..40u64 {
        let mut st = MatchState::new(deal(seed, 3));
        while st.turn() < 28 {
            st.apply(greedy_move(&st.pos, &mut buf)).unwrap();
        }
        let view = st.view(Seat::ELDEST);
        let gs = GuessState::from_view(&view);
        let unseen: Vec<_> = view.unseen().iter().collect();
        assert_eq!(unseen.len(), 6);
        let sizes = view.hand_sizes;
        // enumerate seat 1/2/3 assignments of the 6 cards
        let mut admitted = Vec::new();
        for code in 0..3u32.pow(6) {
            let mut hands = [CardSet::EMPTY; 4];
            let mut c = code;
            for card in &unseen {
                hands[1 + (c % 3) as usize].insert(*card);
                c /= 3;
            }
            if (1..4).all(|i| hands[i].len() == sizes[i] as usize) && gs.admits(&hands) {
                admitted.push(hands);
            }
        }
        if admitted.len() < 3 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws = 10_000;
        let mut counts: HashMap<[CardSet; 4], usize> = HashMap::new();
        for _ in 0..draws {
            let mut h = gs.plausible_hands(&sizes, &mut rng).unwrap();
            h[0] = CardSet::EMPTY;
            *counts.entry(h).or_default() += 1;
        }
        assert!(counts.keys().all(|h| admitted.contains(h)), "sampled an excluded assignment");
        let expected = draws as f64 / admitted.len() as f64;
        let chi2: f64 = admitted.iter().map(|h| (counts.get(h).copied().unwrap_or(0) as f64 - expected).powi(2) / expected).sum();
        let dof = (admitted.len() - 1) as f64;
        // loose bound: mean + 5 standard deviations of the chi-square law
        assert!(chi2 < dof + 5.0 * (2.0 * dof).sqrt(), "seed {seed}: chi2 {chi2} dof {dof}");
        tested += 1;
    }
    assert!(tested >= 10);
}

#[test]
fn greedy_choice_never_depends_on_hidden_cards() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..300u64 {
        let st = random_position(seed, (seed % 35) as usize, &mut rng);
        let view = st.view(st.current());
        // same view, different hidden hands
        let mut other = st.clone();
        let a = (st.current().index() + 1) % 4;
        let b = (st.current().index() + 2) % 4;
        let (ha, hb) = (other.pos.hands[a], other.pos.hands[b]);
        if ha.len() == hb.len() {
            other.pos.hands[a] = hb;
            other.pos.hands[b] = ha;
        }
        assert_eq!(greedy_choose(&view), greedy_move(&other.pos, &mut Vec::new()));
    }
}
