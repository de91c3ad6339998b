mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scopone::guessing::GuessState;
use scopone::ismcts::{determinize, ismcts_search_with, projection_matches, DeterminizerKind, IsmctsConfig};
use scopone::mcts::{mcts_search, mcts_search_with};
use scopone::search::{isuct_value, sim_move, simulate, uct_value, RewardFn, SearchConfig, SimStrategy};
use scopone::{deal, MatchState, Seat};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const REWARDS: [RewardFn; 4] = [RewardFn::Rs, RewardFn::Sd, RewardFn::Wl, RewardFn::Pwl];

#[test]
fn mcts_finds_the_minimax_move_in_endgames() {
    let cases = decided_endgames(30, 30);
    for (pos, best) in &cases {
        let mut hits = 0;
        for seed in 0..100u64 {
            let cfg = SearchConfig { iterations: 200, seed, ..SearchConfig::default() };
            if mcts_search(pos, &cfg).best_move() == Some(*best) {
                hits += 1;
            }
        }
        assert!(hits >= 99, "optimal {best} chosen {hits}/100 at turn {}", pos.turn);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mcts_tree_is_consistent(seed in any::<u64>(), plies in 0usize..35, iters in 1u32..400, r in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_position(seed, plies, &mut rng);
        prop_assume!(!st.is_over());
        let cfg = SearchConfig { iterations: iters, reward: REWARDS[r], seed, ..SearchConfig::default() };
        let tree = mcts_search(&st.pos, &cfg);
        tree.check_consistency().map_err(TestCaseError::fail)?;
        prop_assert_eq!(tree.root().visits, iters);
        prop_assert!(st.pos.is_legal(&tree.best_move().unwrap()));
        // every backpropagated vector obeys the reward's sum rule
        for n in &tree.nodes {
            let s = n.reward[0] + n.reward[1];
            let v = n.visits as f64;
            match REWARDS[r] {
                RewardFn::Sd | RewardFn::Wl => prop_assert!(s.abs() < 1e-9),
                RewardFn::Pwl => prop_assert!((s - v).abs() < 1e-9),
                RewardFn::Rs => prop_assert!(s >= 0.0 && s <= 22.0 * v),
            }
        }
        prop_assert_eq!(tree.best_move(), mcts_search(&st.pos, &cfg).best_move());
    }

    #[test]
    fn ismcts_availability_bounds(seed in any::<u64>(), plies in 0usize..35, iters in 1u32..300, cgs in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_position(seed, plies, &mut rng);
        prop_assume!(!st.is_over());
        let view = st.view(st.current());
        let det = if cgs { DeterminizerKind::Cgs } else { DeterminizerKind::Random };
        let gs = cgs.then(|| GuessState::from_view(&view));
        let cfg = IsmctsConfig { search: SearchConfig { iterations: iters, seed, ..SearchConfig::default() }, det };
        let tree = ismcts_search_with(&view, &cfg, gs.as_ref(), &mut ChaCha8Rng::seed_from_u64(seed));
        tree.check_availability().map_err(TestCaseError::fail)?;
        prop_assert_eq!(tree.root().visits, iters);
        for n in &tree.nodes[1..] {
            prop_assert!(n.visits <= n.availability);
        }
        // own moves are legal in every determinization: the j-th expanded
        // root child has been available since iteration j
        for (j, ch) in tree.root_children().enumerate() {
            prop_assert_eq!(ch.availability, iters - j as u32);
        }
    }

    #[test]
    fn reward_sums(a in 0u32..23, b in 0u32..23) {
        let sd = RewardFn::Sd.apply([a, b]);
        prop_assert_eq!(sd[0] + sd[1], 0.0);
        let wl = RewardFn::Wl.apply([a, b]);
        prop_assert_eq!(wl[0] + wl[1], 0.0);
        prop_assert!(wl[0].abs() == 1.0 || (a == b && wl[0] == 0.0));
        let pwl = RewardFn::Pwl.apply([a, b]);
        prop_assert_eq!(pwl[0] + pwl[1], 1.0);
        prop_assert_eq!(RewardFn::Rs.apply([a, b]), [a as f64, b as f64]);
    }

    #[test]
    fn determinizations_project_to_the_view(seed in any::<u64>(), plies in 0usize..36) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_position(seed, plies, &mut rng);
        for s in Seat::ALL {
            let view = st.view(s);
            let gs = GuessState::from_view(&view);
            for kind in [DeterminizerKind::Random, DeterminizerKind::Cgs] {
                let pos = determinize(&view, kind, Some(&gs), &mut rng);
                prop_assert!(projection_matches(&pos, &view));
                prop_assert_eq!(pos.hands[s.index()], st.pos.hands[s.index()]);
                prop_assert_eq!(pos.table, st.pos.table);
            }
        }
    }
}

/// Second implementation of the two selection formulas.
fn reference_uct(q: f64, n: f64, parent: f64, c: f64) -> f64 {
    q / n + c * ((2.0 * parent.ln()) / n).sqrt()
}

fn reference_isuct(q: f64, n: f64, avail: f64, c: f64) -> f64 {
    q / n + c * (avail.ln() / n).sqrt()
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).max_by(|&i, &j| v[i].total_cmp(&v[j])).unwrap()
}

#[test]
fn selection_formulas_match_a_reference_and_scale() {
    assert_eq!(uct_value(3.0, 2.0, 10.0, 0.0), 1.5);
    assert!((uct_value(0.0, 1.0, std::f64::consts::E.powi(2), 1.0) - 2.0).abs() < 1e-12);
    assert!((isuct_value(5.0, 4.0, 4.0, 1.0) - (1.25 + (4f64.ln() / 4.0).sqrt())).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let k = rng.random_range(2..12);
        let parent = rng.random_range(k as u32..5000) as f64;
        let c = rng.random_range(0.0..4.0);
        let kids: Vec<(f64, f64, f64)> = (0..k)
            .map(|_| {
                let n = rng.random_range(1..=parent as u32) as f64;
                let avail = rng.random_range(n as u32..=parent as u32) as f64;
                (rng.random_range(-3.0..3.0) * n, n, avail)
            })
            .collect();
        let ours: Vec<f64> = kids.iter().map(|&(q, n, _)| uct_value(q, n, parent, c)).collect();
        let reference: Vec<f64> = kids.iter().map(|&(q, n, _)| reference_uct(q, n, parent, c)).collect();
        assert_eq!(argmax(&ours), argmax(&reference));
        let ours_is: Vec<f64> = kids.iter().map(|&(q, n, a)| isuct_value(q, n, a, c)).collect();
        let ref_is: Vec<f64> = kids.iter().map(|&(q, n, a)| reference_isuct(q, n, a, c)).collect();
        assert_eq!(argmax(&ours_is), argmax(&ref_is));
        // scaling rewards and c together keeps the selected child
        let s = rng.random_range(0.1..50.0);
        let scaled: Vec<f64> = kids.iter().map(|&(q, n, _)| uct_value(q * s, n, parent, c * s)).collect();
        assert_eq!(argmax(&ours), argmax(&scaled));
        let scaled_is: Vec<f64> = kids.iter().map(|&(q, n, a)| isuct_value(q * s, n, a, c * s)).collect();
        assert_eq!(argmax(&ours_is), argmax(&scaled_is));
    }
}

#[test]
fn full_epsilon_greedy_is_uniform_play() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut buf = Vec::new();
    let mut tested = 0;
    for seed in 0..20u64 {
        let st = random_position(seed, (seed % 30) as usize, &mut rng);
        let moves = st.pos.legal_moves();
        if moves.len() < 3 {
            continue;
        }
        let mut counts = vec![[0u32; 2]; moves.len()];
        for (col, sim) in [SimStrategy::EpsilonGreedy(1.0), SimStrategy::Random].into_iter().enumerate() {
            for _ in 0..10_000 {
                let m = sim_move(&st.pos, sim, &mut rng, &mut buf);
                counts[moves.iter().position(|x| *x == m).unwrap()][col] += 1;
            }
        }
        // two-sample homogeneity test
        let mut chi2 = 0.0;
        for row in &counts {
            let total = (row[0] + row[1]) as f64;
            for v in row {
                let e = total / 2.0;
                if e > 0.0 {
                    chi2 += (*v as f64 - e).powi(2) / e;
                }
            }
        }
        let dist = ChiSquared::new((moves.len() - 1) as f64).unwrap();
        assert!(dist.sf(chi2) > 1e-4, "seed {seed}: chi2 {chi2} over {} moves", moves.len());
        tested += 1;
    }
    assert!(tested >= 10);
}

#[test]
fn zero_epsilon_greedy_is_greedy_play() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut buf = Vec::new();
    for seed in 0..200u64 {
        let st = random_position(seed, (seed % 36) as usize, &mut rng);
        let a = simulate(st.pos, SimStrategy::EpsilonGreedy(0.0), &mut ChaCha8Rng::seed_from_u64(seed), &mut buf);
        let b = simulate(st.pos, SimStrategy::Greedy, &mut ChaCha8Rng::seed_from_u64(seed), &mut buf);
        assert_eq!(a, b);
    }
}

/// Turn-34 position: seats 2 and 3 hold one card each.
fn two_card_endgame(seed: u64) -> MatchState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_position(seed, 34, &mut rng)
}

#[test]
fn random_determinizer_is_uniform_over_two_assignments() {
    let st = two_card_endgame(11);
    let view = st.view(Seat::ELDEST);
    assert_eq!(view.unseen().len(), 2);
    let truth = st.pos.hands[2];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let draws = 10_000;
    let same = (0..draws).filter(|_| determinize(&view, DeterminizerKind::Random, None, &mut rng).hands[2] == truth).count();
    let f = same as f64 / draws as f64;
    assert!((f - 0.5).abs() <= 0.05, "frequency {f}");
}

#[test]
fn card_guessing_determinizer_keeps_certain_cards() {
    let mut buf = Vec::new();
    let mut checked = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for seed in 0..400u64 {
        let mut st = MatchState::new(deal(seed, 3));
        while !st.is_over() && checked < 50 {
            st.apply(scopone::players::greedy_move(&st.pos, &mut buf)).unwrap();
            let view = st.view(st.current());
            let gs = GuessState::from_view(&view);
            if Seat::ALL.iter().all(|s| gs.certain[s.index()].is_empty()) {
                continue;
            }
            for _ in 0..50 {
                let pos = determinize(&view, DeterminizerKind::Cgs, Some(&gs), &mut rng);
                for s in Seat::ALL {
                    assert!(gs.certain[s.index()].is_subset(pos.hands[s.index()]));
                }
            }
            checked += 1;
        }
    }
    assert!(checked >= 20, "only {checked} states with certain cards");
}

/// Opponent moves are available as often as the determinizations that
/// allow them.
#[test]
fn availability_follows_sampling_probability() {
    let mut found = false;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let st = random_position(seed, 33, &mut rng);
        // seat 1 to move; seats 2 and 3 hold one unseen card each
        let view = st.view(st.current());
        let unseen: Vec<_> = view.unseen().iter().collect();
        if st.pos.legal_moves().len() != 1 || unseen.len() != 2 {
            continue;
        }
        let cfg =
            IsmctsConfig { search: SearchConfig { iterations: 4000, seed, ..SearchConfig::default() }, det: DeterminizerKind::Random };
        let tree = ismcts_search_with(&view, &cfg, None, &mut ChaCha8Rng::seed_from_u64(seed));
        let x = tree.root_children().next().unwrap();
        let mut per_card = [0u32; 2];
        for &g in &x.children {
            let g = &tree.nodes[g as usize];
            let k = unseen.iter().position(|c| *c == g.mv.played).unwrap();
            // a card's first child is created available, count the rest
            per_card[k] = per_card[k].max(g.availability);
        }
        for a in per_card {
            let f = a as f64 / x.visits as f64;
            assert!((f - 0.5).abs() < 0.05, "seed {seed}: availability {f}");
        }
        found = true;
        break;
    }
    assert!(found);
}

/// With nothing hidden that matters, ISMCTS and MCTS choose alike.
#[test]
fn ismcts_matches_mcts_on_singleton_information_sets() {
    let mut compared = 0;
    for seed in 0..5000u64 {
        if compared == 12 {
            break;
        }
        let st = two_card_endgame(seed);
        let moves = st.pos.legal_moves();
        if moves.len() < 2 {
            continue;
        }
        let view = st.view(st.current());
        assert_eq!(view.unseen().len(), 1);
        let mut counts = vec![[0u32; 2]; moves.len()];
        for run in 0..200u64 {
            let search = SearchConfig { iterations: 40, seed: run, ..SearchConfig::default() };
            let m = mcts_search_with(&st.pos, &search, &mut ChaCha8Rng::seed_from_u64(run)).best_move().unwrap();
            counts[moves.iter().position(|x| *x == m).unwrap()][0] += 1;
            let cfg = IsmctsConfig { search, det: DeterminizerKind::Random };
            let m = ismcts_search_with(&view, &cfg, None, &mut ChaCha8Rng::seed_from_u64(run)).best_move().unwrap();
            counts[moves.iter().position(|x| *x == m).unwrap()][1] += 1;
        }
        for row in &counts {
            let diff = (row[0] as f64 - row[1] as f64).abs() / 200.0;
            assert!(diff < 0.15, "seed {seed}: {counts:?}");
        }
        compared += 1;
    }
    assert_eq!(compared, 12);
}
