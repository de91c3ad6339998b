//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scopone::{Card, CardSet, MatchState, Move, Position};

/// Legal moves by brute force: every card against every subset of the table.
pub fn brute_force_moves(hand: CardSet, table: CardSet) -> Vec<Move> {
    let table: Vec<Card> = table.iter().collect();
    let mut out = Vec::new();
    for card in hand.iter() {
        let r = card.rank();
        let same: Vec<Card> = table.iter().copied().filter(|c| c.rank() == r).collect();
        let mut options: Vec<CardSet> = Vec::new();
        if !same.is_empty() {
            for c in same {
                options.push(CardSet::single(c));
            }
        } else {
            for mask in 1u32..(1u32 << table.len()) {
                if mask.count_ones() < 2 {
                    continue;
                }
                let mut sum = 0u32;
                let mut set = CardSet::EMPTY;
                for (i, c) in table.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        sum += c.rank() as u32;
                        set.insert(*c);
                    }
                }
                if sum == r as u32 {
                    options.push(set);
                }
            }
        }
        if options.is_empty() {
            out.push(Move { played: card, captured: CardSet::EMPTY });
        } else {
            for s in options {
                out.push(Move { played: card, captured: s });
            }
        }
    }
    out.sort();
    out
}

fn prime_value(rank: u8) -> u32 {
    match rank {
        7 => 21,
        6 => 18,
        1 => 16,
        5 => 15,
        4 => 14,
        3 => 13,
        2 => 12,
        _ => 10,
    }
}

/// Team points from the piles and scopa counts, written out longhand.
pub fn oracle_points(piles: [CardSet; 2], scope: [u32; 2]) -> [u32; 2] {
    let mut pts = scope;
    let count = |p: CardSet| p.iter().count();
    let coins = |p: CardSet| p.iter().filter(|c| c.index() < 10).count();
    let award = |pts: &mut [u32; 2], a: usize, b: usize| {
        if a > b {
            pts[0] += 1
        } else if b > a {
            pts[1] += 1
        }
    };
    award(&mut pts, count(piles[0]), count(piles[1]));
    award(&mut pts, coins(piles[0]), coins(piles[1]));
    let sb = Card::from_index(6);
    if piles[0].contains(sb) {
        pts[0] += 1;
    } else if piles[1].contains(sb) {
        pts[1] += 1;
    }
    // best card per suit; a missing suit voids the team's claim
    let prime = |p: CardSet| -> Option<u32> {
        let mut total = 0;
        for suit in 0..4u8 {
            let best = p.iter().filter(|c| c.index() / 10 == suit).map(|c| prime_value(c.rank())).max()?;
            total += best;
        }
        Some(total)
    };
    match (prime(piles[0]), prime(piles[1])) {
        (Some(a), Some(b)) => award(&mut pts, a as usize, b as usize),
        (Some(_), None) => pts[0] += 1,
        (None, Some(_)) => pts[1] += 1,
        (None, None) => {}
    }
    pts
}

/// Plays uniformly random legal moves to the end.
pub fn random_game<R: Rng>(seed: u64, rng: &mut R) -> MatchState {
    let mut st = MatchState::new(scopone::deal(seed, 3));
    while !st.is_over() {
        let moves = st.legal_moves().unwrap();
        st.apply(*moves.choose(rng).unwrap()).unwrap();
    }
    st
}

/// Random disjoint hand and table for move-generation tests.
pub fn random_hand_table<R: Rng>(rng: &mut R) -> (CardSet, CardSet) {
    let mut cards: Vec<u8> = (0..40).collect();
    use rand::seq::SliceRandom;
    cards.shuffle(rng);
    let h = rng.random_range(1..=9);
    let t = rng.random_range(0..=12);
    let hand = cards[..h].iter().map(|&i| Card::from_index(i)).collect();
    let table = cards[h..h + t].iter().map(|&i| Card::from_index(i)).collect();
    (hand, table)
}

/// Position reached after `plies` random moves.
pub fn random_position<R: Rng>(seed: u64, plies: usize, rng: &mut R) -> MatchState {
    let mut st = MatchState::new(scopone::deal(seed, 3));
    for _ in 0..plies.min(36) {
        let moves = st.legal_moves().unwrap();
        st.apply(*moves.choose(rng).unwrap()).unwrap();
    }
    st
}

pub fn sorted(mut v: Vec<Move>) -> Vec<Move> {
    v.sort();
    v
}

pub fn position_points(p: &Position) -> [u32; 2] {
    oracle_points(p.piles, [p.scope[0].len() as u32, p.scope[1].len() as u32])
}

/// Score difference for the side to move under perfect play by both teams.
pub fn negamax(pos: &Position) -> i32 {
    if pos.is_over() {
        let p = pos.points();
        let t = pos.current.team().index();
        return p[t] as i32 - p[1 - t] as i32;
    }
    let me = pos.current.team();
    pos.legal_moves()
        .into_iter()
        .map(|m| {
            let mut next = *pos;
            next.apply_unchecked(m);
            if next.is_over() || next.current.team() != me {
                -negamax(&next)
            } else {
                negamax(&next)
            }
        })
        .max()
        .unwrap()
}

/// Moves of the side to move with their exact values.
pub fn move_values(pos: &Position) -> Vec<(Move, i32)> {
    let me = pos.current.team();
    pos.legal_moves()
        .into_iter()
        .map(|m| {
            let mut next = *pos;
            next.apply_unchecked(m);
            let v = if next.is_over() {
                let p = next.points();
                p[me.index()] as i32 - p[1 - me.index()] as i32
            } else {
                -negamax(&next)
            };
            (m, v)
        })
        .collect()
}

/// Late positions with a single optimal move.
pub fn decided_endgames(count: usize, min_turn: u8) -> Vec<(Position, Move)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        seed += 1;
        let plies = rng.random_range(min_turn as usize..35);
        let st = random_position(seed, plies, &mut rng);
        if st.is_over() {
            continue;
        }
        let mut vals = move_values(&st.pos);
        if vals.len() < 2 {
            continue;
        }
        vals.sort_by_key(|(_, v)| -v);
        if vals[0].1 > vals[1].1 {
            out.push((st.pos, vals[0].0));
        }
    }
    out
}
