//! Single-observer Information Set MCTS: one shared tree, a fresh
//! determinization of the hidden hands per iteration.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet, Seat};
use crate::engine::{Move, PlayerView, Position};
use crate::error::ParseError;
use crate::guessing::GuessState;
use crate::search::{argmax_random, isuct_value, simulate, SearchConfig};

/// How hidden hands are filled in at each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeterminizerKind {
    /// Uniform over assignments that respect hand sizes.
    Random,
    /// Card guessing: samples from the constrained guess state.
    Cgs,
}

impl DeterminizerKind {
    pub fn id(self) -> &'static str {
        match self {
            DeterminizerKind::Random => "random",
            DeterminizerKind::Cgs => "cgs",
        }
    }
}

impl fmt::Display for DeterminizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for DeterminizerKind {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" | "rnd" | "r" => Ok(DeterminizerKind::Random),
            "cgs" | "guess" => Ok(DeterminizerKind::Cgs),
            other => Err(ParseError::Strategy(other.to_string(), "determinizer must be random or cgs".into())),
        }
    }
}

/// Full state rebuilt from a view with the given hidden hands.
fn position_from_view(view: &PlayerView, mut hands: [CardSet; 4]) -> Position {
    hands[view.seat.index()] = view.hand;
    Position {
        hands,
        table: view.table,
        piles: view.piles,
        scope: view.scope,
        current: view.current,
        last_capturer: view.last_capturer,
        turn: view.turn,
    }
}

/// Uniform split of the unseen pool over the other seats' hand sizes.
pub fn random_hands<R: Rng + ?Sized>(view: &PlayerView, pool: &mut Vec<Card>, rng: &mut R) -> [CardSet; 4] {
    pool.clear();
    pool.extend(view.unseen().iter());
    pool.shuffle(rng);
    let mut hands = [CardSet::EMPTY; 4];
    let mut at = 0;
    for s in Seat::ALL {
        if s == view.seat {
            continue;
        }
        let n = view.hand_sizes[s.index()] as usize;
        hands[s.index()] = pool[at..at + n].iter().copied().collect();
        at += n;
    }
    hands
}

/// One full state from the observer's information set. `gs` is needed
/// only for card guessing; without it the random determinizer is used.
pub fn determinize<R: Rng + ?Sized>(view: &PlayerView, kind: DeterminizerKind, gs: Option<&GuessState>, rng: &mut R) -> Position {
    let mut pool = Vec::with_capacity(30);
    determinize_into(view, kind, gs, rng, &mut pool)
}

fn determinize_into<R: Rng + ?Sized>(
    view: &PlayerView,
    kind: DeterminizerKind,
    gs: Option<&GuessState>,
    rng: &mut R,
    pool: &mut Vec<Card>,
) -> Position {
    let hands = match (kind, gs) {
        (DeterminizerKind::Cgs, Some(gs)) => match gs.plausible_hands(&view.hand_sizes, rng) {
            Ok(h) => h,
            Err(e) => {
                log::warn!("guess sampling failed ({e}); using a random determinization");
                random_hands(view, pool, rng)
            }
        },
        _ => random_hands(view, pool, rng),
    };
    let pos = position_from_view(view, hands);
    debug_assert!(projection_matches(&pos, view), "determinization leaks from the view");
    pos
}

/// The determinized state shows the observer exactly its view.
pub fn projection_matches(pos: &Position, view: &PlayerView) -> bool {
    let sizes_ok = Seat::ALL.iter().all(|s| pos.hand(*s).len() == view.hand_sizes[s.index()] as usize);
    let disjoint = {
        let mut acc = pos.table | pos.piles[0] | pos.piles[1];
        let mut ok = true;
        for h in pos.hands {
            ok &= acc.is_disjoint(h);
            acc = acc | h;
        }
        ok && acc == CardSet::FULL
    };
    sizes_ok
        && disjoint
        && pos.hand(view.seat) == view.hand
        && pos.table == view.table
        && pos.piles == view.piles
        && pos.scope == view.scope
        && pos.current == view.current
        && pos.turn == view.turn
        && pos.last_capturer == view.last_capturer
}

/// Search parameters plus the determinizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsmctsConfig {
    pub search: SearchConfig,
    pub det: DeterminizerKind,
}

impl Default for IsmctsConfig {
    fn default() -> Self {
        IsmctsConfig { search: SearchConfig::default(), det: DeterminizerKind::Random }
    }
}

#[derive(Debug, Clone)]
pub struct InfoSetNode {
    pub mv: Move,
    pub mover_team: u8,
    pub parent: u32,
    pub children: Vec<u32>,
    pub visits: u32,
    /// Times this node's move was legal while its parent was visited.
    pub availability: u32,
    pub reward: [f64; 2],
}

impl InfoSetNode {
    pub fn mean(&self, team: usize) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.reward[team] / self.visits as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct InfoSetTree {
    pub nodes: Vec<InfoSetNode>,
}

impl InfoSetTree {
    pub fn root(&self) -> &InfoSetNode {
        &self.nodes[0]
    }

    pub fn best_move(&self) -> Option<Move> {
        self.root()
            .children
            .iter()
            .map(|&i| &self.nodes[i as usize])
            .max_by(|a, b| {
                a.visits.cmp(&b.visits).then(a.mean(a.mover_team as usize).total_cmp(&b.mean(b.mover_team as usize))).then(b.mv.cmp(&a.mv))
            })
            .map(|n| n.mv)
    }

    pub fn root_children(&self) -> impl Iterator<Item = &InfoSetNode> {
        self.root().children.iter().map(|&i| &self.nodes[i as usize])
    }

    /// N ≤ N′ everywhere and N′ never exceeds the parent's visits.
    pub fn check_availability(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate().skip(1) {
            let p = &self.nodes[n.parent as usize];
            if n.visits > n.availability || n.availability > p.visits {
                return Err(format!("node {i}: N={} N'={} parent N={}", n.visits, n.availability, p.visits));
            }
        }
        Ok(())
    }
}

/// Runs ISMCTS for the observer of `view`. `gs` should be the guess
/// state for `view` when card guessing is requested.
pub fn ismcts_search_with<R: Rng + ?Sized>(view: &PlayerView, cfg: &IsmctsConfig, gs: Option<&GuessState>, rng: &mut R) -> InfoSetTree {
    let scfg = &cfg.search;
    let mut nodes: Vec<InfoSetNode> = Vec::with_capacity(scfg.iterations as usize + 1);
    nodes.push(InfoSetNode {
        mv: Move::place(Card::from_index(0)),
        mover_team: 0,
        parent: u32::MAX,
        children: Vec::new(),
        visits: 0,
        availability: 0,
        reward: [0.0; 2],
    });
    let mut pool = Vec::with_capacity(30);
    let mut legal: Vec<Move> = Vec::with_capacity(32);
    let mut untried: Vec<Move> = Vec::with_capacity(32);
    let mut avail_idx: Vec<u32> = Vec::with_capacity(32);
    let mut buf = Vec::with_capacity(32);
    let mut path: Vec<u32> = Vec::with_capacity(40);

    for _ in 0..scfg.iterations.max(1) {
        let mut pos = determinize_into(view, cfg.det, gs, rng, &mut pool);
        let mut node = 0u32;
        path.clear();
        path.push(0);
        while !pos.is_over() {
            legal.clear();
            pos.legal_moves_into(&mut legal);
            untried.clear();
            untried.extend_from_slice(&legal);
            avail_idx.clear();
            for &ci in &nodes[node as usize].children {
                let m = nodes[ci as usize].mv;
                if let Some(k) = untried.iter().position(|x| *x == m) {
                    untried.swap_remove(k);
                    avail_idx.push(ci);
                }
            }
            for &ci in &avail_idx {
                nodes[ci as usize].availability += 1;
            }
            if !untried.is_empty() {
                let mv = untried[rng.random_range(0..untried.len())];
                let team = pos.current.team() as u8;
                pos.apply_unchecked(mv);
                let id = nodes.len() as u32;
                nodes.push(InfoSetNode {
                    mv,
                    mover_team: team,
                    parent: node,
                    children: Vec::new(),
                    visits: 0,
                    availability: 1,
                    reward: [0.0; 2],
                });
                nodes[node as usize].children.push(id);
                path.push(id);
                break;
            }
            let c = scfg.uct_c;
            let pick = argmax_random(
                avail_idx.iter().enumerate().map(|(k, &ci)| {
                    let ch = &nodes[ci as usize];
                    (k, isuct_value(ch.reward[ch.mover_team as usize], ch.visits as f64, ch.availability as f64, c))
                }),
                rng,
            )
            .expect("available children exist");
            let child = avail_idx[pick];
            pos.apply_unchecked(nodes[child as usize].mv);
            node = child;
            path.push(child);
        }
        let end = simulate(pos, scfg.sim, rng, &mut buf);
        let r = scfg.reward.apply(end.points());
        for &i in &path {
            let n = &mut nodes[i as usize];
            n.visits += 1;
            n.reward[0] += r[0];
            n.reward[1] += r[1];
        }
    }
    InfoSetTree { nodes }
}

/// Builds the guess state when card guessing is configured.
pub fn guess_state_for(view: &PlayerView, det: DeterminizerKind) -> Option<GuessState> {
    match det {
        DeterminizerKind::Cgs => Some(GuessState::from_view(view)),
        DeterminizerKind::Random => None,
    }
}

pub fn ismcts_search(view: &PlayerView, cfg: &IsmctsConfig) -> InfoSetTree {
    let gs = guess_state_for(view, cfg.det);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.search.seed);
    ismcts_search_with(view, cfg, gs.as_ref(), &mut rng)
}

/// Move chosen by ISMCTS for the viewing seat.
pub fn ismcts_choose(view: &PlayerView, cfg: &IsmctsConfig) -> Move {
    let moves = view.legal_moves();
    if moves.len() == 1 {
        return moves[0];
    }
    ismcts_search(view, cfg).best_move().expect("root has children")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::deal;
    use crate::engine::MatchState;
    use crate::search::{RewardFn, SimStrategy};

    fn cfg(iterations: u32, seed: u64, det: DeterminizerKind) -> IsmctsConfig {
        IsmctsConfig {
            search: SearchConfig { iterations, uct_c: 2.0, reward: RewardFn::Sd, sim: SimStrategy::EpsilonGreedy(0.3), seed },
            det,
        }
    }

    fn midgame(seed: u64, plies: usize) -> MatchState {
        let mut st = MatchState::new(deal(seed, 3));
        let mut buf = Vec::new();
        for _ in 0..plies {
            let mv = crate::players::greedy_move(&st.pos, &mut buf);
            st.apply(mv).unwrap();
        }
        st
    }

    #[test]
    fn availability_bounds_and_root_visits() {
        for det in [DeterminizerKind::Random, DeterminizerKind::Cgs] {
            let st = midgame(7, 5);
            let view = st.view(st.current());
            let tree = ismcts_search(&view, &cfg(400, 3, det));
            assert_eq!(tree.root().visits, 400);
            tree.check_availability().unwrap();
            // the observer's own moves are legal in every determinization
            for ch in tree.root_children() {
                let created_at = 400 - ch.availability;
                assert!(created_at < 400);
            }
            let sum: u32 = tree.root_children().map(|c| c.visits).sum();
            assert_eq!(sum, 400);
        }
    }

    #[test]
    fn determinization_projects_to_view() {
        let st = midgame(11, 9);
        let view = st.view(Seat::new(2).unwrap());
        let gs = GuessState::from_view(&view);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..200 {
            let kind = if k % 2 == 0 { DeterminizerKind::Random } else { DeterminizerKind::Cgs };
            let pos = determinize(&view, kind, Some(&gs), &mut rng);
            assert!(projection_matches(&pos, &view));
        }
    }

    #[test]
    fn seeded_choice_is_reproducible() {
        let st = midgame(13, 2);
        let view = st.view(st.current());
        let c = cfg(300, 77, DeterminizerKind::Cgs);
        assert_eq!(ismcts_choose(&view, &c), ismcts_choose(&view, &c));
    }
}
