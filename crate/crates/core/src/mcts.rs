//! Cheating Monte Carlo Tree Search over the full game state.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::engine::{Move, Position};
use crate::search::{argmax_random, simulate, uct_value, SearchConfig};

const NO_PARENT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct SearchNode {
    /// Move leading here (meaningless at the root).
    pub mv: Move,
    /// Team index of the player who made `mv`.
    pub mover_team: u8,
    pub parent: u32,
    pub children: Vec<u32>,
    pub untried: Vec<Move>,
    pub visits: u32,
    /// Total reward per team.
    pub reward: [f64; 2],
}

impl SearchNode {
    fn new(mv: Move, mover_team: u8, parent: u32, untried: Vec<Move>) -> SearchNode {
        SearchNode { mv, mover_team, parent, children: Vec::new(), untried, visits: 0, reward: [0.0; 2] }
    }

    pub fn mean(&self, team: usize) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.reward[team] / self.visits as f64
        }
    }
}

/// A finished search tree; node 0 is the root.
#[derive(Debug, Clone)]
pub struct SearchTree {
    pub nodes: Vec<SearchNode>,
    /// Playouts that stopped at each node (terminal or freshly expanded).
    pub ended_at: Vec<u32>,
}

impl SearchTree {
    pub fn root(&self) -> &SearchNode {
        &self.nodes[0]
    }

    /// Most visited root child; ties go to the higher mean for the root
    /// player's team, then to the smaller move.
    pub fn best_move(&self) -> Option<Move> {
        let root = self.root();
        root.children
            .iter()
            .map(|&i| &self.nodes[i as usize])
            .max_by(|a, b| {
                a.visits.cmp(&b.visits).then(a.mean(a.mover_team as usize).total_cmp(&b.mean(b.mover_team as usize))).then(b.mv.cmp(&a.mv))
            })
            .map(|n| n.mv)
    }

    /// Visit count per root move.
    pub fn root_visits(&self) -> Vec<(Move, u32)> {
        self.root().children.iter().map(|&i| (self.nodes[i as usize].mv, self.nodes[i as usize].visits)).collect()
    }

    /// Every node's visits equal its children's visits plus the playouts that ended there.
    pub fn check_consistency(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            let below: u32 = n.children.iter().map(|&c| self.nodes[c as usize].visits).sum();
            if n.visits != below + self.ended_at[i] {
                return Err(format!("node {i}: N={} children={} ended={}", n.visits, below, self.ended_at[i]));
            }
            for &c in &n.children {
                if n.untried.contains(&self.nodes[c as usize].mv) {
                    return Err(format!("node {i}: child move still untried"));
                }
            }
        }
        Ok(())
    }
}

/// Runs a search from `root` with its own RNG seeded from `cfg.seed`.
pub fn mcts_search(root: &Position, cfg: &SearchConfig) -> SearchTree {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    mcts_search_with(root, cfg, &mut rng)
}

pub fn mcts_search_with<R: Rng + ?Sized>(root: &Position, cfg: &SearchConfig, rng: &mut R) -> SearchTree {
    let mut nodes = Vec::with_capacity(cfg.iterations as usize + 1);
    let root_moves = if root.is_over() { Vec::new() } else { root.legal_moves() };
    nodes.push(SearchNode::new(Move::place(crate::cards::Card::from_index(0)), 0, NO_PARENT, root_moves));
    let mut ended_at = vec![0u32];
    let mut buf = Vec::with_capacity(32);
    let mut path: Vec<u32> = Vec::with_capacity(40);

    for _ in 0..cfg.iterations.max(1) {
        let mut pos = *root;
        let mut node = 0u32;
        path.clear();
        path.push(0);
        loop {
            if pos.is_over() {
                break;
            }
            if !nodes[node as usize].untried.is_empty() {
                let n = &mut nodes[node as usize];
                let k = rng.random_range(0..n.untried.len());
                let mv = n.untried.swap_remove(k);
                let team = pos.current.team() as u8;
                pos.apply_unchecked(mv);
                let moves = if pos.is_over() { Vec::new() } else { pos.legal_moves() };
                let id = nodes.len() as u32;
                nodes.push(SearchNode::new(mv, team, node, moves));
                ended_at.push(0);
                nodes[node as usize].children.push(id);
                node = id;
                path.push(id);
                break;
            }
            let n = &nodes[node as usize];
            let parent_visits = n.visits as f64;
            let c = cfg.uct_c;
            let children = &n.children;
            let pick = argmax_random(
                children.iter().enumerate().map(|(k, &ci)| {
                    let ch = &nodes[ci as usize];
                    (k, uct_value(ch.reward[ch.mover_team as usize], ch.visits as f64, parent_visits, c))
                }),
                rng,
            )
            .expect("fully expanded node has children");
            let child = nodes[node as usize].children[pick];
            pos.apply_unchecked(nodes[child as usize].mv);
            node = child;
            path.push(child);
        }
        ended_at[node as usize] += 1;
        let end = simulate(pos, cfg.sim, rng, &mut buf);
        let r = cfg.reward.apply(end.points());
        for &i in &path {
            let n = &mut nodes[i as usize];
            n.visits += 1;
            n.reward[0] += r[0];
            n.reward[1] += r[1];
        }
    }
    SearchTree { nodes, ended_at }
}

/// Move chosen by cheating MCTS for the player to act in `pos`.
pub fn mcts_choose(pos: &Position, cfg: &SearchConfig) -> Move {
    let moves = pos.legal_moves();
    if moves.len() == 1 {
        return moves[0];
    }
    mcts_search(pos, cfg).best_move().expect("root has children")
}
