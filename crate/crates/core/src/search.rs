//! Pieces shared by the MCTS and ISMCTS players: configuration, reward
//! functions, playout policies and the two upper-confidence formulas.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{for_each_capture, Move, Position};
use crate::error::{EngineError, ParseError};
use crate::players::{greedy_capture, greedy_move, Situation};

/// How a finished playout is turned into per-team rewards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewardFn {
    /// Raw scores.
    Rs,
    /// Score difference.
    Sd,
    /// +1 / -1, 0 on a tie.
    Wl,
    /// 1 / 0, 0.5 each on a tie.
    Pwl,
}

impl RewardFn {
    #[inline]
    pub fn apply(self, points: [u32; 2]) -> [f64; 2] {
        let [a, b] = [points[0] as f64, points[1] as f64];
        match self {
            RewardFn::Rs => [a, b],
            RewardFn::Sd => [a - b, b - a],
            RewardFn::Wl => {
                if a > b {
                    [1.0, -1.0]
                } else if a < b {
                    [-1.0, 1.0]
                } else {
                    [0.0, 0.0]
                }
            }
            RewardFn::Pwl => {
                if a > b {
                    [1.0, 0.0]
                } else if a < b {
                    [0.0, 1.0]
                } else {
                    [0.5, 0.5]
                }
            }
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            RewardFn::Rs => "rs",
            RewardFn::Sd => "sd",
            RewardFn::Wl => "wl",
            RewardFn::Pwl => "pwl",
        }
    }
}

impl FromStr for RewardFn {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<RewardFn, ParseError> {
        match s.to_ascii_lowercase().as_str() {
            "rs" => Ok(RewardFn::Rs),
            "sd" => Ok(RewardFn::Sd),
            "wl" => Ok(RewardFn::Wl),
            "pwl" => Ok(RewardFn::Pwl),
            _ => Err(ParseError::Strategy(s.into(), "reward must be rs|sd|wl|pwl".into())),
        }
    }
}

/// Reward vector of a finished position.
pub fn reward(final_pos: &Position, f: RewardFn) -> Result<[f64; 2], EngineError> {
    if !final_pos.is_over() {
        return Err(EngineError::MatchNotOver);
    }
    Ok(f.apply(final_pos.points()))
}

/// Playout policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SimStrategy {
    /// Uniform over legal moves.
    Random,
    /// Uniform card, greedy choice among that card's captures.
    CardRandom,
    Greedy,
    /// Uniform move with probability ε, greedy otherwise.
    EpsilonGreedy(f64),
}

impl fmt::Display for SimStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimStrategy::Random => f.write_str("rs"),
            SimStrategy::CardRandom => f.write_str("crs"),
            SimStrategy::Greedy => f.write_str("gs"),
            SimStrategy::EpsilonGreedy(e) => write!(f, "egs({e})"),
        }
    }
}

impl FromStr for SimStrategy {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<SimStrategy, ParseError> {
        let lower = s.to_ascii_lowercase();
        let bad = |why: &str| ParseError::Strategy(s.into(), why.into());
        match lower.as_str() {
            "rs" | "random" => Ok(SimStrategy::Random),
            "crs" => Ok(SimStrategy::CardRandom),
            "gs" | "greedy" => Ok(SimStrategy::Greedy),
            _ => {
                let inner =
                    lower.strip_prefix("egs(").and_then(|r| r.strip_suffix(')')).ok_or_else(|| bad("sim must be rs|crs|gs|egs(ε)"))?;
                let eps: f64 = inner.parse().map_err(|_| bad("ε must be a number"))?;
                if !(0.0..=1.0).contains(&eps) {
                    return Err(bad("ε must lie in [0, 1]"));
                }
                Ok(SimStrategy::EpsilonGreedy(eps))
            }
        }
    }
}

/// Plays `pos` to the end with `strategy`. `buf` is scratch space.
pub fn simulate<R: Rng + ?Sized>(mut pos: Position, strategy: SimStrategy, rng: &mut R, buf: &mut Vec<Move>) -> Position {
    while !pos.is_over() {
        let mv = sim_move(&pos, strategy, rng, buf);
        pos.apply_unchecked(mv);
    }
    pos
}

#[inline]
fn random_move<R: Rng + ?Sized>(pos: &Position, rng: &mut R, buf: &mut Vec<Move>) -> Move {
    buf.clear();
    pos.legal_moves_into(buf);
    *buf.choose(rng).expect("legal move while not over")
}

/// One playout step.
#[inline]
pub fn sim_move<R: Rng + ?Sized>(pos: &Position, strategy: SimStrategy, rng: &mut R, buf: &mut Vec<Move>) -> Move {
    match strategy {
        SimStrategy::Random => random_move(pos, rng, buf),
        SimStrategy::Greedy => greedy_move(pos, buf),
        SimStrategy::EpsilonGreedy(eps) => {
            if rng.random::<f64>() < eps {
                random_move(pos, rng, buf)
            } else {
                greedy_move(pos, buf)
            }
        }
        SimStrategy::CardRandom => {
            let hand = pos.current_hand();
            let k = rng.random_range(0..hand.len());
            let card = hand.iter().nth(k).expect("card index in range");
            buf.clear();
            for_each_capture(card.rank(), pos.table, |s| buf.push(Move::capture(card, s)));
            match buf.len() {
                0 => Move::place(card),
                1 => buf[0],
                _ => {
                    let sit = Situation { table: pos.table, turn: pos.turn, threats: pos.unseen_by(pos.current).rank_mask() };
                    greedy_capture(buf, &sit).expect("captures present")
                }
            }
        }
    }
}

/// Search parameters shared by both tree searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub iterations: u32,
    pub uct_c: f64,
    pub reward: RewardFn,
    pub sim: SimStrategy,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { iterations: 1000, uct_c: 2.0, reward: RewardFn::Sd, sim: SimStrategy::EpsilonGreedy(0.3), seed: 0 }
    }
}

/// UCT score of a child: mean reward plus `c·sqrt(2 ln N(parent) / N(child))`.
/// `child_visits` must be at least one.
#[inline]
pub fn uct_value(child_reward: f64, child_visits: f64, parent_visits: f64, c: f64) -> f64 {
    debug_assert!(child_visits >= 1.0);
    child_reward / child_visits + c * (2.0 * parent_visits.ln() / child_visits).sqrt()
}

/// ISUCT score: mean reward plus `c·sqrt(ln N'(child) / N(child))`, where
/// N' counts how often the child was available.
#[inline]
pub fn isuct_value(child_reward: f64, child_visits: f64, availability: f64, c: f64) -> f64 {
    debug_assert!(child_visits >= 1.0 && availability >= 1.0);
    child_reward / child_visits + c * (availability.ln() / child_visits).sqrt()
}

/// Index of the maximum score, ties broken uniformly at random.
pub(crate) fn argmax_random<R: Rng + ?Sized>(scores: impl Iterator<Item = (usize, f64)>, rng: &mut R) -> Option<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut chosen = None;
    let mut ties = 0u32;
    for (i, s) in scores {
        if s > best {
            best = s;
            chosen = Some(i);
            ties = 1;
        } else if s == best {
            ties += 1;
            // reservoir sampling over the tied entries
            if rng.random_range(0..ties) == 0 {
                chosen = Some(i);
            }
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reward_examples() {
        assert_eq!(RewardFn::Sd.apply([4, 1]), [3.0, -3.0]);
        assert_eq!(RewardFn::Pwl.apply([2, 2]), [0.5, 0.5]);
        assert_eq!(RewardFn::Wl.apply([0, 11]), [-1.0, 1.0]);
        assert_eq!(RewardFn::Wl.apply([3, 3]), [0.0, 0.0]);
        assert_eq!(RewardFn::Rs.apply([4, 1]), [4.0, 1.0]);
    }

    #[test]
    fn uct_examples() {
        assert_eq!(uct_value(3.0, 2.0, 100.0, 0.0), 1.5);
        let e2 = std::f64::consts::E.powi(2);
        assert!((uct_value(0.0, 1.0, e2, 1.0) - 2.0).abs() < 1e-12);
        assert_eq!(isuct_value(3.0, 2.0, 7.0, 0.0), 1.5);
        // always available: exploration term is sqrt(ln N / N)
        let n = 9.0f64;
        assert!((isuct_value(0.0, n, n, 1.0) - (n.ln() / n).sqrt()).abs() < 1e-12);
        assert!((uct_value(0.0, n, n, 1.0) - 2f64.sqrt() * isuct_value(0.0, n, n, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn parse_sim() {
        assert_eq!("egs(0.3)".parse::<SimStrategy>().unwrap(), SimStrategy::EpsilonGreedy(0.3));
        assert_eq!("crs".parse::<SimStrategy>().unwrap(), SimStrategy::CardRandom);
        assert!("egs(1.5)".parse::<SimStrategy>().is_err());
        assert!("foo".parse::<SimStrategy>().is_err());
        assert_eq!(SimStrategy::EpsilonGreedy(0.3).to_string(), "egs(0.3)");
    }
}
