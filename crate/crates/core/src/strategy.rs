//! Strategy descriptors and the dispatcher that hands each player the
//! information it is entitled to.
//!
//! Text form: `random`, `greedy`, `cs`, `cg`,
//! `mcts:iters=1000,c=2.0,reward=sd,sim=egs(0.3),seed=7` and
//! `ismcts:iters=4000,c=2.0,reward=sd,sim=egs(0.3),det=cgs,seed=7`.
//! Omitted keys take their defaults.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{MatchState, Move};
use crate::error::ParseError;
use crate::ismcts::{ismcts_choose, DeterminizerKind, IsmctsConfig};
use crate::mcts::mcts_choose;
use crate::players::{RulePlayer, RuleStrategy};
use crate::search::SearchConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    Random,
    Rule(RuleStrategy),
    /// Cheating search over the full state.
    Mcts(SearchConfig),
    Ismcts(IsmctsConfig),
}

impl Strategy {
    pub const GREEDY: Strategy = Strategy::Rule(RuleStrategy::Greedy);
    pub const CS: Strategy = Strategy::Rule(RuleStrategy::Cs);
    pub const CG: Strategy = Strategy::Rule(RuleStrategy::Cg);

    pub fn mcts(iterations: u32) -> Strategy {
        Strategy::Mcts(SearchConfig { iterations, ..SearchConfig::default() })
    }

    pub fn ismcts(iterations: u32, det: DeterminizerKind) -> Strategy {
        Strategy::Ismcts(IsmctsConfig { search: SearchConfig { iterations, ..SearchConfig::default() }, det })
    }

    /// Short family name: random, greedy, cs, cg, mcts or ismcts.
    pub fn family(&self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Rule(r) => r.id(),
            Strategy::Mcts(_) => "mcts",
            Strategy::Ismcts(_) => "ismcts",
        }
    }

    /// Whether the strategy reads hidden cards.
    pub fn is_cheating(&self) -> bool {
        matches!(self, Strategy::Mcts(_))
    }

    pub fn search_config_mut(&mut self) -> Option<&mut SearchConfig> {
        match self {
            Strategy::Mcts(c) => Some(c),
            Strategy::Ismcts(c) => Some(&mut c.search),
            _ => None,
        }
    }

    /// Picks a move for the seat to act. `salt` decorrelates decisions
    /// across matches; the configured seed and the turn are mixed in.
    /// Fair players only ever see their own view.
    pub fn choose(&self, state: &MatchState, salt: u64) -> Move {
        let turn = state.turn() as u64;
        match self {
            Strategy::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(mix(salt, turn), 0x5eed));
                let view = state.view(state.current());
                *view.legal_moves().choose(&mut rng).expect("a legal move exists")
            }
            Strategy::Rule(r) => RulePlayer::new(*r).choose(&state.view(state.current())),
            Strategy::Mcts(cfg) => {
                let cfg = SearchConfig { seed: mix(mix(cfg.seed, salt), turn), ..*cfg };
                mcts_choose(&state.pos, &cfg)
            }
            Strategy::Ismcts(cfg) => {
                let mut cfg = *cfg;
                cfg.search.seed = mix(mix(cfg.search.seed, salt), turn);
                ismcts_choose(&state.view(state.current()), &cfg)
            }
        }
    }
}

/// SplitMix64-style combination of two words.
pub fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(a << 6).wrapping_add(a >> 2);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let search = |f: &mut fmt::Formatter<'_>, c: &SearchConfig| {
            write!(f, "iters={},c={},reward={},sim={}", c.iterations, c.uct_c, c.reward.id(), c.sim)
        };
        match self {
            Strategy::Random => f.write_str("random"),
            Strategy::Rule(r) => f.write_str(r.id()),
            Strategy::Mcts(c) => {
                f.write_str("mcts:")?;
                search(f, c)?;
                write!(f, ",seed={}", c.seed)
            }
            Strategy::Ismcts(c) => {
                f.write_str("ismcts:")?;
                search(f, &c.search)?;
                write!(f, ",det={},seed={}", c.det, c.search.seed)
            }
        }
    }
}

impl FromStr for Strategy {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Strategy, ParseError> {
        let s = s.trim();
        let bad = |why: String| ParseError::Strategy(s.to_string(), why);
        let (family, params) = match s.split_once(':') {
            Some((f, p)) => (f.trim().to_ascii_lowercase(), p),
            None => (s.to_ascii_lowercase(), ""),
        };
        match family.as_str() {
            "random" | "rnd" if params.is_empty() => return Ok(Strategy::Random),
            "greedy" | "cs" | "cg" if params.is_empty() => return Ok(Strategy::Rule(family.parse()?)),
            "mcts" | "ismcts" => {}
            _ => return Err(bad("unknown strategy or unexpected parameters".into())),
        }
        let mut cfg = SearchConfig::default();
        let mut det = None;
        for kv in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {kv:?}")))?;
            let num = |what: &str| bad(format!("{what} must be a number, got {v:?}"));
            match k.trim().to_ascii_lowercase().as_str() {
                "iters" | "iterations" => {
                    cfg.iterations = v.parse().map_err(|_| num("iters"))?;
                    if cfg.iterations == 0 {
                        return Err(bad("iters must be positive".into()));
                    }
                }
                "c" => {
                    cfg.uct_c = v.parse().map_err(|_| num("c"))?;
                    if !(cfg.uct_c >= 0.0 && cfg.uct_c.is_finite()) {
                        return Err(bad("c must be a non-negative number".into()));
                    }
                }
                "reward" => cfg.reward = v.parse()?,
                "sim" => cfg.sim = v.parse()?,
                "seed" => cfg.seed = v.parse().map_err(|_| num("seed"))?,
                "det" if family == "ismcts" => det = Some(v.parse()?),
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
        Ok(if family == "mcts" {
            Strategy::Mcts(cfg)
        } else {
            Strategy::Ismcts(IsmctsConfig { search: cfg, det: det.unwrap_or(DeterminizerKind::Random) })
        })
    }
}

impl TryFrom<String> for Strategy {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Strategy, ParseError> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::deal;
    use crate::search::{RewardFn, SimStrategy};

    #[test]
    fn parse_and_print_round_trip() {
        for text in [
            "random",
            "greedy",
            "cs",
            "cg",
            "mcts:iters=1000,c=2,reward=sd,sim=egs(0.3),seed=0",
            "ismcts:iters=4000,c=0.5,reward=pwl,sim=crs,det=cgs,seed=9",
        ] {
            let s: Strategy = text.parse().unwrap();
            assert_eq!(s.to_string(), text);
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
    }

    #[test]
    fn defaults_fill_missing_keys() {
        let s: Strategy = "mcts:iters=200".parse().unwrap();
        assert_eq!(
            s,
            Strategy::Mcts(SearchConfig {
                iterations: 200,
                uct_c: 2.0,
                reward: RewardFn::Sd,
                sim: SimStrategy::EpsilonGreedy(0.3),
                seed: 0
            })
        );
        let s: Strategy = "ismcts:det=cgs".parse().unwrap();
        assert!(matches!(s, Strategy::Ismcts(IsmctsConfig { det: DeterminizerKind::Cgs, .. })));
    }

    #[test]
    fn rejects_malformed() {
        for text in ["mcts:iters=0", "mcts:foo=1", "mcts:det=cgs", "greedy:iters=3", "alphazero", "mcts:sim=egs(2)", "mcts:c=-1"] {
            assert!(text.parse::<Strategy>().is_err(), "{text}");
        }
    }

    #[test]
    fn choices_are_legal_and_reproducible() {
        let st = MatchState::new(deal(21, 3));
        for text in ["random", "greedy", "cs", "cg", "mcts:iters=50", "ismcts:iters=50,det=cgs"] {
            let s: Strategy = text.parse().unwrap();
            let a = s.choose(&st, 4);
            assert!(st.pos.is_legal(&a));
            assert_eq!(a, s.choose(&st, 4));
        }
    }
}
