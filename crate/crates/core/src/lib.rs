//! Scopone: rules engine, rule-based players, Monte Carlo tree search
//! players and an experiment harness.

pub mod cards;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod guessing;
pub mod players;

pub use cards::{deal, Card, CardSet, DealResult, Seat, Suit, Team};
pub use engine::{capture_combinations, score_match, MatchScore, MatchState, Move, PlayerView, Position};
pub use error::{EngineError, ParseError};
pub mod ismcts;
pub mod matchlog;
pub mod mcts;
pub mod search;
pub mod strategy;
