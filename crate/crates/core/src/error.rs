use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid card `{0}`")]
    Card(String),
    #[error("rank {0} out of range 1..=10")]
    Rank(u8),
    #[error("seat {0} out of range 0..=3")]
    Seat(u8),
    #[error("card {0} listed twice")]
    DuplicateCard(String),
    #[error("invalid strategy spec `{0}`: {1}")]
    Strategy(String, String),
    #[error("log line {line}: {msg}")]
    Log { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("illegal move {0}")]
    IllegalMove(String),
    #[error("match is over")]
    MatchOver,
    #[error("match is not over yet")]
    MatchNotOver,
    #[error("invalid state: {0}")]
    InvalidState(String),
}
