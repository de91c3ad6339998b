//! Live-match server: humans play against blinded AI partners and
//! opponents; every deal is persisted in the engine log format.

pub mod api;
pub mod export;
pub mod live;
pub mod store;

pub use api::router;
pub use live::{CreateRequest, Mode, Service, ServiceConfig, Status};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("no such match")]
    NotFound,
    #[error("missing or wrong token")]
    Unauthorized,
    #[error("illegal move")]
    IllegalMove { legal: Vec<String> },
    #[error("not your turn")]
    NotYourTurn,
    #[error("match is finished")]
    Finished,
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("storage: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt data: {0}")]
    Corrupt(String),
    #[error("internal: {0}")]
    Internal(String),
}
