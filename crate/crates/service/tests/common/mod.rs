#![allow(dead_code)]

use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use scopone_service::{Service, ServiceConfig, Status};
use serde_json::Value;
use tower::ServiceExt;
use uuid::Uuid;

/// Zero delay and a fast roster, so whole games finish in milliseconds.
pub fn fast_config(dir: &std::path::Path, seed: u64) -> ServiceConfig {
    let mut cfg = ServiceConfig::new(dir);
    cfg.delay = (Duration::ZERO, Duration::ZERO);
    cfg.roster = ["greedy", "cs", "mcts:iters=30"].iter().map(|s| s.parse().unwrap()).collect();
    cfg.seed = Some(seed);
    cfg
}

pub async fn call(app: &Router, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call_raw(app, method, uri, token, body).await;
    let v = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or(Value::String(String::from_utf8_lossy(&bytes).into_owned()))
    };
    (status, v)
}

pub async fn call_raw(app: &Router, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub fn status(svc: &Service, id: Uuid, token: &str) -> Status {
    svc.with_match(id, token, |m| m.status).unwrap()
}

/// Waits until the human is to move or the game is over.
pub async fn wait_turn(svc: &Service, id: Uuid, token: &str) -> Status {
    for _ in 0..20_000 {
        match status(svc, id, token) {
            Status::AiThinking => tokio::time::sleep(Duration::from_millis(2)).await,
            s => return s,
        }
    }
    panic!("AI never finished its turn");
}

/// Plays the human side with its first legal move until the game ends.
pub async fn play_out(svc: &Service, id: Uuid, token: &str) {
    while wait_turn(svc, id, token).await == Status::AwaitingHuman {
        let mv = svc.with_match(id, token, |m| m.state.legal_moves().unwrap()[0]).unwrap();
        svc.submit(id, token, mv).unwrap();
    }
}
