//! HTTP surface. Payloads are JSON with cards in the engine's text form
//! (`7d`, `Ks`, ...); see API.md.

use std::collections::{BTreeMap, VecDeque};
use std::convert::Infallible;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::stream::{self, Stream};
use scopone::{capture_combinations, Card, CardSet, Move};
use serde::{Deserialize, Serialize};
use serde_json::json;
use uuid::Uuid;

use crate::export;
use crate::live::{CreateRequest, DealScore, Event, LiveMatch, Mode, Service, Status};
use crate::ServiceError;

pub const API_VERSION: &str = "1";

pub fn router(svc: Service) -> Router {
    let routes = Router::new()
        .route("/matches", post(create))
        .route("/matches/{id}/view", get(view))
        .route("/matches/{id}/moves", post(submit))
        .route("/matches/{id}/events", get(events))
        .route("/study/export", get(study_export));
    Router::new().merge(routes.clone()).nest("/v1", routes).with_state(svc)
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match &self {
            ServiceError::NotFound => StatusCode::NOT_FOUND,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            ServiceError::IllegalMove { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::NotYourTurn | ServiceError::Finished => StatusCode::CONFLICT,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Io(_) | ServiceError::Corrupt(_) | ServiceError::Internal(_) => {
                log::error!("{self}");
                StatusCode::INTERNAL_SERVER_ERROR
            }
        };
        let body = match &self {
            ServiceError::IllegalMove { legal } => json!({ "error": self.to_string(), "legal": legal }),
            _ => json!({ "error": self.to_string() }),
        };
        (status, [("x-api-version", API_VERSION)], Json(body)).into_response()
    }
}

#[derive(Debug, Deserialize)]
struct TokenQuery {
    token: Option<String>,
    since: Option<u64>,
}

/// Bearer header, or `?token=` for clients that cannot set headers.
fn token(headers: &HeaderMap, query: Option<&str>) -> Result<String, ServiceError> {
    if let Some(v) = headers.get(header::AUTHORIZATION).and_then(|v| v.to_str().ok()) {
        if let Some(t) = v.strip_prefix("Bearer ") {
            return Ok(t.trim().to_string());
        }
    }
    query.map(str::to_string).ok_or(ServiceError::Unauthorized)
}

fn cards(set: CardSet) -> Vec<String> {
    set.iter().map(|c| c.to_string()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct MovePayload {
    pub played: String,
    pub captured: Vec<String>,
    pub text: String,
}

impl From<Move> for MovePayload {
    fn from(m: Move) -> MovePayload {
        MovePayload { played: m.played.to_string(), captured: cards(m.captured), text: m.to_string() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HistoryItem {
    pub seat: u8,
    pub played: String,
    pub captured: Vec<String>,
    pub scopa: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerLabel {
    pub seat: u8,
    pub label: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GamePayload {
    pub you: u32,
    pub them: u32,
    pub target: Option<u32>,
}

/// Everything the human may see, and nothing more.
#[derive(Debug, Clone, Serialize)]
pub struct ViewPayload {
    pub id: String,
    pub deal: u32,
    pub seat: u8,
    pub team: &'static str,
    pub status: Status,
    pub turn: u8,
    pub current_seat: u8,
    pub your_turn: bool,
    pub hand: Vec<String>,
    pub table: Vec<String>,
    pub hand_sizes: [u8; 4],
    /// Captured cards per team: `[hand team, deck team]`.
    pub piles: [Vec<String>; 2],
    pub scope: [u32; 2],
    pub last_capturer: Option<u8>,
    pub history: Vec<HistoryItem>,
    pub legal_moves: Vec<MovePayload>,
    /// Capture sets per card in hand; an empty list means the card is placed.
    pub capture_options: BTreeMap<String, Vec<Vec<String>>>,
    pub players: Vec<PlayerLabel>,
    pub game: GamePayload,
    pub last_deal: Option<DealScore>,
    /// Events so far; resume the stream from here.
    pub events: u64,
    /// Only in explicit mode; blind games never reveal it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
}

pub fn view_payload(m: &LiveMatch) -> ViewPayload {
    let v = m.state.view(m.human);
    let mine = v.is_my_turn() && m.status == Status::AwaitingHuman;
    let legal_moves = if mine { v.legal_moves().into_iter().map(MovePayload::from).collect() } else { Vec::new() };
    let capture_options =
        v.hand.iter().map(|c: Card| (c.to_string(), capture_combinations(c, v.table).into_iter().map(cards).collect())).collect();
    let players = (0..4u8)
        .map(|s| {
            let label = if s as usize == v.seat.index() {
                "You".to_string()
            } else if s as usize % 2 == v.seat.index() % 2 {
                "Partner".to_string()
            } else {
                format!("Player {}", s + 1)
            };
            PlayerLabel { seat: s, label }
        })
        .collect();
    ViewPayload {
        id: m.id.to_string(),
        deal: m.deal_index,
        seat: v.seat.index() as u8,
        team: if v.seat.team().index() == 0 { "hand" } else { "deck" },
        status: m.status,
        turn: v.turn,
        current_seat: v.current.index() as u8,
        your_turn: mine,
        hand: cards(v.hand),
        table: cards(v.table),
        hand_sizes: v.hand_sizes,
        piles: [cards(v.piles[0]), cards(v.piles[1])],
        scope: [v.scope[0].len() as u32, v.scope[1].len() as u32],
        last_capturer: v.last_capturer.map(|s| s.index() as u8),
        history: v
            .history
            .iter()
            .map(|h| HistoryItem {
                seat: h.seat.index() as u8,
                played: h.mv.played.to_string(),
                captured: cards(h.mv.captured),
                scopa: h.scopa,
            })
            .collect(),
        legal_moves,
        capture_options,
        players,
        game: GamePayload { you: m.game[0], them: m.game[1], target: m.target },
        last_deal: m.last_deal.clone(),
        events: m.events.len() as u64,
        strategy: (m.mode == Mode::Explicit).then(|| m.strategy.to_string()),
    }
}

async fn create(State(svc): State<Service>, body: Option<Json<CreateRequest>>) -> Result<impl IntoResponse, ServiceError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let created = svc.create(&req)?;
    let view = svc.with_match(created.id, &created.token, view_payload)?;
    let body = json!({
        "id": created.id.to_string(),
        "token": created.token,
        "seat": created.human_seat.index(),
        "view": view,
    });
    Ok((StatusCode::CREATED, [("x-api-version", API_VERSION)], Json(body)))
}

async fn view(
    State(svc): State<Service>,
    Path(id): Path<Uuid>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
) -> Result<Json<ViewPayload>, ServiceError> {
    let tok = token(&headers, q.token.as_deref())?;
    Ok(Json(svc.with_match(id, &tok, view_payload)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub played: String,
    #[serde(default)]
    pub captured: Vec<String>,
}

impl MoveRequest {
    pub fn to_move(&self) -> Result<Move, ServiceError> {
        let bad = |e: scopone::ParseError| ServiceError::BadRequest(e.to_string());
        let played: Card = self.played.parse().map_err(bad)?;
        let mut captured = CardSet::EMPTY;
        for c in &self.captured {
            let c: Card = c.parse().map_err(bad)?;
            if captured.contains(c) {
                return Err(ServiceError::BadRequest(format!("{c} listed twice")));
            }
            captured.insert(c);
        }
        Ok(Move { played, captured })
    }
}

async fn submit(
    State(svc): State<Service>,
    Path(id): Path<Uuid>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
    Json(req): Json<MoveRequest>,
) -> Result<Json<serde_json::Value>, ServiceError> {
    let tok = token(&headers, q.token.as_deref())?;
    let mv = req.to_move()?;
    let scopa = svc.submit(id, &tok, mv)?;
    let view = svc.with_match(id, &tok, view_payload)?;
    Ok(Json(json!({ "accepted": true, "move": mv.to_string(), "scopa": scopa, "view": view })))
}

fn sse_event(e: &Event) -> SseEvent {
    SseEvent::default().id(e.seq.to_string()).event(e.kind.name()).data(serde_json::to_string(e).expect("events serialize"))
}

struct Cursor {
    svc: Service,
    id: Uuid,
    token: String,
    next: u64,
    buf: VecDeque<Event>,
    rx: tokio::sync::watch::Receiver<u64>,
}

/// Server-sent events: every event from `since` (or `Last-Event-ID` + 1),
/// then live ones until the game is over.
async fn events(
    State(svc): State<Service>,
    Path(id): Path<Uuid>,
    Query(q): Query<TokenQuery>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, ServiceError> {
    let tok = token(&headers, q.token.as_deref())?;
    let resume = headers.get("last-event-id").and_then(|v| v.to_str().ok()).and_then(|v| v.parse::<u64>().ok()).map(|n| n + 1);
    let since = resume.or(q.since).unwrap_or(0);
    let (first, rx, _) = svc.subscribe(id, &tok, since)?;
    let cursor = Cursor { svc, id, token: tok, next: since, buf: first.into(), rx };
    let stream = stream::unfold(cursor, |mut c| async move {
        loop {
            if let Some(e) = c.buf.pop_front() {
                c.next = e.seq + 1;
                return Some((Ok(sse_event(&e)), c));
            }
            let (more, _, finished) = c.svc.subscribe(c.id, &c.token, c.next).ok()?;
            if !more.is_empty() {
                c.buf.extend(more);
                continue;
            }
            if finished {
                return None;
            }
            c.rx.changed().await.ok()?;
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    view: Option<String>,
    token: Option<String>,
}

/// Finished games as CSV: one row per game, or `?view=summary` for
/// human wins, losses and ties per strategy.
async fn study_export(State(svc): State<Service>, Query(q): Query<ExportQuery>, headers: HeaderMap) -> Result<Response, ServiceError> {
    if let Some(admin) = &svc.config().admin_token {
        if token(&headers, q.token.as_deref())? != *admin {
            return Err(ServiceError::Unauthorized);
        }
    }
    let records = export::records(svc.store())?;
    let body = match q.view.as_deref() {
        None | Some("records") => export::records_csv(&records),
        Some("summary") => export::summary_csv(&export::summary(&records)),
        Some(other) => return Err(ServiceError::BadRequest(format!("unknown view {other:?}"))),
    };
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], body).into_response())
}
