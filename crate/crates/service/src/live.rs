//! Live matches: creation, human moves, the AI driver and recovery.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scopone::matchlog::{DealSpec, MatchLog, MoveRecord};
use scopone::strategy::{mix, Strategy};
use scopone::{deal, MatchScore, MatchState, Move, Seat, Team};
use serde::{Deserialize, Serialize};
use tokio::sync::watch;
use uuid::Uuid;

use crate::store::Store;
use crate::ServiceError;

/// Strategies drawn from in blind mode.
pub const BLIND_ROSTER: [&str; 5] = ["greedy", "cs", "mcts:iters=1000", "ismcts:iters=1000,det=cgs", "ismcts:iters=4000,det=cgs"];

pub fn blind_roster() -> Vec<Strategy> {
    BLIND_ROSTER.iter().map(|s| s.parse().expect("roster entries parse")).collect()
}

/// Game lengths a client may ask for.
pub const TARGETS: [u32; 4] = [11, 16, 21, 31];

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    /// Each AI move is published no earlier than a delay drawn uniformly
    /// from this window after the turn starts.
    pub delay: (Duration, Duration),
    /// Required for the study export when set.
    pub admin_token: Option<String>,
    pub roster: Vec<Strategy>,
    /// Seeds ids, seats and deals; entropy when absent.
    pub seed: Option<u64>,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> ServiceConfig {
        ServiceConfig {
            data_dir: data_dir.into(),
            delay: (Duration::from_secs(1), Duration::from_secs(4)),
            admin_token: None,
            roster: blind_roster(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AwaitingHuman,
    AiThinking,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    BlindRandom,
    Explicit,
}

impl Mode {
    fn id(self) -> &'static str {
        match self {
            Mode::BlindRandom => "blind_random",
            Mode::Explicit => "explicit",
        }
    }
}

/// Score of one finished deal, per category, from the human's side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DealScore {
    pub you: scopone::engine::TeamScore,
    pub them: scopone::engine::TeamScore,
}

impl DealScore {
    fn new(score: &MatchScore, human_team: Team) -> DealScore {
        DealScore { you: score.teams[human_team.index()], them: score.teams[1 - human_team.index()] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventKind {
    DealStart { deal: u32, seat: u8, table: Vec<String> },
    Move { deal: u32, turn: u8, seat: u8, played: String, captured: Vec<String>, scopa: bool },
    DealOver { deal: u32, score: DealScore, game: [u32; 2] },
    GameOver { game: [u32; 2], outcome: Outcome },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::DealStart { .. } => "deal_start",
            EventKind::Move { .. } => "move",
            EventKind::DealOver { .. } => "deal_over",
            EventKind::GameOver { .. } => "game_over",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub seq: u64,
    /// Publication time, unix milliseconds.
    pub at_ms: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Win,
    Loss,
    Tie,
}

impl Outcome {
    pub fn of(game: [u32; 2]) -> Outcome {
        match game[0].cmp(&game[1]) {
            std::cmp::Ordering::Greater => Outcome::Win,
            std::cmp::Ordering::Less => Outcome::Loss,
            std::cmp::Ordering::Equal => Outcome::Tie,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Outcome::Win => "win",
            Outcome::Loss => "loss",
            Outcome::Tie => "tie",
        }
    }
}

pub struct LiveMatch {
    pub id: Uuid,
    token: String,
    pub mode: Mode,
    pub strategy: Strategy,
    pub target: Option<u32>,
    pub deal_index: u32,
    pub deal_seed: u64,
    /// Human seat in the current deal; it moves as the deal rotates.
    pub human: Seat,
    pub first_human_seat: Seat,
    pub state: MatchState,
    pub status: Status,
    /// Accumulated points: (human team, AI team).
    pub game: [u32; 2],
    pub last_deal: Option<DealScore>,
    pub events: Vec<Event>,
    pub created_ms: u64,
    pub finished_ms: Option<u64>,
    notify: watch::Sender<u64>,
    /// An AI driver task owns this match.
    ai_running: bool,
}

impl LiveMatch {
    pub fn authorized(&self, token: &str) -> bool {
        // fixed-time comparison is overkill for per-match random tokens
        self.token == token
    }

    fn push(&mut self, kind: EventKind) {
        let seq = self.events.len() as u64;
        self.events.push(Event { seq, at_ms: now_ms(), kind });
        self.notify.send_replace(self.events.len() as u64);
    }

    fn deal_log(&self) -> MatchLog {
        MatchLog::new(DealSpec::Seed { seed: self.deal_seed, dealer: 3 })
            .with_meta("id", self.id)
            .with_meta("token", &self.token)
            .with_meta("mode", self.mode.id())
            .with_meta("strategy", self.strategy)
            .with_meta("human_seat", self.human.index())
            .with_meta("first_human_seat", self.first_human_seat.index())
            .with_meta("deal_index", self.deal_index)
            .with_meta("target", self.target.map_or("none".to_string(), |t| t.to_string()))
            .with_meta("game", format!("{}:{}", self.game[0], self.game[1]))
            .with_meta("created_ms", self.created_ms)
    }

    fn deal_start_event(&mut self) {
        let table = self.state.deal.table.iter().map(|c| c.to_string()).collect();
        self.push(EventKind::DealStart { deal: self.deal_index, seat: self.human.index() as u8, table });
    }

    fn game_over(&self) -> bool {
        match self.target {
            None => true,
            Some(t) => self.game.iter().any(|p| *p >= t) && self.game[0] != self.game[1],
        }
    }

    fn next_status(&self) -> Status {
        if self.state.is_over() {
            Status::Finished
        } else if self.state.current() == self.human {
            Status::AwaitingHuman
        } else {
            Status::AiThinking
        }
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// What a client asks for when opening a match.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(default)]
    pub mode: Option<Mode>,
    /// Required in explicit mode.
    #[serde(default)]
    pub strategy: Option<String>,
    /// Fixes the seat and deals for reproducible sessions.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub target: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Created {
    pub id: Uuid,
    pub token: String,
    pub human_seat: Seat,
}

/// Shared service state. Cheap to clone.
#[derive(Clone)]
pub struct Service {
    inner: Arc<Inner>,
}

struct Inner {
    cfg: ServiceConfig,
    store: Store,
    matches: RwLock<HashMap<Uuid, Arc<Mutex<LiveMatch>>>>,
    rng: Mutex<ChaCha8Rng>,
}

/// Blind-mode draw: uniform over the roster.
pub fn pick_blind<R: Rng + ?Sized>(roster: &[Strategy], rng: &mut R) -> Strategy {
    roster[rng.random_range(0..roster.len())]
}

impl Service {
    /// Opens the data directory and reloads every game in it. Unfinished
    /// games resume where their logs stop; call [`Service::resume`] from
    /// inside a runtime to restart pending AI turns.
    pub fn open(cfg: ServiceConfig) -> Result<Service, ServiceError> {
        if cfg.roster.is_empty() {
            return Err(ServiceError::BadRequest("empty roster".into()));
        }
        if cfg.delay.0 > cfg.delay.1 {
            return Err(ServiceError::BadRequest("delay window is reversed".into()));
        }
        let store = Store::open(&cfg.data_dir)?;
        let rng = match cfg.seed {
            Some(s) => ChaCha8Rng::seed_from_u64(s),
            None => ChaCha8Rng::from_os_rng(),
        };
        let svc = Service { inner: Arc::new(Inner { cfg, store, matches: RwLock::new(HashMap::new()), rng: Mutex::new(rng) }) };
        svc.recover()?;
        Ok(svc)
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.inner.cfg
    }

    pub fn store(&self) -> &Store {
        &self.inner.store
    }

    fn rng<T>(&self, f: impl FnOnce(&mut ChaCha8Rng) -> T) -> T {
        f(&mut self.inner.rng.lock().expect("rng lock"))
    }

    fn get(&self, id: Uuid) -> Result<Arc<Mutex<LiveMatch>>, ServiceError> {
        self.inner.matches.read().expect("match table").get(&id).cloned().ok_or(ServiceError::NotFound)
    }

    /// Runs `f` on an authorized match.
    pub fn with_match<T>(&self, id: Uuid, token: &str, f: impl FnOnce(&LiveMatch) -> T) -> Result<T, ServiceError> {
        let m = self.get(id)?;
        let m = m.lock().expect("match lock");
        if !m.authorized(token) {
            return Err(ServiceError::Unauthorized);
        }
        Ok(f(&m))
    }

    pub fn match_ids(&self) -> Vec<Uuid> {
        self.inner.matches.read().expect("match table").keys().copied().collect()
    }

    pub fn create(&self, req: &CreateRequest) -> Result<Created, ServiceError> {
        let mode = req.mode.unwrap_or(Mode::BlindRandom);
        if let Some(t) = req.target {
            if !TARGETS.contains(&t) {
                return Err(ServiceError::BadRequest(format!("target must be one of {TARGETS:?}")));
            }
        }
        let mut local = req.seed.map(ChaCha8Rng::seed_from_u64);
        let draw = |svc: &Service, local: &mut Option<ChaCha8Rng>| -> u64 {
            match local {
                Some(r) => r.random(),
                None => svc.rng(|r| r.random()),
            }
        };
        let strategy = match (mode, &req.strategy) {
            (Mode::BlindRandom, None) => {
                let k = draw(self, &mut local);
                let roster = &self.inner.cfg.roster;
                pick_blind(roster, &mut ChaCha8Rng::seed_from_u64(k))
            }
            (Mode::BlindRandom, Some(_)) => return Err(ServiceError::BadRequest("blind mode takes no strategy".into())),
            (Mode::Explicit, Some(s)) => s.parse::<Strategy>().map_err(|e| ServiceError::BadRequest(e.to_string()))?,
            (Mode::Explicit, None) => return Err(ServiceError::BadRequest("explicit mode needs a strategy".into())),
        };
        // the eldest hand always leads, so a random seat is a random starter
        let human = Seat::new((draw(self, &mut local) % 4) as u8).expect("seat in range");
        let deal_seed = draw(self, &mut local);
        let id = uuid::Builder::from_random_bytes(self.rng(|r| r.random())).into_uuid();
        let token = format!("{:032x}", self.rng(|r| r.random::<u128>()));
        let (notify, _) = watch::channel(0);
        let mut m = LiveMatch {
            id,
            token: token.clone(),
            mode,
            strategy,
            target: req.target,
            deal_index: 0,
            deal_seed,
            human,
            first_human_seat: human,
            state: MatchState::new(deal(deal_seed, 3)),
            status: Status::AwaitingHuman,
            game: [0, 0],
            last_deal: None,
            events: Vec::new(),
            created_ms: now_ms(),
            finished_ms: None,
            notify,
            ai_running: false,
        };
        m.status = m.next_status();
        self.inner.store.record_create(id, m.created_ms)?;
        self.inner.store.start_deal(id, 0, &m.deal_log())?;
        m.deal_start_event();
        let thinking = m.status == Status::AiThinking;
        let m = Arc::new(Mutex::new(m));
        self.inner.matches.write().expect("match table").insert(id, m.clone());
        if thinking {
            self.spawn_ai(m);
        }
        Ok(Created { id, token, human_seat: human })
    }

    /// Applies the human's move and hands the turn to the AI.
    pub fn submit(&self, id: Uuid, token: &str, mv: Move) -> Result<bool, ServiceError> {
        let arc = self.get(id)?;
        let mut m = arc.lock().expect("match lock");
        if !m.authorized(token) {
            return Err(ServiceError::Unauthorized);
        }
        match m.status {
            Status::Finished => return Err(ServiceError::Finished),
            Status::AiThinking => return Err(ServiceError::NotYourTurn),
            Status::AwaitingHuman => {}
        }
        let legal = m.state.legal_moves().map_err(|_| ServiceError::Finished)?;
        if !legal.contains(&mv) {
            return Err(ServiceError::IllegalMove { legal: legal.iter().map(|m| m.to_string()).collect() });
        }
        let scopa = self.apply(&mut m, mv)?;
        let thinking = m.status == Status::AiThinking;
        drop(m);
        if thinking {
            self.spawn_ai(arc);
        }
        Ok(scopa)
    }

    /// Applies a legal move, persists it and settles the deal when over.
    fn apply(&self, m: &mut LiveMatch, mv: Move) -> Result<bool, ServiceError> {
        let seat = m.state.current();
        let scopa = m.state.apply(mv).map_err(|e| ServiceError::Internal(e.to_string()))?;
        let rec = MoveRecord { seat, mv, scopa };
        self.inner.store.append_move(m.id, m.deal_index, &rec)?;
        m.push(EventKind::Move {
            deal: m.deal_index,
            turn: m.state.turn() - 1,
            seat: seat.index() as u8,
            played: mv.played.to_string(),
            captured: mv.captured.iter().map(|c| c.to_string()).collect(),
            scopa,
        });
        if m.state.is_over() {
            let score = m.state.score().map_err(|e| ServiceError::Internal(e.to_string()))?;
            self.inner.store.append_score(m.id, m.deal_index, score.points())?;
            self.settle(m, &score)?;
        } else {
            m.status = m.next_status();
        }
        Ok(scopa)
    }

    /// Books a finished deal and either deals again or closes the game.
    fn settle(&self, m: &mut LiveMatch, score: &MatchScore) -> Result<(), ServiceError> {
        let ht = m.human.team();
        let points = score.points();
        m.game[0] += points[ht.index()];
        m.game[1] += points[1 - ht.index()];
        let ds = DealScore::new(score, ht);
        m.last_deal = Some(ds.clone());
        m.push(EventKind::DealOver { deal: m.deal_index, score: ds, game: m.game });
        if m.game_over() {
            m.status = Status::Finished;
            let at = now_ms();
            m.finished_ms = Some(at);
            self.inner.store.record_finish(m.id, at)?;
            m.push(EventKind::GameOver { game: m.game, outcome: Outcome::of(m.game) });
            return Ok(());
        }
        // the deal passes on: the old eldest hand deals next
        m.deal_index += 1;
        m.human = Seat::new(((m.human.index() + 3) % 4) as u8).expect("seat in range");
        m.deal_seed = mix(m.deal_seed, m.deal_index as u64);
        m.state = MatchState::new(deal(m.deal_seed, 3));
        self.inner.store.start_deal(m.id, m.deal_index, &m.deal_log())?;
        m.deal_start_event();
        m.status = m.next_status();
        Ok(())
    }

    fn draw_delay(&self) -> Duration {
        let (lo, hi) = self.inner.cfg.delay;
        if hi <= lo {
            return lo;
        }
        self.rng(|r| r.random_range(lo..=hi))
    }

    /// AI turns run on their own task: compute off the async threads, then
    /// wait out the padded delay before publishing.
    fn spawn_ai(&self, m: Arc<Mutex<LiveMatch>>) {
        {
            let mut g = m.lock().expect("match lock");
            if g.ai_running {
                return;
            }
            g.ai_running = true;
        }
        let svc = self.clone();
        tokio::spawn(async move {
            let stop = |m: &Arc<Mutex<LiveMatch>>| m.lock().expect("match lock").ai_running = false;
            loop {
                let started = Instant::now();
                let job = {
                    let mut g = m.lock().expect("match lock");
                    if g.status != Status::AiThinking {
                        g.ai_running = false;
                        return;
                    }
                    (g.state.clone(), g.strategy, mix(g.deal_seed, g.state.turn() as u64), g.id, g.deal_index, g.state.turn())
                };
                let (state, strategy, salt, id, deal_index, turn) = job;
                let target = svc.draw_delay();
                let mv = match tokio::task::spawn_blocking(move || strategy.choose(&state, salt)).await {
                    Ok(mv) => mv,
                    Err(e) => {
                        log::error!("match {id}: AI task failed: {e}");
                        stop(&m);
                        return;
                    }
                };
                if let Some(rest) = target.checked_sub(started.elapsed()) {
                    tokio::time::sleep(rest).await;
                }
                let mut g = m.lock().expect("match lock");
                if g.status != Status::AiThinking || g.deal_index != deal_index || g.state.turn() != turn {
                    g.ai_running = false;
                    return;
                }
                if let Err(e) = svc.apply(&mut g, mv) {
                    log::error!("match {id}: cannot apply AI move {mv}: {e}");
                    g.ai_running = false;
                    return;
                }
            }
        });
    }

    /// Restarts the AI on every game left waiting for it.
    pub fn resume(&self) {
        let pending: Vec<_> = self
            .inner
            .matches
            .read()
            .expect("match table")
            .values()
            .filter(|m| m.lock().expect("match lock").status == Status::AiThinking)
            .cloned()
            .collect();
        for m in pending {
            self.spawn_ai(m);
        }
    }

    /// Events from `since` on, plus a receiver that ticks on new ones.
    pub fn subscribe(&self, id: Uuid, token: &str, since: u64) -> Result<(Vec<Event>, watch::Receiver<u64>, bool), ServiceError> {
        let m = self.get(id)?;
        let m = m.lock().expect("match lock");
        if !m.authorized(token) {
            return Err(ServiceError::Unauthorized);
        }
        let from = (since as usize).min(m.events.len());
        Ok((m.events[from..].to_vec(), m.notify.subscribe(), m.status == Status::Finished))
    }

    fn recover(&self) -> Result<(), ServiceError> {
        let store = &self.inner.store;
        for (id, entry) in store.index()? {
            if entry.deals == 0 {
                log::warn!("game {id} has no deal log; skipped");
                continue;
            }
            let last = entry.deals - 1;
            if entry.finished_ms.is_none() {
                store.repair(id, last)?;
            }
            let m = self.restore(id, &entry)?;
            self.inner.matches.write().expect("match table").insert(id, Arc::new(Mutex::new(m)));
        }
        Ok(())
    }

    fn restore(&self, id: Uuid, entry: &crate::store::IndexEntry) -> Result<LiveMatch, ServiceError> {
        let store = &self.inner.store;
        let corrupt = |what: &str| ServiceError::Corrupt(format!("game {id}: {what}"));
        let first = store.read_log(id, 0)?;
        let meta = |log: &MatchLog, k: &str| log.meta(k).map(str::to_string).ok_or_else(|| corrupt(&format!("missing {k}")));
        let seat = |s: String| s.parse::<u8>().ok().and_then(|s| Seat::new(s).ok()).ok_or_else(|| corrupt("bad seat"));
        let (notify, _) = watch::channel(0);
        let mut m = LiveMatch {
            id,
            token: meta(&first, "token")?,
            mode: if meta(&first, "mode")? == "explicit" { Mode::Explicit } else { Mode::BlindRandom },
            strategy: meta(&first, "strategy")?.parse().map_err(|_| corrupt("bad strategy"))?,
            target: meta(&first, "target")?.parse().ok(),
            deal_index: 0,
            deal_seed: 0,
            human: seat(meta(&first, "human_seat")?)?,
            first_human_seat: seat(meta(&first, "first_human_seat")?)?,
            state: MatchState::new(first.deal.resolve()),
            status: Status::AwaitingHuman,
            game: [0, 0],
            last_deal: None,
            events: Vec::new(),
            created_ms: entry.created_ms,
            finished_ms: entry.finished_ms,
            notify,
            ai_running: false,
        };
        for k in 0..entry.deals {
            let log = if k == 0 { first.clone() } else { store.read_log(id, k)? };
            let DealSpec::Seed { seed, .. } = log.deal else { return Err(corrupt("service logs use seeded deals")) };
            m.deal_index = k;
            m.deal_seed = seed;
            m.human = seat(meta(&log, "human_seat")?)?;
            m.state = MatchState::new(log.deal.resolve());
            m.deal_start_event();
            for r in &log.moves {
                if r.seat != m.state.current() {
                    return Err(corrupt("move out of turn"));
                }
                let seat = r.seat;
                let scopa = m.state.apply(r.mv).map_err(|e| corrupt(&e.to_string()))?;
                m.push(EventKind::Move {
                    deal: k,
                    turn: m.state.turn() - 1,
                    seat: seat.index() as u8,
                    played: r.mv.played.to_string(),
                    captured: r.mv.captured.iter().map(|c| c.to_string()).collect(),
                    scopa,
                });
            }
            if !m.state.is_over() {
                m.status = m.next_status();
                continue;
            }
            let score = m.state.score().map_err(|e| corrupt(&e.to_string()))?;
            let last = k + 1 == entry.deals;
            if log.score.is_none() {
                store.append_score(id, k, score.points())?;
            }
            if last && entry.finished_ms.is_none() {
                // crashed between the last move and the next deal
                self.settle(&mut m, &score)?;
            } else {
                let ht = m.human.team();
                let p = score.points();
                m.game[0] += p[ht.index()];
                m.game[1] += p[1 - ht.index()];
                let ds = DealScore::new(&score, ht);
                m.last_deal = Some(ds.clone());
                m.push(EventKind::DealOver { deal: k, score: ds, game: m.game });
                if last {
                    m.status = Status::Finished;
                    m.push(EventKind::GameOver { game: m.game, outcome: Outcome::of(m.game) });
                }
            }
        }
        Ok(m)
    }
}
