//! Append-only persistence: one engine-format log per deal plus an index.
//!
//! ```text
//! <data>/index.log              create <id> <unix-ms> | deal <id> <k> | finish <id> <unix-ms>
//! <data>/matches/<id>-<k>.log   header, one line per move, score line when over
//! ```
//!
//! A crash can only lose the tail of a line; readers ignore an unterminated
//! last line.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use scopone::matchlog::{move_line, score_line, MatchLog, MoveRecord};
use uuid::Uuid;

use crate::ServiceError;

/// What the index knows about one game.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexEntry {
    pub created_ms: u64,
    pub deals: u32,
    pub finished_ms: Option<u64>,
}

pub struct Store {
    root: PathBuf,
    index: Mutex<File>,
}

fn complete_lines(text: &str) -> &str {
    match text.rfind('\n') {
        Some(i) => &text[..=i],
        None => "",
    }
}

/// Cuts an unterminated last line so later appends start clean.
fn truncate_torn(path: &Path) -> Result<(), ServiceError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(e.into()),
    };
    let keep = complete_lines(&text).len();
    if keep != text.len() {
        log::warn!("{}: dropping torn last line", path.display());
        OpenOptions::new().write(true).open(path)?.set_len(keep as u64)?;
    }
    Ok(())
}

impl Store {
    pub fn open(root: &Path) -> Result<Store, ServiceError> {
        fs::create_dir_all(root.join("matches"))?;
        let path = root.join("index.log");
        truncate_torn(&path)?;
        let index = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Store { root: root.to_path_buf(), index: Mutex::new(index) })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn log_path(&self, id: Uuid, deal: u32) -> PathBuf {
        self.root.join("matches").join(format!("{id}-{deal}.log"))
    }

    fn index_line(&self, line: String) -> Result<(), ServiceError> {
        let mut f = self.index.lock().expect("index lock");
        f.write_all(line.as_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn record_create(&self, id: Uuid, at_ms: u64) -> Result<(), ServiceError> {
        self.index_line(format!("create {id} {at_ms}\n"))
    }

    /// Starts the log of deal `k` with its header.
    pub fn start_deal(&self, id: Uuid, k: u32, log: &MatchLog) -> Result<(), ServiceError> {
        let path = self.log_path(id, k);
        // a torn file from an interrupted start is replaced
        fs::write(&path, log.header())?;
        self.index_line(format!("deal {id} {k}\n"))
    }

    fn append(&self, id: Uuid, k: u32, text: &str) -> Result<(), ServiceError> {
        let path = self.log_path(id, k);
        let mut f = OpenOptions::new().append(true).open(&path)?;
        f.write_all(text.as_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn append_move(&self, id: Uuid, k: u32, rec: &MoveRecord) -> Result<(), ServiceError> {
        self.append(id, k, &move_line(rec))
    }

    pub fn append_score(&self, id: Uuid, k: u32, points: [u32; 2]) -> Result<(), ServiceError> {
        self.append(id, k, &score_line(points))
    }

    pub fn record_finish(&self, id: Uuid, at_ms: u64) -> Result<(), ServiceError> {
        self.index_line(format!("finish {id} {at_ms}\n"))
    }

    /// Every game named in the index.
    pub fn index(&self) -> Result<BTreeMap<Uuid, IndexEntry>, ServiceError> {
        let path = self.root.join("index.log");
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };
        let mut out: BTreeMap<Uuid, IndexEntry> = BTreeMap::new();
        for (n, line) in complete_lines(&text).lines().enumerate() {
            let bad = || ServiceError::Corrupt(format!("index line {}: {line:?}", n + 1));
            let f: Vec<&str> = line.split_whitespace().collect();
            let [kind, id, value] = f.as_slice() else { return Err(bad()) };
            let id: Uuid = id.parse().map_err(|_| bad())?;
            let value: u64 = value.parse().map_err(|_| bad())?;
            match *kind {
                "create" => {
                    out.insert(id, IndexEntry { created_ms: value, ..IndexEntry::default() });
                }
                "deal" => out.get_mut(&id).ok_or_else(bad)?.deals = value as u32 + 1,
                "finish" => out.get_mut(&id).ok_or_else(bad)?.finished_ms = Some(value),
                _ => return Err(bad()),
            }
        }
        Ok(out)
    }

    /// Removes a torn tail from a deal log; only safe before writers start.
    pub fn repair(&self, id: Uuid, k: u32) -> Result<(), ServiceError> {
        truncate_torn(&self.log_path(id, k))
    }

    /// The log of deal `k`, ignoring a torn last line.
    pub fn read_log(&self, id: Uuid, k: u32) -> Result<MatchLog, ServiceError> {
        let path = self.log_path(id, k);
        let text = fs::read_to_string(&path)?;
        MatchLog::parse(complete_lines(&text)).map_err(|e| ServiceError::Corrupt(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use scopone::matchlog::DealSpec;
    use scopone::{deal, MatchState};

    #[test]
    fn torn_lines_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let id = Uuid::from_u128(7);
        store.record_create(id, 10).unwrap();
        let log = MatchLog::new(DealSpec::Seed { seed: 4, dealer: 3 }).with_meta("id", id);
        store.start_deal(id, 0, &log).unwrap();
        let mut st = MatchState::new(deal(4, 3));
        let mv = st.legal_moves().unwrap()[0];
        st.apply(mv).unwrap();
        store.append_move(id, 0, &MoveRecord::from(&st.history[0])).unwrap();
        // simulate a crash in the middle of the next write
        let mut f = OpenOptions::new().append(true).open(store.log_path(id, 0)).unwrap();
        f.write_all(b"1 7").unwrap();
        let mut f = OpenOptions::new().append(true).open(dir.path().join("index.log")).unwrap();
        f.write_all(b"finish ").unwrap();
        drop(store);

        let store = Store::open(dir.path()).unwrap();
        let back = store.read_log(id, 0).unwrap();
        store.repair(id, 0).unwrap();
        assert!(std::fs::read_to_string(store.log_path(id, 0)).unwrap().ends_with('\n'));
        assert_eq!(back.moves.len(), 1);
        assert_eq!(back.replay().unwrap().turn(), 1);
        let index = store.index().unwrap();
        assert_eq!(index[&id], IndexEntry { created_ms: 10, deals: 1, finished_ms: None });
        store.record_finish(id, 20).unwrap();
        assert_eq!(store.index().unwrap()[&id].finished_ms, Some(20));
    }
}
