use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::phonetic::TimedToken;

pub const LOG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    #[default]
    User,
    System,
}

/// One line of the conversation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    SessionStart {
        session_id: String,
        user_ref: String,
        ts_ms: u64,
        greeting: String,
    },
    Turn(TurnLine),
    SessionEnd {
        session_id: String,
        ts_ms: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rating: Option<u8>,
    },
}

impl LogEvent {
    pub fn session_id(&self) -> &str {
        match self {
            LogEvent::SessionStart { session_id, .. } | LogEvent::SessionEnd { session_id, .. } => session_id,
            LogEvent::Turn(t) => &t.session_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TurnLine {
    pub session_id: String,
    /// Position of the turn within the session, counting both roles.
    pub turn_index: u32,
    pub role: Role,
    pub text: String,
    pub ts_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<TimedToken>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nlu: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ssml: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub response_keys: Vec<String>,
    #[serde(default)]
    pub backstory: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attr_updates: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Versioned<'a> {
    log_version: u32,
    #[serde(flatten)]
    event: &'a LogEvent,
}

#[derive(Deserialize)]
struct VersionedOwned {
    log_version: u32,
    #[serde(flatten)]
    event: LogEvent,
}

/// Serialized single writer; each event becomes one flushed line.
#[derive(Debug)]
pub struct LogWriter {
    path: PathBuf,
    file: Mutex<File>,
}

impl LogWriter {
    pub fn open(path: &Path) -> std::io::Result<Self> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(LogWriter { path: path.to_path_buf(), file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, event: &LogEvent) -> std::io::Result<()> {
        let mut line = serde_json::to_string(&Versioned { log_version: LOG_VERSION, event })?;
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes())?;
        file.flush()
    }
}

/// Outcome of reading a log: parsed events plus the number of lines skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogRead {
    pub events: Vec<LogEvent>,
    pub skipped: usize,
}

pub fn parse_log_line(line: &str) -> Option<LogEvent> {
    let v: VersionedOwned = serde_json::from_str(line).ok()?;
    (v.log_version == LOG_VERSION).then_some(v.event)
}

/// Read events, skipping (and counting) lines that do not parse, such as a
/// final line cut short by a crash.
pub fn read_events<R: BufRead>(reader: R) -> std::io::Result<LogRead> {
    let mut out = LogRead::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_log_line(&line) {
            Some(e) => out.events.push(e),
            None => {
                log::warn!("log line {} does not parse; skipped", i + 1);
                out.skipped += 1;
            }
        }
    }
    Ok(out)
}

pub fn read_log_file(path: &Path) -> std::io::Result<LogRead> {
    let bytes = std::fs::read(path)?;
    // a torn write can leave invalid UTF-8 at the end
    let text = String::from_utf8_lossy(&bytes);
    read_events(BufReader::new(text.as_bytes()))
}
