//! Engagement analytics over conversation logs.

mod ols;
mod synth;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use ols::{ols_fit, student_t_two_sided_p, OlsError, RegressionResult};
pub use synth::{generate_synthetic_log, write_synthetic_log, Planted, SynthConfig, SynthSummary};

use crate::service::{read_log_file, LogEvent, Role, TurnLine};

pub const DEFAULT_MIN_USER_TURNS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PetStatus {
    Yes,
    No,
    Na,
    NotAsked,
}

impl PetStatus {
    fn parse(v: &str) -> Option<Self> {
        match v.trim().to_ascii_lowercase().as_str() {
            "yes" => Some(PetStatus::Yes),
            "no" => Some(PetStatus::No),
            "na" => Some(PetStatus::Na),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationMetrics {
    pub session_id: String,
    pub user_turns: u32,
    /// Mean words per user utterance.
    pub mean_word_count: f64,
    pub duration_min: f64,
    pub backstory_queries: u32,
    pub has_pet: PetStatus,
    pub rating: Option<u8>,
}

/// Metrics plus bookkeeping about what was left out.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadedLogs {
    pub metrics: Vec<ConversationMetrics>,
    pub sessions_seen: usize,
    pub excluded_short: usize,
    pub skipped_lines: usize,
}

#[derive(Default)]
struct Acc {
    first_ts: Option<u64>,
    last_ts: Option<u64>,
    turns: Vec<TurnLine>,
    rating: Option<u8>,
}

impl Acc {
    fn touch(&mut self, ts: u64) {
        self.first_ts = Some(self.first_ts.map_or(ts, |f| f.min(ts)));
        self.last_ts = Some(self.last_ts.map_or(ts, |l| l.max(ts)));
    }
}

fn user_words(t: &TurnLine) -> usize {
    match &t.tokens {
        Some(tokens) => tokens.len(),
        None => t.text.split_whitespace().count(),
    }
}

/// Per-conversation metrics from parsed events, keeping conversations with
/// at least `min_user_turns` user turns.
pub fn metrics_from_events(events: &[LogEvent], min_user_turns: u32) -> LoadedLogs {
    let mut sessions: BTreeMap<&str, Acc> = BTreeMap::new();
    for e in events {
        let acc = sessions.entry(e.session_id()).or_default();
        match e {
            LogEvent::SessionStart { ts_ms, .. } => acc.touch(*ts_ms),
            LogEvent::Turn(t) => {
                acc.touch(t.ts_ms);
                acc.turns.push(t.clone());
            }
            LogEvent::SessionEnd { ts_ms, rating, .. } => {
                acc.touch(*ts_ms);
                acc.rating = rating.filter(|r| (1..=5).contains(r));
            }
        }
    }
    let mut out = LoadedLogs { sessions_seen: sessions.len(), ..Default::default() };
    for (id, mut acc) in sessions {
        acc.turns.sort_by_key(|t| t.turn_index);
        let user: Vec<&TurnLine> = acc.turns.iter().filter(|t| t.role == Role::User).collect();
        let user_turns = user.len() as u32;
        if user_turns < min_user_turns {
            out.excluded_short += 1;
            continue;
        }
        let words: usize = user.iter().map(|t| user_words(t)).sum();
        let system = acc.turns.iter().filter(|t| t.role == Role::System);
        let backstory_queries = system.clone().filter(|t| t.backstory).count() as u32;
        let has_pet = system
            .filter_map(|t| t.attr_updates.get("has_pet").and_then(|v| PetStatus::parse(v)))
            .next_back()
            .unwrap_or(PetStatus::NotAsked);
        let duration_ms = acc.last_ts.unwrap_or(0).saturating_sub(acc.first_ts.unwrap_or(0));
        out.metrics.push(ConversationMetrics {
            session_id: id.to_string(),
            user_turns,
            mean_word_count: words as f64 / f64::from(user_turns),
            duration_min: duration_ms as f64 / 60_000.0,
            backstory_queries,
            has_pet,
            rating: acc.rating,
        });
    }
    out
}

/// Read a JSONL log and compute metrics. Unparseable lines are skipped and
/// counted.
pub fn load_logs(path: &Path, min_user_turns: u32) -> std::io::Result<LoadedLogs> {
    let read = read_log_file(path)?;
    if read.skipped > 0 {
        log::warn!("{}: skipped {} malformed line(s)", path.display(), read.skipped);
    }
    let mut loaded = metrics_from_events(&read.events, min_user_turns);
    loaded.skipped_lines = read.skipped;
    Ok(loaded)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub mean: f64,
    pub median: f64,
}

fn center(values: &[f64]) -> Option<Center> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    let median = if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 };
    Some(Center { mean: v.iter().sum::<f64>() / v.len() as f64, median })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub conversations: usize,
    pub rated: usize,
    pub unrated: usize,
    pub rating: Option<Center>,
    pub user_turns: Option<Center>,
    pub mean_words: Option<f64>,
    pub duration_min: Option<Center>,
}

pub fn summary_stats(metrics: &[ConversationMetrics]) -> SummaryStats {
    let ratings: Vec<f64> = metrics.iter().filter_map(|m| m.rating).map(f64::from).collect();
    let turns: Vec<f64> = metrics.iter().map(|m| f64::from(m.user_turns)).collect();
    let words: Vec<f64> = metrics.iter().map(|m| m.mean_word_count).collect();
    let durations: Vec<f64> = metrics.iter().map(|m| m.duration_min).collect();
    SummaryStats {
        conversations: metrics.len(),
        rated: ratings.len(),
        unrated: metrics.len() - ratings.len(),
        rating: center(&ratings),
        user_turns: center(&turns),
        mean_words: center(&words).map(|c| c.mean),
        duration_min: center(&durations),
    }
}

/// One of the four standard analyses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub id: String,
    pub model: String,
    pub rows_used: usize,
    pub rows_excluded: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<RegressionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(skip)]
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub summary: SummaryStats,
    pub analyses: Vec<Analysis>,
    pub notes: Vec<String>,
}

fn analysis(id: &str, model: &str, total: usize, points: Vec<(f64, f64)>) -> Analysis {
    let (x, y): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let (result, skipped) = match ols_fit(&x, &y) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Analysis {
        id: id.to_string(),
        model: model.to_string(),
        rows_used: points.len(),
        rows_excluded: total - points.len(),
        result,
        skipped,
        points,
    }
}

/// Fit the four engagement regressions:
/// rating on words, user turns on words, log rating on log backstory count
/// (conversations with at least one backstory question), and rating on pet
/// ownership (yes = 1, no = 0).
pub fn run_engagement_analyses(metrics: &[ConversationMetrics]) -> AnalysisReport {
    let total = metrics.len();
    let rated = || metrics.iter().filter_map(|m| m.rating.map(|r| (m, f64::from(r))));
    let words_rating = rated().map(|(m, r)| (m.mean_word_count, r)).collect();
    let words_turns = metrics.iter().map(|m| (m.mean_word_count, f64::from(m.user_turns))).collect();
    let backstory = rated()
        .filter(|(m, _)| m.backstory_queries >= 1)
        .map(|(m, r)| (f64::from(m.backstory_queries).ln(), r.ln()))
        .collect();
    let pet = rated()
        .filter_map(|(m, r)| match m.has_pet {
            PetStatus::Yes => Some((1.0, r)),
            PetStatus::No => Some((0.0, r)),
            _ => None,
        })
        .collect();
    AnalysisReport {
        summary: summary_stats(metrics),
        analyses: vec![
            analysis("rating_by_words", "rating ~ mean_word_count", total, words_rating),
            analysis("turns_by_words", "user_turns ~ mean_word_count", total, words_turns),
            analysis("rating_by_backstory", "ln(rating) ~ ln(backstory_queries), backstory_queries >= 1", total, backstory),
            analysis("rating_by_pet", "rating ~ has_pet (yes = 1, no = 0)", total, pet),
        ],
        notes: vec![
            "conversations without a rating are excluded from rating models".into(),
            "user turns enter untransformed".into(),
            "pet model uses only conversations answering yes or no".into(),
        ],
    }
}

fn fmt_num(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 1e-3 && v.abs() < 1e6) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let c = |c: &Option<Center>| c.map_or("n/a".to_string(), |c| format!("{} (median {})", fmt_num(c.mean), fmt_num(c.median)));
        let _ = writeln!(out, "conversations: {} ({} rated, {} unrated)", s.conversations, s.rated, s.unrated);
        let _ = writeln!(out, "rating:        {}", c(&s.rating));
        let _ = writeln!(out, "user turns:    {}", c(&s.user_turns));
        let _ = writeln!(out, "words/utt:     {}", s.mean_words.map_or("n/a".into(), fmt_num));
        let _ = writeln!(out, "duration min:  {}", c(&s.duration_min));
        let _ = writeln!(out);
        let header = ["analysis", "n", "beta", "SE", "t", "p", "intercept", "R2"];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
        for a in &self.analyses {
            rows.push(match &a.result {
                Some(r) => vec![
                    a.id.clone(),
                    r.n.to_string(),
                    fmt_num(r.beta),
                    fmt_num(r.se),
                    fmt_num(r.t),
                    fmt_num(r.p),
                    fmt_num(r.intercept),
                    fmt_num(r.r_squared),
                ],
                None => {
                    let mut row = vec![a.id.clone(), a.rows_used.to_string()];
                    row.push(format!("skipped: {}", a.skipped.as_deref().unwrap_or("")));
                    row
                }
            });
        }
        let widths: Vec<usize> =
            (0..header.len()).map(|i| rows.iter().filter_map(|r| r.get(i)).map(String::len).max().unwrap_or(0)).collect();
        for row in rows {
            let cells: Vec<String> = row.iter().enumerate().map(|(i, cell)| format!("{cell:<w$}", w = widths[i])).collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }

    /// `x,y` rows of one analysis.
    pub fn points_csv(&self, id: &str) -> Option<String> {
        let a = self.analyses.iter().find(|a| a.id == id)?;
        let mut out = String::from("x,y\n");
        for (x, y) in &a.points {
            let _ = writeln!(out, "{x},{y}");
        }
        Some(out)
    }

    /// Write `report.json`, `report.txt` and one `points_<id>.csv` per
    /// analysis into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> std::io::Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> std::io::Result<()> {
            let p = dir.join(name);
            std::fs::write(&p, body)?;
            written.push(p);
            Ok(())
        };
        put("report.json".into(), self.to_json())?;
        put("report.txt".into(), self.to_table())?;
        for a in &self.analyses {
            put(format!("points_{}.csv", a.id), self.points_csv(&a.id).unwrap_or_default())?;
        }
        Ok(written)
    }
}
