#![allow(dead_code)]

use gunrock_core::phonetic::TimedToken;
use gunrock_core::service::{Engine, EngineConfig, TurnReply};

pub fn sample_chat_tokens() -> Vec<Vec<TimedToken>> {
    let raw: Vec<Vec<(String, u64, u64)>> =
        serde_json::from_str(include_str!("../data/sample_chat_tokens.json")).expect("fixture parses");
    raw.into_iter()
        .map(|turn| turn.into_iter().map(|(w, s, e)| TimedToken::new(w, s, e).expect("valid token")).collect())
        .collect()
}

/// An engine whose returning user "george" last talked about movies.
pub fn george_engine(seed: u64) -> Engine {
    let engine = Engine::new(EngineConfig { seed, ..Default::default() }).expect("bundled data loads");
    engine
        .users()
        .update("george", |p| {
            p.user_name = Some("George".into());
            p.last_topic = Some("movies".into());
        })
        .expect("in-memory store");
    engine
}

pub struct Replay {
    pub greeting: String,
    pub replies: Vec<TurnReply>,
}

pub fn replay_sample_chat(seed: u64) -> Replay {
    let engine = george_engine(seed);
    let opened = engine.open_session("george").expect("session opens");
    let replies = sample_chat_tokens()
        .iter()
        .map(|turn| engine.handle_turn(&opened.session_id, turn).expect("turn handled"))
        .collect();
    Replay { greeting: opened.greeting, replies }
}
pub mod criteria;
