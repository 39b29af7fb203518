mod common;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Barrier};

use common::george_engine;
use gunrock_core::knowledge::{Description, FactRecord, KnowledgeClient};
use gunrock_core::service::{read_log_file, LogEvent, Role, PERSONA};
use gunrock_core::{Engine, EngineConfig, ServiceError};

fn engine() -> Engine {
    Engine::new(EngineConfig { seed: 3, ..Default::default() }).unwrap()
}

#[test]
fn new_user_gets_plain_greeting() {
    let e = engine();
    let a = e.open_session("fresh").unwrap();
    assert!(!a.greeting.is_empty());
    assert!(!a.greeting.to_lowercase().contains("last time"), "{}", a.greeting);
    let b = e.open_session("fresh").unwrap();
    assert_ne!(a.session_id, b.session_id);
    assert_eq!(e.session_count(), 2);
}

#[test]
fn returning_user_is_offered_last_topic() {
    let e = george_engine(1);
    let opened = e.open_session("george").unwrap();
    assert!(opened.greeting.contains("movies"), "{}", opened.greeting);
    let reply = e.handle_text(&opened.session_id, "let's chat").unwrap();
    assert_eq!(reply.response_keys, ["launch.resume_offer"]);
}

#[test]
fn personal_question_is_a_backstory_hit() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("conv.jsonl");
    let e = Engine::new(EngineConfig { log_path: Some(log.clone()), ..Default::default() }).unwrap();
    let id = e.open_session("u").unwrap().session_id;
    let reply = e.handle_text(&id, "what's your favorite color").unwrap();
    assert_eq!(reply.module, PERSONA);
    assert!(reply.backstory);
    drop(e);
    let events = read_log_file(&log).unwrap().events;
    let hit = events.iter().any(|ev| matches!(ev, LogEvent::Turn(t) if t.role == Role::System && t.backstory));
    assert!(hit);
}

#[test]
fn gibberish_falls_back_to_retrieval() {
    let e = engine();
    let id = e.open_session("u").unwrap().session_id;
    let reply = e.handle_text(&id, "asdf qwer").unwrap();
    assert_eq!(reply.module, "retrieval");
    assert!(!reply.response.is_empty());
}

#[test]
fn rating_bounds_and_double_close() {
    let e = engine();
    let a = e.open_session("u").unwrap().session_id;
    assert_eq!(e.close_session(&a, Some(4)).unwrap().rating, Some(4));
    assert!(matches!(e.close_session(&a, None), Err(ServiceError::Closed(_))));
    assert!(matches!(e.handle_text(&a, "hello"), Err(ServiceError::Closed(_))));

    let b = e.open_session("u").unwrap().session_id;
    assert!(matches!(e.close_session(&b, Some(6)), Err(ServiceError::InvalidInput(_))));
    assert!(matches!(e.close_session(&b, Some(0)), Err(ServiceError::InvalidInput(_))));
    assert_eq!(e.close_session(&b, None).unwrap().rating, None);
}

#[test]
fn three_turn_session_logs_eight_lines() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("conv.jsonl");
    let e = Engine::new(EngineConfig { log_path: Some(log.clone()), ..Default::default() }).unwrap();
    let id = e.open_session("u").unwrap().session_id;
    for text in ["let's talk about animals", "yes i have a dog", "his name is oliver"] {
        e.handle_text(&id, text).unwrap();
    }
    let record = e.close_session(&id, Some(5)).unwrap();
    assert_eq!(record.turns.len(), 6);
    let read = read_log_file(&log).unwrap();
    assert_eq!(read.skipped, 0);
    assert_eq!(read.events.len(), 8);
    assert!(matches!(read.events[0], LogEvent::SessionStart { .. }));
    assert!(matches!(read.events[7], LogEvent::SessionEnd { rating: Some(5), .. }));
    let indices: Vec<u32> = read
        .events
        .iter()
        .filter_map(|ev| match ev {
            LogEvent::Turn(t) => Some(t.turn_index),
            _ => None,
        })
        .collect();
    assert_eq!(indices, [0, 1, 2, 3, 4, 5]);
}

#[test]
fn bad_requests() {
    let e = engine();
    assert!(matches!(e.handle_text("nope", "hi"), Err(ServiceError::NotFound(_))));
    assert!(matches!(e.close_session("nope", None), Err(ServiceError::NotFound(_))));
    let id = e.open_session("u").unwrap().session_id;
    assert!(matches!(e.handle_turn(&id, &[]), Err(ServiceError::InvalidInput(_))));
    assert!(matches!(e.handle_text(&id, "   "), Err(ServiceError::InvalidInput(_))));
}

/// Holds the first describe call until the test lets it go.
struct Gate {
    entered: Arc<Barrier>,
    release: Arc<Barrier>,
    armed: AtomicBool,
}

impl KnowledgeClient for Gate {
    fn describe(&self, _np: &str) -> Option<Description> {
        if self.armed.swap(false, Ordering::SeqCst) {
            self.entered.wait();
            self.release.wait();
        }
        None
    }
    fn facts(&self, _subject: &str, _hint: Option<&str>) -> Vec<FactRecord> {
        Vec::new()
    }
}

#[test]
fn overlapping_turn_is_rejected_as_busy() {
    let entered = Arc::new(Barrier::new(2));
    let release = Arc::new(Barrier::new(2));
    let mut e = engine();
    e.set_knowledge_client(Box::new(Gate {
        entered: Arc::clone(&entered),
        release: Arc::clone(&release),
        armed: AtomicBool::new(true),
    }));
    let e = Arc::new(e);
    let id = e.open_session("u").unwrap().session_id;
    let other = e.open_session("v").unwrap().session_id;

    let worker = {
        let (e, id) = (Arc::clone(&e), id.clone());
        std::thread::spawn(move || e.handle_text(&id, "tell me about the old lighthouse keeper"))
    };
    entered.wait();
    assert!(matches!(e.handle_text(&id, "hello again"), Err(ServiceError::Busy(_))));
    // other sessions are unaffected
    assert!(e.handle_text(&other, "what's your favorite color").is_ok());
    release.wait();
    worker.join().unwrap().unwrap();
    assert!(e.handle_text(&id, "ok").is_ok());
}
