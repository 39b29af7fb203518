mod common;

use common::criteria::{self, JEOPARDY_ANSWER, JEOPARDY_REASON};
use common::george_engine;

#[test]
fn jeopardy_exchange_is_verbatim() {
    if let Err(e) = criteria::check_persona() {
        panic!("{e}");
    }
}

#[test]
fn why_without_a_prior_backstory_answer_is_not_persona() {
    let engine = george_engine(1);
    let s = engine.open_session("amy").unwrap();
    engine.handle_text(&s.session_id, "hello").unwrap();
    let reply = engine.handle_text(&s.session_id, "why").unwrap();
    assert_ne!(reply.response, JEOPARDY_REASON);
    assert!(!reply.backstory);
}

#[test]
fn paraphrased_question_still_matches() {
    let engine = george_engine(1);
    let s = engine.open_session("amy").unwrap();
    let reply = engine.handle_text(&s.session_id, "are you a fan of jeopardy").unwrap();
    assert_eq!(reply.response, JEOPARDY_ANSWER);
}

#[test]
fn backstory_turns_are_logged_for_analytics() {
    let engine = george_engine(1);
    let s = engine.open_session("amy").unwrap();
    engine.handle_text(&s.session_id, "do you like jeopardy").unwrap();
    engine.handle_text(&s.session_id, "what's your favorite color").unwrap();
    engine.handle_text(&s.session_id, "let's talk about music").unwrap();
    let record = engine.close_session(&s.session_id, Some(4)).unwrap();
    let hits = record.turns.iter().filter(|t| t.backstory).count();
    assert_eq!(hits, 2);
}
