mod common;

use common::criteria::{self, MOVIES_TRACE, USER3_SEGMENTS, USER5_SEGMENTS};
use common::replay_sample_chat;

#[test]
fn full_replay_matches_the_example_conversation() {
    if let Err(e) = criteria::check_sample_chat() {
        panic!("{e}");
    }
}

#[test]
fn segment_boundaries_sit_at_the_marked_splits() {
    let r = replay_sample_chat(4);
    assert_eq!(r.replies[1].debug["segments"], serde_json::json!(["sure", "that would be great"]));
    assert_eq!(r.replies[2].debug["segments"], serde_json::json!(USER3_SEGMENTS));
    assert_eq!(r.replies[4].debug["segments"], serde_json::json!(USER5_SEGMENTS));
}

#[test]
fn number_word_is_not_corrected() {
    let r = replay_sample_chat(4);
    assert_eq!(r.replies[3].debug["text"], "ten");
    assert_eq!(r.replies[3].debug["corrections"], serde_json::json!([]));
}

#[test]
fn trace_is_seed_independent() {
    for seed in [0, 1, 99, 12345] {
        let r = replay_sample_chat(seed);
        let trace: Vec<(&str, &str)> =
            r.replies.iter().flat_map(|x| x.steps.iter()).map(|s| (s.from.as_str(), s.to.as_str())).collect();
        assert_eq!(trace, MOVIES_TRACE, "seed {seed}");
    }
}

#[test]
fn returning_user_hears_a_resume_offer() {
    let r = replay_sample_chat(2);
    assert!(r.greeting.contains("George"), "{}", r.greeting);
    assert!(r.greeting.contains("movies"), "{}", r.greeting);
    assert!(r.greeting.ends_with('?'));
}

#[test]
fn speech_markup_adds_the_expected_interjections() {
    let r = replay_sample_chat(6);
    assert!(r.replies[2].ssml.contains(">hmm<"), "{}", r.replies[2].ssml);
    assert!(r.replies[4].ssml.contains(">ouu<"), "{}", r.replies[4].ssml);
    for reply in &r.replies {
        assert_eq!(gunrock_core::nlg::strip_markup(&reply.ssml), reply.response);
    }
}
