use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::service::{LogEvent, LogWriter, Role, TurnLine};

/// Slopes the generator plants, one per standard analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Planted {
    pub rating_by_words: f64,
    pub turns_by_words: f64,
    pub rating_by_backstory: f64,
    pub rating_by_pet: f64,
}

impl Default for Planted {
    fn default() -> Self {
        Planted { rating_by_words: 0.01, turns_by_words: 1.85, rating_by_backstory: 0.10, rating_by_pet: 0.15 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// Conversations that pass the minimum-turn filter.
    pub conversations: usize,
    /// Extra one- and two-turn conversations the filter should drop.
    pub short_conversations: usize,
    pub seed: u64,
    pub planted: Planted,
    pub rating_noise_sd: f64,
    pub turns_noise_sd: f64,
    pub unrated_fraction: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            conversations: 2000,
            short_conversations: 100,
            seed: 7,
            planted: Planted::default(),
            rating_noise_sd: 0.3,
            turns_noise_sd: 2.0,
            unrated_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSummary {
    pub sessions: usize,
    pub lines: usize,
    pub config: SynthConfig,
}

const VOCAB: &[&str] = &[
    "i", "really", "like", "the", "movie", "music", "we", "went", "to", "see", "it", "was", "good", "my", "dog",
    "loves", "walks", "books", "about", "space", "travel", "think", "that", "would", "be", "fun", "yeah", "sure",
    "what", "do", "you", "play", "games", "on", "weekends", "with", "friends", "and", "family", "pizza",
];

const WORDS_MIN: f64 = 3.0;
const WORDS_MAX: f64 = 20.0;
const PET_YES_SHARE: f64 = 0.3;

/// Round so that the expectation equals `v`.
fn stochastic_round(v: f64, rng: &mut ChaCha8Rng) -> i64 {
    let floor = v.floor();
    floor as i64 + i64::from(rng.random::<f64>() < v - floor)
}

/// Split `total` words into `parts` utterances of at least one word each.
fn split_words(total: usize, parts: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut lens = vec![1; parts];
    for _ in 0..total.saturating_sub(parts) {
        lens[rng.random_range(0..parts)] += 1;
    }
    lens
}

fn utterance(len: usize, rng: &mut ChaCha8Rng) -> String {
    (0..len).map(|_| *VOCAB.choose(rng).unwrap_or(&"hmm")).collect::<Vec<_>>().join(" ")
}

struct Conversation {
    user_turns: usize,
    lens: Vec<usize>,
    backstory: usize,
    pet: Option<&'static str>,
    rating: Option<u8>,
}

fn plan_conversation(cfg: &SynthConfig, rng: &mut ChaCha8Rng, short: bool) -> Conversation {
    let p = cfg.planted;
    let target = rng.random_range(WORDS_MIN..WORDS_MAX);
    let turns_noise = Normal::new(0.0, cfg.turns_noise_sd).expect("finite sd");
    let user_turns = if short {
        rng.random_range(1..=2)
    } else {
        stochastic_round(5.0 + p.turns_by_words * target + turns_noise.sample(rng), rng).max(3) as usize
    };
    let total = ((target * user_turns as f64).round() as usize).max(user_turns);
    let lens = split_words(total, user_turns, rng);
    let words = total as f64 / user_turns as f64;

    let backstory = if rng.random_bool(0.5) { 0 } else { rng.random_range(1..=10).min(user_turns) };
    let pet = match rng.random::<f64>() {
        u if u < PET_YES_SHARE => Some("yes"),
        u if u < PET_YES_SHARE + 0.2 => Some("no"),
        u if u < PET_YES_SHARE + 0.3 => Some("na"),
        _ => None,
    };
    let is_yes = if pet == Some("yes") { 1.0 } else { 0.0 };
    let mid_words = (WORDS_MIN + WORDS_MAX) / 2.0;
    let latent = 3.0 * (backstory.max(1) as f64).powf(p.rating_by_backstory)
        + p.rating_by_words * (words - mid_words)
        + p.rating_by_pet * (is_yes - PET_YES_SHARE)
        + Normal::new(0.0, cfg.rating_noise_sd).expect("finite sd").sample(rng);
    let rating = (!rng.random_bool(cfg.unrated_fraction)).then(|| stochastic_round(latent, rng).clamp(1, 5) as u8);
    Conversation { user_turns, lens, backstory, pet, rating }
}

/// Generate a complete seeded log. Ratings are integers 1 to 5 whose
/// expectation follows the planted slopes.
pub fn generate_synthetic_log(cfg: &SynthConfig) -> Vec<LogEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut events = Vec::new();
    let mut clock: u64 = 1_700_000_000_000;
    let total = cfg.conversations + cfg.short_conversations;
    for k in 0..total {
        let short = k >= cfg.conversations;
        let conv = plan_conversation(cfg, &mut rng, short);
        let session_id = format!("synth-{k:05}");
        events.push(LogEvent::SessionStart {
            session_id: session_id.clone(),
            user_ref: format!("user-{k}"),
            ts_ms: clock,
            greeting: "Hi there!".into(),
        });
        let pet_turn = rng.random_range(0..conv.user_turns);
        for i in 0..conv.user_turns {
            clock += rng.random_range(2_000..8_000);
            events.push(LogEvent::Turn(TurnLine {
                session_id: session_id.clone(),
                turn_index: 2 * i as u32,
                role: Role::User,
                text: utterance(conv.lens[i], &mut rng),
                ts_ms: clock,
                ..Default::default()
            }));
            clock += rng.random_range(1_000..4_000);
            let mut attr_updates = BTreeMap::new();
            if let (true, Some(v)) = (i == pet_turn, conv.pet) {
                attr_updates.insert("has_pet".to_string(), v.to_string());
            }
            events.push(LogEvent::Turn(TurnLine {
                session_id: session_id.clone(),
                turn_index: 2 * i as u32 + 1,
                role: Role::System,
                text: "That is interesting.".into(),
                ts_ms: clock,
                backstory: i < conv.backstory,
                attr_updates,
                ..Default::default()
            }));
        }
        clock += 5_000;
        events.push(LogEvent::SessionEnd { session_id, ts_ms: clock, rating: conv.rating });
        clock += 60_000;
    }
    events
}

pub fn write_synthetic_log(path: &Path, cfg: &SynthConfig) -> std::io::Result<SynthSummary> {
    if path.exists() {
        std::fs::File::create(path)?;
    }
    let writer = LogWriter::open(path)?;
    let events = generate_synthetic_log(cfg);
    for e in &events {
        writer.append(e)?;
    }
    Ok(SynthSummary { sessions: cfg.conversations + cfg.short_conversations, lines: events.len(), config: cfg.clone() })
}
