//! Phonetic correction of domain keywords in ASR transcripts.
//!
//! Noun-phrase windows of the transcript are encoded with Double Metaphone
//! and matched against knowledge-base phrases indexed by the same codes.
//! Candidate fixes whose spoken duration is implausible for the replacement
//! are filtered out using the per-word timestamps.

mod correct;
mod index;
mod metaphone;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use correct::{
    correct_utterance, filter_by_timesteps, propose_corrections, resolve_overlaps, Correction, CorrectionOutcome,
    Corrector, RateBounds,
};
pub use index::{load_gazetteer, parse_gazetteer, IndexEntry, IndexedPhrase, PhoneticIndex};
pub use metaphone::{encode_double_metaphone, PhoneticCode, MAX_CODE_LEN};

#[derive(Debug, Error)]
pub enum PhoneticError {
    #[error("cannot encode {0:?}: expected an alphabetic word")]
    InvalidWord(String),
    #[error("{file}:{line}: {reason}")]
    Gazetteer { file: String, line: usize, reason: String },
    #[error("invalid timed token: {0}")]
    InvalidToken(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One ASR word with its audio timing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedToken {
    pub word: String,
    pub start_ms: u64,
    pub end_ms: u64,
}

impl TimedToken {
    pub fn new(word: impl Into<String>, start_ms: u64, end_ms: u64) -> Result<Self, PhoneticError> {
        let tok = TimedToken { word: word.into(), start_ms, end_ms };
        tok.validate()?;
        Ok(tok)
    }

    pub fn validate(&self) -> Result<(), PhoneticError> {
        if self.word.is_empty() || self.word.chars().any(char::is_whitespace) {
            return Err(PhoneticError::InvalidToken(format!("bad word {:?}", self.word)));
        }
        if self.end_ms < self.start_ms {
            return Err(PhoneticError::InvalidToken(format!(
                "{:?} ends before it starts ({} < {})",
                self.word, self.end_ms, self.start_ms
            )));
        }
        Ok(())
    }
}

/// Build timed tokens from plain text with a uniform per-word duration.
pub fn synthesize_tokens(text: &str, ms_per_word: u64) -> Vec<TimedToken> {
    crate::text::normalize(text)
        .split_whitespace()
        .enumerate()
        .map(|(i, w)| TimedToken {
            word: w.to_string(),
            start_ms: i as u64 * ms_per_word,
            end_ms: (i as u64 + 1) * ms_per_word,
        })
        .collect()
}
