//! Open-domain conversational engine.
//!
//! Noisy transcripts are corrected against knowledge-base phrases by
//! phonetic code matching, analyzed into annotated segments, routed through
//! per-topic finite state transducers and answered with non-repeating
//! templates and speech markup. The analytics module fits engagement
//! regressions over the conversation logs the service writes.

pub mod analytics;
pub mod config;
pub mod dialog;
pub mod knowledge;
pub mod nlg;
pub mod nlu;
pub mod phonetic;
pub mod service;
pub mod text;

pub use config::{load_components, Components, DataSource};
pub use service::{Engine, EngineConfig, ServiceError, TurnReply};
