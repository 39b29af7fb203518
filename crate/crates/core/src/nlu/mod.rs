//! Multi-step understanding of one corrected user utterance.
//!
//! The pipeline masks known entities, splits the masked text into segments,
//! resolves pronouns against earlier mentions and then annotates every
//! segment with noun phrases, dialog acts, sentiment and topics.

mod acts;
mod chunk;
mod coref;
mod mask;
mod pos;
mod segment;
mod sentiment;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use acts::{parse_tagset, ActClassifier, DialogActTag};
pub use chunk::Chunker;
pub use coref::{is_closed_pronoun, rank_score, render_span, resolve_coreference, Resolution};
pub use mask::{mask_entities, unmask, EntityMatcher, MaskTable, MaskedEntity};
pub use pos::{is_placeholder, PosLexicon, PosTag};
pub use segment::{segment_text, BreakRule, BreakSide, Segment, SegmentationRules, TokenCond};
pub use sentiment::{SentimentLexicon, TopicLexicon, NEGATION_WINDOW};

use crate::phonetic::{CorrectionOutcome, Corrector, RateBounds, TimedToken};

#[derive(Debug, Error)]
pub enum NluError {
    #[error("{file}:{line}: {reason}")]
    Config { file: String, line: usize, reason: String },
    #[error("empty utterance")]
    EmptyUtterance,
    #[error(transparent)]
    Token(#[from] crate::phonetic::PhoneticError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityType {
    Person,
    Event,
    Title,
    Place,
    Animal,
    Other,
}

impl EntityType {
    /// Map a gazetteer domain tag to an entity type.
    pub fn from_domain(domain: &str) -> Self {
        match domain {
            "person" => EntityType::Person,
            "event" => EntityType::Event,
            "movie" | "book" | "title" | "show" | "song" | "game" => EntityType::Title,
            "place" => EntityType::Place,
            "animal" => EntityType::Animal,
            _ => EntityType::Other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Person => "person",
            EntityType::Event => "event",
            EntityType::Title => "title",
            EntityType::Place => "place",
            EntityType::Animal => "animal",
            EntityType::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string())).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityMention {
    pub surface: String,
    pub canonical: String,
    pub entity_type: EntityType,
    pub turn_index: u32,
    pub segment_index: usize,
    pub rank_score: f64,
}

/// Per-session state the pipeline reads.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SessionContext {
    pub turn_index: u32,
    pub mentions: Vec<EntityMention>,
    pub prior_system_act: Option<DialogActTag>,
}

/// Full analysis of one user turn. Per-segment vectors share one index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NluResult {
    pub correction: CorrectionOutcome,
    pub masked_text: String,
    pub segments: Vec<Segment>,
    pub mask_table: MaskTable,
    /// Mentions made in this turn, including resolved pronouns.
    pub mentions: Vec<EntityMention>,
    pub resolutions: Vec<Resolution>,
    pub noun_phrases: Vec<Vec<String>>,
    pub acts: Vec<Vec<DialogActTag>>,
    pub sentiment: Vec<f64>,
    pub topics: Vec<Vec<(String, f64)>>,
    /// Gazetteer domains of entities in each segment.
    pub segment_domains: Vec<Vec<String>>,
}

impl NluResult {
    pub fn text(&self) -> &str {
        &self.correction.text
    }

    pub fn has_act(&self, label: &str) -> bool {
        self.acts.iter().flatten().any(|t| t.label == label)
    }

    pub fn segment_has_act(&self, segment: usize, label: &str) -> bool {
        self.acts.get(segment).is_some_and(|tags| tags.iter().any(|t| t.label == label))
    }

    pub fn mentions_in(&self, segment: usize) -> impl Iterator<Item = &EntityMention> {
        self.mentions.iter().filter(move |m| m.segment_index == segment)
    }

    /// Compact JSON for logs and debugging output.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "text": self.correction.text,
            "corrections": self.correction.applied,
            "segments": self.segments.iter().map(|s| &s.text).collect::<Vec<_>>(),
            "acts": self.acts.iter().map(|a| a.iter().map(|t| &t.label).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "entities": self.mentions.iter().map(|m| serde_json::json!({
                "surface": m.surface, "canonical": m.canonical, "type": m.entity_type, "segment": m.segment_index,
            })).collect::<Vec<_>>(),
            "resolutions": self.resolutions.iter().map(|r| serde_json::json!({
                "segment": r.segment_index, "pronoun": r.pronoun, "replacement": r.replacement,
            })).collect::<Vec<_>>(),
            "noun_phrases": self.noun_phrases,
            "sentiment": self.sentiment,
            "topics": self.topics,
        })
    }

    /// Check that every per-segment list is aligned with the segments.
    pub fn is_aligned(&self) -> bool {
        let n = self.segments.len();
        [self.noun_phrases.len(), self.acts.len(), self.sentiment.len(), self.topics.len(), self.segment_domains.len()]
            .iter()
            .all(|&l| l == n)
    }
}

/// Immutable configuration shared by all sessions.
#[derive(Debug, Clone)]
pub struct NluPipeline {
    pub lexicon: Arc<PosLexicon>,
    pub chunker: Arc<Chunker>,
    pub corrector: Corrector,
    pub matcher: EntityMatcher,
    pub rules: SegmentationRules,
    pub acts: ActClassifier,
    pub sentiment: SentimentLexicon,
    pub topics: TopicLexicon,
}

impl NluPipeline {
    pub fn chunk_noun_phrases(&self, words: &[&str]) -> Vec<String> {
        self.chunker.chunk_noun_phrases(words)
    }

    pub fn segment_text(&self, masked: &str) -> Vec<Segment> {
        segment_text(masked, &self.rules, &self.lexicon)
    }

    pub fn classify_dialog_acts(&self, text: &str, prior: Option<&DialogActTag>) -> Vec<DialogActTag> {
        self.acts.classify(&crate::text::normalize(text), prior, &self.lexicon)
    }

    pub fn annotate_sentiment_topic<'a>(
        &self,
        words: &[&str],
        domains: impl IntoIterator<Item = &'a str>,
    ) -> (f64, Vec<(String, f64)>) {
        (self.sentiment.score(words), self.topics.score(words, domains))
    }

    /// Run the whole pipeline on timed tokens.
    pub fn analyze_utterance(&self, tokens: &[TimedToken], ctx: &SessionContext) -> Result<NluResult, NluError> {
        self.analyze(tokens, ctx, self.corrector.bounds())
    }

    /// Run the pipeline on tokens whose timestamps were synthesized rather
    /// than measured, so the speaking-rate filter is skipped.
    pub fn analyze_untimed(&self, tokens: &[TimedToken], ctx: &SessionContext) -> Result<NluResult, NluError> {
        self.analyze(tokens, ctx, RateBounds::disabled())
    }

    fn analyze(&self, tokens: &[TimedToken], ctx: &SessionContext, bounds: RateBounds) -> Result<NluResult, NluError> {
        if tokens.is_empty() {
            return Err(NluError::EmptyUtterance);
        }
        for t in tokens {
            t.validate()?;
        }
        let correction = self.corrector.correct_with(tokens, bounds);
        let (masked_text, mask_table) = mask_entities(&correction.text, &self.matcher);
        let masked_tokens: Vec<&str> = masked_text.split_whitespace().collect();
        let raw_segments = self.segment_text(&masked_text);
        let (resolutions, mentions) =
            resolve_coreference(&masked_tokens, &raw_segments, &mask_table, &ctx.mentions, ctx.turn_index);

        let mut result = NluResult {
            correction,
            masked_text: masked_text.clone(),
            segments: Vec::with_capacity(raw_segments.len()),
            mask_table,
            mentions,
            resolutions,
            noun_phrases: Vec::new(),
            acts: Vec::new(),
            sentiment: Vec::new(),
            topics: Vec::new(),
            segment_domains: Vec::new(),
        };

        // masked token i starts at corrected word offsets[i]
        let mut offsets = Vec::with_capacity(masked_tokens.len() + 1);
        offsets.push(0);
        for t in &masked_tokens {
            let width = result.mask_table.get(t).map_or(1, |e| e.surface.split_whitespace().count());
            offsets.push(offsets.last().copied().unwrap_or(0) + width);
        }

        for seg in raw_segments {
            let text = render_span(&masked_tokens, seg.token_span, &result.mask_table, &result.resolutions);
            let (s, e) = seg.token_span;
            let nps: Vec<String> = self
                .chunker
                .chunk_spans(&masked_tokens[s..e])
                .into_iter()
                .map(|(a, b)| render_span(&masked_tokens, (s + a, s + b), &result.mask_table, &result.resolutions))
                .collect();
            let domains = self.segment_domains(&masked_tokens[s..e], &result, seg.index);
            let words: Vec<&str> = text.split_whitespace().collect();
            let acts = self.acts.classify(&text, ctx.prior_system_act.as_ref(), &self.lexicon);
            let (sentiment, topics) = self.annotate_sentiment_topic(&words, domains.iter().map(String::as_str));
            result.noun_phrases.push(nps);
            result.acts.push(acts);
            result.sentiment.push(sentiment);
            result.topics.push(topics);
            result.segment_domains.push(domains);
            result.segments.push(Segment { index: seg.index, text, token_span: (offsets[s], offsets[e]) });
        }
        debug_assert!(result.is_aligned());
        Ok(result)
    }

    fn segment_domains(&self, masked: &[&str], result: &NluResult, segment: usize) -> Vec<String> {
        let mut domains: Vec<String> =
            masked.iter().filter_map(|t| result.mask_table.get(t)).map(|e| e.domain.clone()).collect();
        for r in result.resolutions.iter().filter(|r| r.segment_index == segment) {
            if let Some(d) = self.matcher.domain_of(&r.canonical) {
                domains.push(d.to_string());
            }
        }
        domains
    }
}
