use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::index::{content_words, strip_plural, whole_phrase_key, IndexedPhrase};
use super::{PhoneticCode, PhoneticIndex, TimedToken};
use crate::nlu::Chunker;
use crate::text::{estimate_syllables, is_stopword};

/// Code-match scores: primary/primary, primary/secondary, secondary/secondary.
const EXACT_PRIMARY: f64 = 1.0;
const CROSS: f64 = 0.8;
const SECONDARY: f64 = 0.6;

/// A suggested replacement of a token span by a knowledge-base phrase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    /// Half-open `[start, end)` token range.
    pub token_span: (usize, usize),
    pub original: String,
    pub replacement: String,
    pub domain: String,
    pub matched_code: String,
    pub score: f64,
}

impl Correction {
    pub fn overlaps(&self, other: &Correction) -> bool {
        self.token_span.0 < other.token_span.1 && other.token_span.0 < self.token_span.1
    }

    fn word_count_gap(&self) -> usize {
        let window = self.token_span.1 - self.token_span.0;
        window.abs_diff(self.replacement.split_whitespace().count())
    }
}

/// Plausible speaking rate, in estimated syllables per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBounds {
    pub min_syllables_per_sec: f64,
    pub max_syllables_per_sec: f64,
}

impl Default for RateBounds {
    fn default() -> Self {
        RateBounds { min_syllables_per_sec: 1.0, max_syllables_per_sec: 9.0 }
    }
}

impl RateBounds {
    pub fn disabled() -> Self {
        RateBounds { min_syllables_per_sec: 0.0, max_syllables_per_sec: f64::INFINITY }
    }

    pub fn is_disabled(&self) -> bool {
        self.min_syllables_per_sec <= 0.0 && self.max_syllables_per_sec == f64::INFINITY
    }

    fn admits(&self, rate: f64) -> bool {
        rate >= self.min_syllables_per_sec && rate <= self.max_syllables_per_sec
    }
}

fn codes_equal(a: &str, b: &str) -> bool {
    !a.is_empty() && !b.is_empty() && (a == b || strip_plural(a) == strip_plural(b))
}

/// Score of one word-code pair, or `None` when the codes do not collide.
fn match_quality(spoken: &PhoneticCode, canonical: &PhoneticCode) -> Option<f64> {
    if codes_equal(&spoken.primary, &canonical.primary) {
        Some(EXACT_PRIMARY)
    } else if codes_equal(&spoken.primary, &canonical.secondary) || codes_equal(&spoken.secondary, &canonical.primary)
    {
        Some(CROSS)
    } else if codes_equal(&spoken.secondary, &canonical.secondary) {
        Some(SECONDARY)
    } else {
        None
    }
}

fn depluralize(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| w.strip_suffix('s').unwrap_or(w).to_string()).collect()
}

/// Does `words[start..end]` sit inside a verbatim occurrence of the phrase?
fn inside_exact_occurrence(words: &[&str], start: usize, end: usize, phrase: &IndexedPhrase) -> bool {
    let n = phrase.words.len();
    if n == 0 || n > words.len() {
        return false;
    }
    (0..=words.len() - n).any(|at| {
        at <= start && end <= at + n && words[at..at + n].iter().zip(&phrase.words).all(|(a, b)| *a == b)
    })
}

fn score_window(window: &[(usize, &str, PhoneticCode)], phrase: &IndexedPhrase) -> Option<f64> {
    let m = window.len();
    if m == 0 || phrase.content.len() != m {
        return None;
    }
    let qualities: Vec<f64> = window
        .iter()
        .zip(&phrase.content)
        .filter_map(|((_, _, spoken), (_, canonical))| match_quality(spoken, canonical))
        .collect();
    let matched = qualities.len();
    // At least two thirds of the content words must collide.
    if matched == 0 || matched * 3 < m * 2 {
        return None;
    }
    let quality = qualities.iter().sum::<f64>() / matched as f64;
    Some(quality * matched as f64 / m as f64)
}

fn rank_order(a: &Correction, b: &Correction) -> std::cmp::Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.word_count_gap().cmp(&b.word_count_gap()))
        .then(a.replacement.cmp(&b.replacement))
        .then(a.token_span.cmp(&b.token_span))
}

/// Candidate corrections for each noun-phrase span, best first.
///
/// Windows start on a content word inside a span and extend up to the
/// index's longest phrase length. A window that already spells a phrase
/// verbatim yields nothing for that phrase.
pub fn propose_corrections(
    tokens: &[TimedToken],
    noun_phrases: &[(usize, usize)],
    index: &PhoneticIndex,
) -> Vec<Correction> {
    let words: Vec<&str> = tokens.iter().map(|t| t.word.as_str()).collect();
    let mut best: BTreeMap<((usize, usize), String), Correction> = BTreeMap::new();
    let max_ngram = index.max_ngram();

    for &(np_start, np_end) in noun_phrases {
        let np_end = np_end.min(words.len());
        for start in np_start..np_end {
            if is_stopword(words[start]) {
                continue;
            }
            for len in 1..=max_ngram {
                let end = start + len;
                if end > words.len() {
                    break;
                }
                if is_stopword(words[end - 1]) {
                    continue;
                }
                let window_words = &words[start..end];
                let window = content_words(window_words);
                if window.is_empty() {
                    continue;
                }
                let mut candidates = std::collections::BTreeSet::new();
                for (_, _, code) in &window {
                    candidates.extend(index.candidates_for_code(code));
                }
                let surface = window_words.join(" ");
                for entry in candidates {
                    let Some(phrase) = index.phrase(entry) else { continue };
                    if phrase.entry.phrase == surface
                        || depluralize(window_words) == depluralize(&phrase.words.iter().map(String::as_str).collect::<Vec<_>>())
                        || inside_exact_occurrence(&words, start, end, phrase)
                    {
                        continue;
                    }
                    let Some(score) = score_window(&window, phrase) else { continue };
                    let candidate = Correction {
                        token_span: (start, end),
                        original: surface.clone(),
                        replacement: phrase.entry.phrase.clone(),
                        domain: phrase.entry.domain.clone(),
                        matched_code: whole_phrase_key(window.iter().map(|(_, _, c)| c)),
                        score,
                    };
                    let key = ((start, end), candidate.replacement.clone());
                    match best.get(&key) {
                        Some(existing) if existing.score >= candidate.score => {}
                        _ => {
                            best.insert(key, candidate);
                        }
                    }
                }
            }
        }
    }

    let mut out: Vec<Correction> = best.into_values().collect();
    out.sort_by(rank_order);
    out
}

/// Drop corrections whose replacement could not have been spoken in the
/// span's audio duration.
pub fn filter_by_timesteps(corrections: Vec<Correction>, tokens: &[TimedToken], bounds: RateBounds) -> Vec<Correction> {
    if bounds.is_disabled() {
        return corrections;
    }
    corrections
        .into_iter()
        .filter(|c| {
            let (start, end) = c.token_span;
            if start >= end || end > tokens.len() {
                return false;
            }
            let duration_ms = tokens[end - 1].end_ms.saturating_sub(tokens[start].start_ms);
            if duration_ms == 0 {
                return false;
            }
            let rate = estimate_syllables(&c.replacement) as f64 / (duration_ms as f64 / 1000.0);
            bounds.admits(rate)
        })
        .collect()
}

/// Pick the pairwise non-overlapping subset with the largest total score
/// (weighted interval scheduling). Returned in span order.
pub fn resolve_overlaps(candidates: &[Correction]) -> Vec<Correction> {
    let mut ranked: Vec<&Correction> = candidates.iter().collect();
    ranked.sort_by(|a, b| rank_order(a, b));
    let mut order: Vec<(usize, &Correction)> = ranked.into_iter().enumerate().collect();
    order.sort_by(|(ra, a), (rb, b)| {
        a.token_span.1.cmp(&b.token_span.1).then(a.token_span.0.cmp(&b.token_span.0)).then(ra.cmp(rb))
    });

    let n = order.len();
    // best[i]: optimum over the first i intervals.
    let mut best = vec![0.0f64; n + 1];
    let mut take = vec![false; n + 1];
    let mut prev = vec![0usize; n + 1];
    for i in 1..=n {
        let cur = order[i - 1].1;
        let p = order[..i - 1].iter().rposition(|(_, c)| c.token_span.1 <= cur.token_span.0).map_or(0, |j| j + 1);
        prev[i] = p;
        let with = cur.score + best[p];
        if with > best[i - 1] {
            best[i] = with;
            take[i] = true;
        } else {
            best[i] = best[i - 1];
        }
    }
    let mut chosen = Vec::new();
    let mut i = n;
    while i > 0 {
        if take[i] {
            chosen.push(order[i - 1].1.clone());
            i = prev[i];
        } else {
            i -= 1;
        }
    }
    chosen.reverse();
    chosen
}

/// Result of correcting one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionOutcome {
    pub text: String,
    pub words: Vec<String>,
    pub applied: Vec<Correction>,
}

/// Apply the best non-overlapping, timing-plausible corrections.
pub fn correct_utterance(
    tokens: &[TimedToken],
    noun_phrases: &[(usize, usize)],
    indexes: &[&PhoneticIndex],
    bounds: RateBounds,
) -> CorrectionOutcome {
    let mut candidates = Vec::new();
    for index in indexes {
        candidates.extend(propose_corrections(tokens, noun_phrases, index));
    }
    let candidates = filter_by_timesteps(candidates, tokens, bounds);
    let applied = resolve_overlaps(&candidates);

    let mut words = Vec::with_capacity(tokens.len());
    let mut i = 0;
    let mut next = applied.iter().peekable();
    while i < tokens.len() {
        match next.peek() {
            Some(c) if c.token_span.0 == i => {
                words.extend(c.replacement.split_whitespace().map(str::to_string));
                i = c.token_span.1;
                next.next();
            }
            _ => {
                words.push(tokens[i].word.clone());
                i += 1;
            }
        }
    }
    CorrectionOutcome { text: words.join(" "), words, applied }
}

/// Knowledge-base correction with noun phrases found by the rule chunker.
#[derive(Debug, Clone)]
pub struct Corrector {
    indexes: Vec<Arc<PhoneticIndex>>,
    chunker: Arc<Chunker>,
    bounds: RateBounds,
}

impl Corrector {
    pub fn new(indexes: Vec<Arc<PhoneticIndex>>, chunker: Arc<Chunker>, bounds: RateBounds) -> Self {
        Corrector { indexes, chunker, bounds }
    }

    pub fn indexes(&self) -> &[Arc<PhoneticIndex>] {
        &self.indexes
    }

    pub fn noun_phrase_spans(&self, tokens: &[TimedToken]) -> Vec<(usize, usize)> {
        let words: Vec<&str> = tokens.iter().map(|t| t.word.as_str()).collect();
        self.chunker.chunk_spans(&words)
    }

    pub fn bounds(&self) -> RateBounds {
        self.bounds
    }

    pub fn correct(&self, tokens: &[TimedToken]) -> CorrectionOutcome {
        self.correct_with(tokens, self.bounds)
    }

    pub fn correct_with(&self, tokens: &[TimedToken], bounds: RateBounds) -> CorrectionOutcome {
        let spans = self.noun_phrase_spans(tokens);
        let indexes: Vec<&PhoneticIndex> = self.indexes.iter().map(Arc::as_ref).collect();
        correct_utterance(tokens, &spans, &indexes, bounds)
    }
}
