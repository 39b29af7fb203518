use std::collections::BTreeSet;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::pos::{PosLexicon, PosTag};
use super::NluError;

/// A dialog act label with confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogActTag {
    pub label: String,
    pub confidence: f64,
}

impl DialogActTag {
    pub fn new(label: impl Into<String>, confidence: f64) -> Self {
        DialogActTag { label: label.into(), confidence }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawRule {
    label: String,
    #[serde(default)]
    exact: Vec<String>,
    #[serde(default)]
    starts_with: Vec<String>,
    #[serde(default)]
    contains: Vec<String>,
    #[serde(default)]
    regex: Option<String>,
    #[serde(default)]
    not_regex: Option<String>,
    #[serde(default)]
    prior: Vec<String>,
    #[serde(default)]
    max_tokens: Option<usize>,
    #[serde(default)]
    subject_verb: bool,
    #[serde(default)]
    has_label: Vec<String>,
    #[serde(default)]
    lacks_label: Vec<String>,
    #[serde(default, rename = "final")]
    stop: bool,
    #[serde(default = "one")]
    confidence: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
struct RawRules {
    acts_version: u32,
    rules: Vec<RawRule>,
    fallback: String,
    unknown: String,
}

#[derive(Debug, Clone)]
struct ActRule {
    raw: RawRule,
    regex: Option<Regex>,
    not_regex: Option<Regex>,
}

/// Ordered rule cascade over a fixed tagset.
///
/// Every matching rule contributes its label; a matching rule marked
/// `final` ends the cascade. With no label, segments without any known
/// word get the `unknown` label and the rest get `fallback`.
#[derive(Debug, Clone)]
pub struct ActClassifier {
    tagset: Vec<String>,
    rules: Vec<ActRule>,
    fallback: String,
    unknown: String,
}

fn phrase_at_start(text: &str, phrase: &str) -> bool {
    text == phrase || text.strip_prefix(phrase).is_some_and(|rest| rest.starts_with(' '))
}

fn contains_phrase(text: &str, phrase: &str) -> bool {
    let padded = format!(" {text} ");
    padded.contains(&format!(" {phrase} "))
}

pub fn parse_tagset(source: &str, text: &str) -> Result<Vec<String>, NluError> {
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if labels.iter().any(|l| l == line) {
            return Err(NluError::Config { file: source.into(), line: i + 1, reason: format!("duplicate label {line:?}") });
        }
        labels.push(line.to_string());
    }
    Ok(labels)
}

impl ActClassifier {
    pub fn parse(tagset: Vec<String>, source: &str, text: &str) -> Result<Self, NluError> {
        let cfg = |reason: String| NluError::Config { file: source.to_string(), line: 0, reason };
        let raw: RawRules = serde_json::from_str(text)
            .map_err(|e| NluError::Config { file: source.to_string(), line: e.line(), reason: e.to_string() })?;
        if raw.acts_version != 1 {
            return Err(cfg(format!("unsupported acts_version {}", raw.acts_version)));
        }
        let known: BTreeSet<&str> = tagset.iter().map(String::as_str).collect();
        let mut problems = Vec::new();
        let mut check = |label: &str, what: &str| {
            if !known.contains(label) {
                problems.push(format!("{what} uses label {label:?} outside the tagset"));
            }
        };
        check(&raw.fallback, "fallback");
        check(&raw.unknown, "unknown");
        let mut rules = Vec::new();
        for (i, r) in raw.rules.into_iter().enumerate() {
            let what = format!("rule #{i}");
            check(&r.label, &what);
            for l in r.prior.iter().chain(&r.has_label).chain(&r.lacks_label) {
                check(l, &what);
            }
            let compile = |p: &Option<String>| -> Result<Option<Regex>, NluError> {
                p.as_deref().map(Regex::new).transpose().map_err(|e| cfg(format!("{what}: {e}")))
            };
            rules.push(ActRule { regex: compile(&r.regex)?, not_regex: compile(&r.not_regex)?, raw: r });
        }
        if !problems.is_empty() {
            return Err(cfg(problems.join("; ")));
        }
        Ok(ActClassifier { tagset, rules, fallback: raw.fallback, unknown: raw.unknown })
    }

    pub fn tagset(&self) -> &[String] {
        &self.tagset
    }

    /// Label a segment. `text` is normalized surface text.
    pub fn classify(&self, text: &str, prior: Option<&DialogActTag>, lexicon: &PosLexicon) -> Vec<DialogActTag> {
        let words: Vec<&str> = text.split_whitespace().collect();
        let tags = lexicon.tag_all(&words);
        let mut out: Vec<DialogActTag> = Vec::new();
        for rule in &self.rules {
            if out.iter().any(|t| t.label == rule.raw.label) || !self.matches(rule, text, &words, &tags, prior, &out) {
                continue;
            }
            out.push(DialogActTag::new(rule.raw.label.clone(), rule.raw.confidence));
            if rule.raw.stop {
                break;
            }
        }
        if out.is_empty() {
            let label = if words.iter().any(|w| lexicon.knows(w)) { &self.fallback } else { &self.unknown };
            out.push(DialogActTag::new(label.clone(), 0.5));
        }
        out
    }

    fn matches(
        &self,
        rule: &ActRule,
        text: &str,
        words: &[&str],
        tags: &[PosTag],
        prior: Option<&DialogActTag>,
        so_far: &[DialogActTag],
    ) -> bool {
        let r = &rule.raw;
        let has = |l: &String| so_far.iter().any(|t| &t.label == l);
        (r.exact.is_empty() || r.exact.iter().any(|e| e == text))
            && (r.starts_with.is_empty() || r.starts_with.iter().any(|p| phrase_at_start(text, p)))
            && (r.contains.is_empty() || r.contains.iter().any(|p| contains_phrase(text, p)))
            && rule.regex.as_ref().is_none_or(|re| re.is_match(text))
            && rule.not_regex.as_ref().is_none_or(|re| !re.is_match(text))
            && (r.prior.is_empty() || prior.is_some_and(|p| r.prior.contains(&p.label)))
            && r.max_tokens.is_none_or(|m| words.len() <= m)
            && (!r.subject_verb || has_subject_verb(tags))
            && (r.has_label.is_empty() || r.has_label.iter().any(has))
            && !r.lacks_label.iter().any(has)
    }
}

/// A nominal or pronoun followed somewhere later by a verb or auxiliary.
fn has_subject_verb(tags: &[PosTag]) -> bool {
    let subject = tags.iter().position(|t| matches!(t, PosTag::Pron | PosTag::Noun | PosTag::Propn));
    subject.is_some_and(|s| tags[s + 1..].iter().any(|t| matches!(t, PosTag::Verb | PosTag::Aux)))
}
