use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::pos::{is_placeholder, PosLexicon, PosTag};
use super::NluError;

/// A semantically complete unit of one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub index: usize,
    /// Surface text (entity masks restored, pronouns resolved).
    pub text: String,
    /// Half-open range into the utterance tokens.
    pub token_span: (usize, usize),
}

/// Predicate over a token position. `None` means "outside the utterance".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenCond {
    /// No token (before the first or after the last).
    Edge,
    Words(Vec<String>),
    /// A named word list from the rules file.
    Set(String),
    Tags(Vec<PosTag>),
    Placeholder,
    AnyOf(Vec<TokenCond>),
    Not(Box<TokenCond>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakSide {
    Before,
    After,
}

/// Insert a break on `side` of a token when every given condition holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakRule {
    pub name: String,
    #[serde(rename = "break")]
    pub side: BreakSide,
    pub at: TokenCond,
    #[serde(default)]
    pub prev: Option<TokenCond>,
    #[serde(default)]
    pub next: Option<TokenCond>,
    #[serde(default)]
    pub next2: Option<TokenCond>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentationRules {
    pub rules_version: u32,
    pub sets: BTreeMap<String, BTreeSet<String>>,
    pub rules: Vec<BreakRule>,
}

impl SegmentationRules {
    pub fn parse(source: &str, text: &str) -> Result<Self, NluError> {
        let rules: SegmentationRules = serde_json::from_str(text)
            .map_err(|e| NluError::Config { file: source.to_string(), line: e.line(), reason: e.to_string() })?;
        if rules.rules_version != 1 {
            return Err(NluError::Config {
                file: source.to_string(),
                line: 0,
                reason: format!("unsupported rules_version {}", rules.rules_version),
            });
        }
        let mut missing = Vec::new();
        for rule in &rules.rules {
            for cond in [Some(&rule.at), rule.prev.as_ref(), rule.next.as_ref(), rule.next2.as_ref()].into_iter().flatten() {
                rules.collect_unknown_sets(cond, &rule.name, &mut missing);
            }
        }
        if !missing.is_empty() {
            return Err(NluError::Config { file: source.to_string(), line: 0, reason: missing.join("; ") });
        }
        Ok(rules)
    }

    fn collect_unknown_sets(&self, cond: &TokenCond, rule: &str, out: &mut Vec<String>) {
        match cond {
            TokenCond::Set(name) if !self.sets.contains_key(name) => {
                out.push(format!("rule {rule:?} references unknown set {name:?}"))
            }
            TokenCond::AnyOf(cs) => cs.iter().for_each(|c| self.collect_unknown_sets(c, rule, out)),
            TokenCond::Not(c) => self.collect_unknown_sets(c, rule, out),
            _ => {}
        }
    }

    fn holds(&self, cond: &TokenCond, token: Option<(&str, PosTag)>) -> bool {
        match (cond, token) {
            (TokenCond::Edge, t) => t.is_none(),
            (TokenCond::Not(c), t) => !self.holds(c, t),
            (TokenCond::AnyOf(cs), t) => cs.iter().any(|c| self.holds(c, t)),
            (_, None) => false,
            (TokenCond::Words(ws), Some((w, _))) => ws.iter().any(|x| x == w),
            (TokenCond::Set(name), Some((w, _))) => self.sets.get(name).is_some_and(|s| s.contains(w)),
            (TokenCond::Tags(tags), Some((_, t))) => tags.contains(&t),
            (TokenCond::Placeholder, Some((w, _))) => is_placeholder(w),
        }
    }

    /// Token indices `b` such that a break falls between `b - 1` and `b`.
    pub fn boundaries(&self, words: &[&str], lexicon: &PosLexicon) -> BTreeSet<usize> {
        let tags = lexicon.tag_all(words);
        let at = |i: isize| -> Option<(&str, PosTag)> {
            (i >= 0 && (i as usize) < words.len()).then(|| (words[i as usize], tags[i as usize]))
        };
        let mut breaks = BTreeSet::new();
        for i in 0..words.len() {
            let ii = i as isize;
            for rule in &self.rules {
                let ok = self.holds(&rule.at, at(ii))
                    && rule.prev.as_ref().is_none_or(|c| self.holds(c, at(ii - 1)))
                    && rule.next.as_ref().is_none_or(|c| self.holds(c, at(ii + 1)))
                    && rule.next2.as_ref().is_none_or(|c| self.holds(c, at(ii + 2)));
                if !ok {
                    continue;
                }
                let b = match rule.side {
                    BreakSide::Before => i,
                    BreakSide::After => i + 1,
                };
                if b > 0 && b < words.len() {
                    log::trace!("segmentation rule {} breaks at {}", rule.name, b);
                    breaks.insert(b);
                }
            }
        }
        breaks
    }
}

/// Split masked text into segments at rule-detected boundaries.
///
/// Segment text here is still masked; callers restore surfaces.
pub fn segment_text(masked: &str, rules: &SegmentationRules, lexicon: &PosLexicon) -> Vec<Segment> {
    let words: Vec<&str> = masked.split_whitespace().collect();
    if words.is_empty() {
        return Vec::new();
    }
    let mut cuts: Vec<usize> = vec![0];
    cuts.extend(rules.boundaries(&words, lexicon));
    cuts.push(words.len());
    cuts.windows(2)
        .enumerate()
        .map(|(index, w)| Segment { index, text: words[w[0]..w[1]].join(" "), token_span: (w[0], w[1]) })
        .collect()
}
