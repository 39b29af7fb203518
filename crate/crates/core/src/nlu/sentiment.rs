use std::collections::{BTreeMap, HashMap, HashSet};

use super::NluError;

/// Tokens after a negator within which the next polar word is flipped.
pub const NEGATION_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Positive,
    Negative,
}

/// Positive/negative word lists plus negators.
#[derive(Debug, Clone, Default)]
pub struct SentimentLexicon {
    polar: HashMap<String, Polarity>,
    negators: HashSet<String>,
}

impl SentimentLexicon {
    /// Lines are `word<TAB>pos|neg|negator`.
    pub fn parse(source: &str, text: &str) -> Result<Self, NluError> {
        let mut lex = SentimentLexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: &str| NluError::Config { file: source.into(), line: i + 1, reason: reason.into() };
            let (word, class) = line.split_once('\t').ok_or_else(|| bad("expected word<TAB>class"))?;
            let word = word.trim().to_lowercase();
            match class.trim() {
                "pos" => {
                    lex.polar.insert(word, Polarity::Positive);
                }
                "neg" => {
                    lex.polar.insert(word, Polarity::Negative);
                }
                "negator" => {
                    lex.negators.insert(word);
                }
                _ => return Err(bad("class must be pos, neg or negator")),
            }
        }
        Ok(lex)
    }

    /// `(pos - neg) / (pos + neg)` over lexicon hits, 0 without hits.
    ///
    /// A negator flips the first polar word that follows it within
    /// [`NEGATION_WINDOW`] tokens.
    pub fn score(&self, words: &[&str]) -> f64 {
        let (mut pos, mut neg) = (0u32, 0u32);
        let mut pending_negation: Option<usize> = None;
        for (i, w) in words.iter().enumerate() {
            if self.negators.contains(*w) || w.ends_with("n't") {
                pending_negation = Some(i);
                continue;
            }
            let Some(&polarity) = self.polar.get(*w) else { continue };
            let flipped = pending_negation.take().is_some_and(|n| i - n <= NEGATION_WINDOW);
            match (polarity, flipped) {
                (Polarity::Positive, false) | (Polarity::Negative, true) => pos += 1,
                _ => neg += 1,
            }
        }
        if pos + neg == 0 {
            0.0
        } else {
            (f64::from(pos) - f64::from(neg)) / f64::from(pos + neg)
        }
    }
}

/// Keyword and entity-domain evidence for topic labels.
#[derive(Debug, Clone, Default)]
pub struct TopicLexicon {
    keywords: HashMap<String, String>,
    domains: HashMap<String, String>,
    labels: Vec<String>,
}

impl TopicLexicon {
    /// Lines are `keyword<TAB>topic` or `entity:<domain><TAB>topic`.
    pub fn parse(source: &str, text: &str) -> Result<Self, NluError> {
        let mut lex = TopicLexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, topic) = line.split_once('\t').ok_or_else(|| NluError::Config {
                file: source.into(),
                line: i + 1,
                reason: "expected keyword<TAB>topic".into(),
            })?;
            let topic = topic.trim().to_string();
            if !lex.labels.contains(&topic) {
                lex.labels.push(topic.clone());
            }
            match key.trim().strip_prefix("entity:") {
                Some(domain) => lex.domains.insert(domain.to_string(), topic),
                None => lex.keywords.insert(key.trim().to_lowercase(), topic),
            };
        }
        Ok(lex)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn topic_for_domain(&self, domain: &str) -> Option<&str> {
        self.domains.get(domain).map(String::as_str)
    }

    /// Normalized topic weights from keyword hits and entity domains,
    /// heaviest first.
    pub fn score<'a>(&self, words: &[&str], entity_domains: impl IntoIterator<Item = &'a str>) -> Vec<(String, f64)> {
        let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
        for w in words {
            if let Some(t) = self.keywords.get(*w) {
                *counts.entry(t).or_default() += 1.0;
            }
        }
        for pair in words.windows(2) {
            if let Some(t) = self.keywords.get(&pair.join(" ")) {
                *counts.entry(t).or_default() += 1.0;
            }
        }
        for d in entity_domains {
            if let Some(t) = self.domains.get(d) {
                *counts.entry(t).or_default() += 1.0;
            }
        }
        let total: f64 = counts.values().sum();
        let mut out: Vec<(String, f64)> = counts.into_iter().map(|(t, c)| (t.to_string(), c / total)).collect();
        out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }
}
