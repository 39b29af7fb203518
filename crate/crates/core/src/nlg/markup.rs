use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{ActClass, NlgError};

const OPEN: &str = "<say-as interpret-as=\"interjection\">";
const CLOSE: &str = "</say-as>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkupPlacement {
    Prefix,
    Infix,
    Suffix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sentiment {
    Positive,
    Negative,
    Neutral,
    #[default]
    Any,
}

impl Sentiment {
    fn admits(self, score: f64) -> bool {
        match self {
            Sentiment::Any => true,
            Sentiment::Positive => score > 0.0,
            Sentiment::Negative => score < 0.0,
            Sentiment::Neutral => score == 0.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trigger {
    #[serde(default)]
    pub first_class: Option<ActClass>,
    #[serde(default)]
    pub second_class: Option<ActClass>,
    #[serde(default)]
    pub has_class: Option<ActClass>,
    #[serde(default)]
    pub sentiment: Sentiment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkupRule {
    pub name: String,
    pub when: Trigger,
    pub insertion: String,
    pub placement: MarkupPlacement,
}

/// What the markup rules may look at.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MarkupContext {
    /// Act class of each composed response part, in order.
    pub classes: Vec<ActClass>,
    /// Sentiment of the user's central segment.
    pub sentiment: f64,
    /// Byte offset where the second part starts, when known.
    pub boundary: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkupRules {
    pub markup_version: u32,
    pub enabled: bool,
    pub whitelist: BTreeSet<String>,
    pub rules: Vec<MarkupRule>,
}

impl MarkupRules {
    pub fn disabled() -> Self {
        MarkupRules { markup_version: 1, enabled: false, whitelist: BTreeSet::new(), rules: Vec::new() }
    }

    pub fn parse(source: &str, text: &str) -> Result<Self, NlgError> {
        let bad = |line: usize, reason: String| NlgError::Malformed { file: source.into(), line, reason };
        let rules: MarkupRules = serde_json::from_str(text).map_err(|e| bad(e.line(), e.to_string()))?;
        if rules.markup_version != 1 {
            return Err(bad(0, format!("unsupported markup_version {}", rules.markup_version)));
        }
        for r in &rules.rules {
            if !rules.whitelist.contains(&r.insertion) {
                return Err(bad(0, format!("rule {:?} inserts {:?}, which is not whitelisted", r.name, r.insertion)));
            }
        }
        Ok(rules)
    }

    fn fires(rule: &MarkupRule, ctx: &MarkupContext) -> bool {
        let w = &rule.when;
        w.first_class.is_none_or(|c| ctx.classes.first() == Some(&c))
            && w.second_class.is_none_or(|c| ctx.classes.get(1) == Some(&c))
            && w.has_class.is_none_or(|c| ctx.classes.contains(&c))
            && w.sentiment.admits(ctx.sentiment)
    }

    /// Insert at most one interjection, from the first rule that fires and
    /// can be placed.
    pub fn add_speech_markup(&self, text: &str, ctx: &MarkupContext) -> String {
        if !self.enabled {
            return text.to_string();
        }
        for rule in self.rules.iter().filter(|r| Self::fires(r, ctx)) {
            let tag = format!("{OPEN}{}{CLOSE}", rule.insertion);
            match rule.placement {
                MarkupPlacement::Prefix => return format!("{tag} {text}"),
                MarkupPlacement::Suffix => return format!("{text} {tag}"),
                MarkupPlacement::Infix => {
                    let at = part_boundary(text, ctx.boundary).or_else(|| second_sentence_start(text));
                    if let Some(at) = at {
                        return format!("{}{tag} {}", &text[..at], &text[at..]);
                    }
                }
            }
        }
        text.to_string()
    }
}

fn part_boundary(text: &str, boundary: Option<usize>) -> Option<usize> {
    boundary.filter(|&b| b > 0 && b < text.len() && text.is_char_boundary(b) && text.as_bytes()[b - 1] == b' ')
}

fn second_sentence_start(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    (1..bytes.len())
        .find(|&i| bytes[i - 1] == b' ' && i >= 2 && matches!(bytes[i - 2], b'.' | b'!' | b'?'))
}

/// Exact inverse of [`MarkupRules::add_speech_markup`].
pub fn strip_markup(marked: &str) -> String {
    let mut out = marked.to_string();
    while let Some(start) = out.find(OPEN) {
        let Some(close) = out[start..].find(CLOSE) else { break };
        let end = start + close + CLOSE.len();
        if out[end..].starts_with(' ') {
            out.replace_range(start..end + 1, "");
        } else if start > 0 && out[..start].ends_with(' ') {
            out.replace_range(start - 1..end, "");
        } else {
            out.replace_range(start..end, "");
        }
    }
    out
}
