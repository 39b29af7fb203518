//! Template-based response text and speech markup.

mod markup;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use markup::{strip_markup, MarkupContext, MarkupPlacement, MarkupRule, MarkupRules, Sentiment};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NlgError {
    #[error("{file}:{line}: {reason}")]
    Malformed { file: String, line: usize, reason: String },
    #[error("no templates registered for key {0:?}")]
    MissingTemplate(String),
    #[error("unfilled slot {0:?}")]
    UnfilledSlot(String),
    #[error("malformed placeholder in pattern {0:?}")]
    BadPattern(String),
    #[error("nothing to say: all response parts are empty")]
    EmptyResponse,
}

/// Communicative role of a template, used for interleaving checks and markup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActClass {
    Fact,
    Opinion,
    Experience,
    Question,
    Acknowledgement,
    Grounding,
}

impl FromStr for ActClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_string()))
            .map_err(|_| format!("unknown act class {s:?}"))
    }
}

impl fmt::Display for ActClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).map_err(|_| fmt::Error)?;
        f.write_str(v.as_str().unwrap_or_default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub dialog_state_key: String,
    pub pattern: String,
    pub act_class: ActClass,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Piece<'a> {
    Text(&'a str),
    Slot(&'a str),
}

fn valid_slot(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_pattern(pattern: &str) -> Result<Vec<Piece<'_>>, NlgError> {
    let mut pieces = Vec::new();
    let mut rest = pattern;
    while let Some(open) = rest.find(['{', '}']) {
        if rest.as_bytes()[open] == b'}' {
            return Err(NlgError::BadPattern(pattern.to_string()));
        }
        let close = rest[open..].find('}').ok_or_else(|| NlgError::BadPattern(pattern.to_string()))? + open;
        let name = &rest[open + 1..close];
        if !valid_slot(name) {
            return Err(NlgError::BadPattern(pattern.to_string()));
        }
        if open > 0 {
            pieces.push(Piece::Text(&rest[..open]));
        }
        pieces.push(Piece::Slot(name));
        rest = &rest[close + 1..];
    }
    if !rest.is_empty() {
        pieces.push(Piece::Text(rest));
    }
    Ok(pieces)
}

impl Template {
    /// Slot names in order of appearance.
    pub fn slots(&self) -> Vec<&str> {
        parse_pattern(&self.pattern)
            .map(|ps| ps.into_iter().filter_map(|p| if let Piece::Slot(s) = p { Some(s) } else { None }).collect())
            .unwrap_or_default()
    }
}

/// Substitute every `{slot}`; a missing binding is an error naming the slot.
pub fn fill_slots(template: &Template, bindings: &BTreeMap<String, String>) -> Result<String, NlgError> {
    let mut out = String::with_capacity(template.pattern.len());
    for piece in parse_pattern(&template.pattern)? {
        match piece {
            Piece::Text(t) => out.push_str(t),
            Piece::Slot(s) => out.push_str(bindings.get(s).ok_or_else(|| NlgError::UnfilledSlot(s.to_string()))?),
        }
    }
    Ok(out)
}

/// Recover the pattern from a filled string given the bindings used.
///
/// Returns `None` when the string was not produced from this template.
pub fn unfill_slots(template: &Template, filled: &str, bindings: &BTreeMap<String, String>) -> Option<String> {
    let mut rest = filled;
    for piece in parse_pattern(&template.pattern).ok()? {
        let expect = match piece {
            Piece::Text(t) => t,
            Piece::Slot(s) => bindings.get(s)?.as_str(),
        };
        rest = rest.strip_prefix(expect)?;
    }
    rest.is_empty().then(|| template.pattern.clone())
}

/// Join parts with single spaces, adding a period to parts that lack
/// terminal punctuation.
pub fn compose_response<S: AsRef<str>>(parts: &[S]) -> Result<String, NlgError> {
    let cleaned: Vec<String> = parts
        .iter()
        .map(|p| p.as_ref().split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|p| !p.is_empty())
        .map(|p| if p.ends_with(['.', '!', '?']) || p.ends_with("...") { p } else { p + "." })
        .collect();
    if cleaned.is_empty() {
        return Err(NlgError::EmptyResponse);
    }
    Ok(cleaned.join(" "))
}

/// Templates grouped by dialog-state key, in file order.
#[derive(Debug, Clone, Default)]
pub struct TemplateBank {
    by_key: BTreeMap<String, Vec<Template>>,
}

impl TemplateBank {
    /// Parse `key<TAB>id<TAB>act_class<TAB>pattern` rows.
    pub fn parse(source: &str, text: &str) -> Result<Self, NlgError> {
        let mut bank = TemplateBank::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let bad = |reason: String| NlgError::Malformed { file: source.into(), line: i + 1, reason };
            let cols: Vec<&str> = line.splitn(4, '\t').collect();
            if cols.len() != 4 {
                return Err(bad("expected key<TAB>id<TAB>act_class<TAB>pattern".into()));
            }
            let act_class: ActClass = cols[2].parse().map_err(bad)?;
            parse_pattern(cols[3]).map_err(|e| bad(e.to_string()))?;
            let t = Template {
                dialog_state_key: cols[0].trim().to_string(),
                id: cols[1].trim().to_string(),
                act_class,
                pattern: cols[3].trim().to_string(),
            };
            let group = bank.by_key.entry(t.dialog_state_key.clone()).or_default();
            if group.iter().any(|g| g.id == t.id) {
                return Err(bad(format!("duplicate id {:?} for key {:?}", t.id, t.dialog_state_key)));
            }
            group.push(t);
        }
        Ok(bank)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.by_key.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.by_key.keys().map(String::as_str)
    }

    pub fn templates(&self, key: &str) -> &[Template] {
        self.by_key.get(key).map(Vec::as_slice).unwrap_or_default()
    }

    /// Act classes used by a key's templates.
    pub fn classes(&self, key: &str) -> BTreeSet<ActClass> {
        self.templates(key).iter().map(|t| t.act_class).collect()
    }

    pub fn len(&self) -> usize {
        self.by_key.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_key.is_empty()
    }

    /// Uniform draw among templates not in `used`, resetting `used` once the
    /// key is exhausted. The chosen id is recorded in `used`.
    pub fn select_template(&self, key: &str, used: &mut BTreeSet<String>, seed: u64) -> Result<&Template, NlgError> {
        let group = self.by_key.get(key).ok_or_else(|| NlgError::MissingTemplate(key.to_string()))?;
        let mut fresh: Vec<&Template> = group.iter().filter(|t| !used.contains(&t.id)).collect();
        if fresh.is_empty() {
            used.clear();
            fresh = group.iter().collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let choice = fresh[rng.random_range(0..fresh.len())];
        used.insert(choice.id.clone());
        Ok(choice)
    }
}
