use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::EntityType;
use crate::text::is_stopword;

/// One masked entity occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskedEntity {
    /// Exact original substring.
    pub surface: String,
    /// Gazetteer phrase it matched.
    pub canonical: String,
    pub entity_type: EntityType,
    pub domain: String,
}

/// Placeholder → entity map produced by [`mask_entities`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskTable {
    pub placeholders: BTreeMap<String, MaskedEntity>,
}

impl MaskTable {
    pub fn get(&self, placeholder: &str) -> Option<&MaskedEntity> {
        self.placeholders.get(placeholder)
    }

    pub fn is_empty(&self) -> bool {
        self.placeholders.is_empty()
    }

    pub fn len(&self) -> usize {
        self.placeholders.len()
    }

    /// Replace placeholder tokens by their surfaces.
    pub fn unmask(&self, masked: &str) -> String {
        unmask(masked, self)
    }

    /// Unmask one token, yielding the token itself when it is not a placeholder.
    pub fn restore<'a>(&'a self, token: &'a str) -> &'a str {
        self.placeholders.get(token).map_or(token, |e| e.surface.as_str())
    }
}

#[derive(Debug, Clone)]
struct Pattern {
    words: Vec<String>,
    canonical: String,
    domain: String,
}

/// Longest-match matcher over gazetteer phrases.
#[derive(Debug, Clone, Default)]
pub struct EntityMatcher {
    by_first: HashMap<String, Vec<Pattern>>,
    domains: HashMap<String, String>,
}

impl EntityMatcher {
    /// Phrases made only of stopwords ("up", "her") are skipped: they would
    /// mask ordinary function words.
    pub fn new<I, P, D>(entries: I) -> Self
    where
        I: IntoIterator<Item = (P, D)>,
        P: AsRef<str>,
        D: AsRef<str>,
    {
        let mut by_first: HashMap<String, Vec<Pattern>> = HashMap::new();
        let mut domains = HashMap::new();
        for (phrase, domain) in entries {
            let words: Vec<String> = phrase.as_ref().split_whitespace().map(str::to_lowercase).collect();
            if words.is_empty() || words.iter().all(|w| is_stopword(w)) {
                continue;
            }
            let list = by_first.entry(words[0].clone()).or_default();
            if list.iter().any(|p| p.words == words) {
                continue;
            }
            let canonical = words.join(" ");
            domains.insert(canonical.clone(), domain.as_ref().to_string());
            list.push(Pattern { canonical, words, domain: domain.as_ref().to_string() });
        }
        for list in by_first.values_mut() {
            list.sort_by(|a, b| b.words.len().cmp(&a.words.len()).then(a.canonical.cmp(&b.canonical)));
        }
        EntityMatcher { by_first, domains }
    }

    pub fn domain_of(&self, canonical: &str) -> Option<&str> {
        self.domains.get(canonical).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_first.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_first.is_empty()
    }

    fn longest_at(&self, tokens: &[(usize, usize, String)], i: usize) -> Option<(&Pattern, usize)> {
        let candidates = self.by_first.get(&tokens[i].2)?;
        candidates.iter().find_map(|p| {
            let n = p.words.len();
            (i + n <= tokens.len() && tokens[i..i + n].iter().zip(&p.words).all(|(t, w)| t.2 == *w)).then_some((p, n))
        })
    }
}

/// Whitespace tokens with byte offsets and lowercase form.
fn spanned_tokens(text: &str) -> Vec<(usize, usize, String)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, i, text[s..i].to_lowercase()));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, text.len(), text[s..].to_lowercase()));
    }
    out
}

fn placeholder_prefix(text: &str) -> String {
    let mut prefix = String::from("ENT");
    while text.contains(&format!("{prefix}_")) {
        prefix.push('X');
    }
    prefix
}

/// Replace known entity phrases by atomic placeholders `ENT_0`, `ENT_1`, ...
///
/// Matching is case-insensitive over whole whitespace tokens and prefers
/// the longest phrase at each position. The original text is recovered
/// exactly by [`unmask`].
pub fn mask_entities(text: &str, matcher: &EntityMatcher) -> (String, MaskTable) {
    let tokens = spanned_tokens(text);
    let prefix = placeholder_prefix(text);
    let mut table = MaskTable::default();
    let mut out = String::with_capacity(text.len());
    let mut copied = 0;
    let mut i = 0;
    while i < tokens.len() {
        match matcher.longest_at(&tokens, i) {
            Some((pattern, n)) => {
                let (start, end) = (tokens[i].0, tokens[i + n - 1].1);
                let id = format!("{prefix}_{}", table.placeholders.len());
                out.push_str(&text[copied..start]);
                out.push_str(&id);
                copied = end;
                table.placeholders.insert(
                    id,
                    MaskedEntity {
                        surface: text[start..end].to_string(),
                        canonical: pattern.canonical.clone(),
                        entity_type: EntityType::from_domain(&pattern.domain),
                        domain: pattern.domain.clone(),
                    },
                );
                i += n;
            }
            None => i += 1,
        }
    }
    out.push_str(&text[copied..]);
    (out, table)
}

/// Inverse of [`mask_entities`].
pub fn unmask(masked: &str, table: &MaskTable) -> String {
    if table.is_empty() {
        return masked.to_string();
    }
    let mut out = String::with_capacity(masked.len());
    let mut copied = 0;
    for (start, end, _) in spanned_tokens(masked) {
        if let Some(entity) = table.placeholders.get(&masked[start..end]) {
            out.push_str(&masked[copied..start]);
            out.push_str(&entity.surface);
            copied = end;
        }
    }
    out.push_str(&masked[copied..]);
    out
}
