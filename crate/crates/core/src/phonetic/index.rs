use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{encode_double_metaphone, PhoneticCode, PhoneticError};
use crate::text::is_stopword;

/// A canonical knowledge-base phrase and its domain tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexEntry {
    pub phrase: String,
    pub domain: String,
}

/// An indexed phrase with the codes of its content words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedPhrase {
    pub entry: IndexEntry,
    pub words: Vec<String>,
    /// Content words (stopwords removed) paired with their codes.
    pub content: Vec<(String, PhoneticCode)>,
}

impl IndexedPhrase {
    pub fn whole_key(&self) -> String {
        whole_phrase_key(self.content.iter().map(|(_, c)| c))
    }
}

/// Word-wise concatenation of primary codes, plural-insensitive.
pub(crate) fn whole_phrase_key<'a>(codes: impl Iterator<Item = &'a PhoneticCode>) -> String {
    codes.map(|c| strip_plural(&c.primary)).collect::<Vec<_>>().join("-")
}

/// Drop one trailing `S` so "stars" and "star" share a key.
pub(crate) fn strip_plural(code: &str) -> &str {
    if code.len() > 1 && code.ends_with('S') {
        &code[..code.len() - 1]
    } else {
        code
    }
}

/// Content words of a phrase: stopwords removed, unless that would leave
/// nothing (single-word titles like "up").
pub(crate) fn content_words<'a>(words: &[&'a str]) -> Vec<(usize, &'a str, PhoneticCode)> {
    let encodable: Vec<(usize, &str, PhoneticCode)> = words
        .iter()
        .enumerate()
        .filter_map(|(i, w)| encode_double_metaphone(w).ok().map(|c| (i, *w, c)))
        .collect();
    let content: Vec<_> = encodable.iter().filter(|(_, w, _)| !is_stopword(w)).cloned().collect();
    if content.is_empty() {
        encodable
    } else {
        content
    }
}

/// Immutable code → phrase index over one or more gazetteers.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PhoneticIndex {
    entries: BTreeMap<String, BTreeSet<IndexEntry>>,
    phrases: BTreeMap<IndexEntry, IndexedPhrase>,
    max_ngram: usize,
}

impl PhoneticIndex {
    /// Build an index. Duplicate entries collapse; an empty list gives an
    /// empty index.
    pub fn build<I, P, D>(entries: I) -> Self
    where
        I: IntoIterator<Item = (P, D)>,
        P: AsRef<str>,
        D: AsRef<str>,
    {
        let mut index = PhoneticIndex::default();
        for (phrase, domain) in entries {
            let phrase = phrase.as_ref().split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
            if phrase.is_empty() {
                continue;
            }
            let entry = IndexEntry { phrase: phrase.clone(), domain: domain.as_ref().trim().to_string() };
            if index.phrases.contains_key(&entry) {
                continue;
            }
            let words: Vec<&str> = phrase.split_whitespace().collect();
            let content = content_words(&words);
            let indexed = IndexedPhrase {
                entry: entry.clone(),
                words: words.iter().map(|w| w.to_string()).collect(),
                content: content.iter().map(|(_, w, c)| (w.to_string(), c.clone())).collect(),
            };
            index.max_ngram = index.max_ngram.max(words.len());
            for (_, _, code) in &content {
                for key in [code.primary.as_str(), code.secondary.as_str()] {
                    index.insert_key(key, &entry);
                    index.insert_key(strip_plural(key), &entry);
                }
            }
            if !content.is_empty() {
                let whole = indexed.whole_key();
                index.insert_key(&whole, &entry);
            }
            index.phrases.insert(entry, indexed);
        }
        index
    }

    fn insert_key(&mut self, key: &str, entry: &IndexEntry) {
        if key.is_empty() {
            return;
        }
        self.entries.entry(key.to_string()).or_default().insert(entry.clone());
    }

    /// Phrases filed under an exact code key.
    pub fn lookup(&self, code: &str) -> Vec<&IndexEntry> {
        self.entries.get(code).map(|s| s.iter().collect()).unwrap_or_default()
    }

    /// Phrases sharing any code (primary, secondary, plural-stripped) with a word.
    pub fn candidates_for_code(&self, code: &PhoneticCode) -> BTreeSet<&IndexEntry> {
        let mut out = BTreeSet::new();
        for key in [
            code.primary.as_str(),
            code.secondary.as_str(),
            strip_plural(&code.primary),
            strip_plural(&code.secondary),
        ] {
            if let Some(set) = self.entries.get(key) {
                out.extend(set.iter());
            }
        }
        out
    }

    pub fn phrase(&self, entry: &IndexEntry) -> Option<&IndexedPhrase> {
        self.phrases.get(entry)
    }

    pub fn phrases(&self) -> impl Iterator<Item = &IndexedPhrase> {
        self.phrases.values()
    }

    pub fn max_ngram(&self) -> usize {
        self.max_ngram
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn code_count(&self) -> usize {
        self.entries.len()
    }
}

/// Parse gazetteer text: `phrase<TAB>domain` per line, `#` comments.
pub fn parse_gazetteer(source: &str, text: &str) -> Result<Vec<(String, String)>, PhoneticError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |reason: &str| PhoneticError::Gazetteer {
            file: source.to_string(),
            line: lineno + 1,
            reason: reason.to_string(),
        };
        let (phrase, domain) = line.split_once('\t').ok_or_else(|| err("expected phrase<TAB>domain"))?;
        let phrase = phrase.trim().to_lowercase();
        let domain = domain.trim();
        if phrase.is_empty() || domain.is_empty() || domain.contains('\t') {
            return Err(err("empty phrase or domain"));
        }
        out.push((phrase, domain.to_string()));
    }
    Ok(out)
}

pub fn load_gazetteer(path: &Path) -> Result<Vec<(String, String)>, PhoneticError> {
    let text = std::fs::read_to_string(path)?;
    parse_gazetteer(&path.display().to_string(), &text)
}
