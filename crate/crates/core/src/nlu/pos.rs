use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::NluError;
use crate::text::parse_number_word;

/// Coarse part-of-speech tags (Universal Dependencies subset).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Noun,
    Propn,
    Verb,
    Aux,
    Adj,
    Adv,
    Det,
    Pron,
    Adp,
    Cconj,
    Sconj,
    Part,
    Num,
    Intj,
    X,
}

impl FromStr for PosTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.trim().to_ascii_uppercase()))
            .map_err(|_| format!("unknown POS tag {s:?}"))
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        f.write_str(&s)
    }
}

pub fn is_placeholder(word: &str) -> bool {
    let Some(pos) = word.find('_') else { return false };
    let (prefix, digits) = (&word[..pos], &word[pos + 1..]);
    !prefix.is_empty()
        && prefix.chars().all(|c| c.is_ascii_uppercase())
        && !digits.is_empty()
        && digits.chars().all(|c| c.is_ascii_digit())
}

const SUFFIXES: &[(&str, PosTag)] = &[
    ("ly", PosTag::Adv),
    ("ing", PosTag::Verb),
    ("ed", PosTag::Verb),
    ("ize", PosTag::Verb),
    ("ous", PosTag::Adj),
    ("ful", PosTag::Adj),
    ("ive", PosTag::Adj),
    ("able", PosTag::Adj),
    ("ible", PosTag::Adj),
    ("ical", PosTag::Adj),
    ("less", PosTag::Adj),
    ("ic", PosTag::Adj),
    ("tion", PosTag::Noun),
    ("sion", PosTag::Noun),
    ("ment", PosTag::Noun),
    ("ness", PosTag::Noun),
    ("ity", PosTag::Noun),
    ("er", PosTag::Noun),
];

/// Word → tag table with suffix fallbacks for unknown words.
#[derive(Debug, Clone, Default)]
pub struct PosLexicon {
    words: HashMap<String, PosTag>,
}

impl PosLexicon {
    /// Parse `word<TAB>TAG` lines; `#` starts a comment.
    pub fn parse(source: &str, text: &str) -> Result<Self, NluError> {
        let mut words = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| NluError::Config { file: source.to_string(), line: i + 1, reason };
            let (word, tag) = line.split_once('\t').ok_or_else(|| bad("expected word<TAB>TAG".into()))?;
            let tag: PosTag = tag.parse().map_err(bad)?;
            words.insert(word.trim().to_lowercase(), tag);
        }
        Ok(PosLexicon { words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Whether the word is a recognised English token (lexicon, number or placeholder).
    pub fn knows(&self, word: &str) -> bool {
        self.words.contains_key(word) || parse_number_word(word).is_some() || is_placeholder(word)
    }

    pub fn tag(&self, word: &str) -> PosTag {
        if is_placeholder(word) {
            return PosTag::Propn;
        }
        if let Some(tag) = self.words.get(word) {
            return *tag;
        }
        if parse_number_word(word).is_some() {
            return PosTag::Num;
        }
        if let Some((stem, _)) = word.split_once('\'') {
            // Unknown contraction: tag by its host word.
            if let Some(tag) = self.words.get(stem) {
                return *tag;
            }
        }
        SUFFIXES
            .iter()
            .find(|(suffix, _)| word.len() > suffix.len() + 2 && word.ends_with(suffix))
            .map_or(PosTag::Noun, |(_, tag)| *tag)
    }

    pub fn tag_all(&self, words: &[&str]) -> Vec<PosTag> {
        words.iter().map(|w| self.tag(w)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> PosLexicon {
        PosLexicon::parse("t", "the\tDET\nmusic\tNOUN\nwas\tAUX\ni\tPRON\n").unwrap()
    }

    #[test]
    fn lookups_and_fallbacks() {
        let lex = lexicon();
        assert_eq!(lex.tag("the"), PosTag::Det);
        assert_eq!(lex.tag("ENT_3"), PosTag::Propn);
        assert_eq!(lex.tag("ten"), PosTag::Num);
        assert_eq!(lex.tag("quickly"), PosTag::Adv);
        assert_eq!(lex.tag("zorblax"), PosTag::Noun);
        assert_eq!(lex.tag("i'd"), PosTag::Pron);
    }

    #[test]
    fn placeholder_shape() {
        assert!(is_placeholder("ENT_0"));
        assert!(is_placeholder("ENTX_12"));
        assert!(!is_placeholder("ent_0"));
        assert!(!is_placeholder("ENT_"));
        assert!(!is_placeholder("_1"));
    }

    #[test]
    fn bad_tag_reports_line() {
        let err = PosLexicon::parse("lex.tsv", "a\tDET\nb\tWHAT\n").unwrap_err();
        assert!(err.to_string().contains("lex.tsv:2"));
    }

    #[test]
    fn tag_round_trip() {
        assert_eq!("cconj".parse::<PosTag>().unwrap(), PosTag::Cconj);
        assert_eq!(PosTag::Propn.to_string(), "PROPN");
    }
}
