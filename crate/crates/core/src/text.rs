//! Small text utilities shared by the pipeline stages.

use std::collections::HashSet;
use std::sync::LazyLock;

/// Function words ignored for phonetic content matching and persona lookup.
pub static STOPWORDS: LazyLock<HashSet<&'static str>> = LazyLock::new(|| {
    [
        "a", "an", "the", "is", "are", "was", "were", "be", "been", "am", "of", "in", "on", "at", "to", "for",
        "with", "and", "or", "but", "do", "does", "did", "you", "your", "yours", "you're", "i", "me", "my", "i'm",
        "it", "its", "it's", "that", "that's", "this", "these", "those", "what", "what's", "whats", "who",
        "who's", "how", "when", "where", "which", "there", "here", "so", "as", "by", "from", "up", "about",
        "into", "than", "then", "too", "very", "can", "could", "would", "should", "will", "have", "has", "had",
        "we", "they", "he", "she", "him", "her", "them", "our", "their", "his", "us", "any", "some", "if",
        "just", "really", "tell", "ever", "kind", "let", "let's", "lets",
    ]
    .into_iter()
    .collect()
});

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.contains(word)
}

/// Lowercase, drop punctuation other than apostrophes, collapse whitespace.
pub fn normalize(text: &str) -> String {
    let cleaned: String = text
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '\'' || c == '_' {
                c.to_ascii_lowercase()
            } else if c == '’' {
                '\''
            } else {
                ' '
            }
        })
        .collect();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Whitespace tokenization of already-normalized text.
pub fn words(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// Estimated syllable count: vowel groups per word, at least one per word.
pub fn estimate_syllables(text: &str) -> usize {
    text.split_whitespace()
        .map(|w| {
            let mut groups = 0;
            let mut in_group = false;
            for c in w.chars() {
                let v = matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
                if v && !in_group {
                    groups += 1;
                }
                in_group = v;
            }
            groups.max(1)
        })
        .sum()
}

const UNITS: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];
const TENS: [&str; 10] = ["", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];

/// Parse a spoken or digit number word ("ten", "10", "hundred").
pub fn parse_number_word(word: &str) -> Option<u32> {
    if let Ok(n) = word.parse::<u32>() {
        return Some(n);
    }
    if let Some(i) = UNITS.iter().position(|u| *u == word) {
        return Some(i as u32);
    }
    if let Some(i) = TENS.iter().position(|t| !t.is_empty() && *t == word) {
        return Some(10 * i as u32);
    }
    if word == "hundred" {
        return Some(100);
    }
    None
}

/// First number mentioned in a token sequence ("twenty five" → 25).
pub fn first_number(tokens: &[&str]) -> Option<u32> {
    for (i, tok) in tokens.iter().enumerate() {
        if let Some(n) = parse_number_word(tok) {
            if (20..100).contains(&n) && n % 10 == 0 {
                if let Some(unit) = tokens.get(i + 1).and_then(|t| parse_number_word(t)) {
                    if (1..10).contains(&unit) {
                        return Some(n + unit);
                    }
                }
            }
            return Some(n);
        }
    }
    None
}

/// Capitalize each whitespace-separated word.
pub fn title_case(text: &str) -> String {
    text.split_whitespace()
        .map(|w| {
            let mut cs = w.chars();
            match cs.next() {
                Some(f) => f.to_uppercase().collect::<String>() + cs.as_str(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
