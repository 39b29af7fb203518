use std::sync::Arc;

use super::pos::{PosLexicon, PosTag};

/// Rule-based noun-phrase chunker.
///
/// Grammar, matched greedily left to right:
///
/// ```text
/// NP := DET? (ADJ | NUM)* (NOUN | PROPN)+
///     | PRON
/// ```
///
/// Entity placeholders tag as PROPN, so a masked entity is always a whole
/// phrase head and never split.
#[derive(Debug, Clone)]
pub struct Chunker {
    lexicon: Arc<PosLexicon>,
}

impl Chunker {
    pub fn new(lexicon: Arc<PosLexicon>) -> Self {
        Chunker { lexicon }
    }

    pub fn lexicon(&self) -> &PosLexicon {
        &self.lexicon
    }

    /// Half-open token spans of maximal noun phrases.
    pub fn chunk_spans(&self, words: &[&str]) -> Vec<(usize, usize)> {
        let tags = self.lexicon.tag_all(words);
        chunk_tags(&tags)
    }

    /// Noun phrases as strings.
    pub fn chunk_noun_phrases(&self, words: &[&str]) -> Vec<String> {
        self.chunk_spans(words).into_iter().map(|(s, e)| words[s..e].join(" ")).collect()
    }
}

fn is_head(tag: PosTag) -> bool {
    matches!(tag, PosTag::Noun | PosTag::Propn)
}

fn match_np(tags: &[PosTag], start: usize) -> Option<usize> {
    if tags[start] == PosTag::Pron {
        return Some(start + 1);
    }
    let mut i = start;
    if tags[i] == PosTag::Det {
        i += 1;
    }
    while i < tags.len() && matches!(tags[i], PosTag::Adj | PosTag::Num) {
        i += 1;
    }
    let head_start = i;
    while i < tags.len() && is_head(tags[i]) {
        i += 1;
    }
    (i > head_start).then_some(i)
}

pub(crate) fn chunk_tags(tags: &[PosTag]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        match match_np(tags, i) {
            Some(end) => {
                spans.push((i, end));
                i = end;
            }
            None => i += 1,
        }
    }
    spans
}
