//! Pronoun resolution by entity ranking.
//!
//! Each candidate antecedent (a distinct canonical entity seen earlier in
//! this turn or in previous turns) is scored with
//!
//! ```text
//! rank = 2.0 * type_match + 1.0 / (1 + turns_since) + 0.5 * ln(1 + frequency)
//! ```
//!
//! and the pronoun is replaced by the best type-compatible candidate. Ties go
//! to the most recent mention, then to the lexicographically smaller name.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::mask::MaskTable;
use super::{EntityMention, EntityType, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Compat {
    Person,
    NonPerson,
    Any,
}

impl Compat {
    fn accepts(self, t: EntityType) -> bool {
        match self {
            Compat::Person => t == EntityType::Person,
            Compat::NonPerson => t != EntityType::Person,
            Compat::Any => true,
        }
    }
}

/// The closed pronoun set, longest forms first.
const PRONOUNS: &[(&[&str], Compat)] = &[
    (&["that", "one"], Compat::NonPerson),
    (&["this", "one"], Compat::NonPerson),
    (&["he"], Compat::Person),
    (&["him"], Compat::Person),
    (&["his"], Compat::Person),
    (&["she"], Compat::Person),
    (&["her"], Compat::Person),
    (&["it"], Compat::NonPerson),
    (&["they"], Compat::Any),
    (&["them"], Compat::Any),
];

pub fn is_closed_pronoun(word: &str) -> bool {
    PRONOUNS.iter().any(|(ws, _)| ws.len() == 1 && ws[0] == word)
}

pub fn rank_score(type_match: bool, turns_since: u32, frequency: usize) -> f64 {
    2.0 * f64::from(u8::from(type_match)) + 1.0 / (1.0 + f64::from(turns_since)) + 0.5 * (1.0 + frequency as f64).ln()
}

/// One pronoun replacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub segment_index: usize,
    /// First utterance token of the pronoun.
    pub token_index: usize,
    /// Number of tokens replaced (2 for "that one").
    pub width: usize,
    pub pronoun: String,
    pub replacement: String,
    pub canonical: String,
    pub rank: f64,
}

struct Candidate<'a> {
    mention: &'a EntityMention,
    frequency: usize,
}

fn best_antecedent<'a>(mentions: &'a [EntityMention], compat: Compat, turn_index: u32) -> Option<(&'a EntityMention, f64)> {
    let mut by_canonical: BTreeMap<&str, Candidate<'a>> = BTreeMap::new();
    for m in mentions {
        let c = by_canonical.entry(&m.canonical).or_insert(Candidate { mention: m, frequency: 0 });
        c.frequency += 1;
        if (m.turn_index, m.segment_index) >= (c.mention.turn_index, c.mention.segment_index) {
            c.mention = m;
        }
    }
    by_canonical
        .values()
        .filter(|c| compat.accepts(c.mention.entity_type))
        .map(|c| {
            let since = turn_index.saturating_sub(c.mention.turn_index);
            (c.mention, rank_score(true, since, c.frequency))
        })
        .max_by(|(a, ra), (b, rb)| {
            ra.total_cmp(rb)
                .then((a.turn_index, a.segment_index).cmp(&(b.turn_index, b.segment_index)))
                .then(b.canonical.cmp(&a.canonical))
        })
}

fn match_pronoun(tokens: &[&str], i: usize, end: usize) -> Option<(usize, Compat)> {
    PRONOUNS.iter().find_map(|(ws, compat)| {
        let n = ws.len();
        (i + n <= end && tokens[i..i + n] == **ws).then_some((n, *compat))
    })
}

/// Resolve pronouns in masked utterance tokens, segment by segment.
///
/// `context` holds mentions from earlier turns. Returns the resolutions and
/// every mention of this turn (entity placeholders and resolved pronouns) in
/// order.
pub fn resolve_coreference(
    tokens: &[&str],
    segments: &[Segment],
    table: &MaskTable,
    context: &[EntityMention],
    turn_index: u32,
) -> (Vec<Resolution>, Vec<EntityMention>) {
    let mut running: Vec<EntityMention> = context.to_vec();
    let history = running.len();
    let mut resolutions = Vec::new();
    for seg in segments {
        let (start, end) = seg.token_span;
        let mut i = start;
        while i < end {
            if let Some(entity) = table.get(tokens[i]) {
                running.push(EntityMention {
                    surface: entity.surface.clone(),
                    canonical: entity.canonical.clone(),
                    entity_type: entity.entity_type,
                    turn_index,
                    segment_index: seg.index,
                    rank_score: 0.0,
                });
                i += 1;
                continue;
            }
            let Some((width, compat)) = match_pronoun(tokens, i, end) else {
                i += 1;
                continue;
            };
            if let Some((antecedent, rank)) = best_antecedent(&running, compat, turn_index) {
                let pronoun = tokens[i..i + width].join(" ");
                let replacement =
                    if pronoun == "his" { format!("{}'s", antecedent.canonical) } else { antecedent.canonical.clone() };
                let mention = EntityMention {
                    surface: pronoun.clone(),
                    canonical: antecedent.canonical.clone(),
                    entity_type: antecedent.entity_type,
                    turn_index,
                    segment_index: seg.index,
                    rank_score: rank,
                };
                resolutions.push(Resolution {
                    segment_index: seg.index,
                    token_index: i,
                    width,
                    pronoun,
                    replacement,
                    canonical: antecedent.canonical.clone(),
                    rank,
                });
                running.push(mention);
            }
            i += width;
        }
    }
    let mentions = running.split_off(history);
    (resolutions, mentions)
}

/// Surface text of a token range with placeholders restored and resolved
/// pronouns substituted.
pub fn render_span(tokens: &[&str], span: (usize, usize), table: &MaskTable, resolutions: &[Resolution]) -> String {
    let mut out: Vec<&str> = Vec::new();
    let mut i = span.0;
    while i < span.1 {
        if let Some(r) = resolutions.iter().find(|r| r.token_index == i) {
            out.push(&r.replacement);
            i += r.width;
        } else {
            out.push(table.restore(tokens[i]));
            i += 1;
        }
    }
    out.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mention(canonical: &str, t: EntityType, turn: u32, seg: usize) -> EntityMention {
        EntityMention {
            surface: canonical.into(),
            canonical: canonical.into(),
            entity_type: t,
            turn_index: turn,
            segment_index: seg,
            rank_score: 0.0,
        }
    }

    fn one_segment(text: &str) -> (Vec<&str>, Vec<Segment>) {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let seg = Segment { index: 0, text: text.into(), token_span: (0, tokens.len()) };
        (tokens, vec![seg])
    }

    #[test]
    fn him_binds_to_person() {
        let (tokens, segs) = one_segment("i really like him");
        let ctx = [mention("bradley cooper", EntityType::Person, 4, 1), mention("a star is born", EntityType::Title, 3, 4)];
        let (res, mentions) = resolve_coreference(&tokens, &segs, &MaskTable::default(), &ctx, 4);
        assert_eq!(res.len(), 1);
        assert_eq!(render_span(&tokens, (0, 4), &MaskTable::default(), &res), "i really like bradley cooper");
        assert_eq!(mentions.len(), 1);
    }

    #[test]
    fn type_mismatch_leaves_pronoun() {
        let (tokens, segs) = one_segment("i really like it");
        let ctx = [mention("bradley cooper", EntityType::Person, 0, 0)];
        let (res, _) = resolve_coreference(&tokens, &segs, &MaskTable::default(), &ctx, 1);
        assert!(res.is_empty());
    }

    #[test]
    fn possessive_and_two_token_pronoun() {
        let (tokens, segs) = one_segment("his voice and that one");
        let ctx = [mention("lady gaga", EntityType::Person, 0, 0), mention("shallow", EntityType::Other, 0, 0)];
        let (res, _) = resolve_coreference(&tokens, &segs, &MaskTable::default(), &ctx, 0);
        assert_eq!(render_span(&tokens, (0, 5), &MaskTable::default(), &res), "lady gaga's voice and shallow");
    }

    #[test]
    fn rank_formula_values() {
        assert!((rank_score(true, 0, 1) - (3.0 + 0.5 * 2f64.ln())).abs() < 1e-12);
        assert!((rank_score(false, 1, 0) - 0.5).abs() < 1e-12);
    }
}
