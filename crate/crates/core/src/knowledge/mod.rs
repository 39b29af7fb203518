//! Local persona backstory, fact store and noun-phrase descriptions.

mod client;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{KnowledgeClient, LocalClient, TimeoutClient, DEFAULT_CLIENT_TIMEOUT};

use crate::nlu::EntityType;
use crate::text::{is_stopword, normalize};

/// Persona matches need at least this token-set overlap (Jaccard).
pub const PERSONA_THRESHOLD: f64 = 0.6;

const WHY_FOLLOW_UPS: &[&str] = &["why", "why is that", "why's that", "how come", "why do you say that"];

#[derive(Debug, Error)]
pub enum KnowledgeError {
    #[error("{file}:{line}: {reason}")]
    Malformed { file: String, line: usize, reason: String },
    #[error("pattern {pattern:?} appears in persona entries {first} and {second}")]
    DuplicatePattern { pattern: String, first: String, second: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonaEntry {
    pub id: String,
    pub question_patterns: Vec<String>,
    pub response: String,
    pub reasoning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactRecord {
    pub subject: String,
    pub predicate: String,
    pub object_text: String,
    pub source_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Description {
    pub entity_type: EntityType,
    pub domain: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackstoryAnswer {
    pub persona_id: String,
    pub text: String,
    /// True when this is the stored reasoning for a "why" follow-up.
    pub is_reasoning: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreCounts {
    pub persona: usize,
    pub facts: usize,
    pub gazetteer_phrases: usize,
}

/// Immutable knowledge store.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeStore {
    persona: Vec<PersonaEntry>,
    /// (entry index, content tokens) for every pattern.
    patterns: Vec<(usize, BTreeSet<String>)>,
    facts: Vec<FactRecord>,
    by_subject: HashMap<String, Vec<usize>>,
    gazetteers: BTreeMap<String, Vec<(String, String)>>,
    domains: HashMap<String, String>,
}

fn content_tokens(text: &str) -> BTreeSet<String> {
    let norm = normalize(text);
    let all: BTreeSet<String> = norm.split_whitespace().map(str::to_string).collect();
    let content: BTreeSet<String> = all.iter().filter(|w| !is_stopword(w)).cloned().collect();
    if content.is_empty() {
        all
    } else {
        content
    }
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.union(b).count();
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r'))).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    })
}

pub fn parse_persona(source: &str, text: &str) -> Result<Vec<PersonaEntry>, KnowledgeError> {
    let mut out = Vec::new();
    for (line, row) in data_lines(text) {
        let bad = |reason: &str| KnowledgeError::Malformed { file: source.into(), line, reason: reason.into() };
        let cols: Vec<&str> = row.split('\t').collect();
        if !(3..=4).contains(&cols.len()) {
            return Err(bad("expected id<TAB>patterns<TAB>response[<TAB>reasoning]"));
        }
        let patterns: Vec<String> =
            cols[1].split('|').map(normalize).filter(|p| !p.is_empty()).collect();
        if cols[0].trim().is_empty() || patterns.is_empty() || cols[2].trim().is_empty() {
            return Err(bad("id, patterns and response must be non-empty"));
        }
        let reasoning = cols.get(3).map(|r| r.trim()).filter(|r| !r.is_empty()).map(str::to_string);
        out.push(PersonaEntry {
            id: cols[0].trim().to_string(),
            question_patterns: patterns,
            response: cols[2].trim().to_string(),
            reasoning,
        });
    }
    Ok(out)
}

pub fn parse_facts(source: &str, text: &str) -> Result<Vec<FactRecord>, KnowledgeError> {
    let mut out = Vec::new();
    for (line, row) in data_lines(text) {
        let cols: Vec<&str> = row.split('\t').collect();
        if cols.len() != 4 || cols[0].trim().is_empty() || cols[1].trim().is_empty() {
            return Err(KnowledgeError::Malformed {
                file: source.into(),
                line,
                reason: "expected subject<TAB>predicate<TAB>object<TAB>source".into(),
            });
        }
        out.push(FactRecord {
            subject: normalize(cols[0]),
            predicate: cols[1].trim().to_string(),
            object_text: cols[2].trim().to_string(),
            source_tag: cols[3].trim().to_string(),
        });
    }
    Ok(out)
}

impl KnowledgeStore {
    /// Build from parsed pieces. `gazetteers` maps a file name to its rows.
    pub fn new(
        persona: Vec<PersonaEntry>,
        facts: Vec<FactRecord>,
        gazetteers: BTreeMap<String, Vec<(String, String)>>,
    ) -> Result<Self, KnowledgeError> {
        let mut seen: HashMap<String, usize> = HashMap::new();
        let mut patterns = Vec::new();
        for (i, entry) in persona.iter().enumerate() {
            for p in &entry.question_patterns {
                if let Some(&j) = seen.get(p) {
                    return Err(KnowledgeError::DuplicatePattern {
                        pattern: p.clone(),
                        first: persona[j].id.clone(),
                        second: entry.id.clone(),
                    });
                }
                seen.insert(p.clone(), i);
                patterns.push((i, content_tokens(p)));
            }
        }
        let mut by_subject: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, f) in facts.iter().enumerate() {
            by_subject.entry(f.subject.clone()).or_default().push(i);
        }
        let mut domains = HashMap::new();
        for rows in gazetteers.values() {
            for (phrase, domain) in rows {
                domains.entry(phrase.clone()).or_insert_with(|| domain.clone());
            }
        }
        Ok(KnowledgeStore { persona, patterns, facts, by_subject, gazetteers, domains })
    }

    /// Load `persona.tsv`, `facts.tsv` and `gazetteers/*.tsv` from a directory.
    /// Missing files count as empty.
    pub fn ingest_dir(dir: &Path) -> Result<Self, KnowledgeError> {
        let read = |name: &str| -> Result<String, KnowledgeError> {
            let path = dir.join(name);
            if path.exists() {
                Ok(std::fs::read_to_string(path)?)
            } else {
                Ok(String::new())
            }
        };
        let persona = parse_persona(&dir.join("persona.tsv").display().to_string(), &read("persona.tsv")?)?;
        let facts = parse_facts(&dir.join("facts.tsv").display().to_string(), &read("facts.tsv")?)?;
        let mut gazetteers = BTreeMap::new();
        let gdir = dir.join("gazetteers");
        if gdir.is_dir() {
            let mut paths: Vec<_> = std::fs::read_dir(&gdir)?
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
                .collect();
            paths.sort();
            for path in paths {
                let rows = crate::phonetic::load_gazetteer(&path).map_err(|e| KnowledgeError::Malformed {
                    file: path.display().to_string(),
                    line: 0,
                    reason: e.to_string(),
                })?;
                let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                gazetteers.insert(name, rows);
            }
        }
        let store = KnowledgeStore::new(persona, facts, gazetteers)?;
        log::info!("knowledge store loaded from {}: {:?}", dir.display(), store.counts());
        Ok(store)
    }

    pub fn counts(&self) -> StoreCounts {
        StoreCounts {
            persona: self.persona.len(),
            facts: self.facts.len(),
            gazetteer_phrases: self.gazetteers.values().map(Vec::len).sum(),
        }
    }

    pub fn persona(&self) -> &[PersonaEntry] {
        &self.persona
    }

    pub fn persona_by_id(&self, id: &str) -> Option<&PersonaEntry> {
        self.persona.iter().find(|p| p.id == id)
    }

    pub fn gazetteers(&self) -> &BTreeMap<String, Vec<(String, String)>> {
        &self.gazetteers
    }

    pub fn gazetteer_entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.gazetteers.values().flatten().map(|(p, d)| (p.as_str(), d.as_str()))
    }

    pub fn domain_of(&self, phrase: &str) -> Option<&str> {
        self.domains.get(phrase).map(String::as_str)
    }

    /// Answer a question about the persona, or give the reasoning behind the
    /// previous answer on a bare "why".
    pub fn query_backstory(&self, question: &str, last_persona_id: Option<&str>) -> Option<BackstoryAnswer> {
        let norm = normalize(question);
        if WHY_FOLLOW_UPS.contains(&norm.as_str()) {
            let entry = self.persona_by_id(last_persona_id?)?;
            return entry.reasoning.as_ref().map(|r| BackstoryAnswer {
                persona_id: entry.id.clone(),
                text: r.clone(),
                is_reasoning: true,
            });
        }
        let query = content_tokens(&norm);
        if query.is_empty() {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for (entry, tokens) in &self.patterns {
            let score = jaccard(&query, tokens);
            if score >= PERSONA_THRESHOLD && best.is_none_or(|(_, b)| score > b) {
                best = Some((*entry, score));
            }
        }
        best.map(|(i, _)| BackstoryAnswer {
            persona_id: self.persona[i].id.clone(),
            text: self.persona[i].response.clone(),
            is_reasoning: false,
        })
    }

    /// Facts about a subject in file order, optionally filtered by predicate.
    pub fn query_facts(&self, subject: &str, predicate_hint: Option<&str>) -> Vec<&FactRecord> {
        self.by_subject
            .get(&normalize(subject))
            .into_iter()
            .flatten()
            .map(|&i| &self.facts[i])
            .filter(|f| predicate_hint.is_none_or(|p| f.predicate == p))
            .collect()
    }

    /// One-line description of a noun phrase from the gazetteers and facts.
    pub fn describe_noun_phrase(&self, np: &str) -> Option<Description> {
        let norm = normalize(np);
        let mut keys = vec![norm.clone()];
        for det in ["the ", "a ", "an "] {
            if let Some(rest) = norm.strip_prefix(det) {
                keys.push(rest.to_string());
            }
        }
        keys.into_iter().find_map(|key| {
            let text = self.query_facts(&key, Some("description")).first().map(|f| f.object_text.clone())?;
            let domain = self.domain_of(&key).map(str::to_string);
            let entity_type = domain.as_deref().map_or(EntityType::Other, EntityType::from_domain);
            Some(Description { entity_type, domain, text })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PERSONA: &str = "jeopardy\tdo you like jeopardy\tSure I like it.\tBecause quizzes are fun.\n\
                           color\twhat's your favorite color|what color do you like best\tTeal.\n";

    fn store() -> KnowledgeStore {
        let facts = "Bradley Cooper\tdirectorial_debut\tHis first film as director.\tsample\n\
                     a star is born\tdescription\t2018 musical drama film.\tsample\n";
        let mut g = BTreeMap::new();
        g.insert("movies".to_string(), vec![("a star is born".to_string(), "movie".to_string())]);
        KnowledgeStore::new(parse_persona("p", PERSONA).unwrap(), parse_facts("f", facts).unwrap(), g).unwrap()
    }

    #[test]
    fn backstory_and_why() {
        let s = store();
        let a = s.query_backstory("Do you like Jeopardy?", None).unwrap();
        assert_eq!(a.text, "Sure I like it.");
        let why = s.query_backstory("why?", Some(&a.persona_id)).unwrap();
        assert!(why.is_reasoning);
        assert!(s.query_backstory("why", None).is_none());
        assert!(s.query_backstory("why", Some("color")).is_none());
        assert!(s.query_backstory("what is the capital of france", None).is_none());
    }

    #[test]
    fn facts_and_descriptions() {
        let s = store();
        assert_eq!(s.query_facts("bradley cooper", Some("directorial_debut")).len(), 1);
        assert!(s.query_facts("nobody", None).is_empty());
        let d = s.describe_noun_phrase("A Star Is Born").unwrap();
        assert_eq!(d.entity_type, EntityType::Title);
        assert!(s.describe_noun_phrase("asdfgh").is_none());
    }

    #[test]
    fn duplicate_patterns_name_both_ids() {
        let text = "a\tdo you sing\tYes.\nb\tcan you dance|do you sing\tNo.\n";
        let err = KnowledgeStore::new(parse_persona("p", text).unwrap(), vec![], BTreeMap::new()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('a') && msg.contains("entries a and b"));
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = parse_facts("facts.tsv", "# c\nx\ty\tz\ts\nbroken\n").unwrap_err();
        assert!(err.to_string().starts_with("facts.tsv:3"));
    }
}
