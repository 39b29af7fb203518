use gunrock_core::knowledge::KnowledgeStore;
use gunrock_core::nlu::EntityType;

fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn rows(file: &str) -> usize {
    std::fs::read_to_string(data_dir().join(file))
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .count()
}

fn store() -> KnowledgeStore {
    KnowledgeStore::ingest_dir(&data_dir()).unwrap()
}

#[test]
fn bundled_counts_match_the_files() {
    let c = store().counts();
    assert_eq!(c.persona, rows("persona.tsv"));
    assert_eq!(c.facts, rows("facts.tsv"));
    assert!(c.persona >= 50 && c.facts >= 100);
}

#[test]
fn empty_directory_gives_an_empty_store() {
    let dir = tempfile::tempdir().unwrap();
    let s = KnowledgeStore::ingest_dir(dir.path()).unwrap();
    assert_eq!(s.counts().persona + s.counts().facts, 0);
    assert!(s.query_backstory("do you like jeopardy", None).is_none());
    assert!(s.describe_noun_phrase("a star is born").is_none());
}

#[test]
fn backstory_lookups() {
    let s = store();
    let a = s.query_backstory("do you like jeopardy", None).unwrap();
    assert_eq!(a.text, "Sure I like Jeopardy, especially when Watson competed.");
    let why = s.query_backstory("why", Some(&a.persona_id)).unwrap();
    assert!(why.is_reasoning);
    assert_eq!(why.text, "I'm so impressed with the capabilities of a supercomputer.");
    assert!(s.query_backstory("what is the capital of france", None).is_none());
    assert!(s.query_backstory("why", None).is_none());
    assert!(s.query_backstory("why?", None).is_none());
}

#[test]
fn fact_lookups() {
    let s = store();
    let debut = s.query_facts("bradley cooper", Some("directorial_debut"));
    assert_eq!(debut.len(), 1);
    assert!(debut[0].object_text.contains("A Star Is Born"));
    assert!(s.query_facts("nobody in particular", None).is_empty());

    let text = std::fs::read_to_string(data_dir().join("facts.tsv")).unwrap();
    let subject = "bradley cooper";
    let in_file: Vec<String> = text
        .lines()
        .filter(|l| l.split('\t').next() == Some(subject))
        .map(|l| l.split('\t').nth(1).unwrap().to_string())
        .collect();
    let got: Vec<String> = s.query_facts(subject, None).iter().map(|f| f.predicate.clone()).collect();
    assert_eq!(got, in_file);
}

#[test]
fn descriptions() {
    let s = store();
    let star = s.describe_noun_phrase("a star is born").unwrap();
    assert_eq!(star.entity_type, EntityType::Title);
    assert!(star.text.starts_with("2018"));
    let hp = s.describe_noun_phrase("harry potter").unwrap();
    assert_eq!(hp.entity_type, EntityType::Title);
    assert_eq!(hp.domain.as_deref(), Some("book"));
    assert!(s.describe_noun_phrase("asdfgh").is_none());
}
