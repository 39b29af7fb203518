use std::collections::{BTreeMap, BTreeSet};

use gunrock_core::nlg::{compose_response, fill_slots, strip_markup, ActClass, MarkupContext, MarkupRules, Template, TemplateBank};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FOUR: &str = "k\ta\tquestion\tOne?\nk\tb\tquestion\tTwo?\nk\tc\tquestion\tThree?\nk\td\tquestion\tFour?\n";

const RULES: &str = r#"{
  "markup_version": 1,
  "enabled": true,
  "whitelist": ["ouu", "hmm"],
  "rules": [
    {"name": "glad", "when": {"first_class": "acknowledgement", "sentiment": "positive"}, "insertion": "ouu", "placement": "prefix"},
    {"name": "musing", "when": {"first_class": "fact", "sentiment": "neutral"}, "insertion": "hmm", "placement": "infix"}
  ]
}"#;

#[test]
fn ten_thousand_draws_are_near_uniform() {
    let bank = TemplateBank::parse("t.tsv", FOUR).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10_000);
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..10_000 {
        let mut used = BTreeSet::new();
        *counts.entry(bank.select_template("k", &mut used, rng.random()).unwrap().id.clone()).or_default() += 1;
    }
    assert_eq!(counts.len(), 4);
    for (id, c) in counts {
        assert!((2350..=2650).contains(&c), "{id}: {c}");
    }
}

#[test]
fn forced_choice_and_reset() {
    let bank = TemplateBank::parse("t.tsv", FOUR).unwrap();
    let mut used: BTreeSet<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    assert_eq!(bank.select_template("k", &mut used, 5).unwrap().id, "d");
    let t = bank.select_template("k", &mut used, 5).unwrap();
    assert_eq!(used.len(), 1);
    assert!(used.contains(&t.id));
    assert!(bank.select_template("missing", &mut used, 5).is_err());
}

#[test]
fn grounding_question_fills() {
    let t = Template {
        id: "a".into(),
        dialog_state_key: "movies.ground".into(),
        pattern: "Are you talking about {movie_title} released in {release_year} starring {actor_name} as {actor_role}?".into(),
        act_class: ActClass::Grounding,
    };
    let mut b: BTreeMap<String, String> = [
        ("movie_title", "A Star Is Born"),
        ("release_year", "2018"),
        ("actor_name", "Lady Gaga"),
        ("actor_role", "Ally"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    assert_eq!(
        fill_slots(&t, &b).unwrap(),
        "Are you talking about A Star Is Born released in 2018 starring Lady Gaga as Ally?"
    );
    b.remove("actor_role");
    assert!(fill_slots(&t, &b).unwrap_err().to_string().contains("actor_role"));
}

#[test]
fn composes_acknowledgement_question_experience() {
    let parts = [
        "A perfect 10! You have to tell me more.",
        "What was so exceptional?",
        "When I watched it, the music design really stood out to me.",
    ];
    assert_eq!(compose_response(&parts).unwrap(), parts.join(" "));
    assert_eq!(compose_response(&["Just this."]).unwrap(), "Just this.");
    assert_eq!(compose_response(&["no period", "Fine."]).unwrap(), "no period. Fine.");
    assert!(compose_response(&["", "  "]).is_err());
}

#[test]
fn markup_examples() {
    let rules = MarkupRules::parse("m.json", RULES).unwrap();
    let glad = MarkupContext { classes: vec![ActClass::Acknowledgement], sentiment: 0.8, boundary: None };
    let marked = rules.add_speech_markup("Maybe you will find this interesting.", &glad);
    assert!(marked.starts_with("<say-as interpret-as=\"interjection\">ouu</say-as> Maybe"), "{marked}");

    let fact = MarkupContext { classes: vec![ActClass::Fact, ActClass::Question], sentiment: 0.0, boundary: None };
    let marked = rules.add_speech_markup("Owls can turn their heads far. Did you know that?", &fact);
    assert_eq!(marked, "Owls can turn their heads far. <say-as interpret-as=\"interjection\">hmm</say-as> Did you know that?");

    let text = "Nothing to add here.";
    assert_eq!(MarkupRules::disabled().add_speech_markup(text, &glad), text);
}

fn class() -> impl Strategy<Value = ActClass> {
    prop::sample::select(vec![
        ActClass::Fact,
        ActClass::Opinion,
        ActClass::Experience,
        ActClass::Question,
        ActClass::Acknowledgement,
        ActClass::Grounding,
    ])
}

proptest! {
    #[test]
    fn markup_strips_back_exactly(
        sentences in prop::collection::vec("[A-Z][a-z]{1,8}( [a-z]{1,8}){0,5}[.!?]", 1..4),
        classes in prop::collection::vec(class(), 0..3),
        sentiment in -1.0f64..=1.0,
    ) {
        let bundled = MarkupRules::parse("markup.json", include_str!("../data/markup.json")).unwrap();
        let text = sentences.join(" ");
        let boundary = (sentences.len() > 1).then(|| sentences[0].len() + 1);
        let ctx = MarkupContext { classes, sentiment, boundary };
        for rules in [&bundled, &MarkupRules::parse("m.json", RULES).unwrap()] {
            let marked = rules.add_speech_markup(&text, &ctx);
            prop_assert!(marked.matches("<say-as").count() <= 1);
            prop_assert_eq!(strip_markup(&marked), text.clone());
        }
    }

    #[test]
    fn no_repeat_until_exhausted(n in 1usize..8, seeds in prop::collection::vec(any::<u64>(), 1..40)) {
        let tsv: String = (0..n).map(|i| format!("k\tt{i}\topinion\tLine {i}.\n")).collect();
        let bank = TemplateBank::parse("t.tsv", &tsv).unwrap();
        let mut used = BTreeSet::new();
        let mut since_reset: Vec<String> = Vec::new();
        for seed in seeds {
            if since_reset.len() == n {
                since_reset.clear();
            }
            let id = bank.select_template("k", &mut used, seed).unwrap().id.clone();
            prop_assert!(!since_reset.contains(&id), "{id} repeated before exhaustion");
            since_reset.push(id);
        }
    }
}
