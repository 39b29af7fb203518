use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::DialogError;
use crate::nlg::{ActClass, TemplateBank};
use crate::nlu::{EntityType, NluResult};
use crate::text::{first_number, title_case};

pub const FLOW_VERSION: u32 = 1;

/// Regex guard that keeps its source for serialization.
#[derive(Debug, Clone)]
pub struct Pattern(Regex);

impl TryFrom<String> for Pattern {
    type Error = regex::Error;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        Regex::new(&s).map(Pattern)
    }
}

impl From<Pattern> for String {
    fn from(p: Pattern) -> Self {
        p.0.as_str().to_string()
    }
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0.as_str())
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Pattern::try_from(s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

/// Declarative transition predicate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guard {
    Always,
    Act(String),
    AnyAct(Vec<String>),
    Topic(String),
    Sentiment(Polarity),
    Entity(EntityType),
    Attr(String),
    AttrEquals(String, String),
    Slot(String),
    Regex(Pattern),
    Number {
        #[serde(default)]
        min: Option<u32>,
        #[serde(default)]
        max: Option<u32>,
    },
    Chance(f64),
    All(Vec<Guard>),
    Any(Vec<Guard>),
    Not(Box<Guard>),
}

/// Everything a guard may inspect.
#[derive(Debug, Clone, Copy)]
pub struct TurnInput<'a> {
    pub nlu: &'a NluResult,
    pub central: usize,
    pub attributes: &'a BTreeMap<String, String>,
    /// Names of slot bindings available to templates this turn.
    pub slots: &'a BTreeSet<String>,
}

impl TurnInput<'_> {
    fn words(&self) -> Vec<&str> {
        self.nlu.correction.words.iter().map(String::as_str).collect()
    }

    fn central_sentiment(&self) -> f64 {
        self.nlu.sentiment.get(self.central).copied().unwrap_or(0.0)
    }
}

impl Guard {
    pub fn eval(&self, input: &TurnInput<'_>, rng: &mut ChaCha8Rng) -> bool {
        match self {
            Guard::Always => true,
            Guard::Act(label) => input.nlu.has_act(label),
            Guard::AnyAct(labels) => labels.iter().any(|l| input.nlu.has_act(l)),
            Guard::Topic(t) => input.nlu.topics.iter().flatten().any(|(label, w)| label == t && *w > 0.0),
            Guard::Sentiment(p) => {
                let s = input.central_sentiment();
                match p {
                    Polarity::Positive => s > 0.0,
                    Polarity::Negative => s < 0.0,
                    Polarity::Neutral => s == 0.0,
                }
            }
            Guard::Entity(t) => input.nlu.mentions.iter().any(|m| m.entity_type == *t),
            Guard::Attr(k) => input.attributes.contains_key(k),
            Guard::AttrEquals(k, v) => input.attributes.get(k) == Some(v),
            Guard::Slot(s) => input.slots.contains(s),
            Guard::Regex(p) => p.0.is_match(input.nlu.text()),
            Guard::Number { min, max } => first_number(&input.words())
                .is_some_and(|n| min.is_none_or(|m| n >= m) && max.is_none_or(|m| n <= m)),
            Guard::Chance(p) => rng.random::<f64>() < *p,
            Guard::All(gs) => gs.iter().all(|g| g.eval(input, rng)),
            Guard::Any(gs) => gs.iter().any(|g| g.eval(input, rng)),
            Guard::Not(g) => !g.eval(input, rng),
        }
    }

    fn check(&self, out: &mut Vec<String>, at: &str) {
        match self {
            Guard::Chance(p) if !(0.0..=1.0).contains(p) => out.push(format!("{at}: chance {p} outside [0, 1]")),
            Guard::All(gs) | Guard::Any(gs) => gs.iter().for_each(|g| g.check(out, at)),
            Guard::Not(g) => g.check(out, at),
            _ => {}
        }
    }
}

/// Where an attribute value comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AttrSource {
    Entity(EntityType),
    Number,
    Name,
    Text,
}

impl TryFrom<String> for AttrSource {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        match s.as_str() {
            "number" => Ok(AttrSource::Number),
            "name" => Ok(AttrSource::Name),
            "text" => Ok(AttrSource::Text),
            other => other
                .strip_prefix("entity:")
                .and_then(EntityType::parse)
                .map(AttrSource::Entity)
                .ok_or_else(|| format!("unknown attribute source {other:?}")),
        }
    }
}

impl From<AttrSource> for String {
    fn from(s: AttrSource) -> Self {
        match s {
            AttrSource::Entity(t) => format!("entity:{}", t.as_str()),
            AttrSource::Number => "number".into(),
            AttrSource::Name => "name".into(),
            AttrSource::Text => "text".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrOp {
    pub set: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<AttrSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

static NAME_PATTERN: std::sync::LazyLock<Regex> = std::sync::LazyLock::new(|| {
    Regex::new(r"\b(?:named|called|name is|name's)\s+([a-z][a-z'-]*)").expect("valid name pattern")
});

impl AttrOp {
    /// Value this op would write, if its source yields one.
    pub fn resolve(&self, input: &TurnInput<'_>) -> Option<String> {
        if let Some(v) = &self.value {
            return Some(v.clone());
        }
        match self.from.as_ref()? {
            AttrSource::Entity(t) => {
                let central = input.nlu.mentions_in(input.central).find(|m| m.entity_type == *t);
                central.or_else(|| input.nlu.mentions.iter().find(|m| m.entity_type == *t)).map(|m| m.canonical.clone())
            }
            AttrSource::Number => first_number(&input.words()).map(|n| n.to_string()),
            AttrSource::Name => NAME_PATTERN.captures(input.nlu.text()).map(|c| title_case(&c[1])),
            AttrSource::Text => input.nlu.segments.get(input.central).map(|s| s.text.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    Continue,
    Stop,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResponseKeys {
    One(String),
    Many(Vec<String>),
}

impl ResponseKeys {
    pub fn keys(&self) -> Vec<String> {
        match self {
            ResponseKeys::One(k) => vec![k.clone()],
            ResponseKeys::Many(ks) => ks.clone(),
        }
    }
}

impl Default for ResponseKeys {
    fn default() -> Self {
        ResponseKeys::Many(Vec::new())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub guard: Guard,
    pub to: String,
    #[serde(default)]
    pub response_key: ResponseKeys,
    #[serde(default)]
    pub signal: Signal,
    #[serde(default)]
    pub attr_ops: Vec<AttrOp>,
}

/// One topic module's finite state transducer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowSpec {
    pub flow_version: u32,
    pub module_id: String,
    /// Topic label that routes to this module.
    #[serde(default)]
    pub topic: Option<String>,
    pub states: Vec<String>,
    #[serde(rename = "entry")]
    pub entry_state: String,
    pub transitions: Vec<Transition>,
}

impl FlowSpec {
    pub fn parse(source: &str, text: &str) -> Result<Self, DialogError> {
        serde_json::from_str(text).map_err(|e| DialogError::Parse { file: source.to_string(), reason: e.to_string() })
    }

    pub fn has_state(&self, state: &str) -> bool {
        self.states.iter().any(|s| s == state)
    }

    pub fn transitions_from<'a>(&'a self, state: &'a str) -> impl Iterator<Item = (usize, &'a Transition)> + 'a {
        self.transitions.iter().enumerate().filter(move |(_, t)| t.from == state)
    }

    /// Every problem with the flow; empty when valid.
    pub fn violations(&self, templates: Option<&TemplateBank>) -> Vec<String> {
        let mut out = Vec::new();
        if self.flow_version != FLOW_VERSION {
            out.push(format!("unsupported flow_version {}", self.flow_version));
        }
        let mut seen = BTreeSet::new();
        for s in &self.states {
            if !seen.insert(s) {
                out.push(format!("state {s:?} declared twice"));
            }
        }
        if !self.has_state(&self.entry_state) {
            out.push(format!("entry state {:?} is not a declared state", self.entry_state));
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let at = format!("transition #{i} ({:?} -> {:?})", t.from, t.to);
            for end in [&t.from, &t.to] {
                if !self.has_state(end) {
                    out.push(format!("{at}: undefined state {end:?}"));
                }
            }
            t.guard.check(&mut out, &at);
            for op in &t.attr_ops {
                if op.from.is_some() == op.value.is_some() {
                    out.push(format!("{at}: attr_op for {:?} needs exactly one of from/value", op.set));
                }
            }
            if let Some(bank) = templates {
                for key in t.response_key.keys() {
                    if !bank.contains_key(&key) {
                        out.push(format!("{at}: unknown response_key {key:?}"));
                    }
                }
            }
        }
        for s in &self.states {
            if !self.transitions_from(s).any(|(_, t)| matches!(t.guard, Guard::Always)) {
                out.push(format!("state {s:?} has no fallback transition (guard \"always\")"));
            }
        }
        out
    }

    pub fn validate(&self, templates: Option<&TemplateBank>) -> Result<(), DialogError> {
        let violations = self.violations(templates);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(DialogError::InvalidFlow { module: self.module_id.clone(), violations })
        }
    }

    /// Fact-emitting transitions must be followed, within one step, by an
    /// opinion or question.
    pub fn interleaving_violations(&self, bank: &TemplateBank) -> Vec<String> {
        let engaging = |keys: &[String]| {
            keys.iter().any(|k| bank.classes(k).iter().any(|c| matches!(c, ActClass::Opinion | ActClass::Question)))
        };
        let mut out = Vec::new();
        for (i, t) in self.transitions.iter().enumerate() {
            let keys = t.response_key.keys();
            let has_fact = keys.iter().any(|k| bank.classes(k).contains(&ActClass::Fact));
            if !has_fact || engaging(&keys) {
                continue;
            }
            if !self.transitions_from(&t.to).any(|(_, next)| engaging(&next.response_key.keys())) {
                out.push(format!(
                    "{}: transition #{i} emits a fact and {:?} offers no opinion or question",
                    self.module_id, t.to
                ));
            }
        }
        out
    }
}

/// Read, parse and validate a flow file.
pub fn load_flow(path: &Path, templates: Option<&TemplateBank>) -> Result<FlowSpec, DialogError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DialogError::Parse { file: path.display().to_string(), reason: e.to_string() })?;
    let flow = FlowSpec::parse(&path.display().to_string(), &text)?;
    flow.validate(templates)?;
    Ok(flow)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_flow_is_valid() {
        let text = r#"{"flow_version": 1, "module_id": "m", "states": ["s"], "entry": "s",
            "transitions": [{"from": "s", "guard": "always", "to": "s"}]}"#;
        let flow = FlowSpec::parse("m.json", text).unwrap();
        assert!(flow.validate(None).is_ok());
    }

    #[test]
    fn violations_are_all_listed() {
        let text = r#"{"flow_version": 1, "module_id": "m", "states": ["s", "t"], "entry": "s",
            "transitions": [
                {"from": "s", "guard": {"act": "pos_answer"}, "to": "X"},
                {"from": "t", "guard": {"chance": 2.0}, "to": "s"}
            ]}"#;
        let flow = FlowSpec::parse("m.json", text).unwrap();
        let v = flow.violations(None);
        assert!(v.iter().any(|m| m.contains("undefined state \"X\"")));
        assert!(v.iter().any(|m| m.contains("state \"s\" has no fallback")));
        assert!(v.iter().any(|m| m.contains("state \"t\" has no fallback")));
        assert!(v.iter().any(|m| m.contains("chance 2")));
    }

    #[test]
    fn guard_syntax() {
        let g: Guard = serde_json::from_str(r#"{"all": [{"number": {"min": 10}}, {"not": {"attr": "x"}}, {"attr_equals": ["a", "b"]}]}"#).unwrap();
        assert!(matches!(g, Guard::All(ref v) if v.len() == 3));
        assert!(serde_json::from_str::<Guard>(r#"{"regex": "("}"#).is_err());
        let op: AttrOp = serde_json::from_str(r#"{"set": "favorite_movie", "from": "entity:title"}"#).unwrap();
        assert_eq!(op.from, Some(AttrSource::Entity(EntityType::Title)));
        assert!(serde_json::from_str::<AttrOp>(r#"{"set": "x", "from": "entity:robot"}"#).is_err());
    }
}
