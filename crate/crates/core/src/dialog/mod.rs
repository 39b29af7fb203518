//! Hierarchical dialog management.
//!
//! The high level picks the central segment of a turn and routes it to a
//! topic module; each module is a finite state transducer whose transitions
//! emit response keys, attribute writes and a continue/stop signal.

mod flow;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use flow::{
    load_flow, AttrOp, AttrSource, FlowSpec, Guard, Pattern, Polarity, ResponseKeys, Signal, Transition, TurnInput,
    FLOW_VERSION,
};

use crate::nlg::TemplateBank;
use crate::nlu::{EntityMention, EntityType, NluResult};

pub const RETRIEVAL: &str = "retrieval";

/// Dialog act labels that mark a segment as a question.
pub const QUESTION_ACTS: &[&str] = &["open_question", "yes_no_question", "personal_question", "factual_question"];

#[derive(Debug, Error)]
pub enum DialogError {
    #[error("{file}: {reason}")]
    Parse { file: String, reason: String },
    #[error("flow {module:?} is invalid:\n  {}", violations.join("\n  "))]
    InvalidFlow { module: String, violations: Vec<String> },
    #[error("registry: {0}")]
    Registry(String),
    #[error("state {state:?} is not part of flow {module:?}")]
    UnknownState { module: String, state: String },
}

/// Per-session dialog state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DialogState {
    pub session_id: String,
    pub active_module: Option<String>,
    pub module_state: Option<String>,
    /// Last state of modules the conversation has left.
    pub preserved: BTreeMap<String, String>,
    pub attributes: BTreeMap<String, String>,
    pub used_templates: BTreeMap<String, BTreeSet<String>>,
    pub mention_history: Vec<EntityMention>,
    pub turn_count: u32,
    /// Modules that have stopped and should not be re-picked by fallthrough.
    pub finished_modules: BTreeSet<String>,
}

impl DialogState {
    pub fn new(session_id: impl Into<String>) -> Self {
        DialogState { session_id: session_id.into(), ..Default::default() }
    }
}

/// The chosen segment and the topic it points to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralElement {
    pub segment_index: usize,
    pub trigger_topic: Option<String>,
}

fn is_question(nlu: &NluResult, seg: usize) -> bool {
    QUESTION_ACTS.iter().any(|l| nlu.segment_has_act(seg, l))
}

/// Pick the most important segment.
///
/// Priority: explicit topic switch, then entity with a question or opinion,
/// then any entity, then the longest question, then the last segment. Ties
/// within a tier go to the later segment.
pub fn select_central_element(nlu: &NluResult) -> CentralElement {
    let n = nlu.segments.len();
    let has_entity = |i: usize| nlu.mentions_in(i).next().is_some();
    let tiers: [&dyn Fn(usize) -> bool; 3] = [
        &|i| nlu.segment_has_act(i, "topic_switch"),
        &|i| has_entity(i) && (is_question(nlu, i) || nlu.segment_has_act(i, "opinion")),
        &|i| has_entity(i),
    ];
    let chosen = tiers
        .iter()
        .find_map(|tier| (0..n).rev().find(|&i| tier(i)))
        .or_else(|| {
            (0..n).filter(|&i| is_question(nlu, i)).max_by_key(|&i| {
                let (s, e) = nlu.segments[i].token_span;
                (e - s, i)
            })
        })
        .unwrap_or(n.saturating_sub(1));
    let trigger_topic = nlu.topics.get(chosen).and_then(|t| t.first()).map(|(label, _)| label.clone());
    CentralElement { segment_index: chosen, trigger_topic }
}

/// All bundled modules, their topics and the fallthrough order.
#[derive(Debug, Clone)]
pub struct FlowRegistry {
    flows: BTreeMap<String, Arc<FlowSpec>>,
    topics: BTreeMap<String, String>,
    priority: Vec<String>,
}

impl FlowRegistry {
    /// `priority` must list registered modules and end with retrieval.
    pub fn new(flows: Vec<FlowSpec>, priority: Vec<String>) -> Result<Self, DialogError> {
        let mut map = BTreeMap::new();
        let mut topics = BTreeMap::new();
        for f in flows {
            if let Some(t) = &f.topic {
                if let Some(prev) = topics.insert(t.clone(), f.module_id.clone()) {
                    return Err(DialogError::Registry(format!("topic {t:?} claimed by {prev:?} and {:?}", f.module_id)));
                }
            }
            if map.insert(f.module_id.clone(), Arc::new(f)).is_some() {
                return Err(DialogError::Registry("duplicate module id".into()));
            }
        }
        if !map.contains_key(RETRIEVAL) {
            return Err(DialogError::Registry("the retrieval module is required".into()));
        }
        if priority.last().map(String::as_str) != Some(RETRIEVAL) {
            return Err(DialogError::Registry("priority list must end with retrieval".into()));
        }
        if let Some(unknown) = priority.iter().find(|m| !map.contains_key(*m)) {
            return Err(DialogError::Registry(format!("priority names unknown module {unknown:?}")));
        }
        Ok(FlowRegistry { flows: map, topics, priority })
    }

    pub fn get(&self, module: &str) -> Option<&Arc<FlowSpec>> {
        self.flows.get(module)
    }

    pub fn modules(&self) -> impl Iterator<Item = &FlowSpec> {
        self.flows.values().map(Arc::as_ref)
    }

    pub fn module_ids(&self) -> impl Iterator<Item = &str> {
        self.flows.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn module_for_topic(&self, topic: &str) -> Option<&str> {
        self.topics.get(topic).map(String::as_str)
    }

    pub fn priority(&self) -> &[String] {
        &self.priority
    }

    /// Validate every flow, including its response keys and interleaving.
    pub fn validate(&self, bank: &TemplateBank) -> Result<(), DialogError> {
        for f in self.flows.values() {
            let mut v = f.violations(Some(bank));
            v.extend(f.interleaving_violations(bank));
            if !v.is_empty() {
                return Err(DialogError::InvalidFlow { module: f.module_id.clone(), violations: v });
            }
        }
        Ok(())
    }
}

/// Map the central topic to a module, keeping the active one when there is
/// no trigger and falling back to retrieval.
pub fn route_topic_module(trigger_topic: Option<&str>, state: &DialogState, registry: &FlowRegistry) -> String {
    if let Some(m) = trigger_topic.and_then(|t| registry.module_for_topic(t)) {
        return m.to_string();
    }
    match &state.active_module {
        Some(m) if registry.get(m).is_some() => m.clone(),
        _ => RETRIEVAL.to_string(),
    }
}

/// The routed module unless it signalled stop; otherwise the first module in
/// priority order that has not stopped. Retrieval never stops.
pub fn select_response_module(signals: &BTreeMap<String, Signal>, routed: &str, registry: &FlowRegistry) -> String {
    let stopped = |m: &str| signals.get(m) == Some(&Signal::Stop);
    if !stopped(routed) {
        return routed.to_string();
    }
    registry
        .priority()
        .iter()
        .find(|m| m.as_str() != routed && (m.as_str() == RETRIEVAL || !stopped(m)))
        .cloned()
        .unwrap_or_else(|| RETRIEVAL.to_string())
}

/// Result of one transducer step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub module: String,
    pub transition: usize,
    pub from: String,
    pub to: String,
    pub response_keys: Vec<String>,
    pub signal: Signal,
    pub attr_updates: BTreeMap<String, String>,
}

/// Fire the first transition from `state` whose guard holds.
pub fn fst_step(flow: &FlowSpec, state: &str, input: &TurnInput<'_>, seed: u64) -> Result<StepOutcome, DialogError> {
    if !flow.has_state(state) {
        return Err(DialogError::UnknownState { module: flow.module_id.clone(), state: state.to_string() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (index, t) = flow
        .transitions_from(state)
        .find(|(_, t)| t.guard.eval(input, &mut rng))
        .ok_or_else(|| DialogError::UnknownState { module: flow.module_id.clone(), state: state.to_string() })?;
    let attr_updates = t.attr_ops.iter().filter_map(|op| op.resolve(input).map(|v| (op.set.clone(), v))).collect();
    Ok(StepOutcome {
        module: flow.module_id.clone(),
        transition: index,
        from: state.to_string(),
        to: t.to.clone(),
        response_keys: t.response_key.keys(),
        signal: t.signal,
        attr_updates,
    })
}

static USER_NAME: std::sync::LazyLock<Regex> = std::sync::LazyLock::new(|| {
    Regex::new(r"\b(?:my name is|my name's|call me)\s+([a-z][a-z'-]*)").expect("valid pattern")
});

/// Record mentions and turn-level preferences. Keys are typed
/// (`favorite_<domain>`, `user_name`), so a newer value only replaces an
/// older one of the same kind.
pub fn update_user_attributes(state: &mut DialogState, nlu: &NluResult) -> BTreeMap<String, String> {
    state.mention_history.extend(nlu.mentions.iter().cloned());
    state.turn_count += 1;
    let mut updates = BTreeMap::new();
    for (i, _) in nlu.segments.iter().enumerate() {
        if !nlu.segment_has_act(i, "opinion") {
            continue;
        }
        for m in nlu.mentions_in(i).filter(|m| m.entity_type != EntityType::Person || m.surface == m.canonical) {
            let domain = nlu.segment_domains[i]
                .iter()
                .find(|d| EntityType::from_domain(d) == m.entity_type)
                .cloned()
                .unwrap_or_else(|| m.entity_type.as_str().to_string());
            updates.insert(format!("favorite_{domain}"), m.canonical.clone());
        }
    }
    if let Some(c) = USER_NAME.captures(nlu.text()) {
        updates.insert("user_name".to_string(), crate::text::title_case(&c[1]));
    }
    for (k, v) in &updates {
        state.attributes.insert(k.clone(), v.clone());
    }
    updates
}
