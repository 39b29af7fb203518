//! Session orchestration: one call per user turn runs understanding,
//! dialog management, knowledge lookup, generation and markup, and logs
//! both sides of the exchange.

mod log;
mod users;

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, TryLockError};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::log::{
    parse_log_line, read_events, read_log_file, LogEvent, LogRead, LogWriter, Role, TurnLine, LOG_VERSION,
};
pub use users::{UserProfile, UserStore};

use crate::config::{load_components, Components, ConfigError, DataSource};
use crate::dialog::{
    fst_step, route_topic_module, select_central_element, select_response_module, update_user_attributes,
    DialogState, Signal, StepOutcome, TurnInput, QUESTION_ACTS, RETRIEVAL,
};
use crate::knowledge::{FactRecord, KnowledgeClient, LocalClient, TimeoutClient, DEFAULT_CLIENT_TIMEOUT};
use crate::nlg::{compose_response, fill_slots, ActClass, MarkupContext};
use crate::nlu::{DialogActTag, NluResult, SessionContext};
use crate::phonetic::{synthesize_tokens, TimedToken};
use crate::text::{first_number, title_case};

/// Pseudo-module reported for the opening exchange.
pub const LAUNCH: &str = "launch";
/// Pseudo-module reported for persona answers.
pub const PERSONA: &str = "persona";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("session {0} not found")]
    NotFound(String),
    #[error("session {0} is already closed")]
    Closed(String),
    #[error("session {0} is busy with another turn")]
    Busy(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("storage: {0}")]
    Storage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub data: DataSource,
    pub log_path: Option<PathBuf>,
    pub user_store: Option<PathBuf>,
    pub seed: u64,
    pub knowledge_timeout: Duration,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            data: DataSource::Bundled,
            log_path: None,
            user_store: None,
            seed: 0,
            knowledge_timeout: DEFAULT_CLIENT_TIMEOUT,
        }
    }
}

/// Reply to one user turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnReply {
    pub response: String,
    pub ssml: String,
    pub debug: serde_json::Value,
    pub module: String,
    pub state: Option<String>,
    pub response_keys: Vec<String>,
    pub steps: Vec<StepOutcome>,
    pub backstory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenedSession {
    pub session_id: String,
    pub greeting: String,
}

/// Everything said in one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationRecord {
    pub session_id: String,
    pub user_ref: String,
    pub greeting: String,
    pub turns: Vec<TurnLine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<u8>,
    pub started_at: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ended_at: Option<u64>,
}

#[derive(Debug)]
struct Session {
    state: DialogState,
    record: ConversationRecord,
    profile: UserProfile,
    prior_system_act: Option<DialogActTag>,
    pending_offer: Option<String>,
    last_persona_id: Option<String>,
    used_facts: BTreeSet<(String, String)>,
    last_topic: Option<String>,
    closed: bool,
}

/// What the dialog layer decided for one turn, before text is produced.
struct Plan {
    module: String,
    keys: Vec<String>,
    steps: Vec<StepOutcome>,
    attr_updates: BTreeMap<String, String>,
    persona_text: Option<String>,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

fn mix_seed(seed: u64, turn: u32, label: &str) -> u64 {
    let mut h = DefaultHasher::new();
    (seed, turn, label).hash(&mut h);
    h.finish()
}

/// The conversation engine. Shareable across threads; turns on one session
/// are serialized and a concurrent second turn is rejected as busy.
pub struct Engine {
    components: Components,
    client: Box<dyn KnowledgeClient>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    users: UserStore,
    log: Option<LogWriter>,
    seed: u64,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine").field("seed", &self.seed).field("log", &self.log).finish_non_exhaustive()
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self, ServiceError> {
        let components = load_components(&config.data)?;
        Engine::with_components(components, config)
    }

    pub fn with_components(components: Components, config: EngineConfig) -> Result<Self, ServiceError> {
        let storage = |e: std::io::Error| ServiceError::Storage(e.to_string());
        let log = config.log_path.as_deref().map(LogWriter::open).transpose().map_err(storage)?;
        let users = match &config.user_store {
            Some(p) => UserStore::open(p).map_err(storage)?,
            None => UserStore::in_memory(),
        };
        let client = TimeoutClient::new(LocalClient(Arc::clone(&components.knowledge)), config.knowledge_timeout);
        Ok(Engine {
            components,
            client: Box::new(client),
            sessions: Mutex::new(HashMap::new()),
            users,
            log,
            seed: config.seed,
        })
    }

    /// Swap the knowledge client, e.g. for a remote knowledge graph.
    pub fn set_knowledge_client(&mut self, client: Box<dyn KnowledgeClient>) {
        self.client = client;
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn users(&self) -> &UserStore {
        &self.users
    }

    pub fn log_writer(&self) -> Option<&LogWriter> {
        self.log.as_ref()
    }

    fn append_log(&self, event: &LogEvent) {
        if let Some(w) = &self.log {
            if let Err(e) = w.append(event) {
                ::log::error!("conversation log write to {} failed: {e}", w.path().display());
            }
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        let map = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        map.get(id).cloned().ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    fn greeting_keys(profile: &UserProfile) -> &'static str {
        if profile.last_topic.is_some() {
            "launch.resume_offer"
        } else {
            "launch.greeting"
        }
    }

    fn profile_bindings(profile: &UserProfile) -> BTreeMap<String, String> {
        let mut b = BTreeMap::new();
        if let Some(n) = &profile.user_name {
            b.insert("user_name".to_string(), n.clone());
        }
        if let Some(t) = &profile.last_topic {
            b.insert("last_topic".to_string(), t.clone());
        }
        b
    }

    /// Render one template key; tries the remaining templates of the key when
    /// the chosen one needs a slot that is not bound.
    fn render_key(
        &self,
        key: &str,
        state: &mut DialogState,
        bindings: &BTreeMap<String, String>,
        seed: u64,
    ) -> Option<(String, ActClass, Vec<String>)> {
        let bank = &self.components.templates;
        let total = bank.templates(key).len();
        let used = state.used_templates.entry(key.to_string()).or_default();
        for attempt in 0..total.max(1) {
            let t = bank.select_template(key, used, seed.wrapping_add(attempt as u64)).ok()?;
            if let Ok(text) = fill_slots(t, bindings) {
                return Some((text, t.act_class, t.slots().into_iter().map(str::to_string).collect()));
            }
        }
        None
    }

    fn greeting_for(&self, state: &mut DialogState, profile: &UserProfile) -> String {
        let key = Engine::greeting_keys(profile);
        let bindings = Engine::profile_bindings(profile);
        let seed = mix_seed(self.seed, 0, key);
        let rendered = self
            .render_key(key, state, &bindings, seed)
            .or_else(|| self.render_key("launch.greeting", state, &bindings, seed));
        rendered.map_or_else(|| "Hi there! What would you like to talk about?".to_string(), |(t, _, _)| t)
    }

    /// Start a session. Returning users are greeted with an offer to resume
    /// their last topic.
    pub fn open_session(&self, user_ref: &str) -> Result<OpenedSession, ServiceError> {
        let session_id = uuid::Uuid::new_v4().to_string();
        let profile = self.users.get(user_ref).unwrap_or_default();
        let mut state = DialogState::new(session_id.clone());
        let greeting = self.greeting_for(&mut state, &profile);
        let started_at = now_ms();
        let pending_offer = profile
            .last_topic
            .as_deref()
            .and_then(|t| self.components.flows.module_for_topic(t))
            .map(str::to_string);
        let prior_system_act = self.system_act(&greeting);
        let session = Session {
            state,
            record: ConversationRecord {
                session_id: session_id.clone(),
                user_ref: user_ref.to_string(),
                greeting: greeting.clone(),
                turns: Vec::new(),
                rating: None,
                started_at,
                ended_at: None,
            },
            profile,
            prior_system_act,
            pending_offer,
            last_persona_id: None,
            used_facts: BTreeSet::new(),
            last_topic: None,
            closed: false,
        };
        self.append_log(&LogEvent::SessionStart {
            session_id: session_id.clone(),
            user_ref: user_ref.to_string(),
            ts_ms: started_at,
            greeting: greeting.clone(),
        });
        self.sessions
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(session_id.clone(), Arc::new(Mutex::new(session)));
        Ok(OpenedSession { session_id, greeting })
    }

    /// Handle a turn of timed ASR tokens.
    pub fn handle_turn(&self, session_id: &str, tokens: &[TimedToken]) -> Result<TurnReply, ServiceError> {
        self.turn(session_id, tokens, false)
    }

    /// Handle a typed turn; timestamps are synthesized at the configured
    /// words-per-second pace and carry no timing evidence.
    pub fn handle_text(&self, session_id: &str, text: &str) -> Result<TurnReply, ServiceError> {
        let tokens = synthesize_tokens(text, self.components.settings.ms_per_word);
        self.turn(session_id, &tokens, true)
    }

    fn turn(&self, session_id: &str, tokens: &[TimedToken], untimed: bool) -> Result<TurnReply, ServiceError> {
        if tokens.is_empty() {
            return Err(ServiceError::InvalidInput("empty token list".into()));
        }
        for t in tokens {
            t.validate().map_err(|e| ServiceError::InvalidInput(e.to_string()))?;
        }
        let handle = self.session(session_id)?;
        let mut guard = match handle.try_lock() {
            Ok(g) => g,
            Err(TryLockError::WouldBlock) => return Err(ServiceError::Busy(session_id.to_string())),
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
        };
        let session = &mut *guard;
        if session.closed {
            return Err(ServiceError::Closed(session_id.to_string()));
        }
        let ctx = SessionContext {
            turn_index: session.state.turn_count,
            mentions: session.state.mention_history.clone(),
            prior_system_act: session.prior_system_act.clone(),
        };
        let pipeline = &self.components.pipeline;
        let nlu = if untimed { pipeline.analyze_untimed(tokens, &ctx) } else { pipeline.analyze_utterance(tokens, &ctx) }
            .map_err(|e| ServiceError::InvalidInput(e.to_string()))?;
        let user_ts = now_ms();
        let turn_no = session.state.turn_count;

        let plan = self.plan(session, &nlu);
        let reply = self.realize(session, &nlu, plan, turn_no);

        let base = session.record.turns.len() as u32;
        let user_line = TurnLine {
            session_id: session_id.to_string(),
            turn_index: base,
            role: Role::User,
            text: nlu.correction.words.join(" "),
            ts_ms: user_ts,
            tokens: Some(tokens.to_vec()),
            nlu: Some(reply.debug.clone()),
            ..Default::default()
        };
        let system_line = TurnLine {
            session_id: session_id.to_string(),
            turn_index: base + 1,
            role: Role::System,
            text: reply.response.clone(),
            ts_ms: now_ms(),
            ssml: Some(reply.ssml.clone()),
            module: Some(reply.module.clone()),
            state: reply.state.clone(),
            response_keys: reply.response_keys.clone(),
            backstory: reply.backstory,
            attr_updates: reply.steps.iter().flat_map(|s| s.attr_updates.clone()).collect(),
            ..Default::default()
        };
        for line in [user_line, system_line] {
            self.append_log(&LogEvent::Turn(line.clone()));
            session.record.turns.push(line);
        }
        Ok(reply)
    }

    fn is_question(nlu: &NluResult, seg: usize) -> bool {
        QUESTION_ACTS.iter().any(|l| nlu.segment_has_act(seg, l))
    }

    /// Decide which module speaks and which response keys it emits.
    fn plan(&self, session: &mut Session, nlu: &NluResult) -> Plan {
        let flows = &self.components.flows;
        let first_turn = session.state.turn_count == 0;
        let pending = session.pending_offer.take();
        let mut attr_updates = update_user_attributes(&mut session.state, nlu);
        let central = select_central_element(nlu);

        if first_turn && nlu.has_act("greeting") {
            session.pending_offer = pending;
            let key = Engine::greeting_keys(&session.profile);
            return Plan { module: LAUNCH.into(), keys: vec![key.into()], steps: vec![], attr_updates, persona_text: None };
        }

        for (i, seg) in nlu.segments.iter().enumerate() {
            if !Engine::is_question(nlu, i) {
                continue;
            }
            if let Some(ans) = self.components.knowledge.query_backstory(&seg.text, session.last_persona_id.as_deref()) {
                session.last_persona_id = Some(ans.persona_id.clone());
                let key = if ans.is_reasoning { "persona.reasoning" } else { "persona.answer" };
                return Plan {
                    module: PERSONA.into(),
                    keys: vec![key.into()],
                    steps: vec![],
                    attr_updates,
                    persona_text: Some(ans.text),
                };
            }
        }

        let state = &mut session.state;
        let mut routed = match pending {
            Some(m) if nlu.has_act("pos_answer") => m,
            _ if nlu.has_act("topic_switch") && central.trigger_topic.as_deref().and_then(|t| flows.module_for_topic(t)).is_none() => flows
                .priority()
                .iter()
                .find(|m| {
                    m.as_str() != RETRIEVAL
                        && Some(m.as_str()) != state.active_module.as_deref()
                        && !state.finished_modules.contains(m.as_str())
                })
                .cloned()
                .unwrap_or_else(|| RETRIEVAL.to_string()),
            _ => route_topic_module(central.trigger_topic.as_deref(), state, flows),
        };
        state.finished_modules.remove(&routed);

        let fact = self.pick_fact(nlu, &session.used_facts);
        let slots: BTreeSet<String> = self.bindings(state, nlu, central.trigger_topic.as_deref(), fact.as_ref()).into_keys().collect();
        let mut signals: BTreeMap<String, Signal> =
            state.finished_modules.iter().map(|m| (m.clone(), Signal::Stop)).collect();
        let mut keys = Vec::new();
        let mut steps = Vec::new();
        for _ in 0..=flows.priority().len() {
            if state.active_module.as_deref() != Some(routed.as_str()) {
                if let (Some(prev), Some(at)) = (state.active_module.take(), state.module_state.take()) {
                    state.preserved.insert(prev, at);
                }
                state.active_module = Some(routed.clone());
                state.module_state = flows.get(&routed).map(|f| f.entry_state.clone());
            }
            let (Some(flow), Some(at)) = (flows.get(&routed), state.module_state.clone()) else { break };
            let input = TurnInput { nlu, central: central.segment_index, attributes: &state.attributes, slots: &slots };
            let outcome = match fst_step(flow, &at, &input, mix_seed(self.seed, state.turn_count, &routed)) {
                Ok(o) => o,
                Err(e) => {
                    ::log::error!("{e}");
                    break;
                }
            };
            for (k, v) in &outcome.attr_updates {
                state.attributes.insert(k.clone(), v.clone());
                attr_updates.insert(k.clone(), v.clone());
            }
            state.module_state = Some(outcome.to.clone());
            keys.extend(outcome.response_keys.iter().cloned());
            let stop = outcome.signal == Signal::Stop && routed != RETRIEVAL;
            steps.push(outcome);
            if !stop {
                break;
            }
            signals.insert(routed.clone(), Signal::Stop);
            state.finished_modules.insert(routed.clone());
            routed = select_response_module(&signals, &routed, flows);
        }
        if let Some(topic) = flows.get(&routed).and_then(|f| f.topic.clone()) {
            session.last_topic = Some(topic);
        }
        Plan { module: routed, keys, steps, attr_updates, persona_text: None }
    }

    /// First fact not yet used this session about an entity of this turn,
    /// people first. Descriptions are reserved for noun-phrase lookups.
    fn pick_fact(&self, nlu: &NluResult, used: &BTreeSet<(String, String)>) -> Option<FactRecord> {
        let mut subjects: Vec<(bool, &str)> =
            nlu.mentions.iter().map(|m| (m.entity_type != crate::nlu::EntityType::Person, m.canonical.as_str())).collect();
        subjects.sort_by_key(|(not_person, _)| *not_person);
        let mut seen = BTreeSet::new();
        for (_, subject) in subjects {
            if !seen.insert(subject) {
                continue;
            }
            let hit = self
                .client
                .facts(subject, None)
                .into_iter()
                .find(|f| f.predicate != "description" && !used.contains(&(f.subject.clone(), f.predicate.clone())));
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    fn bindings(
        &self,
        state: &DialogState,
        nlu: &NluResult,
        topic: Option<&str>,
        fact: Option<&FactRecord>,
    ) -> BTreeMap<String, String> {
        let mut b = state.attributes.clone();
        let central = select_central_element(nlu).segment_index;
        let ordered = nlu.mentions_in(central).chain(nlu.mentions.iter().filter(|m| m.segment_index != central));
        for m in ordered {
            b.entry(m.entity_type.as_str().to_string()).or_insert_with(|| title_case(&m.canonical));
        }
        if let Some(f) = fact {
            b.insert("fact".into(), f.object_text.clone());
        }
        let words: Vec<&str> = nlu.correction.words.iter().map(String::as_str).collect();
        if let Some(n) = first_number(&words) {
            b.insert("number".into(), n.to_string());
        }
        if let Some(t) = topic {
            b.insert("topic".into(), t.to_string());
        }
        if let Some(np) = nlu.noun_phrases.get(central).into_iter().flatten().find_map(|np| self.client.describe(np)) {
            b.insert("description".into(), np.text);
        }
        b
    }

    fn system_act(&self, response: &str) -> Option<DialogActTag> {
        let last = response
            .split_inclusive(['.', '!', '?'])
            .map(str::trim)
            .rfind(|s| !s.is_empty())?;
        let tags = self.components.pipeline.classify_dialog_acts(last, None);
        tags.iter().find(|t| QUESTION_ACTS.contains(&t.label.as_str())).or(tags.first()).cloned()
    }

    /// Turn a plan into text, markup and the debug summary.
    fn realize(&self, session: &mut Session, nlu: &NluResult, plan: Plan, turn_no: u32) -> TurnReply {
        let central = select_central_element(nlu);
        let mut parts: Vec<(String, ActClass)> = Vec::new();
        let mut keys = plan.keys.clone();
        let backstory = plan.persona_text.is_some();
        if let Some(text) = &plan.persona_text {
            parts.push((text.clone(), ActClass::Opinion));
        } else {
            let fact = self.pick_fact(nlu, &session.used_facts);
            let mut bindings = self.bindings(&session.state, nlu, central.trigger_topic.as_deref(), fact.as_ref());
            for (k, v) in Engine::profile_bindings(&session.profile) {
                bindings.entry(k).or_insert(v);
            }
            let mut used_fact = false;
            for key in &plan.keys {
                let seed = mix_seed(self.seed, turn_no, key);
                if let Some((text, class, slots)) = self.render_key(key, &mut session.state, &bindings, seed) {
                    used_fact |= slots.iter().any(|s| s == "fact");
                    parts.push((text, class));
                }
            }
            if parts.is_empty() {
                keys = vec!["retrieval.generic".to_string()];
                let seed = mix_seed(self.seed, turn_no, "retrieval.generic");
                if let Some((text, class, _)) = self.render_key("retrieval.generic", &mut session.state, &bindings, seed) {
                    parts.push((text, class));
                }
            }
            if let (true, Some(f)) = (used_fact, fact) {
                session.used_facts.insert((f.subject, f.predicate));
            }
        }
        let texts: Vec<&str> = parts.iter().map(|(t, _)| t.as_str()).collect();
        let response = compose_response(&texts).unwrap_or_else(|_| "Tell me more.".to_string());
        let ctx = MarkupContext {
            classes: parts.iter().map(|(_, c)| *c).collect(),
            sentiment: nlu.sentiment.get(central.segment_index).copied().unwrap_or(0.0),
            boundary: (texts.len() > 1).then(|| compose_response(&texts[..1]).map_or(0, |first| first.len() + 1)),
        };
        let ssml = self.components.markup.add_speech_markup(&response, &ctx);
        session.prior_system_act = self.system_act(&response);

        let mut debug = nlu.summary();
        debug["central_segment"] = serde_json::json!(central.segment_index);
        debug["trigger_topic"] = serde_json::json!(central.trigger_topic);
        debug["module"] = serde_json::json!(plan.module);
        debug["response_keys"] = serde_json::json!(keys);
        debug["attr_updates"] = serde_json::json!(plan.attr_updates);
        let state = if plan.module == LAUNCH || plan.module == PERSONA { None } else { session.state.module_state.clone() };
        TurnReply {
            response,
            ssml,
            debug,
            module: plan.module,
            state,
            response_keys: keys,
            steps: plan.steps,
            backstory,
        }
    }

    /// Finish a session, optionally with a 1 to 5 star rating, and remember
    /// the user's last topic for the next visit.
    pub fn close_session(&self, session_id: &str, rating: Option<u8>) -> Result<ConversationRecord, ServiceError> {
        if let Some(r) = rating {
            if !(1..=5).contains(&r) {
                return Err(ServiceError::InvalidInput(format!("rating {r} is outside 1..=5")));
            }
        }
        let handle = self.session(session_id)?;
        let mut session = handle.lock().unwrap_or_else(|e| e.into_inner());
        if session.closed {
            return Err(ServiceError::Closed(session_id.to_string()));
        }
        session.closed = true;
        let ended = now_ms();
        session.record.rating = rating;
        session.record.ended_at = Some(ended);
        self.append_log(&LogEvent::SessionEnd { session_id: session_id.to_string(), ts_ms: ended, rating });
        let last_topic = session.last_topic.clone();
        let user_name = session.state.attributes.get("user_name").cloned();
        self.users
            .update(&session.record.user_ref, |p| {
                if last_topic.is_some() {
                    p.last_topic = last_topic;
                }
                if user_name.is_some() {
                    p.user_name = user_name;
                }
                p.sessions += 1;
            })
            .map_err(|e| ServiceError::Storage(e.to_string()))?;
        Ok(session.record.clone())
    }

    /// The record of a session, open or closed.
    pub fn conversation(&self, session_id: &str) -> Result<ConversationRecord, ServiceError> {
        let handle = self.session(session_id)?;
        let session = handle.lock().unwrap_or_else(|e| e.into_inner());
        Ok(session.record.clone())
    }

    /// Dialog state snapshot, mostly for tests and debugging.
    pub fn dialog_state(&self, session_id: &str) -> Result<DialogState, ServiceError> {
        let handle = self.session(session_id)?;
        let session = handle.lock().unwrap_or_else(|e| e.into_inner());
        Ok(session.state.clone())
    }

    /// Replace the dialog state of an open session, for example to resume a
    /// saved conversation. The active module and its state must exist.
    pub fn restore_dialog_state(&self, session_id: &str, mut state: DialogState) -> Result<(), ServiceError> {
        let flows = &self.components.flows;
        if let Some(m) = &state.active_module {
            let flow = flows.get(m).ok_or_else(|| ServiceError::InvalidInput(format!("unknown module {m:?}")))?;
            if !state.module_state.as_deref().is_some_and(|s| flow.has_state(s)) {
                return Err(ServiceError::InvalidInput(format!("module {m:?} has no state {:?}", state.module_state)));
            }
        }
        let handle = self.session(session_id)?;
        let mut session = handle.lock().unwrap_or_else(|e| e.into_inner());
        if session.closed {
            return Err(ServiceError::Closed(session_id.to_string()));
        }
        state.session_id = session_id.to_string();
        session.state = state;
        Ok(())
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner()).len()
    }
}
