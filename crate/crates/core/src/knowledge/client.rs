use std::sync::mpsc;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use super::{Description, FactRecord, KnowledgeStore};

/// Upper bound on a knowledge lookup inside one turn.
pub const DEFAULT_CLIENT_TIMEOUT: Duration = Duration::from_millis(500);

/// Pluggable source of descriptions and facts. A remote knowledge graph can
/// stand in for the local store behind this trait.
pub trait KnowledgeClient: Send + Sync {
    fn describe(&self, np: &str) -> Option<Description>;
    fn facts(&self, subject: &str, predicate_hint: Option<&str>) -> Vec<FactRecord>;
}

/// Client backed by the in-process store.
#[derive(Debug, Clone)]
pub struct LocalClient(pub Arc<KnowledgeStore>);

impl KnowledgeClient for LocalClient {
    fn describe(&self, np: &str) -> Option<Description> {
        self.0.describe_noun_phrase(np)
    }

    fn facts(&self, subject: &str, predicate_hint: Option<&str>) -> Vec<FactRecord> {
        self.0.query_facts(subject, predicate_hint).into_iter().cloned().collect()
    }
}

/// Wraps a client so that slow lookups become misses instead of stalls.
pub struct TimeoutClient<C> {
    inner: Arc<C>,
    timeout: Duration,
}

impl<C: KnowledgeClient + 'static> TimeoutClient<C> {
    pub fn new(inner: C, timeout: Duration) -> Self {
        TimeoutClient { inner: Arc::new(inner), timeout }
    }

    fn bounded<T: Send + 'static>(&self, f: impl FnOnce(&C) -> T + Send + 'static, miss: T) -> T {
        let (tx, rx) = mpsc::channel();
        let inner = Arc::clone(&self.inner);
        thread::spawn(move || {
            let _ = tx.send(f(&inner));
        });
        match rx.recv_timeout(self.timeout) {
            Ok(v) => v,
            Err(_) => {
                log::warn!("knowledge lookup exceeded {:?}; treating as a miss", self.timeout);
                miss
            }
        }
    }
}

impl<C: KnowledgeClient + 'static> KnowledgeClient for TimeoutClient<C> {
    fn describe(&self, np: &str) -> Option<Description> {
        let np = np.to_string();
        self.bounded(move |c| c.describe(&np), None)
    }

    fn facts(&self, subject: &str, predicate_hint: Option<&str>) -> Vec<FactRecord> {
        let subject = subject.to_string();
        let hint = predicate_hint.map(str::to_string);
        self.bounded(move |c| c.facts(&subject, hint.as_deref()), Vec::new())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Instant;

    struct Slow;

    impl KnowledgeClient for Slow {
        fn describe(&self, _np: &str) -> Option<Description> {
            thread::sleep(Duration::from_millis(300));
            Some(Description { entity_type: crate::nlu::EntityType::Other, domain: None, text: "late".into() })
        }

        fn facts(&self, _subject: &str, _hint: Option<&str>) -> Vec<FactRecord> {
            Vec::new()
        }
    }

    #[test]
    fn slow_lookup_misses_within_budget() {
        let client = TimeoutClient::new(Slow, Duration::from_millis(50));
        let t = Instant::now();
        assert!(client.describe("x").is_none());
        assert!(t.elapsed() < Duration::from_millis(250));
    }

    #[test]
    fn fast_lookup_passes_through() {
        let client = TimeoutClient::new(Slow, Duration::from_secs(2));
        assert_eq!(client.describe("x").unwrap().text, "late");
    }
}
