//! Loading engine components from a data directory or the bundled copy.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialog::{DialogError, FlowRegistry, FlowSpec};
use crate::knowledge::{parse_facts, parse_persona, KnowledgeError, KnowledgeStore};
use crate::nlg::{MarkupRules, NlgError, TemplateBank};
use crate::nlu::{
    parse_tagset, ActClassifier, Chunker, EntityMatcher, NluError, NluPipeline, PosLexicon, SegmentationRules,
    SentimentLexicon, TopicLexicon,
};
use crate::phonetic::{parse_gazetteer, Corrector, PhoneticError, PhoneticIndex, RateBounds};

macro_rules! bundle {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/", $path)))),*]
    };
}

static BUNDLED: &[(&str, &str)] = bundle!(
    "engine.json",
    "persona.tsv",
    "facts.tsv",
    "templates.tsv",
    "markup.json",
    "gazetteers/animals.tsv",
    "gazetteers/books.tsv",
    "gazetteers/events.tsv",
    "gazetteers/games.tsv",
    "gazetteers/movies.tsv",
    "gazetteers/music.tsv",
    "gazetteers/persons.tsv",
    "gazetteers/places.tsv",
    "gazetteers/sports.tsv",
    "nlu/acts.json",
    "nlu/pos_lexicon.tsv",
    "nlu/segmentation.json",
    "nlu/sentiment.tsv",
    "nlu/tagset.txt",
    "nlu/topics.tsv",
    "flows/animals.json",
    "flows/books.json",
    "flows/food.json",
    "flows/games.json",
    "flows/movies.json",
    "flows/music.json",
    "flows/news.json",
    "flows/retrieval.json",
    "flows/sports.json",
    "flows/technology.json",
    "flows/travel.json",
);

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing configuration file {0}")]
    Missing(String),
    #[error("{file}: {reason}")]
    Invalid { file: String, reason: String },
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Nlu(#[from] NluError),
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error(transparent)]
    Nlg(#[from] NlgError),
    #[error(transparent)]
    Dialog(#[from] DialogError),
    #[error(transparent)]
    Phonetic(#[from] PhoneticError),
}

/// Where configuration files come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    /// The copy compiled into the library.
    Bundled,
    Dir(PathBuf),
}

impl DataSource {
    pub fn describe(&self) -> String {
        match self {
            DataSource::Bundled => "<bundled>".to_string(),
            DataSource::Dir(d) => d.display().to_string(),
        }
    }

    /// Contents of a file relative to the data root, `None` if absent.
    pub fn read(&self, rel: &str) -> Result<Option<String>, ConfigError> {
        match self {
            DataSource::Bundled => Ok(BUNDLED.iter().find(|(p, _)| *p == rel).map(|(_, c)| c.to_string())),
            DataSource::Dir(root) => {
                let path = root.join(rel);
                if !path.exists() {
                    return Ok(None);
                }
                std::fs::read_to_string(&path)
                    .map(Some)
                    .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })
            }
        }
    }

    fn require(&self, rel: &str) -> Result<String, ConfigError> {
        self.read(rel)?.ok_or_else(|| ConfigError::Missing(format!("{}/{rel}", self.describe())))
    }

    /// `(stem, contents)` of every `*.{ext}` file directly under `dir`,
    /// sorted by stem.
    pub fn list(&self, dir: &str, ext: &str) -> Result<Vec<(String, String)>, ConfigError> {
        let mut out = Vec::new();
        match self {
            DataSource::Bundled => {
                let prefix = format!("{dir}/");
                for (path, contents) in BUNDLED {
                    let Some(name) = path.strip_prefix(&prefix) else { continue };
                    if let Some(stem) = name.strip_suffix(&format!(".{ext}")).filter(|s| !s.contains('/')) {
                        out.push((stem.to_string(), contents.to_string()));
                    }
                }
            }
            DataSource::Dir(root) => {
                let path = root.join(dir);
                if !path.is_dir() {
                    return Ok(out);
                }
                let io = |source| ConfigError::Io { path: path.display().to_string(), source };
                for entry in std::fs::read_dir(&path).map_err(io)? {
                    let p = entry.map_err(io)?.path();
                    if p.extension().is_some_and(|x| x == ext) {
                        let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                        let text = std::fs::read_to_string(&p)
                            .map_err(|source| ConfigError::Io { path: p.display().to_string(), source })?;
                        out.push((stem, text));
                    }
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Write the bundled configuration into `dir`, for inspection or editing.
    pub fn export_bundled(dir: &Path) -> std::io::Result<()> {
        for (rel, contents) in BUNDLED {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, contents)?;
        }
        Ok(())
    }
}

/// Engine-level settings from `engine.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineSettings {
    /// Fallthrough order used when a module stops; must end with retrieval.
    pub priority: Vec<String>,
    /// Gazetteers (file stems) consulted by transcript correction.
    pub correction_gazetteers: Vec<String>,
    pub min_syllables_per_sec: f64,
    pub max_syllables_per_sec: f64,
    pub ms_per_word: u64,
}

impl EngineSettings {
    pub fn rate_bounds(&self) -> RateBounds {
        RateBounds { min_syllables_per_sec: self.min_syllables_per_sec, max_syllables_per_sec: self.max_syllables_per_sec }
    }
}

/// Every immutable piece the engine needs.
#[derive(Debug, Clone)]
pub struct Components {
    pub settings: EngineSettings,
    pub pipeline: Arc<NluPipeline>,
    pub knowledge: Arc<KnowledgeStore>,
    pub templates: Arc<TemplateBank>,
    pub markup: Arc<MarkupRules>,
    pub flows: Arc<FlowRegistry>,
}

fn json<T: for<'de> Deserialize<'de>>(file: &str, text: &str) -> Result<T, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError::Invalid { file: file.to_string(), reason: e.to_string() })
}

pub fn load_knowledge(src: &DataSource) -> Result<KnowledgeStore, ConfigError> {
    let persona = parse_persona("persona.tsv", &src.read("persona.tsv")?.unwrap_or_default())?;
    let facts = parse_facts("facts.tsv", &src.read("facts.tsv")?.unwrap_or_default())?;
    let mut gazetteers = BTreeMap::new();
    for (stem, text) in src.list("gazetteers", "tsv")? {
        let rows = parse_gazetteer(&format!("gazetteers/{stem}.tsv"), &text)?;
        gazetteers.insert(stem, rows);
    }
    Ok(KnowledgeStore::new(persona, facts, gazetteers)?)
}

pub fn load_pipeline(
    src: &DataSource,
    settings: &EngineSettings,
    knowledge: &KnowledgeStore,
) -> Result<NluPipeline, ConfigError> {
    let lexicon = Arc::new(PosLexicon::parse("nlu/pos_lexicon.tsv", &src.require("nlu/pos_lexicon.tsv")?)?);
    let chunker = Arc::new(Chunker::new(Arc::clone(&lexicon)));
    let mut indexes = Vec::new();
    for name in &settings.correction_gazetteers {
        let rows = knowledge.gazetteers().get(name).ok_or_else(|| ConfigError::Invalid {
            file: "engine.json".into(),
            reason: format!("correction gazetteer {name:?} is not loaded"),
        })?;
        indexes.push(Arc::new(PhoneticIndex::build(rows.iter().map(|(p, d)| (p.as_str(), d.as_str())))));
    }
    let corrector = Corrector::new(indexes, Arc::clone(&chunker), settings.rate_bounds());
    let matcher = EntityMatcher::new(knowledge.gazetteer_entries());
    let rules = SegmentationRules::parse("nlu/segmentation.json", &src.require("nlu/segmentation.json")?)?;
    let tagset = parse_tagset("nlu/tagset.txt", &src.require("nlu/tagset.txt")?)?;
    let acts = ActClassifier::parse(tagset, "nlu/acts.json", &src.require("nlu/acts.json")?)?;
    let sentiment = SentimentLexicon::parse("nlu/sentiment.tsv", &src.require("nlu/sentiment.tsv")?)?;
    let topics = TopicLexicon::parse("nlu/topics.tsv", &src.require("nlu/topics.tsv")?)?;
    Ok(NluPipeline { lexicon, chunker, corrector, matcher, rules, acts, sentiment, topics })
}

pub fn load_flows(src: &DataSource, settings: &EngineSettings, templates: &TemplateBank) -> Result<FlowRegistry, ConfigError> {
    let mut flows = Vec::new();
    for (stem, text) in src.list("flows", "json")? {
        let flow = FlowSpec::parse(&format!("flows/{stem}.json"), &text)?;
        flow.validate(Some(templates))?;
        flows.push(flow);
    }
    let registry = FlowRegistry::new(flows, settings.priority.clone())?;
    registry.validate(templates)?;
    Ok(registry)
}

/// Load and cross-validate everything.
pub fn load_components(src: &DataSource) -> Result<Components, ConfigError> {
    let settings: EngineSettings = json("engine.json", &src.require("engine.json")?)?;
    let knowledge = load_knowledge(src)?;
    let pipeline = load_pipeline(src, &settings, &knowledge)?;
    let templates = TemplateBank::parse("templates.tsv", &src.require("templates.tsv")?)?;
    let markup = match src.read("markup.json")? {
        Some(text) => MarkupRules::parse("markup.json", &text)?,
        None => MarkupRules::disabled(),
    };
    let flows = load_flows(src, &settings, &templates)?;
    log::info!(
        "loaded configuration from {}: {:?}, {} templates, {} flows",
        src.describe(),
        knowledge.counts(),
        templates.len(),
        flows.len()
    );
    Ok(Components {
        settings,
        pipeline: Arc::new(pipeline),
        knowledge: Arc::new(knowledge),
        templates: Arc::new(templates),
        markup: Arc::new(markup),
        flows: Arc::new(flows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_listing() {
        let flows = DataSource::Bundled.list("flows", "json").unwrap();
        assert_eq!(flows.len(), 11);
        assert!(DataSource::Bundled.read("nope.txt").unwrap().is_none());
    }

    #[test]
    fn export_matches_bundle() {
        let dir = tempfile::tempdir().unwrap();
        DataSource::export_bundled(dir.path()).unwrap();
        let on_disk = DataSource::Dir(dir.path().to_path_buf());
        assert_eq!(on_disk.list("gazetteers", "tsv").unwrap(), DataSource::Bundled.list("gazetteers", "tsv").unwrap());
        assert!(load_components(&on_disk).is_ok());
    }
}
