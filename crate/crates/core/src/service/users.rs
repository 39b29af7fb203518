use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

/// What is remembered about a user between sessions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_topic: Option<String>,
    #[serde(default)]
    pub sessions: u32,
}

/// Small key-value store of profiles, optionally backed by a JSON file that
/// is rewritten atomically on every update.
#[derive(Debug, Default)]
pub struct UserStore {
    path: Option<PathBuf>,
    profiles: Mutex<BTreeMap<String, UserProfile>>,
}

impl UserStore {
    pub fn in_memory() -> Self {
        UserStore::default()
    }

    pub fn open(path: &Path) -> std::io::Result<Self> {
        let profiles = if path.exists() {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?
        } else {
            BTreeMap::new()
        };
        Ok(UserStore { path: Some(path.to_path_buf()), profiles: Mutex::new(profiles) })
    }

    pub fn get(&self, user_ref: &str) -> Option<UserProfile> {
        self.profiles.lock().unwrap_or_else(|e| e.into_inner()).get(user_ref).cloned()
    }

    pub fn update(&self, user_ref: &str, f: impl FnOnce(&mut UserProfile)) -> std::io::Result<()> {
        let mut profiles = self.profiles.lock().unwrap_or_else(|e| e.into_inner());
        f(profiles.entry(user_ref.to_string()).or_default());
        let Some(path) = &self.path else { return Ok(()) };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent)?;
        }
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_vec_pretty(&*profiles)?)?;
        std::fs::rename(tmp, path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn persists_across_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("users.json");
        let store = UserStore::open(&path).unwrap();
        assert!(store.get("george").is_none());
        store.update("george", |p| p.last_topic = Some("movies".into())).unwrap();
        let again = UserStore::open(&path).unwrap();
        assert_eq!(again.get("george").unwrap().last_topic.as_deref(), Some("movies"));
    }
}
