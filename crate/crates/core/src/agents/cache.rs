use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::backend::ChatMessage;
use super::setting::Action;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptTurn {
    pub messages: Vec<ChatMessage>,
    pub response: String,
}

/// Both chain-of-thought turns of one draw plus the parsed answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub backend: String,
    pub model: String,
    pub prompt_hash: String,
    pub setting_id: String,
    pub draw: u64,
    pub turns: Vec<TranscriptTurn>,
    pub parsed: Option<Action>,
}

/// Content-addressed transcript store. Writes go through a temporary file
/// and a rename, so concurrent writers of identical content are harmless.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(ResponseCache { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(backend: &str, prompt_hash: &str, setting_id: &str, draw: u64) -> String {
        let material = format!("{backend}\n{prompt_hash}\n{setting_id}\n{draw}");
        crate::seed::sha256_hex(material.as_bytes())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<Transcript>> {
        match std::fs::read(self.path(key)) {
            Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn put(&self, key: &str, transcript: &Transcript) -> Result<()> {
        let path = self.path(key);
        let parent = path.parent().expect("cache paths have a parent");
        std::fs::create_dir_all(parent)?;
        let tmp = tempfile::NamedTempFile::new_in(parent)?;
        serde_json::to_writer_pretty(&tmp, transcript)?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path()).unwrap();
        let key = ResponseCache::key("b", "p", "s", 0);
        assert!(cache.get(&key).unwrap().is_none());
        let t = Transcript {
            backend: "b".into(),
            model: "m".into(),
            prompt_hash: "p".into(),
            setting_id: "s".into(),
            draw: 0,
            turns: vec![],
            parsed: Some(Action::Int(17)),
        };
        cache.put(&key, &t).unwrap();
        cache.put(&key, &t).unwrap();
        assert_eq!(cache.get(&key).unwrap(), Some(t));
    }
}
