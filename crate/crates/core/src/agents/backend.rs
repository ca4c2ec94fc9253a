use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ChatRequest {
    /// Content hash of the messages and seed; the fixture lookup key.
    pub fn key(&self) -> String {
        #[derive(Serialize)]
        struct K<'a> {
            messages: &'a [ChatMessage],
            seed: Option<u64>,
        }
        let bytes = serde_json::to_vec(&K { messages: &self.messages, seed: self.seed }).expect("serializable");
        crate::seed::sha256_hex(&bytes)
    }
}

/// Chat-completion interface: messages in, text out.
pub trait ChatBackend: Send + Sync {
    fn name(&self) -> &str;
    fn complete(&self, request: &ChatRequest) -> Result<String>;
    /// True when `complete` may touch the network.
    fn is_remote(&self) -> bool {
        false
    }
}

/// Replays recorded completions keyed by [`ChatRequest::key`].
#[derive(Debug, Default)]
pub struct FixtureBackend {
    responses: RwLock<HashMap<String, String>>,
}

#[derive(Serialize, Deserialize)]
struct FixtureLine {
    key: String,
    response: String,
}

impl FixtureBackend {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads line-delimited `{"key": .., "response": ..}` records.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let backend = Self::new();
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let rec: FixtureLine = serde_json::from_str(line)
                .map_err(|e| Error::MalformedRow { line: i + 1, message: e.to_string() })?;
            backend.insert(rec.key, rec.response);
        }
        Ok(backend)
    }

    pub fn insert(&self, key: String, response: String) {
        self.responses.write().expect("fixture lock").insert(key, response);
    }

    pub fn record(&self, request: &ChatRequest, response: impl Into<String>) {
        self.insert(request.key(), response.into());
    }

    pub fn len(&self) -> usize {
        self.responses.read().expect("fixture lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes records sorted by key.
    pub fn save(&self, path: &Path) -> Result<()> {
        let map = self.responses.read().expect("fixture lock");
        let mut keys: Vec<&String> = map.keys().collect();
        keys.sort();
        let mut out = String::new();
        for k in keys {
            out.push_str(&serde_json::to_string(&FixtureLine { key: k.clone(), response: map[k].clone() })?);
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

impl ChatBackend for FixtureBackend {
    fn name(&self) -> &str {
        "fixture"
    }

    fn complete(&self, request: &ChatRequest) -> Result<String> {
        self.responses
            .read()
            .expect("fixture lock")
            .get(&request.key())
            .cloned()
            .ok_or_else(|| Error::BackendUnavailable(format!("no recorded completion for {}", request.key())))
    }
}

type Responder = dyn Fn(&ChatRequest) -> Result<String> + Send + Sync;

/// Backend answering through a closure; counts calls.
pub struct FnBackend {
    name: String,
    respond: Box<Responder>,
    calls: AtomicUsize,
}

impl FnBackend {
    pub fn new<F>(name: impl Into<String>, respond: F) -> Self
    where
        F: Fn(&ChatRequest) -> Result<String> + Send + Sync + 'static,
    {
        FnBackend { name: name.into(), respond: Box::new(respond), calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatBackend for FnBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn complete(&self, request: &ChatRequest) -> Result<String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        (self.respond)(request)
    }
}

/// OpenAI-compatible chat-completions client. The key is read from the
/// environment variable named at construction.
#[cfg(feature = "http")]
pub struct HttpBackend {
    base_url: String,
    api_key: String,
    client: reqwest::blocking::Client,
}

#[cfg(feature = "http")]
impl HttpBackend {
    pub const DEFAULT_KEY_VAR: &'static str = "AGENTPRED_API_KEY";

    pub fn from_env(base_url: impl Into<String>, key_var: &str) -> Result<Self> {
        let api_key = std::env::var(key_var)
            .map_err(|_| Error::BackendUnavailable(format!("environment variable {key_var} is not set")))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(120))
            .build()
            .map_err(|e| Error::BackendUnavailable(e.to_string()))?;
        Ok(HttpBackend { base_url: base_url.into(), api_key, client })
    }
}

#[cfg(feature = "http")]
impl ChatBackend for HttpBackend {
    fn name(&self) -> &str {
        "http"
    }

    fn is_remote(&self) -> bool {
        true
    }

    fn complete(&self, request: &ChatRequest) -> Result<String> {
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let resp = self
            .client
            .post(url)
            .bearer_auth(&self.api_key)
            .json(request)
            .send()
            .and_then(reqwest::blocking::Response::error_for_status)
            .map_err(|e| Error::BackendUnavailable(e.to_string()))?;
        let body: serde_json::Value = resp.json().map_err(|e| Error::BackendUnavailable(e.to_string()))?;
        body["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| Error::BackendUnavailable("response has no message content".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_round_trip() {
        let req = ChatRequest {
            model: "m".into(),
            messages: vec![ChatMessage::user("hi")],
            temperature: 1.0,
            seed: Some(3),
        };
        let fx = FixtureBackend::new();
        assert!(matches!(fx.complete(&req), Err(Error::BackendUnavailable(_))));
        fx.record(&req, "17");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fx.jsonl");
        fx.save(&path).unwrap();
        let back = FixtureBackend::load(&path).unwrap();
        assert_eq!(back.complete(&req).unwrap(), "17");
        let other = ChatRequest { seed: Some(4), ..req };
        assert!(back.complete(&other).is_err());
    }
}
