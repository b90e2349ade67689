use std::collections::HashMap;
use std::path::{Path, PathBuf};

use parking_lot::Mutex;
use panelkit_core::select::{prompts, ChatRequest, ChatVisionClient, Role, TransportError, TransportErrorKind};
use serde::{Deserialize, Serialize};

use super::request_digest;
use crate::error::ServiceError;

/// One recorded request and its reply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exchange {
    pub digest: String,
    /// `part_selection`, `label_mapping`, `feedback` or `other`.
    pub task: String,
    /// Text of the last user turn, for reading the file by eye.
    pub query: String,
    pub reply: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub name: String,
    pub exchanges: Vec<Exchange>,
}

impl Transcript {
    pub fn read(path: &Path) -> Result<Self, ServiceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::validation("transcript", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ServiceError::validation("transcript", format!("{}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transcript serializes");
        s.push('\n');
        s
    }
}

fn task_of(request: &ChatRequest) -> &'static str {
    match request.system.as_str() {
        prompts::PART_SELECTION_SYSTEM => "part_selection",
        prompts::LABEL_MAPPING_SYSTEM => "label_mapping",
        prompts::FEEDBACK_SYSTEM => "feedback",
        _ => "other",
    }
}

fn last_user_text(request: &ChatRequest) -> String {
    request
        .messages
        .iter()
        .rev()
        .find(|m| m.role == Role::User)
        .map(|m| m.text.clone())
        .unwrap_or_default()
}

/// Replays recorded replies. A request whose digest was never recorded fails
/// with [`TransportErrorKind::UnknownRequest`].
#[derive(Debug, Clone, Default)]
pub struct TranscriptClient {
    replies: HashMap<String, String>,
}

impl TranscriptClient {
    pub fn from_transcripts<'a>(ts: impl IntoIterator<Item = &'a Transcript>) -> Result<Self, ServiceError> {
        let mut replies: HashMap<String, String> = HashMap::new();
        for t in ts {
            for e in &t.exchanges {
                if let Some(prev) = replies.insert(e.digest.clone(), e.reply.clone()) {
                    if prev != e.reply {
                        return Err(ServiceError::validation(
                            "transcript",
                            format!("digest {} has conflicting replies", e.digest),
                        ));
                    }
                }
            }
        }
        Ok(Self { replies })
    }

    /// Loads transcript files; directories contribute every `*.json` inside.
    /// Missing paths are skipped.
    pub fn load(paths: &[PathBuf]) -> Result<Self, ServiceError> {
        let mut files = Vec::new();
        for p in paths {
            if p.is_dir() {
                let mut inner: Vec<PathBuf> = std::fs::read_dir(p)?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|f| f.extension().is_some_and(|x| x == "json"))
                    .collect();
                inner.sort();
                files.extend(inner);
            } else if p.is_file() {
                files.push(p.clone());
            }
        }
        let ts = files.iter().map(|f| Transcript::read(f)).collect::<Result<Vec<_>, _>>()?;
        Self::from_transcripts(&ts)
    }

    pub fn len(&self) -> usize {
        self.replies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.replies.is_empty()
    }
}

impl ChatVisionClient for TranscriptClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let digest = request_digest(request);
        self.replies.get(&digest).cloned().ok_or_else(|| {
            TransportError::new(
                TransportErrorKind::UnknownRequest,
                format!("no recorded reply for {} request {digest}", task_of(request)),
            )
        })
    }
}

/// Forwards to `inner` and keeps every successful exchange.
pub struct RecordingClient<C> {
    inner: C,
    log: Mutex<Vec<Exchange>>,
}

impl<C: ChatVisionClient> RecordingClient<C> {
    pub fn new(inner: C) -> Self {
        Self {
            inner,
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn exchanges(&self) -> Vec<Exchange> {
        self.log.lock().clone()
    }
}

impl<C: ChatVisionClient> ChatVisionClient for RecordingClient<C> {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        let reply = self.inner.complete(request)?;
        self.log.lock().push(Exchange {
            digest: request_digest(request),
            task: task_of(request).to_string(),
            query: last_user_text(request),
            reply: reply.clone(),
        });
        Ok(reply)
    }
}
