//! Chat-vision clients: a live OpenAI-compatible endpoint and an offline
//! transcript replayer keyed by request digest.

mod openai;
mod transcript;

use std::sync::Arc;

use panelkit_core::select::{ChatRequest, ChatVisionClient, Role, TransportError};
use sha2::{Digest, Sha256};

pub use openai::OpenAiClient;
pub use transcript::{Exchange, RecordingClient, Transcript, TranscriptClient};

use crate::config::{Config, VlmMode};
use crate::error::ServiceError;

pub type SharedClient = Arc<dyn ChatVisionClient + Send + Sync>;

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content hash of a request: system prompt, then each message's role, text
/// and the SHA-256 of every attached image, in order.
pub fn request_digest(request: &ChatRequest) -> String {
    let messages: Vec<serde_json::Value> = request
        .messages
        .iter()
        .map(|m| {
            let images: Vec<serde_json::Value> = m
                .images
                .iter()
                .map(|i| serde_json::json!({"view": i.view, "labeled": i.labeled, "sha256": sha256_hex(&i.png)}))
                .collect();
            let role = match m.role {
                Role::User => "user",
                Role::Assistant => "assistant",
            };
            serde_json::json!({"role": role, "text": m.text, "images": images})
        })
        .collect();
    let doc = serde_json::json!({"system": request.system, "messages": messages});
    sha256_hex(doc.to_string().as_bytes())
}

/// Adapts a closure into a client; handy for scripted replies.
pub struct FnClient<F>(pub F);

impl<F> ChatVisionClient for FnClient<F>
where
    F: Fn(&ChatRequest) -> Result<String, TransportError>,
{
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        (self.0)(request)
    }
}

pub fn client_from_config(cfg: &Config) -> Result<SharedClient, ServiceError> {
    match cfg.vlm.mode {
        VlmMode::Transcript => Ok(Arc::new(TranscriptClient::load(&cfg.vlm.transcripts)?)),
        VlmMode::Openai => {
            let key = std::env::var(&cfg.vlm.api_key_env).ok();
            Ok(Arc::new(OpenAiClient::new(
                &cfg.vlm.base_url,
                &cfg.vlm.model,
                key,
                std::time::Duration::from_secs(cfg.vlm.timeout_secs),
            )))
        }
    }
}
