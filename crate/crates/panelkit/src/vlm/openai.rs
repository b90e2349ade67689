use std::time::Duration;

use base64::Engine;
use panelkit_core::select::{ChatRequest, ChatVisionClient, Role, TransportError, TransportErrorKind};
use serde_json::{json, Value};

/// Client for `POST {base_url}/chat/completions` with images sent inline as
/// base64 data URLs.
#[derive(Debug, Clone)]
pub struct OpenAiClient {
    base_url: String,
    model: String,
    api_key: Option<String>,
    timeout: Duration,
}

impl OpenAiClient {
    pub fn new(base_url: &str, model: &str, api_key: Option<String>, timeout: Duration) -> Self {
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            model: model.to_string(),
            api_key,
            timeout,
        }
    }

    pub fn body(&self, request: &ChatRequest) -> Value {
        let mut messages = vec![json!({"role": "system", "content": request.system})];
        for m in &request.messages {
            match m.role {
                Role::Assistant => messages.push(json!({"role": "assistant", "content": m.text})),
                Role::User => {
                    let mut content = vec![json!({"type": "text", "text": m.text})];
                    for img in &m.images {
                        let data = base64::engine::general_purpose::STANDARD.encode(&img.png);
                        content.push(json!({
                            "type": "image_url",
                            "image_url": {"url": format!("data:image/png;base64,{data}")}
                        }));
                    }
                    messages.push(json!({"role": "user", "content": content}));
                }
            }
        }
        json!({"model": self.model, "messages": messages, "temperature": 0})
    }
}

fn reply_text(v: &Value) -> Option<String> {
    let content = v.get("choices")?.get(0)?.get("message")?.get("content")?;
    match content {
        Value::String(s) => Some(s.clone()),
        // Some servers return a list of typed parts.
        Value::Array(parts) => Some(
            parts
                .iter()
                .filter_map(|p| p.get("text").and_then(Value::as_str))
                .collect::<Vec<_>>()
                .join(""),
        ),
        _ => None,
    }
}

impl ChatVisionClient for OpenAiClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        // Built per call: the blocking client owns a runtime that must not be
        // dropped from async code.
        let http = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| TransportError::new(TransportErrorKind::Connection, e.to_string()))?;
        let mut req = http.post(format!("{}/chat/completions", self.base_url)).json(&self.body(request));
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| {
            let kind = if e.is_timeout() {
                TransportErrorKind::Timeout
            } else {
                TransportErrorKind::Connection
            };
            TransportError::new(kind, e.to_string())
        })?;
        let status = resp.status();
        let text = resp
            .text()
            .map_err(|e| TransportError::new(TransportErrorKind::Protocol, e.to_string()))?;
        if !status.is_success() {
            let snippet: String = text.chars().take(300).collect();
            return Err(TransportError::new(TransportErrorKind::Status, format!("HTTP {status}: {snippet}")));
        }
        let v: Value =
            serde_json::from_str(&text).map_err(|e| TransportError::new(TransportErrorKind::Protocol, e.to_string()))?;
        reply_text(&v).ok_or_else(|| TransportError::new(TransportErrorKind::Protocol, "response has no message content"))
    }
}
