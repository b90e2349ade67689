use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::grammar::{parse_labels, parse_parts, GrammarError, PartList};
use super::prompts;
use super::{validate_labels, LabelSet, Provenance, SelectError, ValidationError};
use crate::decompose::Decomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

/// PNG render attached to a user message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageAttachment {
    /// View name, e.g. `A`.
    pub view: String,
    pub labeled: bool,
    #[serde(skip)]
    pub png: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub text: String,
    pub images: Vec<ImageAttachment>,
}

impl ChatMessage {
    pub fn user(text: String, images: Vec<ImageAttachment>) -> Self {
        Self {
            role: Role::User,
            text,
            images,
        }
    }

    pub fn assistant(text: String) -> Self {
        Self {
            role: Role::Assistant,
            text,
            images: Vec::new(),
        }
    }
}

/// One chat-completion call: a system prompt followed by alternating turns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system: String,
    pub messages: Vec<ChatMessage>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransportErrorKind {
    Connection,
    Timeout,
    Status,
    Protocol,
    /// Replay client has no recorded reply for the request.
    UnknownRequest,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind:?}: {message}")]
pub struct TransportError {
    pub kind: TransportErrorKind,
    pub message: String,
}

impl TransportError {
    pub fn new(kind: TransportErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

/// A chat-completion endpoint that accepts images.
///
/// Implementations must be callable from several sessions at once; the
/// orchestration in this module keeps no state between calls.
pub trait ChatVisionClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError>;
}

impl<T: ChatVisionClient + ?Sized> ChatVisionClient for &T {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

impl<T: ChatVisionClient + ?Sized> ChatVisionClient for alloc::boxed::Box<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

impl<T: ChatVisionClient + ?Sized> ChatVisionClient for alloc::sync::Arc<T> {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        (**self).complete(request)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    /// Total calls per task, including the first.
    pub max_attempts: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self { max_attempts: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ComponentType {
    Panel,
}

impl ComponentType {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentType::Panel => "panel",
        }
    }
}

/// Inputs shared by the three model tasks.
#[derive(Debug, Clone)]
pub struct SelectionRequest<'a> {
    pub user_prompt: String,
    pub decomp: &'a Decomposition,
    pub images: Vec<ImageAttachment>,
    pub component_type: ComponentType,
}

impl<'a> SelectionRequest<'a> {
    pub fn new(user_prompt: &str, decomp: &'a Decomposition, images: Vec<ImageAttachment>) -> Self {
        Self {
            user_prompt: user_prompt.to_string(),
            decomp,
            images,
            component_type: ComponentType::Panel,
        }
    }

    fn images(&self, labeled: bool) -> Result<Vec<ImageAttachment>, SelectError> {
        if self.user_prompt.trim().is_empty() {
            return Err(SelectError::Precondition("user prompt is empty".into()));
        }
        let imgs: Vec<ImageAttachment> = self.images.iter().filter(|i| i.labeled == labeled).cloned().collect();
        if imgs.is_empty() {
            let which = if labeled { "labeled" } else { "unlabeled" };
            return Err(SelectError::Precondition(alloc::format!("no {which} render attached")));
        }
        Ok(imgs)
    }
}

/// Result of a model task together with the number of calls it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VlmOutcome<T> {
    pub value: T,
    pub attempts: u32,
    /// Final request sent, including any correction turns.
    pub transcript: ChatRequest,
}

impl<T> VlmOutcome<T> {
    pub fn retry_count(&self) -> u32 {
        self.attempts.saturating_sub(1)
    }
}

enum Attempt<T> {
    Done(T),
    Retry { correction: String, error: SelectError },
}

fn converse<T>(
    client: &dyn ChatVisionClient,
    policy: RetryPolicy,
    system: &str,
    first: ChatMessage,
    mut interpret: impl FnMut(&str) -> Attempt<T>,
) -> Result<VlmOutcome<T>, SelectError> {
    let mut request = ChatRequest {
        system: system.to_string(),
        messages: alloc::vec![first],
    };
    let attempts = policy.max_attempts.max(1);
    let mut last_error = None;
    for attempt in 1..=attempts {
        let reply = client.complete(&request).map_err(SelectError::Transport)?;
        match interpret(&reply) {
            Attempt::Done(value) => {
                return Ok(VlmOutcome {
                    value,
                    attempts: attempt,
                    transcript: request,
                })
            }
            Attempt::Retry { correction, error } => {
                last_error = Some(error);
                if attempt < attempts {
                    request.messages.push(ChatMessage::assistant(reply));
                    request.messages.push(ChatMessage::user(correction, Vec::new()));
                }
            }
        }
    }
    Err(last_error.expect("at least one attempt").exhausted(attempts))
}

fn grammar_correction(err: &GrammarError, format: &str) -> String {
    alloc::format!("Your previous reply could not be used ({err}). Reply with exactly one line in the format: {format}")
}

fn label_range(decomp: &Decomposition) -> String {
    match decomp.label_count() {
        0 => String::from("none"),
        1 => String::from("1"),
        n => alloc::format!("1-{n}"),
    }
}

fn interpret_labels(reply: &str, decomp: &Decomposition) -> Attempt<BTreeSet<u32>> {
    const FORMAT: &str = "Labels = [n, n]";
    match parse_labels(reply) {
        Err(e) => Attempt::Retry {
            correction: grammar_correction(&e, FORMAT),
            error: SelectError::Grammar { error: e, attempts: 0 },
        },
        Ok(labels) => match validate_labels(&labels, decomp) {
            Ok(()) => Attempt::Done(labels),
            Err(e) => {
                let correction = match &e {
                    ValidationError::UnknownLabels(bad) => {
                        let bad: Vec<String> = bad.iter().map(|l| l.to_string()).collect();
                        alloc::format!(
                            "Labels {} do not exist in the image. Use only labels {}. Reply with exactly one line in the format: {FORMAT}",
                            bad.join(", "),
                            label_range(decomp)
                        )
                    }
                    ValidationError::Empty => alloc::format!(
                        "An empty selection is not allowed. Reply with exactly one line in the format: {FORMAT}"
                    ),
                };
                Attempt::Retry {
                    correction,
                    error: SelectError::Validation { error: e, attempts: 0 },
                }
            }
        },
    }
}

/// Task 1: asks which functional parts need the component, from the
/// unlabeled render.
pub fn vlm_select_parts(
    req: &SelectionRequest<'_>,
    client: &dyn ChatVisionClient,
    policy: RetryPolicy,
) -> Result<VlmOutcome<PartList>, SelectError> {
    let images = req.images(false)?;
    let query = prompts::part_selection_query(&req.user_prompt, req.component_type.as_str());
    converse(
        client,
        policy,
        prompts::PART_SELECTION_SYSTEM,
        ChatMessage::user(query, images),
        |reply| match parse_parts(reply) {
            Ok(parts) => Attempt::Done(parts),
            Err(e) => Attempt::Retry {
                correction: grammar_correction(&e, "Parts = [part, part]"),
                error: SelectError::Grammar { error: e, attempts: 0 },
            },
        },
    )
}

/// Task 2: maps part names onto face labels using the labeled renders.
pub fn vlm_map_labels(
    req: &SelectionRequest<'_>,
    parts: &PartList,
    client: &dyn ChatVisionClient,
    policy: RetryPolicy,
) -> Result<VlmOutcome<LabelSet>, SelectError> {
    let images = req.images(true)?;
    let query = prompts::label_mapping_query(&req.user_prompt, &parts.joined());
    let out = converse(
        client,
        policy,
        prompts::LABEL_MAPPING_SYSTEM,
        ChatMessage::user(query, images),
        |reply| interpret_labels(reply, req.decomp),
    )?;
    Ok(VlmOutcome {
        value: LabelSet::new(out.value, Provenance::Vlm),
        attempts: out.attempts,
        transcript: out.transcript,
    })
}

/// Task 3: replaces the assignment with the labels matching `feedback`.
pub fn vlm_feedback(
    req: &SelectionRequest<'_>,
    feedback: &str,
    client: &dyn ChatVisionClient,
    policy: RetryPolicy,
) -> Result<VlmOutcome<LabelSet>, SelectError> {
    if feedback.trim().is_empty() {
        return Err(SelectError::Precondition("feedback is empty".into()));
    }
    let images = req.images(true)?;
    let query = prompts::feedback_query(&req.user_prompt, feedback);
    let out = converse(
        client,
        policy,
        prompts::FEEDBACK_SYSTEM,
        ChatMessage::user(query, images),
        |reply| interpret_labels(reply, req.decomp),
    )?;
    Ok(VlmOutcome {
        value: LabelSet::new(out.value, Provenance::Feedback),
        attempts: out.attempts,
        transcript: out.transcript,
    })
}

/// Task 1 followed by task 2.
pub fn vlm_select(
    req: &SelectionRequest<'_>,
    client: &dyn ChatVisionClient,
    policy: RetryPolicy,
) -> Result<(PartList, VlmOutcome<LabelSet>), SelectError> {
    let parts = vlm_select_parts(req, client, policy)?;
    let labels = vlm_map_labels(req, &parts.value, client, policy)?;
    Ok((parts.value, labels))
}
