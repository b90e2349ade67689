//! Panel-assignment strategies.
//!
//! The model-driven path runs three chat tasks against a
//! [`ChatVisionClient`]: pick functional parts from an unlabeled render, map
//! them onto face labels from the labeled renders, and reassign labels from
//! free-text feedback. Replies are parsed with a small grammar and validated
//! against the decomposition, with bounded retries on either failure.

pub mod grammar;
pub mod prompts;
mod strategies;
mod vlm;

use alloc::string::String;

pub use grammar::{format_labels, parse_labels, parse_parts, GrammarError, PartList};
pub use strategies::{
    random_inclusion_probability, random_select, rule_based_select, validate_labels, LabelSet, Provenance,
    ValidationError,
};
pub use vlm::{
    vlm_feedback, vlm_map_labels, vlm_select, vlm_select_parts, ChatMessage, ChatRequest, ChatVisionClient,
    ComponentType, ImageAttachment, RetryPolicy, Role, SelectionRequest, TransportError, TransportErrorKind,
    VlmOutcome,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("transport: {0}")]
    Transport(TransportError),
    #[error("reply grammar after {attempts} attempts: {error}")]
    Grammar { error: GrammarError, attempts: u32 },
    #[error("reply validation after {attempts} attempts: {error}")]
    Validation { error: ValidationError, attempts: u32 },
}

impl SelectError {
    fn exhausted(self, n: u32) -> Self {
        match self {
            SelectError::Grammar { error, .. } => SelectError::Grammar { error, attempts: n },
            SelectError::Validation { error, .. } => SelectError::Validation { error, attempts: n },
            other => other,
        }
    }
}
