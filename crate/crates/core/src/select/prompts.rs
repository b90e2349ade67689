//! System prompts and query templates for the three model tasks.
//!
//! Placeholders are written `{name}` and filled in a single pass, so text
//! supplied by the user is never re-scanned for placeholders.

use alloc::string::String;

/// Task 1: which functional parts need the component type.
pub const PART_SELECTION_SYSTEM: &str = "You are an assistant that selects the functional parts of an object that require a specified component type. Use: (1) the description of the object, (2) an axonometric image of the AI-generated mesh, and (3) the component type. Select the minimal set of parts that fulfill the object's functionality. Output only the part names as specified, no explanations.";

pub const PART_SELECTION_QUERY: &str = "Given an image of {user text prompt}, identify which parts of the object should have {component} component based on the object's intended functionality. Select only the minimal number of distinct parts required. Output format: Parts = []";

/// Task 2: map part names to face labels.
pub const LABEL_MAPPING_SYSTEM: &str = "You are an assistant that maps functional parts of an object to their face labels in a labeled axonometric mesh. Use: (1) the description of the object, (2) an image of a labeled mesh, and (3) a list of parts. Select the minimal set of labels that correspond to the listed parts. Output only the label numbers, no explanations.";

pub const LABEL_MAPPING_QUERY: &str = "Given a labeled image of {prompt}, select the label numbers that exactly correspond to the following parts: {parts}. Select only the minimal set of labels needed. Output format: Labels = []";

/// Task 3: reassign labels from conversational feedback.
pub const FEEDBACK_SYSTEM: &str = "You are an assistant that updates component assignments based on user request. Use: (1) the description of the object, (2) the labeled mesh image, (3) the user request. Select the minimal set of labels that fulfill the user request. Output only the label numbers, no explanations.";

pub const FEEDBACK_QUERY: &str = "Given a labeled image of {user prompt}, select the label numbers that match the following request: {user feedback}. Select only the minimal set of labels needed. Output format: Labels = []";

/// Replaces each `{key}` in `template` with its value. Unknown placeholders
/// are left as written.
pub fn fill(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + 64);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                let key = &after[..close];
                match values.iter().find(|(k, _)| *k == key) {
                    Some((_, v)) => out.push_str(v),
                    None => {
                        out.push('{');
                        out.push_str(key);
                        out.push('}');
                    }
                }
                rest = &after[close + 1..];
            }
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

pub fn part_selection_query(user_prompt: &str, component: &str) -> String {
    fill(
        PART_SELECTION_QUERY,
        &[("user text prompt", user_prompt), ("component", component)],
    )
}

pub fn label_mapping_query(user_prompt: &str, parts: &str) -> String {
    fill(LABEL_MAPPING_QUERY, &[("prompt", user_prompt), ("parts", parts)])
}

pub fn feedback_query(user_prompt: &str, feedback: &str) -> String {
    fill(
        FEEDBACK_QUERY,
        &[("user prompt", user_prompt), ("user feedback", feedback)],
    )
}
