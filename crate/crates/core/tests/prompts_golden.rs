mod common;

use std::path::Path;

use common::ScriptedClient;
use panelkit_core::select::{vlm_feedback, vlm_select, RetryPolicy, SelectionRequest};

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap().trim_end_matches('\n').to_string()
}

#[test]
fn outgoing_prompts_match_golden_text() {
    let d = common::fixture("chair");
    let req = SelectionRequest::new("I want a chair", &d, common::images());
    let client = ScriptedClient::new(&["Parts = [seat, backrest]", "Labels = [1, 7]", "Labels = [1]"]);
    vlm_select(&req, &client, RetryPolicy::default()).unwrap();
    vlm_feedback(&req, "I want panels on the seat", &client, RetryPolicy::default()).unwrap();
    let seen = client.requests();
    let tasks = ["part_selection", "label_mapping", "feedback"];
    for (r, task) in seen.iter().zip(tasks) {
        assert_eq!(r.system, golden(&format!("{task}_system.txt")), "{task} system");
        assert_eq!(r.messages.len(), 1);
        assert_eq!(r.messages[0].text, golden(&format!("{task}_query.txt")), "{task} query");
    }
}

#[test]
fn user_text_is_not_rescanned() {
    let q = panelkit_core::select::prompts::feedback_query("a {user feedback} chair", "{user prompt}");
    assert!(q.starts_with("Given a labeled image of a {user feedback} chair,"));
    assert!(q.contains("request: {user prompt}."));
}
