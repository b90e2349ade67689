//! Regenerates `fixtures/responses/*.csv` and `fixtures/transcripts/*.json`.
//!
//!     cargo run -p panelkit --example record_fixtures

use panelkit::demo::{fixtures_dir, record_demo, DEMOS};
use panelkit::responses::write_responses;
use panelkit::Config;
use panelkit_core::evalstats::{Method, Response, ResponseTable};

const OBJECTS: [&str; 5] = ["chair", "table", "lamp", "shelf", "trash"];
const PARTICIPANTS: usize = 32;

/// Selected counts per object for VLM, rule and random.
const COUNTS: [[usize; 5]; 3] = [[31, 32, 26, 32, 24], [6, 32, 11, 32, 14], [0, 0, 0, 2, 2]];

/// Joint (VLM, rule, random) choices and how many participant-object pairs
/// made them.
const PATTERNS: [([bool; 3], usize); 6] = [
    ([true, false, false], 56),
    ([true, true, false], 87),
    ([false, true, false], 7),
    ([false, false, true], 2),
    ([true, true, true], 2),
    ([false, false, false], 6),
];

fn record(p: usize, object: &str, method: Method, selected: bool) -> Response {
    Response {
        participant: format!("p{:02}", p + 1),
        object: object.into(),
        method,
        selected,
    }
}

fn marginals() -> ResponseTable {
    let mut records = Vec::new();
    for (o, object) in OBJECTS.iter().enumerate() {
        for p in 0..PARTICIPANTS {
            for (m, method) in Method::ALL.into_iter().enumerate() {
                records.push(record(p, object, method, p < COUNTS[m][o]));
            }
        }
    }
    ResponseTable::new(records).unwrap()
}

fn discordants() -> ResponseTable {
    let pairs: Vec<(usize, &str)> = OBJECTS.iter().flat_map(|o| (0..PARTICIPANTS).map(move |p| (p, *o))).collect();
    let mut it = pairs.into_iter();
    let mut records = Vec::new();
    for (pattern, n) in PATTERNS {
        for _ in 0..n {
            let (p, object) = it.next().unwrap();
            for (m, method) in Method::ALL.into_iter().enumerate() {
                records.push(record(p, object, method, pattern[m]));
            }
        }
    }
    assert!(it.next().is_none());
    ResponseTable::new(records).unwrap()
}

fn main() {
    let root = fixtures_dir();
    let responses = root.join("responses");
    std::fs::create_dir_all(&responses).unwrap();
    std::fs::write(responses.join("selection_rates.csv"), write_responses(&marginals())).unwrap();
    std::fs::write(responses.join("discordant_pairs.csv"), write_responses(&discordants())).unwrap();

    let transcripts = root.join("transcripts");
    std::fs::create_dir_all(&transcripts).unwrap();
    let cfg = Config::default();
    for demo in &DEMOS {
        let t = record_demo(demo, &cfg).unwrap();
        std::fs::write(transcripts.join(format!("{}.json", demo.name)), t.to_json()).unwrap();
        println!("{}: {} exchanges", demo.name, t.exchanges.len());
    }
}
