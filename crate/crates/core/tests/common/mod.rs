#![allow(dead_code)]
pub mod oracles;


use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::Mutex;

use panelkit_core::decompose::Decomposition;
use panelkit_core::evalstats::{Method, Response, ResponseTable};
use panelkit_core::select::{ChatRequest, ChatVisionClient, ImageAttachment, TransportError, TransportErrorKind};
use panelkit_core::{decompose, load_mesh, voxelize, CellIndex, ComponentSpec, MeshFormat, VoxelGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FIXTURES: [&str; 6] = ["chair", "table", "shelf", "lamp", "bowl", "trash"];

pub fn fixture_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

pub fn fixture(name: &str) -> Decomposition {
    let bytes = std::fs::read(fixture_path(&format!("meshes/{name}.obj"))).expect("fixture mesh");
    let mesh = load_mesh(&bytes, MeshFormat::Obj).expect("parse");
    let grid = voxelize(&mesh, &ComponentSpec::default()).expect("voxelize");
    decompose(&grid).expect("decompose")
}

pub fn grid(cell: f64, cells: &[[u32; 3]]) -> VoxelGrid {
    let cells: Vec<CellIndex> = cells.iter().map(|&c| c.into()).collect();
    VoxelGrid::from_cells(cell, &cells).unwrap()
}

pub fn images() -> Vec<ImageAttachment> {
    let img = |view: &str, labeled| ImageAttachment {
        view: view.into(),
        labeled,
        png: vec![0x89, b'P', b'N', b'G'],
    };
    vec![img("A", false), img("A", true), img("B", true)]
}

/// Replies from a fixed queue and records every request it saw.
pub struct ScriptedClient {
    replies: Mutex<VecDeque<String>>,
    pub seen: Mutex<Vec<ChatRequest>>,
}

impl ScriptedClient {
    pub fn new(replies: &[&str]) -> Self {
        Self {
            replies: Mutex::new(replies.iter().map(|s| s.to_string()).collect()),
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.seen.lock().unwrap().clone()
    }
}

impl ChatVisionClient for ScriptedClient {
    fn complete(&self, request: &ChatRequest) -> Result<String, TransportError> {
        self.seen.lock().unwrap().push(request.clone());
        self.replies
            .lock()
            .unwrap()
            .pop_front()
            .ok_or_else(|| TransportError::new(TransportErrorKind::UnknownRequest, "script exhausted"))
    }
}

/// Connected occupancy grown from the ground by upward and sideways steps
/// only, so every cell has a non-descending path to the ground layer.
pub fn grown_grid(rng: &mut ChaCha8Rng, max_cells: usize, size: u32) -> Vec<[u32; 3]> {
    let target = rng.random_range(1..=max_cells);
    let mut cells = vec![[rng.random_range(0..size), rng.random_range(0..size), 0]];
    let mut tries = 0;
    while cells.len() < target && tries < 20 * max_cells {
        tries += 1;
        let from = cells[rng.random_range(0..cells.len())];
        let step: [i32; 3] = match rng.random_range(0..5) {
            0 => [1, 0, 0],
            1 => [-1, 0, 0],
            2 => [0, 1, 0],
            3 => [0, -1, 0],
            _ => [0, 0, 1],
        };
        let next = [
            from[0] as i32 + step[0],
            from[1] as i32 + step[1],
            from[2] as i32 + step[2],
        ];
        if next.iter().any(|&v| v < 0 || v >= size as i32) {
            continue;
        }
        let next = [next[0] as u32, next[1] as u32, next[2] as u32];
        if !cells.contains(&next) {
            cells.push(next);
        }
    }
    cells
}

/// Arbitrary occupancy in a `size`^3 box, not necessarily connected.
pub fn random_grid(rng: &mut ChaCha8Rng, size: u32, density: f64) -> Vec<[u32; 3]> {
    let mut cells = Vec::new();
    for i in 0..size {
        for j in 0..size {
            for k in 0..size {
                if rng.random_bool(density) {
                    cells.push([i, j, k]);
                }
            }
        }
    }
    if cells.is_empty() {
        cells.push([0, 0, 0]);
    }
    cells
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const TABLE1_OBJECTS: [&str; 5] = ["chair", "table", "lamp", "shelf", "trash"];

/// Selected counts per object, in `TABLE1_OBJECTS` order, for VLM / rule / random.
pub const TABLE1_COUNTS: [[usize; 5]; 3] = [[31, 32, 26, 32, 24], [6, 32, 11, 32, 14], [0, 0, 0, 2, 2]];

fn record(p: usize, object: &str, method: Method, selected: bool) -> Response {
    Response {
        participant: format!("p{:02}", p + 1),
        object: object.into(),
        method,
        selected,
    }
}

/// 32 participants; for each object and method the first `count`
/// participants selected it.
pub fn table1_fixture() -> ResponseTable {
    let mut records = Vec::new();
    for (o, object) in TABLE1_OBJECTS.iter().enumerate() {
        for p in 0..32 {
            for (m, method) in Method::ALL.into_iter().enumerate() {
                records.push(record(p, object, method, p < TABLE1_COUNTS[m][o]));
            }
        }
    }
    ResponseTable::new(records).unwrap()
}

/// Joint (VLM, rule, random) patterns over the 160 participant-object
/// pairs, chosen so the pooled discordant counts are (56, 7), (143, 2) and
/// (94, 2).
pub const TABLE5_PATTERNS: [([bool; 3], usize); 6] = [
    ([true, false, false], 56),
    ([true, true, false], 87),
    ([false, true, false], 7),
    ([false, false, true], 2),
    ([true, true, true], 2),
    ([false, false, false], 6),
];

pub fn table5_fixture() -> ResponseTable {
    let mut pairs = Vec::new();
    for object in TABLE1_OBJECTS {
        for p in 0..32 {
            pairs.push((p, object));
        }
    }
    let mut records = Vec::new();
    let mut it = pairs.into_iter();
    for (pattern, n) in TABLE5_PATTERNS {
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
