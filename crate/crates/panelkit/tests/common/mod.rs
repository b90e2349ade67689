#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use panelkit::demo::fixtures_dir;
use panelkit::vlm::{SharedClient, TranscriptClient};
use panelkit::{Config, Pipeline};

pub fn config(data: &Path) -> Config {
    let mut cfg = Config {
        data_dir: data.to_path_buf(),
        ..Default::default()
    };
    cfg.vlm.transcripts = vec![fixtures_dir().join("transcripts")];
    cfg
}

pub fn replay_client() -> SharedClient {
    Arc::new(TranscriptClient::load(&[fixtures_dir().join("transcripts")]).unwrap())
}

pub fn pipeline(data: &Path) -> Pipeline {
    Pipeline::new(config(data), replay_client()).unwrap()
}

pub fn mesh(name: &str) -> Vec<u8> {
    std::fs::read(fixtures_dir().join(format!("meshes/{name}.obj"))).unwrap()
}
