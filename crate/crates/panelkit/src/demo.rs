//! Scripted model conversations over the bundled fixture meshes, used to
//! record the replay transcripts the offline mode serves.

use std::path::PathBuf;
use std::sync::Arc;

use panelkit_core::select::{prompts, ChatRequest, TransportError, TransportErrorKind};

use crate::config::Config;
use crate::error::ServiceError;
use crate::pipeline::Pipeline;
use crate::session::Strategy;
use crate::vlm::{FnClient, RecordingClient, Transcript};

#[derive(Debug, Clone, Copy)]
pub struct DemoScript {
    pub name: &'static str,
    pub prompt: &'static str,
    /// Mesh path relative to the fixtures directory.
    pub mesh: &'static str,
    pub parts_reply: &'static str,
    pub labels_reply: &'static str,
    /// Feedback text and the reply to it.
    pub feedback: Option<(&'static str, &'static str)>,
}

pub const DEMOS: [DemoScript; 3] = [
    DemoScript {
        name: "chair",
        prompt: "Make me a chair",
        mesh: "meshes/chair.obj",
        parts_reply: "Parts = seat, backrest",
        labels_reply: "Labels = 1, 7",
        feedback: Some(("I want panels on the seat", "Labels = 1")),
    },
    DemoScript {
        name: "bowl",
        prompt: "Make me a bowl",
        mesh: "meshes/bowl.obj",
        parts_reply: "Parts = bottom, rim",
        labels_reply: "Labels = 1, 2",
        feedback: Some(("Panels only for the bottom", "Labels = 1")),
    },
    DemoScript {
        name: "table",
        prompt: "Make me a table",
        mesh: "meshes/table.obj",
        parts_reply: "Parts = tabletop",
        labels_reply: "Labels = 1",
        feedback: None,
    },
];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn demo(name: &str) -> Option<&'static DemoScript> {
    DEMOS.iter().find(|d| d.name == name)
}

/// Runs the demo against a scripted model in a scratch store and returns
/// every exchange. `base` supplies spec and render settings.
pub fn record_demo(demo: &DemoScript, base: &Config) -> Result<Transcript, ServiceError> {
    let scratch = tempfile::tempdir()?;
    let mut cfg = base.clone();
    cfg.data_dir = scratch.path().to_path_buf();
    let d = *demo;
    let script = FnClient(move |req: &ChatRequest| {
        let reply = match req.system.as_str() {
            prompts::PART_SELECTION_SYSTEM => d.parts_reply,
            prompts::LABEL_MAPPING_SYSTEM => d.labels_reply,
            prompts::FEEDBACK_SYSTEM => d.feedback.map(|f| f.1).unwrap_or_default(),
            _ => return Err(TransportError::new(TransportErrorKind::UnknownRequest, "unscripted task")),
        };
        Ok(reply.to_string())
    });
    let recorder = Arc::new(RecordingClient::new(script));
    let p = Pipeline::new(cfg, recorder.clone())?;
    let mesh = std::fs::read(fixtures_dir().join(demo.mesh))?;
    let s = p.create_session(demo.prompt, &mesh, None, Some(demo.mesh))?;
    p.discretize(&s.id, None)?;
    p.select(&s.id, Strategy::Vlm, None)?;
    if let Some((text, _)) = demo.feedback {
        p.feedback(&s.id, text)?;
    }
    Ok(Transcript {
        name: demo.name.to_string(),
        exchanges: recorder.exchanges(),
    })
}
