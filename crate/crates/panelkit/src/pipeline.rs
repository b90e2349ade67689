//! Session operations shared by the REST service and the CLI.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use panelkit_core::geometry::MeshFormat;
use panelkit_core::plan::{
    build_assembly, emit_program, sequence, simulate, PlacementTarget, RobotProgram, SimulationReport,
};
use panelkit_core::render::{project, render_svg, standard_views, AxonometricView, LabeledScene, RenderOptions};
use panelkit_core::select::{
    random_select, rule_based_select, vlm_feedback, vlm_select, ImageAttachment, LabelSet, SelectionRequest,
};
use panelkit_core::{decompose, load_mesh, voxelize, ComponentSpec};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::error::ServiceError;
use crate::raster::render_png;
use crate::session::{now_ms, select_key, AssignmentRecord, PlanRecord, RenderRef, Session, Status, Strategy};
use crate::store::{SessionStore, MESH_BLOB};
use crate::vlm::SharedClient;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Svg,
    Png,
}

/// Options for an on-demand render.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderQuery {
    pub view: String,
    pub labeled: bool,
    /// Fill the current assignment with the highlight color.
    pub highlight: bool,
    pub canvas: Option<(u32, u32)>,
}

impl RenderQuery {
    pub fn new(view: &str, labeled: bool) -> Self {
        Self {
            view: view.to_string(),
            labeled,
            highlight: false,
            canvas: None,
        }
    }
}

pub struct Pipeline {
    pub config: Config,
    pub store: SessionStore,
    client: SharedClient,
}

fn blob_name(view: &str, labeled: bool, ext: &str) -> String {
    let kind = if labeled { "labeled" } else { "plain" };
    format!("render_{view}_{kind}.{ext}")
}

fn view_named(name: &str) -> Result<AxonometricView, ServiceError> {
    let (a, b) = standard_views();
    match name {
        "A" | "a" => Ok(a),
        "B" | "b" => Ok(b),
        _ => Err(ServiceError::validation("view", format!("unknown view {name:?}; use A or B"))),
    }
}

impl Pipeline {
    pub fn new(config: Config, client: SharedClient) -> Result<Self, ServiceError> {
        config.validate()?;
        let store = SessionStore::open(&config.data_dir)?;
        Ok(Self { config, store, client })
    }

    pub fn load(&self, id: &str) -> Result<Session, ServiceError> {
        let lock = self.store.lock(id);
        let _g = lock.read();
        self.store.load(id)
    }

    /// Runs `f` on the session under its exclusive lock and saves the result
    /// if `f` reports a change.
    fn mutate(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> Result<bool, ServiceError>,
    ) -> Result<Session, ServiceError> {
        let lock = self.store.lock(id);
        let _g = lock.write();
        let mut s = self.store.load(id)?;
        if f(&mut s)? {
            self.store.save(&s)?;
        }
        Ok(s)
    }

    /// Stores the mesh and opens a session. Identical uploads create
    /// independent sessions.
    pub fn create_session(
        &self,
        prompt: &str,
        mesh: &[u8],
        format: Option<MeshFormat>,
        file_name: Option<&str>,
    ) -> Result<Session, ServiceError> {
        if prompt.trim().is_empty() {
            return Err(ServiceError::validation("empty_prompt", "prompt is empty"));
        }
        let ext = file_name.and_then(|n| std::path::Path::new(n).extension()).and_then(|e| e.to_str());
        let format = format.unwrap_or_else(|| MeshFormat::sniff(mesh, ext));
        load_mesh(mesh, format)?;
        let session = Session {
            id: uuid::Uuid::new_v4().to_string(),
            user_prompt: prompt.trim().to_string(),
            mesh_digest: hex::encode(Sha256::digest(mesh)),
            mesh_format: format,
            status: Status::Created,
            created_ms: now_ms(),
            spec: None,
            decomp: None,
            renders: Vec::new(),
            history: Vec::new(),
            plans: Vec::new(),
        };
        self.store.create(&session, mesh)?;
        Ok(session)
    }

    /// Voxelizes, decomposes and stores both standard renders, labeled and
    /// plain. Repeating the call with the same spec changes nothing.
    pub fn discretize(&self, id: &str, spec: Option<ComponentSpec>) -> Result<Session, ServiceError> {
        let spec = spec.unwrap_or(self.config.spec);
        spec.validate()?;
        self.mutate(id, |s| {
            if s.status != Status::Created {
                if s.spec == Some(spec) {
                    return Ok(false);
                }
                return Err(ServiceError::state(format!(
                    "session is {:?}; it was discretized with a different spec",
                    s.status
                )));
            }
            let bytes = self.store.read_blob(&s.id, MESH_BLOB)?;
            let mesh = load_mesh(&bytes, s.mesh_format)?;
            let grid = voxelize(&mesh, &spec)?;
            let decomp = decompose(&grid)?;
            let mut renders = Vec::new();
            for view in ["A", "B"] {
                for labeled in [false, true] {
                    let scene = project(&decomp, &view_named(view)?, &self.options(labeled, BTreeSet::new(), None));
                    let svg = blob_name(view, labeled, "svg");
                    let png = blob_name(view, labeled, "png");
                    self.store.write_blob(&s.id, &svg, &render_svg(&scene))?;
                    self.store.write_blob(&s.id, &png, &render_png(&scene)?)?;
                    renders.push(RenderRef {
                        view: view.into(),
                        labeled,
                        svg,
                        png,
                    });
                }
            }
            s.spec = Some(spec);
            s.decomp = Some(decomp);
            s.renders = renders;
            s.status = Status::Discretized;
            Ok(true)
        })
    }

    fn options(&self, labeled: bool, highlight: BTreeSet<u32>, canvas: Option<(u32, u32)>) -> RenderOptions {
        let (width, height) = canvas.unwrap_or((self.config.render.width, self.config.render.height));
        RenderOptions {
            width,
            height,
            labeled,
            highlight,
        }
    }

    pub fn scene(&self, id: &str, q: &RenderQuery) -> Result<LabeledScene, ServiceError> {
        let s = self.load(id)?;
        let highlight = if q.highlight {
            s.current_assignment().map(|a| a.labels.labels.clone()).unwrap_or_default()
        } else {
            BTreeSet::new()
        };
        Ok(project(s.decomposition()?, &view_named(&q.view)?, &self.options(q.labeled, highlight, q.canvas)))
    }

    /// Stored render bytes, or a fresh render for highlighted or resized
    /// requests.
    pub fn render(&self, id: &str, q: &RenderQuery, format: ImageFormat) -> Result<Vec<u8>, ServiceError> {
        view_named(&q.view)?;
        if !q.highlight && q.canvas.is_none() {
            let s = self.load(id)?;
            s.decomposition()?;
            let view = q.view.to_ascii_uppercase();
            let ext = match format {
                ImageFormat::Svg => "svg",
                ImageFormat::Png => "png",
            };
            return self.store.read_blob(id, &blob_name(&view, q.labeled, ext));
        }
        let scene = self.scene(id, q)?;
        match format {
            ImageFormat::Svg => Ok(render_svg(&scene)),
            ImageFormat::Png => render_png(&scene),
        }
    }

    fn images(&self, s: &Session) -> Result<Vec<ImageAttachment>, ServiceError> {
        let mut out = Vec::new();
        for (view, labeled) in [("A", false), ("A", true), ("B", true)] {
            out.push(ImageAttachment {
                view: view.into(),
                labeled,
                png: self.store.read_blob(&s.id, &blob_name(view, labeled, "png"))?,
            });
        }
        Ok(out)
    }

    fn run_strategy(&self, s: &Session, strategy: Strategy, seed: Option<u64>) -> Result<AssignmentRecord, ServiceError> {
        let decomp = s.decomposition()?;
        let mut rec = AssignmentRecord {
            labels: LabelSet::new(BTreeSet::new(), panelkit_core::select::Provenance::Rule),
            strategy: Some(strategy),
            seed: None,
            seed_drawn: false,
            parts: None,
            feedback: None,
            attempts: 0,
            transcripts: Vec::new(),
            timestamp_ms: now_ms(),
        };
        match strategy {
            Strategy::Rule => rec.labels = rule_based_select(decomp),
            Strategy::Random => {
                rec.seed_drawn = seed.is_none();
                let seed = seed.unwrap_or_else(rand::random);
                rec.seed = Some(seed);
                rec.labels = random_select(decomp, seed);
            }
            Strategy::Vlm => {
                let req = SelectionRequest::new(&s.user_prompt, decomp, self.images(s)?);
                let (parts, out) = vlm_select(&req, &*self.client, self.config.retry())?;
                rec.parts = Some(parts);
                rec.attempts = out.attempts;
                rec.transcripts.push(out.transcript);
                rec.labels = out.value;
            }
        }
        Ok(rec)
    }

    /// Computes a selection without recording it.
    pub fn preview(&self, id: &str, strategy: Strategy, seed: Option<u64>) -> Result<AssignmentRecord, ServiceError> {
        let s = self.load(id)?;
        s.require(&[Status::Discretized, Status::Assigned, Status::Planned], "select")?;
        self.run_strategy(&s, strategy, seed)
    }

    /// Appends a selection. Repeating the latest request is a no-op; a
    /// RANDOM request without a seed draws one and records it.
    pub fn select(&self, id: &str, strategy: Strategy, seed: Option<u64>) -> Result<Session, ServiceError> {
        self.mutate(id, |s| {
            s.require(&[Status::Discretized, Status::Assigned, Status::Planned], "select")?;
            let key = select_key(strategy, seed);
            if s.status == Status::Assigned && s.current_assignment().is_some_and(|a| a.request_key() == key) {
                return Ok(false);
            }
            let rec = self.run_strategy(s, strategy, seed)?;
            s.history.push(rec);
            s.status = Status::Assigned;
            Ok(true)
        })
    }

    /// Replaces the assignment with the model's reading of `text`.
    pub fn feedback(&self, id: &str, text: &str) -> Result<Session, ServiceError> {
        if text.trim().is_empty() {
            return Err(ServiceError::validation("empty_feedback", "feedback is empty"));
        }
        self.mutate(id, |s| {
            s.require(&[Status::Assigned, Status::Planned], "feedback")?;
            let key = format!("feedback:{text}");
            if s.status == Status::Assigned && s.current_assignment().is_some_and(|a| a.request_key() == key) {
                return Ok(false);
            }
            let decomp = s.decomposition()?;
            let req = SelectionRequest::new(&s.user_prompt, decomp, self.images(s)?);
            let out = vlm_feedback(&req, text, &*self.client, self.config.retry())?;
            s.history.push(AssignmentRecord {
                labels: out.value,
                strategy: None,
                seed: None,
                seed_drawn: false,
                parts: None,
                feedback: Some(text.to_string()),
                attempts: out.attempts,
                transcripts: vec![out.transcript],
                timestamp_ms: now_ms(),
            });
            s.status = Status::Assigned;
            Ok(true)
        })
    }

    /// Builds, sequences, emits and simulates a plan for the latest
    /// assignment. Earlier plans are kept.
    pub fn plan(&self, id: &str) -> Result<Session, ServiceError> {
        self.mutate(id, |s| {
            s.require(&[Status::Assigned, Status::Planned], "plan")?;
            let latest = s.history.len() - 1;
            let stations = self.config.stations();
            let params = self.config.gripper();
            if s.status == Status::Planned
                && s.current_plan()
                    .is_some_and(|p| p.assignment == latest && p.stations == stations && p.params == params)
            {
                return Ok(false);
            }
            let spec = s.spec.ok_or_else(|| ServiceError::state("session has no component spec"))?;
            let decomp = s.decomposition()?;
            let labels = &s.history[latest].labels;
            let model = sequence(&build_assembly(&decomp.grid, labels, decomp, &spec)?)?;
            let program = emit_program(&model, stations, params)?;
            let report = simulate(&program, &spec);
            s.plans.push(PlanRecord {
                assignment: latest,
                model,
                program,
                report,
                stations,
                params,
                timestamp_ms: now_ms(),
            });
            s.status = Status::Planned;
            Ok(true)
        })
    }

    pub fn program(&self, id: &str) -> Result<RobotProgram, ServiceError> {
        let s = self.load(id)?;
        s.current_plan()
            .map(|p| p.program.clone())
            .ok_or_else(|| ServiceError::state("session has no plan"))
    }

    /// Re-runs the simulator on the stored program.
    pub fn simulate(&self, id: &str) -> Result<SimulationReport, ServiceError> {
        let s = self.load(id)?;
        let plan = s.current_plan().ok_or_else(|| ServiceError::state("session has no plan"))?;
        let spec = s.spec.ok_or_else(|| ServiceError::state("session has no component spec"))?;
        Ok(simulate(&plan.program, &spec))
    }

    /// Recomputes every recorded assignment from its seed, strategy or
    /// feedback text.
    pub fn replay(&self, id: &str) -> Result<Vec<LabelSet>, ServiceError> {
        let s = self.load(id)?;
        let decomp = s.decomposition()?;
        let mut out = Vec::new();
        for rec in &s.history {
            let labels = match (&rec.feedback, rec.strategy) {
                (Some(text), _) => {
                    let req = SelectionRequest::new(&s.user_prompt, decomp, self.images(&s)?);
                    vlm_feedback(&req, text, &*self.client, self.config.retry())?.value
                }
                (None, Some(strategy)) => self.run_strategy(&s, strategy, rec.seed)?.labels,
                (None, None) => return Err(ServiceError::internal("history entry without origin")),
            };
            out.push(labels);
        }
        Ok(out)
    }

    pub fn list(&self) -> Result<Vec<Session>, ServiceError> {
        self.store.list()?.iter().map(|id| self.load(id)).collect()
    }
}

/// One row per pick-and-place step.
pub fn program_csv(program: &RobotProgram) -> String {
    let mut out = String::from("step,ctype,kind,source,i,j,k,face,x,y,z,rx,ry,rz\n");
    for (n, step) in program.steps.iter().enumerate() {
        let (cell, face) = match step.target {
            PlacementTarget::Cell { cell } => (cell, ""),
            PlacementTarget::Face { cell, dir } => (cell, dir.as_str()),
        };
        let kind = match step.ctype {
            panelkit_core::plan::ComponentKind::Structural => "structural",
            panelkit_core::plan::ComponentKind::Panel => "panel",
        };
        let source = match step.source {
            panelkit_core::plan::StationId::S0Conveyor => "S0",
            panelkit_core::plan::StationId::S1Stack => "S1",
        };
        let p = step.place.position;
        let r = step.place.rotation;
        let _ = writeln!(
            out,
            "{},{},{kind},{source},{},{},{},{face},{},{},{},{},{},{}",
            n + 1,
            step.ctype.code(),
            cell.i,
            cell.j,
            cell.k,
            p.x,
            p.y,
            p.z,
            r[0],
            r[1],
            r[2]
        );
    }
    out
}
