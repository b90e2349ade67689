//! Persistent pipeline state for one user request.

use std::str::FromStr;

use panelkit_core::decompose::Decomposition;
use panelkit_core::geometry::MeshFormat;
use panelkit_core::plan::{AssemblyModel, GripperParams, RobotProgram, SimulationReport, SourceStation};
use panelkit_core::select::{ChatRequest, LabelSet, PartList};
use panelkit_core::ComponentSpec;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Created,
    Discretized,
    Assigned,
    Planned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Strategy {
    Vlm,
    Rule,
    Random,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Vlm => "VLM",
            Strategy::Rule => "RULE",
            Strategy::Random => "RANDOM",
        }
    }
}

impl FromStr for Strategy {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "VLM" => Ok(Strategy::Vlm),
            "RULE" | "RULE_BASED" => Ok(Strategy::Rule),
            "RANDOM" => Ok(Strategy::Random),
            _ => Err(ServiceError::validation("strategy", format!("unknown strategy {s:?}"))),
        }
    }
}

/// One entry of the append-only assignment history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub labels: LabelSet,
    /// Strategy that produced the set; `None` for feedback turns.
    pub strategy: Option<Strategy>,
    /// Seed used by RANDOM, whether supplied or drawn.
    pub seed: Option<u64>,
    /// The request carried no seed and one was drawn.
    #[serde(default)]
    pub seed_drawn: bool,
    pub parts: Option<PartList>,
    pub feedback: Option<String>,
    /// Model calls spent, including retries.
    pub attempts: u32,
    /// Final requests sent to the model, images referenced by view only.
    #[serde(default)]
    pub transcripts: Vec<ChatRequest>,
    pub timestamp_ms: u64,
}

impl AssignmentRecord {
    /// Key used to detect a repeated identical request.
    pub fn request_key(&self) -> String {
        match (&self.feedback, self.strategy) {
            (Some(text), _) => format!("feedback:{text}"),
            (None, Some(Strategy::Random)) if !self.seed_drawn => {
                format!("select:RANDOM:{}", self.seed.unwrap_or_default())
            }
            (None, Some(s)) => format!("select:{}", s.as_str()),
            (None, None) => String::new(),
        }
    }
}

pub fn select_key(strategy: Strategy, seed: Option<u64>) -> String {
    match (strategy, seed) {
        (Strategy::Random, Some(s)) => format!("select:RANDOM:{s}"),
        (s, _) => format!("select:{}", s.as_str()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    /// Index into the assignment history the plan was built from.
    pub assignment: usize,
    pub model: AssemblyModel,
    pub program: RobotProgram,
    pub report: SimulationReport,
    pub stations: (SourceStation, SourceStation),
    pub params: GripperParams,
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderRef {
    pub view: String,
    pub labeled: bool,
    pub svg: String,
    pub png: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub user_prompt: String,
    /// SHA-256 of the uploaded mesh bytes.
    pub mesh_digest: String,
    pub mesh_format: MeshFormat,
    pub status: Status,
    pub created_ms: u64,
    pub spec: Option<ComponentSpec>,
    pub decomp: Option<Decomposition>,
    /// Blob names of the stored renders.
    #[serde(default)]
    pub renders: Vec<RenderRef>,
    #[serde(default)]
    pub history: Vec<AssignmentRecord>,
    #[serde(default)]
    pub plans: Vec<PlanRecord>,
}

impl Session {
    pub fn current_assignment(&self) -> Option<&AssignmentRecord> {
        self.history.last()
    }

    pub fn current_plan(&self) -> Option<&PlanRecord> {
        self.plans.last()
    }

    pub fn decomposition(&self) -> Result<&Decomposition, ServiceError> {
        self.decomp
            .as_ref()
            .ok_or_else(|| ServiceError::state(format!("session {} is not discretized", self.id)))
    }

    pub fn require(&self, allowed: &[Status], op: &str) -> Result<(), ServiceError> {
        if allowed.contains(&self.status) {
            Ok(())
        } else {
            Err(ServiceError::state(format!(
                "{op} is not allowed while the session is {:?}",
                self.status
            )))
        }
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            id: self.id.clone(),
            user_prompt: self.user_prompt.clone(),
            status: self.status,
            label_count: self.decomp.as_ref().map(|d| d.label_count()),
            assignment: self.current_assignment().map(|a| a.labels.clone()),
            verdict: self.current_plan().map(|p| p.report.verdict),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub user_prompt: String,
    pub status: Status,
    pub label_count: Option<usize>,
    pub assignment: Option<LabelSet>,
    pub verdict: Option<panelkit_core::plan::Verdict>,
}

pub fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
