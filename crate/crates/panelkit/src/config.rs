//! Service configuration: a TOML file with environment overrides.

use std::path::{Path, PathBuf};

use panelkit_core::plan::{GripperParams, SourceStation, StationId};
use panelkit_core::select::RetryPolicy;
use panelkit_core::{ComponentSpec, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VlmMode {
    /// OpenAI-compatible chat completions endpoint.
    Openai,
    /// Replays recorded transcripts; never touches the network.
    Transcript,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VlmConfig {
    pub mode: VlmMode,
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub max_attempts: u32,
    /// Transcript files, or directories of `*.json` transcripts.
    pub transcripts: Vec<PathBuf>,
}

impl Default for VlmConfig {
    fn default() -> Self {
        Self {
            mode: VlmMode::Transcript,
            base_url: "https://generativelanguage.googleapis.com/v1beta/openai".into(),
            model: "gemini-2.5-pro".into(),
            api_key_env: "PANELKIT_VLM_API_KEY".into(),
            timeout_secs: 120,
            max_attempts: RetryPolicy::default().max_attempts,
            transcripts: vec![PathBuf::from("fixtures/transcripts")],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationConfig {
    pub s0: [f64; 3],
    pub s1: [f64; 3],
}

impl Default for StationConfig {
    fn default() -> Self {
        let (s0, s1) = SourceStation::defaults();
        Self {
            s0: [s0.pickup.x, s0.pickup.y, s0.pickup.z],
            s1: [s1.pickup.x, s1.pickup.y, s1.pickup.z],
        }
    }
}

/// Gripper settings; `h_safe` defaults to twice the structural edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GripperConfig {
    pub h_safe: Option<f64>,
    pub w_open: f64,
    pub w_release: f64,
    pub f_grab: f64,
}

impl Default for GripperConfig {
    fn default() -> Self {
        let g = GripperParams::for_edge(1.0);
        Self {
            h_safe: None,
            w_open: g.w_open,
            w_release: g.w_release,
            f_grab: g.f_grab,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 1024,
            height: 1024,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub data_dir: PathBuf,
    pub listen: String,
    /// Built web UI served under `/ui`.
    pub ui_dir: Option<PathBuf>,
    pub spec: ComponentSpec,
    pub render: RenderConfig,
    pub vlm: VlmConfig,
    pub stations: StationConfig,
    pub gripper: GripperConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            data_dir: PathBuf::from("data"),
            listen: "127.0.0.1:8080".into(),
            ui_dir: None,
            spec: ComponentSpec::default(),
            render: RenderConfig::default(),
            vlm: VlmConfig::default(),
            stations: StationConfig::default(),
            gripper: GripperConfig::default(),
        }
    }
}

fn bad(key: &str, value: &str) -> ServiceError {
    ServiceError::validation("config", format!("{key}: cannot parse {value:?}"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ServiceError> {
    value.trim().parse().map_err(|_| bad(key, value))
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ServiceError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ServiceError::validation("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` if given, then applies `PANELKIT_*` environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ServiceError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| ServiceError::validation("config", format!("{}: {e}", p.display())))?;
                Self::from_toml(&text)?
            }
            None => Self::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), ServiceError> {
        if let Some(v) = var("PANELKIT_DATA_DIR") {
            self.data_dir = v.into();
        }
        if let Some(v) = var("PANELKIT_LISTEN") {
            self.listen = v;
        }
        if let Some(v) = var("PANELKIT_UI_DIR") {
            self.ui_dir = Some(v.into());
        }
        if let Some(v) = var("PANELKIT_STRUCTURAL_EDGE") {
            self.spec.structural_edge = parse("PANELKIT_STRUCTURAL_EDGE", &v)?;
        }
        if let Some(v) = var("PANELKIT_PANEL_THICKNESS") {
            self.spec.panel_thickness = parse("PANELKIT_PANEL_THICKNESS", &v)?;
        }
        if let Some(v) = var("PANELKIT_VLM_MODE") {
            self.vlm.mode = match v.trim() {
                "openai" => VlmMode::Openai,
                "transcript" => VlmMode::Transcript,
                _ => return Err(bad("PANELKIT_VLM_MODE", &v)),
            };
        }
        if let Some(v) = var("PANELKIT_VLM_BASE_URL") {
            self.vlm.base_url = v;
        }
        if let Some(v) = var("PANELKIT_VLM_MODEL") {
            self.vlm.model = v;
        }
        if let Some(v) = var("PANELKIT_VLM_TRANSCRIPTS") {
            self.vlm.transcripts = std::env::split_paths(&v).collect();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ServiceError> {
        self.spec.validate()?;
        if self.render.width == 0 || self.render.height == 0 {
            return Err(ServiceError::validation("config", "render canvas must be non-empty"));
        }
        if self.vlm.max_attempts == 0 {
            return Err(ServiceError::validation("config", "vlm.max_attempts must be at least 1"));
        }
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let g = &self.gripper;
        if !(ok(g.w_open) && ok(g.w_release) && ok(g.f_grab) && g.h_safe.is_none_or(ok)) {
            return Err(ServiceError::validation("config", "gripper values must be positive"));
        }
        Ok(())
    }

    pub fn stations(&self) -> (SourceStation, SourceStation) {
        let v = |p: [f64; 3]| Vec3::new(p[0], p[1], p[2]);
        (
            SourceStation {
                id: StationId::S0Conveyor,
                pickup: v(self.stations.s0),
            },
            SourceStation {
                id: StationId::S1Stack,
                pickup: v(self.stations.s1),
            },
        )
    }

    pub fn gripper(&self) -> GripperParams {
        let g = &self.gripper;
        GripperParams {
            h_safe: g.h_safe.unwrap_or(2.0 * self.spec.structural_edge),
            w_open: g.w_open,
            w_release: g.w_release,
            f_grab: g.f_grab,
        }
    }

    pub fn retry(&self) -> RetryPolicy {
        RetryPolicy {
            max_attempts: self.vlm.max_attempts,
        }
    }
}
