use panelkit_core::decompose::DecomposeError;
use panelkit_core::evalstats::EvalError;
use panelkit_core::geometry::GeometryError;
use panelkit_core::plan::PlanError;
use panelkit_core::render::RenderError;
use panelkit_core::select::SelectError;
use serde::Serialize;

/// Broad failure class, shared by the HTTP status and the CLI exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    /// Bad input: malformed mesh, empty prompt, unknown label.
    Validation,
    /// Input was well formed but cannot be processed, e.g. a flat mesh.
    Unprocessable,
    NotFound,
    /// Operation not allowed in the session's current status.
    State,
    /// The vision model endpoint failed or kept replying unusably.
    Upstream,
    Internal,
}

impl ErrorClass {
    pub fn http_status(self) -> u16 {
        match self {
            ErrorClass::Validation => 400,
            ErrorClass::Unprocessable => 422,
            ErrorClass::NotFound => 404,
            ErrorClass::State => 409,
            ErrorClass::Upstream => 502,
            ErrorClass::Internal => 500,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Validation | ErrorClass::Unprocessable | ErrorClass::NotFound | ErrorClass::State => 2,
            ErrorClass::Upstream => 3,
            ErrorClass::Internal => 4,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, Serialize)]
#[error("{code}: {message}")]
pub struct ServiceError {
    pub class: ErrorClass,
    /// Stable machine-readable code, e.g. `degenerate_mesh`.
    pub code: String,
    pub message: String,
}

impl ServiceError {
    pub fn new(class: ErrorClass, code: &str, message: impl Into<String>) -> Self {
        Self {
            class,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn validation(code: &str, message: impl Into<String>) -> Self {
        Self::new(ErrorClass::Validation, code, message)
    }

    pub fn state(message: impl Into<String>) -> Self {
        Self::new(ErrorClass::State, "invalid_state", message)
    }

    pub fn not_found(what: &str) -> Self {
        Self::new(ErrorClass::NotFound, "not_found", format!("{what} not found"))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorClass::Internal, "internal", message)
    }
}

impl From<GeometryError> for ServiceError {
    fn from(e: GeometryError) -> Self {
        let (class, code) = match &e {
            GeometryError::Parse { .. } => (ErrorClass::Validation, "parse_error"),
            GeometryError::EmptyMesh => (ErrorClass::Validation, "empty_mesh"),
            GeometryError::InvalidIndex { .. } => (ErrorClass::Validation, "invalid_index"),
            GeometryError::NonFiniteVertex(_) => (ErrorClass::Validation, "non_finite_vertex"),
            GeometryError::DegenerateMesh(_) => (ErrorClass::Unprocessable, "degenerate_mesh"),
            GeometryError::ResolutionTooCoarse => (ErrorClass::Unprocessable, "resolution_too_coarse"),
            GeometryError::ResolutionTooFine { .. } => (ErrorClass::Unprocessable, "resolution_too_fine"),
            GeometryError::InvalidSpec(_) => (ErrorClass::Validation, "invalid_spec"),
        };
        Self::new(class, code, e.to_string())
    }
}

impl From<DecomposeError> for ServiceError {
    fn from(e: DecomposeError) -> Self {
        Self::new(ErrorClass::Unprocessable, "empty_grid", e.to_string())
    }
}

impl From<RenderError> for ServiceError {
    fn from(e: RenderError) -> Self {
        Self::validation("render", e.to_string())
    }
}

impl From<SelectError> for ServiceError {
    fn from(e: SelectError) -> Self {
        match &e {
            SelectError::Precondition(_) => Self::validation("precondition", e.to_string()),
            SelectError::Transport(_) => Self::new(ErrorClass::Upstream, "vlm_transport", e.to_string()),
            SelectError::Grammar { .. } => Self::new(ErrorClass::Upstream, "vlm_grammar", e.to_string()),
            SelectError::Validation { .. } => Self::new(ErrorClass::Upstream, "vlm_labels", e.to_string()),
        }
    }
}

impl From<PlanError> for ServiceError {
    fn from(e: PlanError) -> Self {
        match &e {
            PlanError::UnknownLabels(_) => Self::validation("unknown_labels", e.to_string()),
            PlanError::Config(_) => Self::validation("config", e.to_string()),
            PlanError::EmptyAssembly => Self::new(ErrorClass::Unprocessable, "empty_assembly", e.to_string()),
            PlanError::GridMismatch => Self::internal(e.to_string()),
        }
    }
}

impl From<EvalError> for ServiceError {
    fn from(e: EvalError) -> Self {
        Self::validation("responses", e.to_string())
    }
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        Self::internal(format!("io: {e}"))
    }
}

impl From<serde_json::Error> for ServiceError {
    fn from(e: serde_json::Error) -> Self {
        Self::internal(format!("json: {e}"))
    }
}
