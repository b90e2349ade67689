//! HTTP/JSON routes over [`Pipeline`].

use std::path::{Component, Path as FsPath, PathBuf};
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use panelkit_core::geometry::MeshFormat;
use panelkit_core::ComponentSpec;
use serde::Deserialize;
use serde_json::json;

use crate::error::{ErrorClass, ServiceError};
use crate::pipeline::{program_csv, ImageFormat, Pipeline, RenderQuery};
use crate::session::Strategy;

type Shared = Arc<Pipeline>;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.class.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let body = json!({"error": {"code": self.code, "class": self.class, "message": self.message}});
        (status, Json(body)).into_response()
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ServiceError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::validation("bad_request", e.body_text()))
}

/// Runs a blocking pipeline call off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ServiceError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::internal(format!("worker failed: {e}")))?
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateBody {
    pub prompt: String,
    pub format: Option<MeshFormat>,
    pub filename: Option<String>,
    /// Mesh bytes, base64 encoded.
    pub mesh_base64: Option<String>,
    /// Mesh given as text, for OBJ and ASCII STL.
    pub mesh_text: Option<String>,
}

async fn create(State(p): State<Shared>, payload: Result<Json<CreateBody>, JsonRejection>) -> Result<Response, ServiceError> {
    let b = body(payload)?;
    let mesh = match (b.mesh_base64, b.mesh_text) {
        (Some(b64), None) => base64::engine::general_purpose::STANDARD
            .decode(b64.trim())
            .map_err(|e| ServiceError::validation("bad_request", format!("mesh_base64: {e}")))?,
        (None, Some(text)) => text.into_bytes(),
        _ => {
            return Err(ServiceError::validation(
                "bad_request",
                "give exactly one of mesh_base64 and mesh_text",
            ))
        }
    };
    let s = blocking(move || p.create_session(&b.prompt, &mesh, b.format, b.filename.as_deref())).await?;
    Ok((StatusCode::CREATED, Json(s)).into_response())
}

async fn list(State(p): State<Shared>) -> Result<Response, ServiceError> {
    let sessions = blocking(move || p.list()).await?;
    let summaries: Vec<_> = sessions.iter().map(|s| s.summary()).collect();
    Ok(Json(summaries).into_response())
}

async fn show(State(p): State<Shared>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(blocking(move || p.load(&id)).await?).into_response())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizeBody {
    pub structural_edge: Option<f64>,
    pub panel_thickness: Option<f64>,
}

async fn discretize(
    State(p): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<DiscretizeBody>, JsonRejection>,
) -> Result<Response, ServiceError> {
    // An absent body means the configured spec.
    let b = match payload {
        Err(JsonRejection::MissingJsonContentType(_)) => DiscretizeBody::default(),
        other => body(other)?,
    };
    let spec = match (b.structural_edge, b.panel_thickness) {
        (None, None) => None,
        (e, t) => Some(ComponentSpec::new(
            e.unwrap_or(p.config.spec.structural_edge),
            t.unwrap_or(p.config.spec.panel_thickness),
        )?),
    };
    Ok(Json(blocking(move || p.discretize(&id, spec)).await?).into_response())
}

#[derive(Debug, Deserialize)]
pub struct RenderParams {
    pub view: Option<String>,
    pub labeled: Option<bool>,
    pub highlight: Option<bool>,
    /// `svg` or `png`; overrides the Accept header.
    pub format: Option<String>,
    pub width: Option<u32>,
    pub height: Option<u32>,
}

impl RenderParams {
    fn query(&self) -> Result<RenderQuery, ServiceError> {
        let canvas = match (self.width, self.height) {
            (None, None) => None,
            (Some(w), Some(h)) => Some((w, h)),
            _ => return Err(ServiceError::validation("bad_request", "give both width and height")),
        };
        Ok(RenderQuery {
            view: self.view.clone().unwrap_or_else(|| "A".into()),
            labeled: self.labeled.unwrap_or(true),
            highlight: self.highlight.unwrap_or(false),
            canvas,
        })
    }
}

fn accepts(headers: &HeaderMap, mime: &str) -> bool {
    headers
        .get_all(header::ACCEPT)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .any(|v| v.split(',').any(|m| m.trim().starts_with(mime)))
}

async fn render(
    State(p): State<Shared>,
    Path(id): Path<String>,
    Query(params): Query<RenderParams>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let q = params.query()?;
    let format = match params.format.as_deref() {
        Some("svg") => ImageFormat::Svg,
        Some("png") => ImageFormat::Png,
        Some(other) => return Err(ServiceError::validation("bad_request", format!("unknown format {other:?}"))),
        None if accepts(&headers, "image/png") && !accepts(&headers, "image/svg") => ImageFormat::Png,
        None => ImageFormat::Svg,
    };
    let bytes = blocking(move || p.render(&id, &q, format)).await?;
    let mime = match format {
        ImageFormat::Svg => "image/svg+xml",
        ImageFormat::Png => "image/png",
    };
    Ok(([(header::CONTENT_TYPE, HeaderValue::from_static(mime))], bytes).into_response())
}

async fn scene(
    State(p): State<Shared>,
    Path(id): Path<String>,
    Query(params): Query<RenderParams>,
) -> Result<Response, ServiceError> {
    let mut q = params.query()?;
    q.highlight = params.highlight.unwrap_or(true);
    Ok(Json(blocking(move || p.scene(&id, &q)).await?).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectBody {
    pub strategy: String,
    pub seed: Option<u64>,
}

async fn select(
    State(p): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<SelectBody>, JsonRejection>,
) -> Result<Response, ServiceError> {
    let b = body(payload)?;
    let strategy: Strategy = b.strategy.parse()?;
    Ok(Json(blocking(move || p.select(&id, strategy, b.seed)).await?).into_response())
}

async fn preview(
    State(p): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<SelectBody>, JsonRejection>,
) -> Result<Response, ServiceError> {
    let b = body(payload)?;
    let strategy: Strategy = b.strategy.parse()?;
    Ok(Json(blocking(move || p.preview(&id, strategy, b.seed)).await?).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedbackBody {
    pub text: String,
}

async fn feedback(
    State(p): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<FeedbackBody>, JsonRejection>,
) -> Result<Response, ServiceError> {
    let b = body(payload)?;
    Ok(Json(blocking(move || p.feedback(&id, &b.text)).await?).into_response())
}

async fn plan(State(p): State<Shared>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(blocking(move || p.plan(&id)).await?).into_response())
}

#[derive(Debug, Deserialize)]
pub struct ProgramParams {
    pub format: Option<String>,
}

async fn program(
    State(p): State<Shared>,
    Path(id): Path<String>,
    Query(params): Query<ProgramParams>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let csv = match params.format.as_deref() {
        Some("csv") => true,
        Some("json") => false,
        Some(other) => return Err(ServiceError::validation("bad_request", format!("unknown format {other:?}"))),
        None => accepts(&headers, "text/csv"),
    };
    let prog = blocking(move || p.program(&id)).await?;
    if csv {
        Ok(([(header::CONTENT_TYPE, HeaderValue::from_static("text/csv"))], program_csv(&prog)).into_response())
    } else {
        Ok(Json(prog).into_response())
    }
}

async fn simulation(State(p): State<Shared>, Path(id): Path<String>) -> Result<Response, ServiceError> {
    Ok(Json(blocking(move || p.simulate(&id)).await?).into_response())
}

fn content_type(path: &FsPath) -> &'static str {
    match path.extension().and_then(|e| e.to_str()).unwrap_or("") {
        "html" => "text/html; charset=utf-8",
        "js" | "mjs" => "text/javascript",
        "css" => "text/css",
        "json" | "map" => "application/json",
        "svg" => "image/svg+xml",
        "png" => "image/png",
        "ico" => "image/x-icon",
        "woff2" => "font/woff2",
        _ => "application/octet-stream",
    }
}

/// Resolves a request path inside `root`, refusing anything that climbs out.
fn static_path(root: &FsPath, rel: &str) -> Option<PathBuf> {
    let mut out = root.to_path_buf();
    for c in FsPath::new(rel).components() {
        match c {
            Component::Normal(part) => out.push(part),
            Component::CurDir => {}
            _ => return None,
        }
    }
    if out.is_dir() {
        out.push("index.html");
    }
    Some(out)
}

async fn serve_static(p: Shared, rel: String) -> Result<Response, ServiceError> {
    let root = p.config.ui_dir.clone().ok_or_else(|| ServiceError::not_found("ui"))?;
    let path = static_path(&root, &rel).ok_or_else(|| ServiceError::not_found("file"))?;
    // Unknown paths fall back to the app shell so client-side routes work.
    let path = if path.is_file() { path } else { root.join("index.html") };
    let bytes = tokio::fs::read(&path).await.map_err(|_| ServiceError::not_found("file"))?;
    Ok(([(header::CONTENT_TYPE, HeaderValue::from_static(content_type(&path)))], bytes).into_response())
}

async fn ui_index(State(p): State<Shared>) -> Result<Response, ServiceError> {
    serve_static(p, String::new()).await
}

async fn ui_file(State(p): State<Shared>, Path(rel): Path<String>) -> Result<Response, ServiceError> {
    serve_static(p, rel).await
}

async fn health() -> Response {
    Json(json!({"status": "ok"})).into_response()
}

async fn fallback() -> Response {
    ServiceError::new(ErrorClass::NotFound, "not_found", "no such route").into_response()
}

pub fn router(pipeline: Arc<Pipeline>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/discretize", post(discretize))
        .route("/sessions/{id}/render", get(render))
        .route("/sessions/{id}/scene", get(scene))
        .route("/sessions/{id}/select", post(select))
        .route("/sessions/{id}/preview", post(preview))
        .route("/sessions/{id}/feedback", post(feedback))
        .route("/sessions/{id}/plan", post(plan))
        .route("/sessions/{id}/program", get(program))
        .route("/sessions/{id}/simulation", get(simulation))
        .route("/ui", get(ui_index))
        .route("/ui/", get(ui_index))
        .route("/ui/{*path}", get(ui_file))
        .fallback(fallback)
        .with_state(pipeline)
}

/// Binds `addr` and serves until Ctrl-C.
pub async fn serve(pipeline: Arc<Pipeline>, addr: &str) -> Result<(), ServiceError> {
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| ServiceError::internal(format!("bind {addr}: {e}")))?;
    tracing::info!("listening on {}", listener.local_addr().map(|a| a.to_string()).unwrap_or_default());
    axum::serve(listener, router(pipeline))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::internal(e.to_string()))
}
