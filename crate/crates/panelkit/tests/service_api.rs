mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use axum::Router;
use base64::Engine;
use http_body_util::BodyExt;
use panelkit::api::router;
use panelkit::Pipeline;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Api {
    app: Router,
    _tmp: tempfile::TempDir,
}

struct Reply {
    status: StatusCode,
    content_type: String,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|_| panic!("not JSON: {}", String::from_utf8_lossy(&self.body)))
    }
}

impl Api {
    fn new() -> Self {
        let tmp = tempfile::tempdir().unwrap();
        let ui = tmp.path().join("ui");
        std::fs::create_dir_all(ui.join("assets")).unwrap();
        std::fs::write(ui.join("index.html"), "<!doctype html><title>ui</title>").unwrap();
        std::fs::write(ui.join("assets/app.js"), "console.log(1)").unwrap();
        let mut cfg = common::config(&tmp.path().join("data"));
        cfg.ui_dir = Some(ui);
        let p = Pipeline::new(cfg, common::replay_client()).unwrap();
        Self {
            app: router(Arc::new(p)),
            _tmp: tmp,
        }
    }

    async fn call(&self, req: Request<Body>) -> Reply {
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let content_type = resp
            .headers()
            .get(header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .unwrap_or("")
            .to_string();
        let body = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
        Reply {
            status,
            content_type,
            body,
        }
    }

    async fn get(&self, uri: &str) -> Reply {
        self.call(Request::get(uri).body(Body::empty()).unwrap()).await
    }

    async fn get_accept(&self, uri: &str, accept: &str) -> Reply {
        self.call(Request::get(uri).header(header::ACCEPT, accept).body(Body::empty()).unwrap())
            .await
    }

    async fn post(&self, uri: &str, body: Value) -> Reply {
        self.call(
            Request::post(uri)
                .header(header::CONTENT_TYPE, "application/json")
                .body(Body::from(body.to_string()))
                .unwrap(),
        )
        .await
    }

    async fn post_empty(&self, uri: &str) -> Reply {
        self.call(Request::post(uri).body(Body::empty()).unwrap()).await
    }

    async fn create(&self, prompt: &str, mesh: &str) -> String {
        let b64 = base64::engine::general_purpose::STANDARD.encode(common::mesh(mesh));
        let r = self.post("/sessions", json!({"prompt": prompt, "mesh_base64": b64})).await;
        assert_eq!(r.status, StatusCode::CREATED);
        let v = r.json();
        assert_eq!(v["status"], "CREATED");
        v["id"].as_str().unwrap().to_string()
    }
}

fn error_code(r: &Reply) -> String {
    r.json()["error"]["code"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn full_chair_flow() {
    let api = Api::new();
    let id = api.create("Make me a chair", "chair").await;
    let base = format!("/sessions/{id}");

    let r = api.post_empty(&format!("{base}/discretize")).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["status"], "DISCRETIZED");
    assert_eq!(r.json()["decomp"]["patches"].as_array().unwrap().len(), 7);

    let svg = api.get(&format!("{base}/render?view=A&labeled=true")).await;
    assert_eq!(svg.content_type, "image/svg+xml");
    assert!(svg.body.starts_with(b"<?xml") || svg.body.starts_with(b"<svg"));
    let png = api.get_accept(&format!("{base}/render?view=B&labeled=true"), "image/png").await;
    assert_eq!(png.content_type, "image/png");
    assert!(png.body.starts_with(b"\x89PNG"));
    let bad = api.get(&format!("{base}/render?view=Q")).await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);

    let r = api.post(&format!("{base}/select"), json!({"strategy": "VLM"})).await;
    assert_eq!(r.status, StatusCode::OK);
    assert_eq!(r.json()["history"][0]["labels"]["labels"], json!([1, 7]));

    let scene = api.get(&format!("{base}/scene?view=A")).await.json();
    let highlighted = scene["polygons"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["fill"]["kind"] == "highlight")
        .count();
    assert!(highlighted > 0);

    let r = api.post(&format!("{base}/feedback"), json!({"text": "I want panels on the seat"})).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_eq!(v["history"].as_array().unwrap().len(), 2);
    assert_eq!(v["history"][1]["labels"]["provenance"], "FEEDBACK");
    assert_eq!(v["history"][1]["feedback"], "I want panels on the seat");

    let r = api.post_empty(&format!("{base}/plan")).await;
    assert_eq!(r.status, StatusCode::OK);
    let v = r.json();
    assert_eq!(v["status"], "PLANNED");
    assert_eq!(v["plans"][0]["report"]["verdict"], "PASS");

    let prog = api.get(&format!("{base}/program")).await.json();
    let steps = prog["steps"].as_array().unwrap().len();
    assert_eq!(steps, 10 + 4);
    let csv = api.get_accept(&format!("{base}/program"), "text/csv").await;
    assert_eq!(csv.content_type, "text/csv");
    let text = String::from_utf8(csv.body).unwrap();
    assert_eq!(text.lines().count(), steps + 1);
    assert!(text.starts_with("step,ctype,"));

    let sim = api.get(&format!("{base}/simulation")).await.json();
    assert_eq!(sim["verdict"], "PASS");

    let list = api.get("/sessions").await.json();
    assert_eq!(list[0]["status"], "PLANNED");
}

#[tokio::test]
async fn strategy_preview_does_not_mutate() {
    let api = Api::new();
    let id = api.create("Make me a table", "table").await;
    let base = format!("/sessions/{id}");
    api.post(&format!("{base}/discretize"), json!({})).await;
    let mut cards = Vec::new();
    for s in ["VLM", "RULE", "RANDOM"] {
        let r = api.post(&format!("{base}/preview"), json!({"strategy": s, "seed": 42})).await;
        assert_eq!(r.status, StatusCode::OK, "{s}");
        cards.push(r.json()["labels"]["labels"].clone());
    }
    assert_eq!(cards[0], cards[1]);
    let v = api.get(&base).await.json();
    assert_eq!(v["status"], "DISCRETIZED");
    assert!(v["history"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn error_model() {
    let api = Api::new();
    let r = api.get("/sessions/does-not-exist").await;
    assert_eq!(r.status, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&r), "not_found");

    let r = api.post("/sessions", json!({"prompt": "x"})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = api.post("/sessions", json!({"prompt": "", "mesh_text": "v 0 0 0"})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = api
        .call(
            Request::post("/sessions")
                .header(header::CONTENT_TYPE, "application/json")
                .body(Body::from("{not json"))
                .unwrap(),
        )
        .await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&r), "bad_request");

    let flat = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
    let r = api.post("/sessions", json!({"prompt": "flat", "mesh_text": flat})).await;
    let id = r.json()["id"].as_str().unwrap().to_string();
    let r = api.post_empty(&format!("/sessions/{id}/discretize")).await;
    assert_eq!(r.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_code(&r), "degenerate_mesh");
    let r = api.post_empty(&format!("/sessions/{id}/plan")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);

    let id = api.create("Make me a shelf", "shelf").await;
    api.post_empty(&format!("/sessions/{id}/discretize")).await;
    let r = api.post(&format!("/sessions/{id}/select"), json!({"strategy": "vlm"})).await;
    assert_eq!(r.status, StatusCode::BAD_GATEWAY);
    assert_eq!(error_code(&r), "vlm_transport");
    let r = api.post(&format!("/sessions/{id}/select"), json!({"strategy": "best"})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = api.post(&format!("/sessions/{id}/feedback"), json!({"text": "  "})).await;
    assert_eq!(r.status, StatusCode::BAD_REQUEST);
    let r = api.get(&format!("/sessions/{id}/program")).await;
    assert_eq!(r.status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn static_ui_route() {
    let api = Api::new();
    let r = api.get("/ui").await;
    assert_eq!(r.status, StatusCode::OK);
    assert!(r.content_type.starts_with("text/html"));
    let r = api.get("/ui/assets/app.js").await;
    assert_eq!(r.content_type, "text/javascript");
    assert_eq!(r.body, b"console.log(1)");
    // Client-side routes get the app shell.
    let r = api.get("/ui/sessions/abc").await;
    assert!(r.content_type.starts_with("text/html"));
    let r = api.get("/ui/../Cargo.toml").await;
    assert_ne!(r.body, std::fs::read("Cargo.toml").unwrap());
    assert_eq!(api.get("/health").await.json()["status"], "ok");
}
