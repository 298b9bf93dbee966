//! Stateless HTTP front end for optics2d.
//!
//! | Route | Answer |
//! |---|---|
//! | `GET /api/scenarios` | scenario descriptors |
//! | `POST /api/scenarios/{name}` | scene document built from a parameter object |
//! | `POST /api/trace` | `{"paths": <trace document>}` for an inline scene |
//! | `GET /healthz` | `ok` |
//!
//! Every request is answered from its own payload alone. Trace time is
//! reported in the `x-elapsed-ms` header so equal requests get equal
//! bodies.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::Path;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use optics2d::format::{scene_from_json, scene_to_json, trace_to_value};
use optics2d::scenarios::registry::{instantiate, scenarios, InstantiateError};
use optics2d::tracer::{Tracer, DEFAULT_MAX_EVENTS};
use serde::Deserialize;
use serde_json::{json, Map, Value};
use tower_http::services::ServeDir;

pub const ELAPSED_HEADER: &str = "x-elapsed-ms";

/// Largest `max_events` a trace request may ask for.
pub const MAX_EVENTS_LIMIT: usize = 10_000;

/// The API routes.
pub fn router() -> Router {
    Router::new()
        .route("/api/scenarios", get(list_scenarios))
        .route("/api/scenarios/{name}", post(build_scenario))
        .route("/api/trace", post(trace))
        .route("/healthz", get(|| async { "ok" }))
}

/// [`router`] plus static files from `dir` for every other path.
pub fn router_with_static(dir: Option<PathBuf>) -> Router {
    match dir {
        Some(dir) => router().fallback_service(ServeDir::new(dir)),
        None => router(),
    }
}

/// Binds `addr` and serves until the process stops.
pub async fn serve(addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router_with_static(static_dir)).await
}

fn json_text(status: StatusCode, body: String) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        body,
    )
        .into_response()
}

fn error(status: StatusCode, message: impl ToString) -> Response {
    (status, Json(json!({ "error": message.to_string() }))).into_response()
}

async fn list_scenarios() -> Response {
    Json(scenarios()).into_response()
}

async fn build_scenario(Path(name): Path<String>, body: Bytes) -> Response {
    let params: Map<String, Value> = if body.iter().all(u8::is_ascii_whitespace) {
        Map::new()
    } else {
        match serde_json::from_slice(&body) {
            Ok(p) => p,
            Err(e) => return error(StatusCode::BAD_REQUEST, format!("parameters must be a JSON object: {e}")),
        }
    };
    match instantiate(&name, &params) {
        Ok(scene) => json_text(StatusCode::OK, scene_to_json(&scene)),
        Err(e @ InstantiateError::UnknownScenario(_)) => error(StatusCode::NOT_FOUND, e),
        Err(InstantiateError::InvalidParameters(errors)) => {
            (StatusCode::UNPROCESSABLE_ENTITY, Json(json!({ "errors": errors }))).into_response()
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceRequest {
    scene: Value,
    max_events: Option<usize>,
}

async fn trace(body: Bytes) -> Response {
    let req: TraceRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let scene = match scene_from_json(&req.scene.to_string()) {
        Ok(s) => s,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("scene: {e}")),
    };
    let max_events = req.max_events.unwrap_or(DEFAULT_MAX_EVENTS);
    if max_events > MAX_EVENTS_LIMIT {
        let errors = json!({ "max_events": format!("must be <= {MAX_EVENTS_LIMIT}") });
        return (StatusCode::UNPROCESSABLE_ENTITY, Json(json!({ "errors": errors }))).into_response();
    }
    if let Err(violations) = scene.validate() {
        return (StatusCode::UNPROCESSABLE_ENTITY, Json(json!({ "violations": violations }))).into_response();
    }

    let start = Instant::now();
    let traced = tokio::task::spawn_blocking(move || {
        let tracer = Tracer::new(&scene).expect("scene was validated");
        tracer.trace_all(max_events).map(|paths| trace_to_value(&paths))
    })
    .await;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let paths = match traced {
        Ok(Ok(paths)) => paths,
        Ok(Err(e)) => return error(StatusCode::UNPROCESSABLE_ENTITY, e),
        Err(e) => return error(StatusCode::INTERNAL_SERVER_ERROR, e),
    };
    tracing::debug!(elapsed_ms = elapsed, "traced");
    let mut response = Json(json!({ "paths": paths })).into_response();
    response.headers_mut().insert(
        ELAPSED_HEADER,
        HeaderValue::from_str(&format!("{elapsed:.3}")).expect("ascii number"),
    );
    response
}
