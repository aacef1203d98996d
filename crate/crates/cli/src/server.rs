//! HTTP API over one immutable dataset.
//!
//! Every layout request reruns the deterministic simulation in a blocking
//! task, so identical requests get identical bodies. Errors are JSON
//! `{"code", "message"}` with status 400 (bad request), 404 (unknown id) or
//! 500 (numerical failure).

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use strata_core::analysis::{common_neighbors, compare_report, most_connected, snapshot_at_year, QueryError, ReportError};
use strata_core::force::{run_pinned, ForceError};
use strata_core::layering::LayeringError;
use strata_core::model::GraphDataset;
use strata_core::render::{export_layout_json, export_trace};
use strata_core::{assign_layers, CyclePolicy, LayoutConfig, Mode, Vec2};
use tower_http::services::ServeDir;

use crate::commands::{hierarchy_spec, layout_config};
use crate::failure::Failure;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            code: "bad_request",
            message: message.into(),
        }
    }

    fn unknown_id(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            code: "unknown_id",
            message: message.into(),
        }
    }

    fn internal(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "code": self.code, "message": self.message }))).into_response()
    }
}

impl From<ForceError> for ApiError {
    fn from(e: ForceError) -> Self {
        match e {
            ForceError::Config(_) => Self::bad_request(e.to_string()),
            ForceError::UnknownNode(_) => Self::unknown_id(e.to_string()),
            ForceError::Numerical { .. } => Self::internal("numerical", e.to_string()),
        }
    }
}

impl From<LayeringError> for ApiError {
    fn from(e: LayeringError) -> Self {
        Self::bad_request(e.to_string())
    }
}

impl From<QueryError> for ApiError {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::UnknownNode(_) => Self::unknown_id(e.to_string()),
            QueryError::SamePerson(_) => Self::bad_request(e.to_string()),
        }
    }
}

impl From<ReportError> for ApiError {
    fn from(e: ReportError) -> Self {
        match e {
            ReportError::Force(f) => f.into(),
            ReportError::Layering(l) => l.into(),
            ReportError::Mismatch(m) => Self::bad_request(m),
        }
    }
}

type Shared = Arc<GraphDataset>;
type ApiResult = Result<Json<Value>, ApiError>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Pin {
    id: String,
    x: f64,
    y: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HierarchyOverride {
    generational: Option<Vec<String>>,
    co_level: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutRequest {
    #[serde(default = "default_mode")]
    mode: Mode,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    pins: Vec<Pin>,
    #[serde(default)]
    hierarchy: Option<HierarchyOverride>,
    /// Any `LayoutConfig` fields; `mode` and `seed` above take precedence.
    #[serde(default)]
    config: Option<serde_json::Map<String, Value>>,
    #[serde(default)]
    trace: bool,
}

fn default_mode() -> Mode {
    Mode::ForceLayered
}

pub fn router(dataset: GraphDataset, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/dataset", get(dataset_doc))
        .route("/api/layout", post(layout))
        .route("/api/query/most-connected", get(query_most_connected))
        .route("/api/query/common", get(query_common))
        .route("/api/query/snapshot", get(query_snapshot))
        .route("/api/report", get(report))
        .with_state(Arc::new(dataset));
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(|| async {
            ApiError {
                status: StatusCode::NOT_FOUND,
                code: "not_found",
                message: "no such resource".into(),
            }
        }),
    }
}

async fn health() -> Json<Value> {
    Json(json!({ "status": "ok" }))
}

async fn dataset_doc(State(ds): State<Shared>) -> Json<Value> {
    Json(ds.to_json_value())
}

async fn blocking<F>(f: F) -> ApiResult
where
    F: FnOnce() -> ApiResult + Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal("internal", e.to_string()))?
}

fn build_config(req: &LayoutRequest) -> Result<LayoutConfig, ApiError> {
    let cfg = layout_config(req.mode, req.seed, req.config.as_ref()).map_err(ApiError::bad_request)?;
    Ok(LayoutConfig {
        record_trace: req.trace,
        ..cfg
    })
}

fn compute_layout(ds: &GraphDataset, req: LayoutRequest) -> ApiResult {
    let cfg = build_config(&req)?;
    for p in &req.pins {
        if ds.index_of(&p.id).is_none() {
            return Err(ApiError::unknown_id(format!("unknown person {:?}", p.id)));
        }
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(ApiError::bad_request(format!("pin {:?} is not finite", p.id)));
        }
    }
    let layers = match req.mode {
        Mode::ForceLayered => {
            let h = req.hierarchy.unwrap_or_default();
            let spec = hierarchy_spec(h.generational.as_deref(), h.co_level.as_deref());
            Some(assign_layers(ds, &spec, CyclePolicy::Reject)?)
        }
        Mode::ForceDirected => None,
    };
    let pins: Vec<(String, Vec2)> = req.pins.into_iter().map(|p| (p.id, Vec2::new(p.x, p.y))).collect();
    let layout = run_pinned(ds, &cfg, layers.as_ref(), &pins)?;
    let mut doc = export_layout_json(&[&layout], ds, None);
    if req.trace {
        let trace = export_trace(&layout).map_err(|e| ApiError::internal("internal", e.to_string()))?;
        doc["trace"] = trace;
    }
    Ok(Json(doc))
}

async fn layout(State(ds): State<Shared>, body: Bytes) -> ApiResult {
    let req: LayoutRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("layout request: {e}")))?;
    blocking(move || compute_layout(&ds, req)).await
}

async fn query_most_connected(State(ds): State<Shared>) -> ApiResult {
    Ok(Json(json!({ "ids": most_connected(&ds) })))
}

fn param<'a>(q: &'a HashMap<String, String>, key: &str) -> Result<&'a str, ApiError> {
    q.get(key)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request(format!("missing query parameter {key:?}")))
}

async fn query_common(State(ds): State<Shared>, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let (a, b) = (param(&q, "a")?, param(&q, "b")?);
    let ids = common_neighbors(&ds, a, b)?;
    Ok(Json(json!({ "a": a, "b": b, "ids": ids })))
}

async fn query_snapshot(State(ds): State<Shared>, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let raw = param(&q, "year")?;
    let year: i32 = raw
        .parse()
        .map_err(|_| ApiError::bad_request(format!("year {raw:?} is not an integer")))?;
    let snap = snapshot_at_year(&ds, year);
    let ids: Vec<&str> = snap.dataset.persons().iter().map(|p| p.id.as_str()).collect();
    Ok(Json(json!({
        "year": year,
        "ids": ids,
        "undated_included": snap.undated_included,
        "dataset": snap.dataset.to_json_value(),
    })))
}

async fn report(State(ds): State<Shared>, Query(q): Query<HashMap<String, String>>) -> ApiResult {
    let seed: u64 = match q.get("seed") {
        Some(raw) => raw
            .parse()
            .map_err(|_| ApiError::bad_request(format!("seed {raw:?} is not an unsigned integer")))?,
        None => 0,
    };
    blocking(move || {
        let cmp = compare_report(
            &ds,
            &LayoutConfig::new(Mode::ForceDirected, seed),
            &LayoutConfig::new(Mode::ForceLayered, seed),
            &Default::default(),
        )?;
        Ok(Json(export_layout_json(
            &[&cmp.force_directed, &cmp.force_layered],
            &ds,
            Some(&cmp.reports),
        )))
    })
    .await
}

/// Binds and serves until interrupted. Bind failures are `Failure::Serve`.
pub fn serve_blocking(dataset: GraphDataset, host: &str, port: u16, assets: Option<PathBuf>) -> Result<(), Failure> {
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::Serve(format!("runtime: {e}")))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| Failure::Serve(format!("cannot listen on {host}:{port}: {e}")))?;
        axum::serve(listener, router(dataset, assets))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| Failure::Serve(e.to_string()))
    })
}
