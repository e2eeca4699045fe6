//! Local HTTP service exposing the analysis operations as JSON endpoints.
//!
//! Bodies are parsed by hand rather than through axum's `Json` extractor so
//! that every failure, including malformed JSON, answers with an
//! [`ErrorEnvelope`](crate::error::ErrorEnvelope).

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use tower_http::services::ServeDir;

use crate::api::{self, AnalysisRequest, DoaRequest, Limits};
use crate::error::{ApiError, ApiResult, ErrorKind};

const INDEX_HTML: &str = include_str!("../static/index.html");

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    pub limits: Limits,
    /// Serve this directory at `/` instead of the built-in page.
    pub ui_dir: Option<PathBuf>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        json_response(status, api::to_json(&self.envelope))
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn ok_json<T: serde::Serialize>(value: &T) -> Response {
    json_response(StatusCode::OK, api::to_json(value))
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    if body.is_empty() {
        return Err(ApiError::bad_request("request body is empty"));
    }
    Ok(serde_json::from_slice(body)?)
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(ErrorKind::Internal, "INTERNAL", e.to_string()))?
}

async fn weights(State(limits): State<Arc<Limits>>, body: Bytes) -> ApiResult<Response> {
    let req: AnalysisRequest = parse_body(&body)?;
    let out = blocking(move || api::weights(&req, &limits)).await?;
    Ok(ok_json(&out))
}

async fn analyze(State(limits): State<Arc<Limits>>, body: Bytes) -> ApiResult<Response> {
    let req: AnalysisRequest = parse_body(&body)?;
    let (_, _, out) = blocking(move || api::analyze(&req, &limits)).await?;
    Ok(ok_json(&out))
}

async fn family(State(limits): State<Arc<Limits>>, Path(n): Path<String>) -> ApiResult<Response> {
    let n: usize = n.parse().map_err(|_| {
        ApiError::bad_request(format!("N must be a non-negative integer, got {n:?}"))
    })?;
    Ok(ok_json(&api::family(n, &limits)?))
}

fn query_usize(q: &HashMap<String, String>, key: &str) -> ApiResult<usize> {
    let raw = q
        .get(key)
        .ok_or_else(|| ApiError::bad_request(format!("missing query parameter '{key}'")))?;
    raw.parse().map_err(|_| {
        ApiError::bad_request(format!(
            "'{key}' must be a non-negative integer, got {raw:?}"
        ))
    })
}

async fn scan(
    State(limits): State<Arc<Limits>>,
    Query(q): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    if let Some(k) = q.keys().find(|k| *k != "from" && *k != "to") {
        return Err(ApiError::new(
            ErrorKind::Input,
            "UNKNOWN_FIELD",
            format!("unknown query parameter '{k}'"),
        ));
    }
    let from = query_usize(&q, "from")?;
    let to = query_usize(&q, "to")?;
    let (_, out) = blocking(move || api::scan(from, to, &limits)).await?;
    Ok(ok_json(&out))
}

async fn doa(State(limits): State<Arc<Limits>>, body: Bytes) -> ApiResult<Response> {
    let req: DoaRequest = parse_body(&body)?;
    let (_, out) = blocking(move || api::doa(&req, &limits)).await?;
    Ok(ok_json(&out))
}

async fn not_found() -> ApiError {
    ApiError::new(ErrorKind::NotFound, "NOT_FOUND", "no such endpoint")
}

async fn method_not_allowed() -> ApiError {
    ApiError::new(
        ErrorKind::MethodNotAllowed,
        "METHOD_NOT_ALLOWED",
        "method not allowed for this endpoint",
    )
}

async fn index() -> Html<&'static str> {
    Html(INDEX_HTML)
}

pub fn router(config: ServiceConfig) -> Router {
    let limits = Arc::new(config.limits);
    let api_routes = Router::new()
        .route("/api/weights", post(weights))
        .route("/api/analyze", post(analyze))
        .route("/api/family/{n}", get(family))
        .route("/api/scan", get(scan))
        .route("/api/doa", post(doa))
        .route("/api/{*rest}", axum::routing::any(not_found))
        .method_not_allowed_fallback(method_not_allowed)
        .with_state(limits);
    match config.ui_dir {
        Some(dir) => api_routes.fallback_service(ServeDir::new(dir)),
        None => api_routes.route("/", get(index)).fallback(not_found),
    }
}

/// Binds and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig, addr: std::net::SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
