//! The review API over a workspace.
//!
//! | method | path | body / query | reply |
//! |---|---|---|---|
//! | GET | `/api/iterations` | | iteration summaries |
//! | GET | `/api/candidates` | `?iteration=K&role=R` (role optional) | review candidates in served order |
//! | POST | `/api/decisions` | `{"candidate_id", "verdict": "accept"\|"reject"}` | the updated candidate |
//! | POST | `/api/finalize` | `{"iteration"}` | `{"iteration", "version", "patterns"}` |
//! | GET | `/` | | review console assets |
//!
//! Failures reply `{"error": code, "detail": text}`, plus `pending` ids for
//! `PendingDecisions`.

use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rxnmine::bootstrap::{FinalizeOutcome, IterationSummary, ReviewCandidate, ReviewService, Verdict};
use rxnmine::Role;
use serde::Deserialize;
use tower_http::services::ServeDir;

use crate::commands::export_linguistic;
use crate::config::AppConfig;
use crate::error::{CliError, Exit};

const PLACEHOLDER: &str = "<!doctype html>
<html><head><meta charset=\"utf-8\"><title>rxnmine review</title></head>
<body>
<h1>rxnmine review API</h1>
<p>No console bundle is installed; start the server with <code>--assets DIR</code> to serve one.</p>
<ul>
<li>GET /api/iterations</li>
<li>GET /api/candidates?iteration=K&amp;role=R</li>
<li>POST /api/decisions {candidate_id, verdict}</li>
<li>POST /api/finalize {iteration}</li>
</ul>
</body></html>
";

pub struct AppState {
    service: Mutex<ReviewService>,
    config: AppConfig,
}

pub struct ApiError(pub CliError);

impl From<CliError> for ApiError {
    fn from(e: CliError) -> ApiError {
        ApiError(e)
    }
}

impl From<rxnmine::bootstrap::BootstrapError> for ApiError {
    fn from(e: rxnmine::bootstrap::BootstrapError) -> ApiError {
        ApiError(e.into())
    }
}

fn bad_request(detail: impl Into<String>) -> ApiError {
    ApiError(CliError::new("BadRequest", Exit::Usage, detail))
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0.code {
            "UnknownIteration" | "UnknownCandidate" => StatusCode::NOT_FOUND,
            "ConflictingDecision" | "AlreadyFinalized" | "PendingDecisions" | "NotFinalized" | "Locked" => {
                StatusCode::CONFLICT
            }
            _ if self.0.exit == Exit::Usage => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self.0)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateQuery {
    iteration: u32,
    role: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionBody {
    candidate_id: String,
    verdict: Verdict,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalizeBody {
    iteration: u32,
}

fn service(state: &AppState) -> std::sync::MutexGuard<'_, ReviewService> {
    state.service.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

async fn iterations(State(state): State<Arc<AppState>>) -> ApiResult<Vec<IterationSummary>> {
    Ok(Json(service(&state).list_iterations()?))
}

async fn candidates(
    State(state): State<Arc<AppState>>,
    query: Result<Query<CandidateQuery>, QueryRejection>,
) -> ApiResult<Vec<ReviewCandidate>> {
    let Query(q) = query.map_err(|e| bad_request(e.body_text()))?;
    let role = match q.role.as_deref().filter(|r| !r.is_empty()) {
        Some(r) => Some(r.parse::<Role>().map_err(|e| bad_request(e.to_string()))?),
        None => None,
    };
    Ok(Json(service(&state).list_candidates(q.iteration, role)?))
}

async fn decide(
    State(state): State<Arc<AppState>>,
    body: Result<Json<DecisionBody>, JsonRejection>,
) -> ApiResult<ReviewCandidate> {
    let Json(d) = body.map_err(|e| bad_request(e.body_text()))?;
    Ok(Json(service(&state).record_decision(&d.candidate_id, d.verdict)?))
}

async fn finalize(
    State(state): State<Arc<AppState>>,
    body: Result<Json<FinalizeBody>, JsonRejection>,
) -> ApiResult<FinalizeOutcome> {
    let Json(f) = body.map_err(|e| bad_request(e.body_text()))?;
    let service = service(&state);
    let outcome = service.finalize(f.iteration)?;
    export_linguistic(service.workspace(), &state.config)?;
    Ok(Json(outcome))
}

/// The API routes plus the console: files from `assets` when given, else a
/// placeholder page. The caller holds the workspace lock.
pub fn router(service: ReviewService, config: AppConfig, assets: Option<PathBuf>) -> Router {
    let state = Arc::new(AppState { service: Mutex::new(service), config });
    let api = Router::new()
        .route("/api/iterations", get(iterations))
        .route("/api/candidates", get(candidates))
        .route("/api/decisions", post(decide))
        .route("/api/finalize", post(finalize))
        .with_state(state);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER) })),
    }
}
