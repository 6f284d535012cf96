//! HTTP API for the review console, under `/api/v1`.
//!
//! Errors are returned as `{"code": ..., "message": ...}`.

use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use ixpunion::review::{QueueFilter, ReviewError, ReviewStore};
use ixpunion::{CandidateState, Continent, SourcePair, Verdict};

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

#[derive(Clone)]
pub struct AppState {
    store: Arc<RwLock<ReviewStore>>,
    clock: Clock,
}

impl AppState {
    pub fn new(store: ReviewStore) -> Self {
        Self::with_clock(store, Arc::new(Utc::now))
    }

    pub fn with_clock(store: ReviewStore, clock: Clock) -> Self {
        AppState {
            store: Arc::new(RwLock::new(store)),
            clock,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(skip)]
    status: StatusCode,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            code: code.into(),
            message: message.into(),
            status,
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl From<ReviewError> for ApiError {
    fn from(e: ReviewError) -> Self {
        let (status, code) = match &e {
            ReviewError::UnknownCandidate(_) => (StatusCode::NOT_FOUND, "unknown_candidate"),
            ReviewError::UnknownIxp(_) => (StatusCode::NOT_FOUND, "unknown_ixp"),
            ReviewError::SelfPair(_) => (StatusCode::BAD_REQUEST, "self_pair"),
            ReviewError::SameSource { .. } => (StatusCode::BAD_REQUEST, "same_source"),
            ReviewError::Duplicate(_) => (StatusCode::CONFLICT, "duplicate_candidate"),
            ReviewError::InvalidCursor => (StatusCode::BAD_REQUEST, "invalid_cursor"),
            ReviewError::Storage { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "storage_failure"),
        };
        ApiError::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    Router::new()
        .route(
            "/api/v1/candidates",
            get(list_candidates).post(create_candidate),
        )
        .route("/api/v1/candidates/{id}", get(get_candidate))
        .route("/api/v1/candidates/{id}/decision", post(post_decision))
        .route("/api/v1/progress", get(progress))
        .route("/api/v1/ixps/{canonical_id}", get(get_ixp))
        .fallback(|| async {
            ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
        })
        .with_state(state)
}

#[derive(Debug, Default, Deserialize)]
pub struct ListQuery {
    state: Option<String>,
    pair: Option<String>,
    step: Option<String>,
    continent: Option<String>,
    cursor: Option<String>,
    limit: Option<String>,
}

fn parse_state(s: &str) -> ApiResult<CandidateState> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| ApiError::bad_request(format!("unknown state {s:?}")))
}

const DEFAULT_LIMIT: usize = 50;
const MAX_LIMIT: usize = 1000;

async fn list_candidates(
    State(app): State<AppState>,
    Query(q): Query<ListQuery>,
) -> ApiResult<impl IntoResponse> {
    let nonempty = |o: &Option<String>| o.as_deref().filter(|s| !s.is_empty()).map(str::to_string);
    let filter = QueueFilter {
        state: nonempty(&q.state).map(|s| parse_state(&s)).transpose()?,
        pair: nonempty(&q.pair)
            .map(|p| p.parse::<SourcePair>().map_err(ApiError::bad_request))
            .transpose()?,
        step: nonempty(&q.step)
            .map(|s| match s.parse::<u8>() {
                Ok(n @ 1..=6) => Ok(n),
                _ => Err(ApiError::bad_request(format!(
                    "step must be 1 to 6, got {s:?}"
                ))),
            })
            .transpose()?,
        continent: nonempty(&q.continent)
            .map(|c| c.parse::<Continent>().map_err(ApiError::bad_request))
            .transpose()?,
    };
    let limit = match nonempty(&q.limit) {
        Some(l) => l
            .parse::<usize>()
            .ok()
            .filter(|n| (1..=MAX_LIMIT).contains(n))
            .ok_or_else(|| ApiError::bad_request(format!("limit must be 1 to {MAX_LIMIT}")))?,
        None => DEFAULT_LIMIT,
    };
    let store = app.store.read().expect("store lock");
    let page = store.list(&filter, nonempty(&q.cursor).as_deref(), limit)?;
    Ok(Json(page))
}

async fn get_candidate(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    let store = app.store.read().expect("store lock");
    store
        .get(&id)
        .map(Json)
        .ok_or_else(|| ReviewError::UnknownCandidate(id).into())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionBody {
    verdict: Verdict,
    reviewer: String,
    #[serde(default)]
    note: Option<String>,
}

async fn post_decision(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<DecisionBody>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let Json(body) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    if body.reviewer.trim().is_empty() {
        return Err(ApiError::bad_request("reviewer must be non-empty"));
    }
    let now = (app.clock)();
    let mut store = app.store.write().expect("store lock");
    let d = store.append_decision(&id, body.verdict, body.reviewer.trim(), body.note, now)?;
    Ok((StatusCode::CREATED, Json(d)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManualBody {
    left: String,
    right: String,
}

async fn create_candidate(
    State(app): State<AppState>,
    body: Result<Json<ManualBody>, axum::extract::rejection::JsonRejection>,
) -> ApiResult<impl IntoResponse> {
    let Json(body) = body.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let mut store = app.store.write().expect("store lock");
    let c = store.add_manual(&body.left, &body.right)?;
    Ok((StatusCode::CREATED, Json(c)))
}

async fn progress(State(app): State<AppState>) -> impl IntoResponse {
    Json(app.store.read().expect("store lock").progress())
}

async fn get_ixp(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    let store = app.store.read().expect("store lock");
    store
        .ixp(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ReviewError::UnknownIxp(id).into())
}
