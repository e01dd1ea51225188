//! HTTP API.
//!
//! - `POST /assess` `{student_key, text}` assesses a draft and appends it to
//!   the student's revision history
//! - `GET /revisions/{student_key}` lists a student's drafts in order
//! - `GET /rubric` returns the main ideas with their confidences
//! - `GET /health` reports the loaded pyramid and configuration

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ideacheck::assessment::{assess_prepared, make_checklist, prepare_essay, AssessmentError};
use ideacheck::{AssessmentConfig, Essay, Role, RuleSegmenter};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bundle::Bundle;
use crate::store::RevisionStore;

pub const DEFAULT_MAX_CHARS: usize = 20_000;
const MAX_KEY_CHARS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceConfig {
    pub assessment: AssessmentConfig,
    /// Longest accepted essay, in characters.
    pub max_chars: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            assessment: AssessmentConfig::default(),
            max_chars: DEFAULT_MAX_CHARS,
        }
    }
}

pub struct AppState {
    pub bundle: Bundle,
    pub segmenter: RuleSegmenter,
    pub config: ServiceConfig,
    pub store: RevisionStore,
}

impl AppState {
    pub fn new(bundle: Bundle, config: ServiceConfig, store: RevisionStore) -> Self {
        AppState {
            bundle,
            segmenter: RuleSegmenter::default(),
            config,
            store,
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/assess", post(assess))
        .route("/revisions/{student_key}", get(revisions))
        .route("/rubric", get(rubric))
        .route("/health", get(health))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[derive(Debug, Serialize)]
struct FieldProblem {
    field: &'static str,
    problem: String,
}

enum ApiError {
    BadRequest(String, Vec<FieldProblem>),
    TooLarge { chars: usize, limit: usize },
    Internal(String),
}

impl ApiError {
    fn into_parts(self) -> (StatusCode, Value) {
        match self {
            ApiError::BadRequest(error, fields) => {
                (StatusCode::BAD_REQUEST, json!({ "error": error, "fields": fields }))
            }
            ApiError::TooLarge { chars, limit } => (
                StatusCode::PAYLOAD_TOO_LARGE,
                json!({
                    "error": format!("text has {chars} characters; the limit is {limit}"),
                    "limit": limit,
                }),
            ),
            ApiError::Internal(error) => {
                (StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": error }))
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = self.into_parts();
        (status, Json(body)).into_response()
    }
}

fn string_field<'a>(
    body: &'a Value,
    field: &'static str,
    problems: &mut Vec<FieldProblem>,
) -> Option<&'a str> {
    match body.get(field) {
        None | Some(Value::Null) => {
            problems.push(FieldProblem {
                field,
                problem: "missing".into(),
            });
            None
        }
        Some(Value::String(s)) => Some(s),
        Some(other) => {
            problems.push(FieldProblem {
                field,
                problem: format!("expected a string, found {}", json_kind(other)),
            });
            None
        }
    }
}

fn json_kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// Validated `POST /assess` body.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessRequest {
    pub student_key: String,
    pub text: String,
}

/// Parses and validates an assess body; `Err` carries the HTTP status and
/// the JSON error document the handler would send.
pub fn parse_assess_request(
    body: &[u8],
    max_chars: usize,
) -> Result<AssessRequest, (StatusCode, Value)> {
    parse_request(body, max_chars).map_err(ApiError::into_parts)
}

fn parse_request(body: &[u8], max_chars: usize) -> Result<AssessRequest, ApiError> {
    let value: Value = serde_json::from_slice(body).map_err(|e| {
        ApiError::BadRequest(format!("body is not valid JSON: {e}"), Vec::new())
    })?;
    if !value.is_object() {
        return Err(ApiError::BadRequest(
            format!("body must be a JSON object, found {}", json_kind(&value)),
            Vec::new(),
        ));
    }
    let mut problems = Vec::new();
    let key = string_field(&value, "student_key", &mut problems);
    let text = string_field(&value, "text", &mut problems);
    if let Some(k) = key {
        if k.trim().is_empty() {
            problems.push(FieldProblem {
                field: "student_key",
                problem: "must not be empty".into(),
            });
        } else if k.chars().count() > MAX_KEY_CHARS {
            problems.push(FieldProblem {
                field: "student_key",
                problem: format!("longer than {MAX_KEY_CHARS} characters"),
            });
        }
    }
    if let Some(t) = text {
        let chars = t.chars().count();
        if chars > max_chars {
            return Err(ApiError::TooLarge {
                chars,
                limit: max_chars,
            });
        }
        if t.trim().is_empty() {
            problems.push(FieldProblem {
                field: "text",
                problem: "must not be empty".into(),
            });
        }
    }
    if !problems.is_empty() {
        return Err(ApiError::BadRequest("invalid request body".into(), problems));
    }
    Ok(AssessRequest {
        student_key: key.unwrap().trim().to_string(),
        text: text.unwrap().to_string(),
    })
}

async fn assess(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let req = parse_request(&body, state.config.max_chars)?;
    let record = tokio::task::spawn_blocking(move || {
        let essay = Essay::new(req.student_key.clone(), Role::Student, &req.text);
        let b = &state.bundle;
        let prepared = prepare_essay(&essay, &state.segmenter, &b.space).map_err(|e| match e {
            AssessmentError::EmptyEssay(_) => ApiError::BadRequest(
                "invalid request body".into(),
                vec![FieldProblem {
                    field: "text",
                    problem: "contains no clauses".into(),
                }],
            ),
            other => ApiError::Internal(other.to_string()),
        })?;
        let assessment = assess_prepared(&prepared, &b.pyramid, &b.rubric, &state.config.assessment)
            .map_err(|e| ApiError::Internal(e.to_string()))?;
        let checklist =
            make_checklist(&assessment, &b.rubric).map_err(|e| ApiError::Internal(e.to_string()))?;
        state
            .store
            .append(&req.student_key, &essay.text, checklist)
            .map_err(|e| ApiError::Internal(e.to_string()))
    })
    .await
    .map_err(|e| ApiError::Internal(format!("assessment task failed: {e}")))??;
    Ok(Json(record).into_response())
}

async fn revisions(State(state): State<Arc<AppState>>, Path(student_key): Path<String>) -> Response {
    Json(state.store.history(student_key.trim())).into_response()
}

async fn rubric(State(state): State<Arc<AppState>>) -> Response {
    Json(&state.bundle.rubric).into_response()
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    let b = &state.bundle;
    Json(json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
        "pyramid_id": b.pyramid.id(),
        "space_id": b.space.id(),
        "rubric_hash": b.rubric.hash(),
        "config": state.config.assessment,
        "max_chars": state.config.max_chars,
    }))
    .into_response()
}
