//! HTTP/JSON session API.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use grec_core::decoration::Correction;
use grec_core::reuse::Choice;
use grec_core::Config;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::io::{parse_csv, to_csv};
use crate::service::{ServiceError, Session};

pub const MAX_UPLOAD_BYTES: usize = 20 * 1024 * 1024;

type SessionRef = Arc<tokio::sync::Mutex<Session>>;

#[derive(Clone)]
pub struct AppState {
    config: Config,
    sessions: Arc<Mutex<HashMap<String, SessionRef>>>,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        AppState { config, sessions: Arc::default() }
    }

    fn get(&self, id: &str) -> Result<SessionRef, ApiError> {
        let map = self.sessions.lock().expect("session map poisoned");
        map.get(id).cloned().ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown session {id}")))
    }
}

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let kind = match self.0 {
            StatusCode::NOT_FOUND => "notFound",
            StatusCode::CONFLICT => "conflict",
            _ => "invalid",
        };
        (self.0, Json(json!({ "error": kind, "message": self.1 }))).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Conflict(m) => ApiError(StatusCode::CONFLICT, m),
            ServiceError::Invalid(m) => ApiError(StatusCode::UNPROCESSABLE_ENTITY, m),
        }
    }
}

fn invalid(m: impl ToString) -> ApiError {
    ApiError(StatusCode::UNPROCESSABLE_ENTITY, m.to_string())
}

fn utf8(body: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|_| invalid("body is not UTF-8"))
}

fn ok<T: Serialize>(v: T) -> Response {
    Json(v).into_response()
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/decorations", get(decorations).patch(correct))
        .route("/sessions/{id}/deconstruct", post(deconstruct))
        .route("/sessions/{id}/sample-data", get(sample_data))
        .route("/sessions/{id}/dataset", post(dataset))
        .route("/sessions/{id}/plan", get(plan))
        .route("/sessions/{id}/steps/{k}", post(step))
        .route("/sessions/{id}/back", post(back))
        .route("/sessions/{id}/export", get(export))
        .layer(DefaultBodyLimit::max(MAX_UPLOAD_BYTES))
        .with_state(state)
}

async fn create(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let session = Session::upload(utf8(&body)?, st.config.clone())?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let view = serde_json::to_value(session.decorations()).map_err(invalid)?;
    st.sessions.lock().expect("session map poisoned").insert(id.clone(), Arc::new(tokio::sync::Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "decorations": view }))).into_response())
}

async fn decorations(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let s = s.lock().await;
    Ok(ok(s.decorations()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Corrections {
    Many(Vec<Correction>),
    One(Correction),
}

async fn correct(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let list = match serde_json::from_slice::<Corrections>(&body).map_err(invalid)? {
        Corrections::Many(v) => v,
        Corrections::One(c) => vec![c],
    };
    let mut s = s.lock().await;
    Ok(ok(s.correct(&list)?))
}

async fn deconstruct(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let mut s = s.lock().await;
    let template = serde_json::to_value(s.deconstruct()?).map_err(invalid)?;
    Ok(ok(json!({ "stage": s.stage(), "template": template, "schema": s.schema()? })))
}

#[derive(Deserialize)]
struct SeedQuery {
    #[serde(default)]
    seed: u64,
}

async fn sample_data(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<SeedQuery>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let table = s.lock().await.sample_data(q.seed)?;
    let csv = to_csv(&table).map_err(invalid)?;
    Ok(([(header::CONTENT_TYPE, "text/csv")], csv).into_response())
}

async fn dataset(State(st): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let table = parse_csv(utf8(&body)?).map_err(|e| invalid(format!("{e:#}")))?;
    let mut s = s.lock().await;
    Ok(ok(s.load_dataset(table)?))
}

async fn plan(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let s = s.lock().await;
    Ok(ok(s.plan()?))
}

async fn step(State(st): State<AppState>, Path((id, k)): Path<(String, usize)>, body: Bytes) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let choice: Choice = serde_json::from_slice(&body).map_err(invalid)?;
    let mut s = s.lock().await;
    Ok(ok(s.step(k, choice)?))
}

async fn back(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let mut s = s.lock().await;
    Ok(ok(s.back()?))
}

#[derive(Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

async fn export(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<ExportQuery>) -> Result<Response, ApiError> {
    let s = st.get(&id)?;
    let s = s.lock().await;
    let e = s.export()?;
    Ok(match q.format.as_deref() {
        Some("svg") => ([(header::CONTENT_TYPE, "image/svg+xml")], e.svg).into_response(),
        _ => ok(e),
    })
}

pub async fn serve(port: u16, config: Config) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(config))).await?;
    Ok(())
}
