use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use ideation_core::experiment::{
    write_export_csv, Experiment, ExperimentError, VerificationAnswer,
};
use serde::Deserialize;
use serde_json::json;
use tower_http::trace::TraceLayer;

#[derive(Clone)]
pub struct AppState {
    experiment: Arc<Experiment>,
    admin_token: Arc<str>,
}

impl AppState {
    pub fn new(experiment: Arc<Experiment>, admin_token: String) -> Self {
        Self { experiment, admin_token: admin_token.into() }
    }

    pub fn experiment(&self) -> &Arc<Experiment> {
        &self.experiment
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/ideas", post(request_idea))
        .route("/sessions/{id}/story", post(submit_story))
        .route("/sessions/{id}/verification", post(submit_verification))
        .route("/export", get(export))
        .layer(TraceLayer::new_for_http())
        .with_state(state)
}

struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl From<ExperimentError> for ApiError {
    fn from(e: ExperimentError) -> Self {
        let status = match &e {
            ExperimentError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ExperimentError::BudgetExhausted { .. }
            | ExperimentError::PoolExhausted
            | ExperimentError::StoryAlreadySubmitted(_)
            | ExperimentError::AlreadyVerified(_) => StatusCode::CONFLICT,
            ExperimentError::EmptyStory
            | ExperimentError::StoryRequired(_)
            | ExperimentError::VerificationNotApplicable(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ExperimentError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            tracing::error!(error = %e, "storage failure");
        }
        Self { status, code: e.code(), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

async fn health(State(state): State<AppState>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "sessions": state.experiment.session_count(),
        "ideas": state.experiment.pool().len(),
    }))
}

async fn create_session(State(state): State<AppState>) -> Result<impl IntoResponse, ApiError> {
    let session = state.experiment.create_session().await?;
    Ok((StatusCode::CREATED, Json(session)))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(state.experiment.session(&id).await?))
}

async fn request_idea(State(state): State<AppState>, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(state.experiment.request_idea(&id).await?))
}

#[derive(Deserialize)]
struct StoryBody {
    text: String,
}

async fn submit_story(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<StoryBody>,
) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(state.experiment.submit_story(&id, &body.text).await?))
}

#[derive(Deserialize)]
struct VerificationBody {
    answer: VerificationAnswer,
}

async fn submit_verification(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<VerificationBody>,
) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(state.experiment.submit_verification(&id, body.answer).await?))
}

#[derive(Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

fn authorized(headers: &HeaderMap, token: &str) -> bool {
    if token.is_empty() {
        return false;
    }
    let bearer = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    let custom = headers.get("x-admin-token").and_then(|v| v.to_str().ok());
    bearer == Some(token) || custom == Some(token)
}

async fn export(
    State(state): State<AppState>,
    headers: HeaderMap,
    Query(query): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    if !authorized(&headers, &state.admin_token) {
        return Err(ApiError {
            status: StatusCode::UNAUTHORIZED,
            code: "unauthorized",
            message: "admin token required".into(),
        });
    }
    let records = state.experiment.export_dataset().await;
    match query.format.as_deref().unwrap_or("json") {
        "json" => Ok(Json(records).into_response()),
        "csv" => {
            let mut buf = Vec::new();
            write_export_csv(&records, &mut buf).map_err(|e| ApiError {
                status: StatusCode::INTERNAL_SERVER_ERROR,
                code: "export",
                message: e.to_string(),
            })?;
            Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], buf).into_response())
        }
        other => Err(ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: "bad-format",
            message: format!("unknown export format {other:?}"),
        }),
    }
}
