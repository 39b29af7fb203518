use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use gunrock_core::phonetic::TimedToken;
use gunrock_core::{Engine, ServiceError};
use serde::Deserialize;
use serde_json::json;

#[derive(Debug, Deserialize)]
pub struct OpenRequest {
    #[serde(default = "anonymous")]
    pub user_ref: String,
}

fn anonymous() -> String {
    "anonymous".to_string()
}

/// A turn is either timed ASR tokens or plain typed text.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum TurnRequest {
    Tokens { tokens: Vec<TimedToken> },
    Text { text: String },
}

#[derive(Debug, Deserialize)]
pub struct RatingRequest {
    pub stars: Option<u8>,
}

pub struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = match &self.0 {
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            ServiceError::Closed(_) => (StatusCode::CONFLICT, "closed"),
            ServiceError::Busy(_) => (StatusCode::CONFLICT, "busy"),
            ServiceError::InvalidInput(_) => (StatusCode::BAD_REQUEST, "invalid_input"),
            ServiceError::Storage(_) | ServiceError::Config(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        if status.is_server_error() {
            log::error!("{}", self.0);
        }
        (status, Json(json!({ "error": kind, "message": self.0.to_string() }))).into_response()
    }
}

type Shared = Arc<Engine>;

/// Engine calls do blocking work, so they run off the async workers.
async fn blocking<T, F>(engine: Shared, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&Engine) -> Result<T, ServiceError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ApiError(ServiceError::Storage(format!("worker failed: {e}"))))?
        .map_err(ApiError)
}

async fn open_session(State(engine): State<Shared>, body: Option<Json<OpenRequest>>) -> Result<Response, ApiError> {
    let user_ref = body.map_or_else(anonymous, |Json(b)| b.user_ref);
    let opened = blocking(engine, move |e| e.open_session(&user_ref)).await?;
    Ok((StatusCode::CREATED, Json(opened)).into_response())
}

async fn post_turn(
    State(engine): State<Shared>,
    Path(id): Path<String>,
    Json(body): Json<TurnRequest>,
) -> Result<Response, ApiError> {
    let reply = blocking(engine, move |e| match body {
        TurnRequest::Tokens { tokens } => e.handle_turn(&id, &tokens),
        TurnRequest::Text { text } => e.handle_text(&id, &text),
    })
    .await?;
    Ok(Json(reply).into_response())
}

async fn post_rating(
    State(engine): State<Shared>,
    Path(id): Path<String>,
    Json(body): Json<RatingRequest>,
) -> Result<Response, ApiError> {
    let record = blocking(engine, move |e| e.close_session(&id, body.stars)).await?;
    Ok(Json(json!({ "session_id": record.session_id, "rating": record.rating })).into_response())
}

async fn get_log(State(engine): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let record = blocking(engine, move |e| e.conversation(&id)).await?;
    Ok(Json(record).into_response())
}

pub fn router(engine: Shared) -> Router {
    Router::new()
        .route("/sessions", post(open_session))
        .route("/sessions/{id}/turns", post(post_turn))
        .route("/sessions/{id}/rating", post(post_rating))
        .route("/sessions/{id}/log", get(get_log))
        .route("/health", get(|| async { "ok" }))
        .with_state(engine)
}

pub async fn serve(engine: Engine, port: u16) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(engine)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
