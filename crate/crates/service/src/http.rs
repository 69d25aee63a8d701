use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::routing::{get, post};
use axum::{Json, Router};
use tower_http::services::ServeDir;

use crate::error::{ServiceError, ServiceResult};
use crate::service::{CellUtility, CreateGame, EnginesView, GameService, GameView, MoveRequest};

type AppState = Arc<GameService>;

/// Runs blocking game logic off the async workers.
async fn blocking<T, F>(f: F) -> ServiceResult<T>
where
    F: FnOnce() -> ServiceResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Internal(format!("worker failed: {e}")))?
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ServiceResult<T> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ServiceError::BadRequest(e.body_text()))
}

async fn create_game(
    State(svc): State<AppState>,
    payload: Result<Json<CreateGame>, JsonRejection>,
) -> ServiceResult<(StatusCode, Json<GameView>)> {
    let req = body(payload)?;
    let view = blocking(move || svc.create_game(req)).await?;
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_game(State(svc): State<AppState>, Path(id): Path<String>) -> ServiceResult<Json<GameView>> {
    svc.game(&id).map(Json)
}

async fn post_move(
    State(svc): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<MoveRequest>, JsonRejection>,
) -> ServiceResult<Json<GameView>> {
    let req = body(payload)?;
    blocking(move || svc.post_move(&id, req.cell)).await.map(Json)
}

async fn analysis(
    State(svc): State<AppState>,
    Path(id): Path<String>,
) -> ServiceResult<Json<Vec<CellUtility>>> {
    blocking(move || svc.analyze(&id)).await.map(Json)
}

async fn delete_game(State(svc): State<AppState>, Path(id): Path<String>) -> ServiceResult<StatusCode> {
    svc.delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn engines(State(svc): State<AppState>) -> Json<EnginesView> {
    Json(svc.engines())
}

async fn api_not_found() -> impl IntoResponse {
    ServiceError::NotFound("no such endpoint".into())
}

/// All `/api` routes, plus static files from `static_dir` at `/` when given.
pub fn router(svc: Arc<GameService>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/games", post(create_game))
        .route("/games/{id}", get(get_game).delete(delete_game))
        .route("/games/{id}/move", post(post_move))
        .route("/games/{id}/analysis", get(analysis))
        .route("/engines", get(engines))
        .fallback(api_not_found)
        .with_state(svc);
    let app = Router::new().nest("/api", api);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(
    addr: SocketAddr,
    svc: Arc<GameService>,
    static_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(svc, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
