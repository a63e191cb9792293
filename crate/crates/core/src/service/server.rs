//! HTTP + WebSocket front end for [`Session`]s.
//!
//! Each session's step loop runs on its own OS thread. Controls take the
//! session lock, which is only free between iterations, so every control
//! lands on an iteration boundary. Frames fan out through a broadcast
//! channel; a subscriber that falls behind is sent the latest snapshot
//! instead of the frames it missed.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread;
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use serde::Deserialize;
use tokio::net::TcpListener;
use tokio::sync::broadcast;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::io::{load_graph, to_canonical_json};
use crate::layout::LayoutParams;

use super::protocol::{ControlMessage, CreateSession, ErrorCode, FrameMessage, ServerMessage, SessionInfo};
use super::session::Session;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Sessions without activity or subscribers for this long are dropped.
    pub idle_timeout: Duration,
    /// Frames buffered per subscriber before it is considered lagging.
    pub frame_buffer: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            idle_timeout: Duration::from_secs(30 * 60),
            frame_buffer: 256,
        }
    }
}

pub struct SessionHandle {
    session: Mutex<Session>,
    wake: Condvar,
    frames: broadcast::Sender<Arc<FrameMessage>>,
    last_active: Mutex<Instant>,
    closed: AtomicBool,
}

impl SessionHandle {
    fn lock(&self) -> MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn touch(&self) {
        *self.last_active.lock().unwrap_or_else(|e| e.into_inner()) = Instant::now();
    }

    pub fn submit(&self, msg: ControlMessage) -> Result<ServerMessage> {
        self.touch();
        let reply = self.lock().submit(msg);
        self.wake.notify_all();
        reply
    }

    pub fn info(&self) -> SessionInfo {
        self.lock().info()
    }

    pub fn snapshot(&self) -> FrameMessage {
        self.lock().snapshot()
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Arc<FrameMessage>> {
        self.touch();
        self.frames.subscribe()
    }

    fn close(&self) {
        self.closed.store(true, Ordering::SeqCst);
        self.wake.notify_all();
    }

    fn run_loop(self: Arc<Self>) {
        loop {
            if self.closed.load(Ordering::SeqCst) {
                return;
            }
            let mut session = self.lock();
            if !session.is_running() {
                // wake on a control, or periodically to notice close()
                let _ = self
                    .wake
                    .wait_timeout(session, Duration::from_millis(250))
                    .unwrap_or_else(|e| e.into_inner());
                continue;
            }
            match session.tick() {
                Ok(Some(frame)) => {
                    drop(session);
                    // no subscribers is fine
                    let _ = self.frames.send(Arc::new(frame));
                }
                Ok(None) => {}
                Err(e) => {
                    log::error!("session {} stopped: {e}", session.id());
                    let _ = session.submit(super::protocol::Control::Pause.into());
                }
            }
        }
    }
}

/// All live sessions.
pub struct Registry {
    sessions: Mutex<HashMap<String, Arc<SessionHandle>>>,
    config: ServerConfig,
}

impl Registry {
    pub fn new(config: ServerConfig) -> Arc<Self> {
        Arc::new(Registry {
            sessions: Mutex::new(HashMap::new()),
            config,
        })
    }

    fn map(&self) -> MutexGuard<'_, HashMap<String, Arc<SessionHandle>>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Starts a paused session and its step thread.
    pub fn create(&self, graph: Graph, params: LayoutParams) -> Result<String> {
        let id = uuid::Uuid::new_v4().to_string();
        let session = Session::new(id.clone(), graph, params)?;
        let (frames, _) = broadcast::channel(self.config.frame_buffer.max(1));
        let handle = Arc::new(SessionHandle {
            session: Mutex::new(session),
            wake: Condvar::new(),
            frames,
            last_active: Mutex::new(Instant::now()),
            closed: AtomicBool::new(false),
        });
        let runner = Arc::clone(&handle);
        thread::Builder::new()
            .name(format!("session-{}", &id[..8]))
            .spawn(move || runner.run_loop())?;
        self.map().insert(id.clone(), handle);
        log::info!("created session {id}");
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Result<Arc<SessionHandle>> {
        self.map()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("session {id:?}")))
    }

    pub fn len(&self) -> usize {
        self.map().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn remove(&self, id: &str) -> bool {
        match self.map().remove(id) {
            Some(h) => {
                h.close();
                true
            }
            None => false,
        }
    }

    /// Drops sessions idle past the timeout that nobody is watching.
    pub fn expire_idle(&self) -> usize {
        let now = Instant::now();
        let stale: Vec<String> = self
            .map()
            .iter()
            .filter(|(_, h)| {
                let last = *h.last_active.lock().unwrap_or_else(|e| e.into_inner());
                h.frames.receiver_count() == 0 && now.duration_since(last) > self.config.idle_timeout
            })
            .map(|(id, _)| id.clone())
            .collect();
        for id in &stale {
            log::info!("expiring idle session {id}");
            self.remove(id);
        }
        stale.len()
    }

    pub fn shutdown(&self) {
        for (_, h) in self.map().drain() {
            h.close();
        }
    }
}

struct ApiError(StatusCode, ErrorCode, String);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFound(m) => ApiError(StatusCode::NOT_FOUND, ErrorCode::NotFound, m),
            Error::Io(e) => ApiError(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, e.to_string()),
            other => ApiError(StatusCode::BAD_REQUEST, ErrorCode::Validation, other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ServerMessage::Error {
            code: self.1,
            message: self.2,
        };
        (self.0, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn canonical(status: StatusCode, msg: &ServerMessage) -> ApiResult<Response> {
    let body = to_canonical_json(msg)?;
    Ok((status, [(header::CONTENT_TYPE, "application/json")], body).into_response())
}

/// Routes:
///
/// - `GET /health`
/// - `POST /sessions` with a [`CreateSession`] body
/// - `GET /sessions/{id}`
/// - `POST /sessions/{id}/control` with a [`ControlMessage`] body
/// - `GET /sessions/{id}/layout`
/// - `GET /sessions/{id}/stream?every_n=N` (WebSocket upgrade)
pub fn router(registry: Arc<Registry>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_info).delete(delete_session))
        .route("/sessions/{id}/control", post(control))
        .route("/sessions/{id}/layout", get(export_layout))
        .route("/sessions/{id}/stream", get(stream))
        .with_state(registry)
}

async fn health(State(reg): State<Arc<Registry>>) -> impl IntoResponse {
    Json(serde_json::json!({ "status": "ok", "sessions": reg.len() }))
}

async fn create_session(State(reg): State<Arc<Registry>>, body: Bytes) -> ApiResult<Response> {
    let invalid = |m: String| ApiError(StatusCode::BAD_REQUEST, ErrorCode::InvalidGraph, m);
    let req: CreateSession = serde_json::from_slice(&body).map_err(|e| invalid(e.to_string()))?;
    // round-trip through the loader so version and unknown-field checks apply
    let bytes = serde_json::to_vec(&req.graph).map_err(|e| invalid(e.to_string()))?;
    let graph = load_graph(&bytes).map_err(|e| invalid(e.to_string()))?;
    let params = req.params.resolve(graph.node_count())?;
    let session_id = tokio::task::spawn_blocking(move || reg.create(graph, params))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, e.to_string()))??;
    canonical(StatusCode::CREATED, &ServerMessage::Created { session_id })
}

async fn session_info(State(reg): State<Arc<Registry>>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = reg.get(&id)?;
    let info = tokio::task::spawn_blocking(move || handle.info())
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, e.to_string()))?;
    canonical(StatusCode::OK, &ServerMessage::Session(info))
}

async fn delete_session(State(reg): State<Arc<Registry>>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    if reg.remove(&id) {
        Ok(StatusCode::NO_CONTENT)
    } else {
        Err(Error::NotFound(format!("session {id:?}")).into())
    }
}

async fn submit_blocking(handle: Arc<SessionHandle>, msg: ControlMessage) -> ApiResult<ServerMessage> {
    tokio::task::spawn_blocking(move || handle.submit(msg))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, e.to_string()))?
        .map_err(ApiError::from)
}

async fn control(State(reg): State<Arc<Registry>>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let handle = reg.get(&id)?;
    let msg: ControlMessage = serde_json::from_slice(&body)
        .map_err(|e| ApiError(StatusCode::BAD_REQUEST, ErrorCode::InvalidMessage, e.to_string()))?;
    let reply = submit_blocking(handle, msg).await?;
    canonical(StatusCode::OK, &reply)
}

async fn export_layout(State(reg): State<Arc<Registry>>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = reg.get(&id)?;
    let doc = tokio::task::spawn_blocking(move || handle.lock().export())
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal, e.to_string()))??;
    let body = to_canonical_json(&doc)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

#[derive(Debug, Deserialize)]
struct StreamQuery {
    every_n: Option<usize>,
}

async fn stream(
    State(reg): State<Arc<Registry>>,
    Path(id): Path<String>,
    Query(q): Query<StreamQuery>,
    ws: WebSocketUpgrade,
) -> ApiResult<Response> {
    let handle = reg.get(&id)?;
    let every_n = q.every_n.unwrap_or(1);
    if every_n == 0 {
        return Err(Error::invalid("every_n must be >= 1").into());
    }
    Ok(ws.on_upgrade(move |socket| stream_session(socket, handle, every_n)))
}

fn to_text(msg: &ServerMessage) -> Message {
    Message::Text(serde_json::to_string(msg).expect("server messages serialize").into())
}

/// Sends frames to one client and applies the controls it sends back.
/// Ends when the client disconnects; the simulation is unaffected.
async fn stream_session(socket: WebSocket, handle: Arc<SessionHandle>, every_n: usize) {
    let (mut tx, mut rx) = socket.split();
    // subscribe before snapshotting so no frame falls between the two
    let mut frames = handle.subscribe();
    let snapshot = {
        let h = Arc::clone(&handle);
        tokio::task::spawn_blocking(move || h.snapshot()).await
    };
    let Ok(snapshot) = snapshot else { return };
    let mut last_sent = snapshot.iteration;
    if tx.send(to_text(&ServerMessage::Frame(snapshot))).await.is_err() {
        return;
    }

    loop {
        tokio::select! {
            frame = frames.recv() => {
                let outgoing = match frame {
                    Ok(f) => {
                        if f.iteration <= last_sent || f.iteration % every_n != 0 {
                            continue;
                        }
                        (*f).clone()
                    }
                    Err(broadcast::error::RecvError::Lagged(skipped)) => {
                        log::debug!("subscriber lagged by {skipped} frames");
                        let h = Arc::clone(&handle);
                        let Ok(snap) = tokio::task::spawn_blocking(move || h.snapshot()).await else { break };
                        if snap.iteration <= last_sent {
                            continue;
                        }
                        snap
                    }
                    Err(broadcast::error::RecvError::Closed) => break,
                };
                last_sent = outgoing.iteration;
                if tx.send(to_text(&ServerMessage::Frame(outgoing))).await.is_err() {
                    break;
                }
            }
            incoming = rx.next() => {
                let text = match incoming {
                    Some(Ok(Message::Text(t))) => t,
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => continue,
                };
                let reply = match serde_json::from_str::<ControlMessage>(&text) {
                    Ok(msg) => match submit_blocking(Arc::clone(&handle), msg).await {
                        Ok(r) => r,
                        Err(ApiError(_, code, message)) => ServerMessage::Error { code, message },
                    },
                    Err(e) => ServerMessage::Error {
                        code: ErrorCode::InvalidMessage,
                        message: e.to_string(),
                    },
                };
                if tx.send(to_text(&reply)).await.is_err() {
                    break;
                }
            }
        }
    }
}

/// Serves until the listener fails. Idle sessions are reaped in the background.
pub async fn serve(listener: TcpListener, registry: Arc<Registry>) -> Result<()> {
    let reaper = Arc::clone(&registry);
    let period = (registry.config.idle_timeout / 4).max(Duration::from_millis(100));
    tokio::spawn(async move {
        let mut ticker = tokio::time::interval(period);
        loop {
            ticker.tick().await;
            reaper.expire_idle();
        }
    });
    axum::serve(listener, router(registry)).await?;
    Ok(())
}
