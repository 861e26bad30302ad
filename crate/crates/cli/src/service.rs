//! HTTP+JSON session service.
//!
//! Every response body carries `"v"`. Errors look like
//! `{"v":1,"error":{"code":"not_found","message":"..."}}`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::future::Future;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use anyhow::Context;
use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::{Mutex, RwLock};

use seedcheck_core::verifier::{run_full_suite, ExploreOptions, SuiteOptions, VerificationReport};
use seedcheck_core::{EngineOptions, Fingerprint, IntMatrix, MatrixLiteral, Seed, SkewSymmetrizer};

use crate::payload::{symmetrizer_of, SeedPayload, SCHEMA_VERSION};

/// Full seeds kept per session for undo.
const SEED_CACHE: usize = 32;

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub engine: EngineOptions,
    pub snapshot: Option<PathBuf>,
    pub max_depth: usize,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            engine: EngineOptions::default(),
            snapshot: None,
            max_depth: 16,
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "engine_error", message)
    }

    fn session_not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id}"))
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "v": SCHEMA_VERSION,
            "error": { "code": self.code, "message": self.message },
        });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub k: usize,
    pub fingerprint: Fingerprint,
}

struct Session {
    id: u64,
    origin: IntMatrix,
    symmetrizer: Option<SkewSymmetrizer>,
    origin_fingerprint: Fingerprint,
    current: Seed,
    history: Vec<HistoryEntry>,
    cache: VecDeque<Seed>,
}

impl Session {
    fn new(id: u64, origin: IntMatrix) -> Result<Self, ApiError> {
        let seed = Seed::principal(&origin).map_err(|e| ApiError::bad_request(e.to_string()))?;
        let symmetrizer = symmetrizer_of(&origin).map_err(|e| ApiError::bad_request(e.to_string()))?;
        Ok(Self {
            id,
            origin,
            symmetrizer,
            origin_fingerprint: seed.fingerprint(),
            cache: VecDeque::from([seed.clone()]),
            current: seed,
            history: Vec::new(),
        })
    }

    fn path(&self) -> Vec<usize> {
        self.history.iter().map(|h| h.k).collect()
    }

    fn view(&self) -> Result<SessionView, ApiError> {
        let payload = SeedPayload::build(&self.current, &self.path(), self.symmetrizer.as_ref())
            .map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(SessionView { id: self.id, payload })
    }

    fn remember(&mut self, seed: Seed) {
        let fp = seed.fingerprint();
        self.cache.retain(|s| s.fingerprint() != fp);
        self.cache.push_front(seed);
        self.cache.truncate(SEED_CACHE);
    }

    fn cached(&self, fp: &Fingerprint) -> Option<&Seed> {
        self.cache.iter().find(|s| &s.fingerprint() == fp)
    }

    fn apply(&mut self, k: usize, next: Seed) {
        self.history.push(HistoryEntry {
            k,
            fingerprint: next.fingerprint(),
        });
        self.remember(next.clone());
        self.current = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: u64,
    #[serde(flatten)]
    pub payload: SeedPayload,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryView {
    pub v: u32,
    pub id: u64,
    pub origin_fingerprint: Fingerprint,
    pub entries: Vec<HistoryEntry>,
}

/// What the snapshot file stores per session; seeds are rebuilt by replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SessionRecord {
    id: u64,
    #[serde(rename = "B0")]
    b0: IntMatrix,
    path: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Snapshot {
    v: u32,
    next_id: u64,
    sessions: Vec<SessionRecord>,
}

struct Shared {
    sessions: RwLock<BTreeMap<u64, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    opts: ServeOptions,
}

#[derive(Clone)]
pub struct AppState {
    shared: Arc<Shared>,
}

impl AppState {
    /// Fresh state, restored from the snapshot file when one exists.
    pub fn new(opts: ServeOptions) -> anyhow::Result<Self> {
        let mut sessions = BTreeMap::new();
        let mut next_id = 1;
        if let Some(path) = opts.snapshot.as_deref().filter(|p| p.exists()) {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading snapshot {}", path.display()))?;
            let snap: Snapshot = serde_json::from_str(&text)
                .with_context(|| format!("parsing snapshot {}", path.display()))?;
            next_id = snap.next_id;
            for rec in snap.sessions {
                let mut session = Session::new(rec.id, rec.b0)
                    .map_err(|e| anyhow::anyhow!("snapshot session {}: {}", rec.id, e.message))?;
                for &k in &rec.path {
                    let next = session
                        .current
                        .mutate_with(k, &opts.engine)
                        .with_context(|| format!("replaying snapshot session {}", rec.id))?;
                    session.apply(k, next);
                }
                next_id = next_id.max(rec.id + 1);
                sessions.insert(rec.id, Arc::new(Mutex::new(session)));
            }
        }
        Ok(Self {
            shared: Arc::new(Shared {
                sessions: RwLock::new(sessions),
                next_id: AtomicU64::new(next_id),
                opts,
            }),
        })
    }

    /// Writes the snapshot file, if one is configured.
    pub async fn save_snapshot(&self) -> anyhow::Result<()> {
        let Some(path) = self.shared.opts.snapshot.clone() else {
            return Ok(());
        };
        let sessions = self.shared.sessions.read().await;
        let mut records = Vec::with_capacity(sessions.len());
        for session in sessions.values() {
            let s = session.lock().await;
            records.push(SessionRecord {
                id: s.id,
                b0: s.origin.clone(),
                path: s.path(),
            });
        }
        let snap = Snapshot {
            v: SCHEMA_VERSION,
            next_id: self.shared.next_id.load(Ordering::SeqCst),
            sessions: records,
        };
        write_atomically(&path, &serde_json::to_vec_pretty(&snap)?)
    }

    async fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let key: u64 = id.parse().map_err(|_| ApiError::session_not_found(id))?;
        self.shared
            .sessions
            .read()
            .await
            .get(&key)
            .cloned()
            .ok_or_else(|| ApiError::session_not_found(id))
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/mutate", post(mutate_session))
        .route("/sessions/{id}/undo", post(undo_session))
        .route("/sessions/{id}/history", get(session_history))
        .route("/sessions/{id}/verify", get(verify_session))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "method_not_allowed", "method not allowed")
        })
        .with_state(state)
}

/// Request bodies are JSON objects with exactly the expected fields.
fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let malformed = |e: serde_json::Error| ApiError::bad_request(format!("malformed request body: {e}"));
    let value: serde_json::Value = serde_json::from_slice(body).map_err(malformed)?;
    if !value.is_object() {
        return Err(ApiError::bad_request("request body must be a JSON object"));
    }
    serde_json::from_value(value).map_err(malformed)
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let literal = MatrixLiteral::parse(text).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let b = literal
        .principal_exchange()
        .map_err(|e| ApiError::bad_request(e.to_string()))?;
    let id = state.shared.next_id.fetch_add(1, Ordering::SeqCst);
    let session = Session::new(id, b)?;
    let view = session.view()?;
    state
        .shared
        .sessions
        .write()
        .await
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_session(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<SessionView> {
    let session = state.session(&id).await?;
    let s = session.lock().await;
    Ok(Json(s.view()?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MutateRequest {
    k: usize,
}

async fn mutate_session(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<SessionView> {
    let MutateRequest { k } = parse_body(&body)?;
    let session = state.session(&id).await?;
    let mut s = session.lock().await;
    let n = s.current.rank();
    if k == 0 || k > n {
        return Err(ApiError::bad_request(format!("direction {k} is outside 1..={n}")));
    }
    let current = s.current.clone();
    let engine = state.shared.opts.engine;
    let next = tokio::task::spawn_blocking(move || current.mutate_with(k, &engine))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    s.apply(k, next);
    Ok(Json(s.view()?))
}

async fn undo_session(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<SessionView> {
    let session = state.session(&id).await?;
    let mut s = session.lock().await;
    let Some(last) = s.history.last().copied() else {
        return Err(ApiError::new(StatusCode::CONFLICT, "empty_history", "nothing to undo"));
    };
    let expected = match s.history.len() {
        1 => s.origin_fingerprint,
        len => s.history[len - 2].fingerprint,
    };
    let current = s.current.clone();
    let engine = state.shared.opts.engine;
    let prior = tokio::task::spawn_blocking(move || current.mutate_with(last.k, &engine))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    if prior.fingerprint() != expected {
        return Err(ApiError::internal("mutation is not an involution on this seed"));
    }
    if let Some(cached) = s.cached(&expected) {
        if cached != &prior {
            return Err(ApiError::internal("cached seed disagrees with the involution"));
        }
    }
    s.history.pop();
    s.remember(prior.clone());
    s.current = prior;
    Ok(Json(s.view()?))
}

async fn session_history(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<HistoryView> {
    let session = state.session(&id).await?;
    let s = session.lock().await;
    Ok(Json(HistoryView {
        v: SCHEMA_VERSION,
        id: s.id,
        origin_fingerprint: s.origin_fingerprint,
        entries: s.history.clone(),
    }))
}

async fn verify_session(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<VerificationReport> {
    let depth = match query.get("depth") {
        None => 8,
        Some(d) => d
            .parse::<usize>()
            .map_err(|_| ApiError::bad_request(format!("depth must be a nonnegative integer, got {d:?}")))?,
    };
    let max_depth = state.shared.opts.max_depth;
    if depth > max_depth {
        return Err(ApiError::bad_request(format!("depth {depth} exceeds the limit {max_depth}")));
    }
    let origin = state.session(&id).await?.lock().await.origin.clone();
    let opts = SuiteOptions {
        explore: ExploreOptions {
            engine: state.shared.opts.engine,
            ..ExploreOptions::with_depth(depth)
        },
        canary: None,
    };
    let report = tokio::task::spawn_blocking(move || run_full_suite(&origin, &opts))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    Ok(Json(report))
}

/// Binds the listening socket, reporting a busy port as an error.
pub async fn bind(addr: SocketAddr) -> anyhow::Result<TcpListener> {
    TcpListener::bind(addr)
        .await
        .with_context(|| format!("cannot listen on {addr} (port busy?)"))
}

/// Serves until `shutdown` resolves, then writes the snapshot.
pub async fn serve(
    listener: TcpListener,
    opts: ServeOptions,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> anyhow::Result<()> {
    let state = AppState::new(opts)?;
    axum::serve(listener, router(state.clone()))
        .with_graceful_shutdown(shutdown)
        .await?;
    state.save_snapshot().await
}
