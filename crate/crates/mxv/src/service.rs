//! Local HTTP + JSON service backing the web viewer.
//!
//! Uploaded documents live in an in-memory LRU store. Heavy work runs on the
//! blocking pool; requests against one document are handled one at a time.

use std::collections::{HashMap, VecDeque};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::SystemTime;

use axum::body::{Body, Bytes};
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use mxv_core::parsers::{parse_file, DetectedFormat, Parsed};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::api::{self, ExportRequest, MeasureRequest, MeshRequest, UploadResponse};
use crate::error::AppError;

pub const DEFAULT_PORT: u16 = 8710;
pub const DEFAULT_BIND: &str = "127.0.0.1";
pub const DEFAULT_MAX_UPLOAD: usize = 256 * 1024 * 1024;
pub const DEFAULT_STORE_CAP: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub bind: String,
    pub port: u16,
    /// Bytes.
    pub max_upload: usize,
    pub store_cap: usize,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: DEFAULT_BIND.into(),
            port: DEFAULT_PORT,
            max_upload: DEFAULT_MAX_UPLOAD,
            store_cap: DEFAULT_STORE_CAP,
            static_dir: None,
        }
    }
}

impl ServiceConfig {
    /// Applies `MXV_PORT`, `MXV_BIND`, `MXV_MAX_UPLOAD` and `MXV_STATIC_DIR`,
    /// which take precedence over flags.
    pub fn apply_env(&mut self, var: impl Fn(&str) -> Option<String>) -> Result<(), String> {
        if let Some(p) = var("MXV_PORT") {
            self.port = p.trim().parse().map_err(|_| format!("MXV_PORT: bad port '{p}'"))?;
        }
        if let Some(b) = var("MXV_BIND") {
            self.bind = b.trim().to_string();
        }
        if let Some(m) = var("MXV_MAX_UPLOAD") {
            self.max_upload = m.trim().parse().map_err(|_| format!("MXV_MAX_UPLOAD: bad byte count '{m}'"))?;
        }
        if let Some(d) = var("MXV_STATIC_DIR") {
            self.static_dir = Some(PathBuf::from(d));
        }
        Ok(())
    }
}

pub struct Document {
    pub id: String,
    pub filename: String,
    pub kind: DetectedFormat,
    pub payload: Parsed,
    pub created_at: SystemTime,
    busy: tokio::sync::Mutex<()>,
}

/// Documents by id, evicting the least recently used beyond `cap`.
pub struct Store {
    cap: usize,
    next: AtomicU64,
    inner: Mutex<(HashMap<String, Arc<Document>>, VecDeque<String>)>,
}

impl Store {
    pub fn new(cap: usize) -> Self {
        Self {
            cap: cap.max(1),
            next: AtomicU64::new(1),
            inner: Mutex::new((HashMap::new(), VecDeque::new())),
        }
    }

    pub fn insert(&self, filename: String, kind: DetectedFormat, payload: Parsed) -> Arc<Document> {
        let n = self.next.fetch_add(1, Ordering::Relaxed);
        let doc = Arc::new(Document {
            id: format!("d{n:06}"),
            filename,
            kind,
            payload,
            created_at: SystemTime::now(),
            busy: tokio::sync::Mutex::new(()),
        });
        let mut guard = self.inner.lock().expect("store lock");
        let (map, order) = &mut *guard;
        map.insert(doc.id.clone(), doc.clone());
        order.push_back(doc.id.clone());
        while order.len() > self.cap {
            if let Some(old) = order.pop_front() {
                map.remove(&old);
            }
        }
        doc
    }

    pub fn get(&self, id: &str) -> Option<Arc<Document>> {
        let mut guard = self.inner.lock().expect("store lock");
        let (map, order) = &mut *guard;
        let doc = map.get(id)?.clone();
        if let Some(pos) = order.iter().position(|x| x == id) {
            order.remove(pos);
        }
        order.push_back(id.to_string());
        Some(doc)
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("store lock").0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub max_upload: usize,
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    BadRequest(String),
    TooLarge(usize),
    App(AppError),
    Internal(String),
}

impl From<AppError> for ApiError {
    fn from(e: AppError) -> Self {
        match e {
            AppError::Usage(m) => ApiError::BadRequest(m),
            other => ApiError::App(other),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, error, message) = match self {
            ApiError::NotFound(id) => (StatusCode::NOT_FOUND, "NotFound", format!("no document with id '{id}'")),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, "BadRequest", m),
            ApiError::TooLarge(cap) => (
                StatusCode::PAYLOAD_TOO_LARGE,
                "PayloadTooLarge",
                format!("request body exceeds {cap} bytes"),
            ),
            ApiError::App(e) => (StatusCode::UNPROCESSABLE_ENTITY, e.name(), e.to_string()),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "Internal", m),
        };
        json_response(status, &ErrorBody { error, message })
    }
}

fn json_response<T: Serialize>(status: StatusCode, body: &T) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))],
        api::to_json(body),
    )
        .into_response()
}

type ApiResult = Result<Response, ApiError>;

fn body_bytes(body: Result<Bytes, BytesRejection>, cap: usize) -> Result<Bytes, ApiError> {
    body.map_err(|r| {
        if r.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::TooLarge(cap)
        } else {
            ApiError::BadRequest(r.body_text())
        }
    })
}

fn json_body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest(format!("malformed JSON body: {e}")))
}

fn document(state: &AppState, id: &str) -> Result<Arc<Document>, ApiError> {
    state.store.get(id).ok_or_else(|| ApiError::NotFound(id.to_string()))
}

/// Runs `f` on the blocking pool while holding the document's lock.
async fn with_document<T, F>(doc: Arc<Document>, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&Document) -> Result<T, AppError> + Send + 'static,
{
    let _busy = doc.busy.lock().await;
    let d = doc.clone();
    tokio::task::spawn_blocking(move || f(&d))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(ApiError::from)
}

async fn version() -> Response {
    json_response(StatusCode::OK, &api::version())
}

async fn upload(State(state): State<AppState>, headers: HeaderMap, body: Result<Bytes, BytesRejection>) -> ApiResult {
    let cap = state.max_upload;
    let bytes = body_bytes(body, cap)?;
    let filename = headers
        .get("x-filename")
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .trim()
        .to_string();
    let name = filename.clone();
    let (kind, payload) = tokio::task::spawn_blocking(move || parse_file(&name, &bytes))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
        .map_err(|e| ApiError::App(e.into()))?;
    let summary = api::summarize(&payload);
    let data = api::kind_label(&payload);
    let doc = state.store.insert(filename, kind, payload);
    Ok(json_response(
        StatusCode::OK,
        &UploadResponse {
            id: doc.id.clone(),
            kind: kind.kind,
            confidence: kind.confidence,
            data,
            summary,
        },
    ))
}

#[derive(Debug, Default, Deserialize)]
struct StructureQuery {
    frame: Option<usize>,
    supercell: Option<String>,
    bond_factor: Option<f64>,
}

async fn structure(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<StructureQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult {
    let Query(q) = query.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    let doc = document(&state, &id)?;
    let supercell = q.supercell.as_deref().map(api::parse_supercell).transpose()?;
    let view = with_document(doc, move |d| api::structure_view(&d.payload, q.frame, supercell, q.bond_factor)).await?;
    Ok(json_response(StatusCode::OK, &view))
}

async fn measure(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult {
    let req: MeasureRequest = json_body(&body_bytes(body, state.max_upload)?)?;
    let doc = document(&state, &id)?;
    let report = with_document(doc, move |d| api::measure(&d.payload, &req)).await?;
    Ok(json_response(StatusCode::OK, &report))
}

async fn volume_meta(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let doc = document(&state, &id)?;
    let meta = with_document(doc, |d| api::volume_meta(&d.payload)).await?;
    Ok(json_response(StatusCode::OK, &meta))
}

async fn volume_mesh(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult {
    let bytes = body_bytes(body, state.max_upload)?;
    let req: MeshRequest = if bytes.iter().all(u8::is_ascii_whitespace) {
        MeshRequest::default()
    } else {
        json_body(&bytes)?
    };
    let doc = document(&state, &id)?;
    let mesh = with_document(doc, move |d| api::mesh(&d.payload, &req)).await?;
    Ok(json_response(StatusCode::OK, &mesh))
}

#[derive(Debug, Default, Deserialize)]
struct BandQuery {
    emin: Option<f64>,
    emax: Option<f64>,
}

async fn band(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<BandQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult {
    let Query(q) = query.map_err(|e| ApiError::BadRequest(e.body_text()))?;
    let window = api::energy_window(q.emin, q.emax)?;
    let doc = document(&state, &id)?;
    let plot = with_document(doc, move |d| api::band(&d.payload, window)).await?;
    Ok(json_response(StatusCode::OK, &plot))
}

async fn export(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Bytes, BytesRejection>,
) -> ApiResult {
    let req: ExportRequest = json_body(&body_bytes(body, state.max_upload)?)?;
    let doc = document(&state, &id)?;
    let stem = std::path::Path::new(&doc.filename)
        .file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .unwrap_or("structure")
        .replace(['"', '\\'], "_");
    let format = req.format;
    let text = with_document(doc, move |d| api::export(&d.payload, req.format, req.frame)).await?;
    let disposition = format!("attachment; filename=\"{stem}.{}\"", format.extension());
    Ok((
        StatusCode::OK,
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("text/plain; charset=utf-8")),
            (
                header::CONTENT_DISPOSITION,
                HeaderValue::from_str(&disposition).unwrap_or_else(|_| HeaderValue::from_static("attachment")),
            ),
        ],
        Body::from(text),
    )
        .into_response())
}

async fn unknown_api() -> ApiError {
    ApiError::NotFound("route".into())
}

fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(o) = origin.to_str() else {
        return false;
    };
    let Some(rest) = o.strip_prefix("http://").or_else(|| o.strip_prefix("https://")) else {
        return false;
    };
    let host = if rest.starts_with('[') {
        rest.split_once(']').map(|(h, _)| &h[1..]).unwrap_or("")
    } else {
        rest.split(':').next().unwrap_or("")
    };
    matches!(host, "localhost" | "127.0.0.1" | "::1")
}

pub fn router(config: &ServiceConfig) -> Router {
    let state = AppState {
        store: Arc::new(Store::new(config.store_cap)),
        max_upload: config.max_upload,
    };
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|o, _| is_local_origin(o)))
        .allow_methods([axum::http::Method::GET, axum::http::Method::POST])
        .allow_headers([header::CONTENT_TYPE, header::HeaderName::from_static("x-filename")]);
    let api = Router::new()
        .route("/api/version", get(version))
        .route("/api/documents", post(upload))
        .route("/api/documents/{id}/structure", get(structure))
        .route("/api/documents/{id}/measure", post(measure))
        .route("/api/documents/{id}/volume/meta", get(volume_meta))
        .route("/api/documents/{id}/volume/mesh", post(volume_mesh))
        .route("/api/documents/{id}/band", get(band))
        .route("/api/documents/{id}/export", post(export))
        .route("/api/{*rest}", get(unknown_api).post(unknown_api))
        .layer(DefaultBodyLimit::max(config.max_upload))
        .with_state(state);
    let app = match &config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

/// Binds and serves until Ctrl-C.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let addr: SocketAddr = format!("{}:{}", config.bind, config.port)
        .parse()
        .or_else(|_| format!("[{}]:{}", config.bind, config.port).parse())
        .map_err(|_| std::io::Error::new(std::io::ErrorKind::InvalidInput, format!("bad bind address '{}'", config.bind)))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("mxv listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(&config))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
