//! Local HTTP/JSON service backing the API editor.
//!
//! One session holds the model and a single annotation document. Every
//! mutation bumps the revision; clients may send `If-Match: <revision>` and
//! get 409 when they are behind.

use std::path::PathBuf;
use std::sync::Arc;

use adaptor_core::adapter::{generate, render, write_zip, GenerateError};
use adaptor_core::annotation::{
    batch_annotate, merge_annotation_sets, validate, AnnotationKind, AnnotationSet, Filter, FilterContext, InvalidFilter, Origin, Payload, Review,
    Skipped, Violation,
};
use adaptor_core::inference::{classify_elements, InferenceConfig, UsefulnessReport};
use adaptor_core::model::{ApiModel, ElementRef, ModelIndex};
use adaptor_core::qname::QualifiedName;
use adaptor_core::usage::{ModelMismatch, UsageStore};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::RwLock;

pub const DEFAULT_PORT: u16 = 8765;

/// Undo depth kept in memory.
const UNDO_LIMIT: usize = 100;

pub struct Session {
    pub model: ApiModel,
    pub usages: Option<UsageStore>,
    pub report: Option<UsefulnessReport>,
    pub annotations: AnnotationSet,
    pub revision: u64,
    undo: Vec<AnnotationSet>,
    /// Where `POST /api/save` writes.
    save_path: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Usages(#[from] ModelMismatch),
    #[error("annotations do not validate against the model")]
    Invalid(Vec<Violation>),
}

impl Session {
    /// Builds a session; annotations default to an empty set and must
    /// validate against `model`.
    pub fn new(
        model: ApiModel,
        usages: Option<UsageStore>,
        annotations: Option<AnnotationSet>,
        config: &InferenceConfig,
    ) -> Result<Self, SessionError> {
        let report = usages.as_ref().map(|u| classify_elements(&model, u, config)).transpose()?;
        let annotations = annotations.unwrap_or_else(|| AnnotationSet::new(&model));
        let violations = validate(&annotations, &model);
        if !violations.is_empty() {
            return Err(SessionError::Invalid(violations));
        }
        Ok(Session { model, usages, report, annotations, revision: 0, undo: Vec::new(), save_path: None })
    }

    pub fn with_save_path(mut self, path: PathBuf) -> Self {
        self.save_path = Some(path);
        self
    }

    /// Replaces the document if it validates.
    fn commit(&mut self, next: AnnotationSet) -> Result<u64, ApiError> {
        let violations = validate(&next, &self.model);
        if !violations.is_empty() {
            return Err(ApiError::Violations(violations));
        }
        let prev = std::mem::replace(&mut self.annotations, next);
        self.undo.push(prev);
        if self.undo.len() > UNDO_LIMIT {
            self.undo.remove(0);
        }
        self.revision += 1;
        Ok(self.revision)
    }
}

pub type Shared = Arc<RwLock<Session>>;

#[derive(Debug)]
pub enum ApiError {
    Violations(Vec<Violation>),
    Filter(InvalidFilter),
    BadRequest(String),
    NotFound(String),
    Conflict(String),
    Generate(String),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, body) = match self {
            ApiError::Violations(v) => (StatusCode::BAD_REQUEST, json!({"error": "violations", "violations": v})),
            ApiError::Filter(f) => {
                (StatusCode::BAD_REQUEST, json!({"error": "invalid_filter", "term": f.term, "message": f.message}))
            }
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, json!({"error": "bad_request", "message": m})),
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, json!({"error": "not_found", "message": m})),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, json!({"error": "conflict", "message": m})),
            ApiError::Generate(m) => (StatusCode::UNPROCESSABLE_ENTITY, json!({"error": "generation_failed", "message": m})),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": "internal", "message": m})),
        };
        (status, Json(body)).into_response()
    }
}

pub fn router(session: Shared) -> Router {
    Router::new()
        .route("/api/session", get(session_info))
        .route("/api/model", get(get_model))
        .route("/api/elements", get(elements))
        .route("/api/annotations", get(get_annotations).put(put_annotations))
        .route("/api/annotations/batch", post(batch))
        .route("/api/review", post(review))
        .route("/api/complete", post(complete))
        .route("/api/undo", post(undo))
        .route("/api/generate", post(generate_zip))
        .route("/api/merge", post(merge))
        .route("/api/save", post(save))
        .route("/api/usages/{qname}", get(usages))
        .with_state(session)
}

/// Rejects writes from clients that have not seen the latest revision.
fn check_revision(headers: &HeaderMap, current: u64) -> Result<(), ApiError> {
    let Some(v) = headers.get(header::IF_MATCH) else { return Ok(()) };
    let text = v.to_str().map_err(|_| ApiError::BadRequest("If-Match is not text".into()))?;
    let expected: u64 = text
        .trim()
        .trim_matches('"')
        .parse()
        .map_err(|_| ApiError::BadRequest(format!("If-Match `{text}` is not a revision number")))?;
    if expected == current {
        Ok(())
    } else {
        Err(ApiError::Conflict(format!("revision {expected} is stale, current revision is {current}")))
    }
}

fn etag(revision: u64) -> HeaderValue {
    HeaderValue::from_str(&format!("\"{revision}\"")).expect("digits are a valid header value")
}

fn json_document(text: String, revision: Option<u64>) -> Response {
    let mut r = ([(header::CONTENT_TYPE, "application/json")], text).into_response();
    if let Some(rev) = revision {
        r.headers_mut().insert(header::ETAG, etag(rev));
    }
    r
}

fn parse_qname(s: &str) -> Result<QualifiedName, ApiError> {
    s.parse().map_err(|e| ApiError::BadRequest(format!("`{s}`: {e}")))
}

async fn session_info(State(s): State<Shared>) -> Json<serde_json::Value> {
    let s = s.read().await;
    Json(json!({
        "revision": s.revision,
        "library": s.annotations.library,
        "has_usages": s.usages.is_some(),
        "threshold": s.report.as_ref().map(|r| r.threshold),
        "can_undo": !s.undo.is_empty(),
    }))
}

async fn get_model(State(s): State<Shared>) -> Response {
    json_document(s.read().await.model.to_json(), None)
}

#[derive(Deserialize)]
struct ElementsQuery {
    #[serde(default)]
    filter: String,
}

#[derive(Serialize)]
struct ElementSummary {
    qname: QualifiedName,
    kind: &'static str,
    public: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<&'static str>,
    annotations: Vec<AnnotationKind>,
    completed: bool,
}

async fn elements(State(s): State<Shared>, Query(q): Query<ElementsQuery>) -> Result<Json<Vec<ElementSummary>>, ApiError> {
    let s = s.read().await;
    let filter = Filter::parse(&q.filter).map_err(ApiError::Filter)?;
    let index = ModelIndex::new(&s.model);
    let ctx = FilterContext::new(&index, &s.annotations, s.report.as_ref());
    let selected = filter.select(&ctx).map_err(ApiError::Filter)?;
    let out = selected
        .into_iter()
        .filter_map(|qname| {
            let e = index.get(&qname)?;
            Some(ElementSummary {
                kind: e.kind().as_str(),
                public: e.is_public(),
                classification: s.report.as_ref().and_then(|r| r.classification(&qname)).map(|c| c.as_str()),
                annotations: s.annotations.on(&qname).map(|a| a.kind()).collect(),
                completed: s.annotations.completed.contains(&qname),
                qname,
            })
        })
        .collect();
    Ok(Json(out))
}

async fn get_annotations(State(s): State<Shared>) -> Response {
    let s = s.read().await;
    json_document(s.annotations.to_json(), Some(s.revision))
}

#[derive(Serialize)]
struct Revision {
    revision: u64,
}

async fn put_annotations(State(s): State<Shared>, headers: HeaderMap, body: axum::body::Bytes) -> Result<Json<Revision>, ApiError> {
    let next = AnnotationSet::from_json(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut s = s.write().await;
    check_revision(&headers, s.revision)?;
    if next.library != s.annotations.library {
        return Err(ApiError::Conflict(format!(
            "annotations are for {} {}, the session is {} {}",
            next.library.name, next.library.version, s.annotations.library.name, s.annotations.library.version
        )));
    }
    let revision = s.commit(next)?;
    Ok(Json(Revision { revision }))
}

#[derive(Deserialize)]
struct BatchRequest {
    filter: String,
    payload: Payload,
    #[serde(default = "default_author")]
    author: String,
}

fn default_author() -> String {
    "editor".into()
}

#[derive(Serialize)]
struct BatchResponse {
    revision: u64,
    applied: Vec<QualifiedName>,
    skipped: Vec<Skipped>,
}

async fn batch(State(s): State<Shared>, headers: HeaderMap, Json(req): Json<BatchRequest>) -> Result<Json<BatchResponse>, ApiError> {
    let mut s = s.write().await;
    check_revision(&headers, s.revision)?;
    let origin = Origin::Manual { author: req.author };
    let outcome =
        batch_annotate(&s.annotations, &s.model, s.report.as_ref(), &req.filter, &req.payload, &origin).map_err(ApiError::Filter)?;
    let revision = if outcome.applied.is_empty() { s.revision } else { s.commit(outcome.set)? };
    Ok(Json(BatchResponse { revision, applied: outcome.applied, skipped: outcome.skipped }))
}

#[derive(Deserialize)]
struct ReviewRequest {
    target: String,
    kind: AnnotationKind,
    state: Review,
}

async fn review(State(s): State<Shared>, headers: HeaderMap, Json(req): Json<ReviewRequest>) -> Result<Json<Revision>, ApiError> {
    let target = parse_qname(&req.target)?;
    let mut s = s.write().await;
    check_revision(&headers, s.revision)?;
    let mut next = s.annotations.clone();
    let Some(a) = next.find_mut(&target, req.kind) else {
        return Err(ApiError::NotFound(format!("no {} annotation on {target}", req.kind)));
    };
    a.review = req.state;
    let revision = s.commit(next)?;
    Ok(Json(Revision { revision }))
}

#[derive(Deserialize)]
struct CompleteRequest {
    target: String,
    #[serde(default = "yes")]
    completed: bool,
}

fn yes() -> bool {
    true
}

async fn complete(State(s): State<Shared>, headers: HeaderMap, Json(req): Json<CompleteRequest>) -> Result<Json<Revision>, ApiError> {
    let target = parse_qname(&req.target)?;
    let mut s = s.write().await;
    check_revision(&headers, s.revision)?;
    if s.model.element(&target).is_none() {
        return Err(ApiError::NotFound(format!("`{target}` is not an element of the model")));
    }
    let mut next = s.annotations.clone();
    if req.completed {
        next.completed.insert(target);
    } else {
        next.completed.remove(&target);
    }
    let revision = s.commit(next)?;
    Ok(Json(Revision { revision }))
}

async fn undo(State(s): State<Shared>, headers: HeaderMap) -> Result<Json<Revision>, ApiError> {
    let mut s = s.write().await;
    check_revision(&headers, s.revision)?;
    let Some(prev) = s.undo.pop() else {
        return Err(ApiError::Conflict("nothing to undo".into()));
    };
    s.annotations = prev;
    s.revision += 1;
    Ok(Json(Revision { revision: s.revision }))
}

/// Zip of the adapter package for the current document.
pub fn generate_bytes(model: &ApiModel, set: &AnnotationSet) -> Result<Vec<u8>, ApiError> {
    let unit = generate(model, set).map_err(|e| match e {
        GenerateError::Invalid(v) => ApiError::Violations(v),
        other => ApiError::Generate(other.to_string()),
    })?;
    let files = render(&unit);
    let cursor = write_zip(&files, std::io::Cursor::new(Vec::new())).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(cursor.into_inner())
}

async fn generate_zip(State(s): State<Shared>) -> Result<Response, ApiError> {
    let (model, set, name) = {
        let s = s.read().await;
        (s.model.clone(), s.annotations.clone(), adaptor_core::adapter::package_name(&s.model.library_name))
    };
    let bytes = tokio::task::spawn_blocking(move || generate_bytes(&model, &set))
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))??;
    let disposition = format!("attachment; filename=\"{name}.zip\"");
    Ok(([(header::CONTENT_TYPE, "application/zip".to_string()), (header::CONTENT_DISPOSITION, disposition)], bytes).into_response())
}

#[derive(Serialize)]
struct MergeResponse {
    revision: u64,
    conflicts: Vec<adaptor_core::annotation::MergeConflict>,
}

/// Merges an uploaded document into the session. Where the two disagree the
/// session keeps its own annotation and the pair is reported.
async fn merge(State(s): State<Shared>, headers: HeaderMap, body: axum::body::Bytes) -> Result<Json<MergeResponse>, ApiError> {
    let other = AnnotationSet::from_json(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let mut s = s.write().await;
    check_revision(&headers, s.revision)?;
    let outcome = merge_annotation_sets(&s.annotations, &other).map_err(|e| ApiError::Conflict(e.to_string()))?;
    let mut next = outcome.merged;
    for c in &outcome.conflicts {
        if !next.annotations.contains(&c.left) && s.annotations.annotations.contains(&c.left) {
            next.annotations.push(c.left.clone());
        }
    }
    let revision = s.commit(next)?;
    Ok(Json(MergeResponse { revision, conflicts: outcome.conflicts }))
}

async fn save(State(s): State<Shared>) -> Result<Json<serde_json::Value>, ApiError> {
    let s = s.read().await;
    let Some(path) = s.save_path.clone() else {
        return Err(ApiError::BadRequest("the session was started without an annotations file".into()));
    };
    let text = s.annotations.to_json();
    tokio::fs::write(&path, text).await.map_err(|e| ApiError::Internal(format!("cannot write {}: {e}", path.display())))?;
    Ok(Json(json!({"revision": s.revision, "path": path})))
}

#[derive(Serialize)]
struct ValueCount {
    value: String,
    count: u64,
}

async fn usages(State(s): State<Shared>, Path(qname): Path<String>) -> Result<Json<serde_json::Value>, ApiError> {
    let qname = parse_qname(&qname)?;
    let s = s.read().await;
    let Some(element) = s.model.element(&qname) else {
        return Err(ApiError::NotFound(format!("`{qname}` is not an element of the model")));
    };
    let Some(u) = &s.usages else {
        return Err(ApiError::NotFound("the session has no usage data".into()));
    };
    let usage_count = match element {
        ElementRef::Class(_) => u.class_usage(&qname),
        ElementRef::Function(..) => u.function_usage(&qname),
        ElementRef::Parameter(..) => u.parameter_usage(&qname),
        ElementRef::Module(_) => return Err(ApiError::BadRequest("modules have no usage counts".into())),
    };
    let mut body = json!({"qname": qname, "kind": element.kind().as_str(), "usage_count": usage_count});
    if let Some(e) = s.report.as_ref().and_then(|r| r.get(&qname)) {
        body["usefulness"] = json!(e.usefulness);
        body["classification"] = json!(e.classification.as_str());
    }
    if let Some(v) = u.values(&qname) {
        let values: Vec<ValueCount> = v.values.iter().map(|(k, n)| ValueCount { value: k.canonical_text().to_string(), count: *n }).collect();
        body["values"] = json!(values);
        body["non_literal"] = json!(v.non_literal_sites.len());
        body["total"] = json!(v.total());
    }
    Ok(Json(body))
}

/// Serves on loopback until the process is stopped.
pub async fn serve(session: Session, port: u16) -> std::io::Result<()> {
    let app = router(Arc::new(RwLock::new(session)));
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app).await
}
