//! The JSON check service: a pure request handler plus an HTTP binding.
//!
//! [`handle_check`] and [`handle_parse`] are plain functions so the same
//! schema can be served without HTTP (see the FFI crate).

use std::net::SocketAddr;

use axum::body::{to_bytes, Body};
use axum::extract::Request;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use crate::calculus::{applicable_rules, run_script, Rule, Verdict};
use crate::diag::{Code, Diagnostic, Severity, Span};
use crate::script::{parse_formula, parse_script, print_formula, print_sequent};

/// Largest accepted `script_text`, in bytes.
pub const DEFAULT_SCRIPT_LIMIT: usize = 256 * 1024;

// JSON escaping can inflate text up to six times; anything beyond this is
// refused before it is decoded.
const TRANSPORT_LIMIT: usize = 8 * DEFAULT_SCRIPT_LIMIT;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Stop at the first error of any kind.
    #[default]
    Full,
    /// Report the state after the longest valid prefix.
    Prefix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckRequest {
    pub script_text: String,
    #[serde(default)]
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Complete,
    Incomplete,
    Invalid,
    ParseError,
}

/// A diagnostic flattened to the wire shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireDiagnostic {
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    pub line: usize,
    pub col: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub got: Option<String>,
}

impl From<&Diagnostic> for WireDiagnostic {
    fn from(d: &Diagnostic) -> Self {
        WireDiagnostic {
            code: d.code,
            severity: d.severity,
            message: d.message.clone(),
            line: d.span.line,
            col: d.span.col,
            expected: d.expected.clone(),
            got: d.got.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResponse {
    pub status: Status,
    /// Printed open goals, focused goal first.
    pub open_goals: Vec<String>,
    /// Branch id of each entry of `open_goals`.
    pub branch_ids: Vec<usize>,
    pub diagnostics: Vec<WireDiagnostic>,
    /// Rules applicable to the first open goal.
    pub applicable: Vec<String>,
    pub steps_validated: usize,
}

impl CheckResponse {
    fn error(status: Status, diagnostics: &[Diagnostic]) -> Self {
        CheckResponse {
            status,
            open_goals: Vec::new(),
            branch_ids: Vec::new(),
            diagnostics: diagnostics.iter().map(WireDiagnostic::from).collect(),
            applicable: Vec::new(),
            steps_validated: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParseRequest {
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseResponse {
    /// `ok` or `parse_error`.
    pub status: String,
    /// Canonical printing of the formula when it parsed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    pub diagnostics: Vec<WireDiagnostic>,
}

pub fn handle_check(req: &CheckRequest) -> CheckResponse {
    handle_check_with_limit(req, DEFAULT_SCRIPT_LIMIT)
}

pub fn handle_check_with_limit(req: &CheckRequest, limit: usize) -> CheckResponse {
    if req.script_text.len() > limit {
        return too_large(req.script_text.len(), limit);
    }
    let outcome = parse_script(&req.script_text);
    let Some(script) = &outcome.script else {
        return CheckResponse::error(Status::ParseError, &outcome.diagnostics);
    };
    let parse_failed = outcome.has_errors();
    let mut diagnostics = outcome.diagnostics.clone();

    let trace = run_script(&script.goal, &script.steps[..outcome.clean_prefix]);
    let status = match &trace.verdict {
        Verdict::Invalid { diagnostics: ds, .. } => {
            diagnostics.extend(ds.iter().cloned());
            Status::Invalid
        }
        _ if parse_failed => match req.mode {
            Mode::Full => Status::ParseError,
            Mode::Prefix => Status::Invalid,
        },
        Verdict::Complete => Status::Complete,
        Verdict::Incomplete(_) => Status::Incomplete,
    };
    diagnostics.sort_by_key(|d| (d.span.line == 0, d.span.line, d.span.col));

    let goals = &trace.state.open_goals;
    let applicable = match goals.front() {
        Some(g) => applicable_rules(&g.sequent)
            .map(|rs| rs.into_iter().map(|r| r.name().to_string()).collect())
            .unwrap_or_else(|_| vec![Rule::Ext.name().to_string()]),
        None => Vec::new(),
    };
    CheckResponse {
        status,
        open_goals: goals.iter().map(|g| print_sequent(&g.sequent)).collect(),
        branch_ids: goals.iter().map(|g| g.branch_id).collect(),
        diagnostics: diagnostics.iter().map(WireDiagnostic::from).collect(),
        applicable,
        steps_validated: trace.state.steps_consumed,
    }
}

fn too_large(size: usize, limit: usize) -> CheckResponse {
    let d = Diagnostic::error(
        Code::BodyTooLarge,
        Span::default(),
        format!("script is {size} bytes; the limit is {limit}"),
    );
    CheckResponse::error(Status::ParseError, &[d])
}

pub fn handle_parse(req: &ParseRequest) -> ParseResponse {
    match parse_formula(&req.formula) {
        Ok(f) => ParseResponse { status: "ok".into(), formula: Some(print_formula(&f)), diagnostics: Vec::new() },
        Err(ds) => ParseResponse {
            status: "parse_error".into(),
            formula: None,
            diagnostics: ds.iter().map(WireDiagnostic::from).collect(),
        },
    }
}

#[derive(Serialize)]
struct ErrorBody {
    diagnostics: Vec<WireDiagnostic>,
}

fn bad_request(message: String) -> Response {
    let d = Diagnostic::error(Code::BadRequest, Span::default(), message);
    (StatusCode::BAD_REQUEST, Json(ErrorBody { diagnostics: vec![WireDiagnostic::from(&d)] })).into_response()
}

/// Reads and decodes a JSON body, mapping every failure to a client error.
async fn decode<T: serde::de::DeserializeOwned>(body: Body) -> Result<T, Response> {
    let bytes = to_bytes(body, TRANSPORT_LIMIT).await.map_err(|_| {
        (StatusCode::PAYLOAD_TOO_LARGE, Json(too_large(TRANSPORT_LIMIT + 1, DEFAULT_SCRIPT_LIMIT))).into_response()
    })?;
    serde_json::from_slice(&bytes).map_err(|e| bad_request(format!("malformed request: {e}")))
}

fn is_json(req: &Request) -> bool {
    req.headers()
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_none_or(|v| v.starts_with("application/json"))
}

async fn check_endpoint(req: Request) -> Response {
    if !is_json(&req) {
        return bad_request("expected Content-Type: application/json".into());
    }
    match decode::<CheckRequest>(req.into_body()).await {
        Ok(r) => Json(handle_check(&r)).into_response(),
        Err(resp) => resp,
    }
}

async fn parse_endpoint(req: Request) -> Response {
    if !is_json(&req) {
        return bad_request("expected Content-Type: application/json".into());
    }
    match decode::<ParseRequest>(req.into_body()).await {
        Ok(r) => Json(handle_parse(&r)).into_response(),
        Err(resp) => resp,
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok"}))
}

pub fn router() -> Router {
    Router::new()
        .route("/v1/check", post(check_endpoint))
        .route("/v1/parse", post(parse_endpoint))
        .route("/v1/health", get(health))
}

/// Serves [`router`] until the process is stopped.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}
