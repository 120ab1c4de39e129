//! JSON-over-HTTP access to one session. Every request holds the session
//! lock, so commands and reads run one at a time.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex, MutexGuard};

use anyhow::Context;
use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use nlui_core::{CommandOutcome, CommandResult, Fact, Session};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandRequest {
    pub sentence: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactBody {
    pub predicate: String,
    pub args: Vec<String>,
    pub value: bool,
}

impl From<&Fact> for FactBody {
    fn from(f: &Fact) -> Self {
        FactBody { predicate: f.predicate.clone(), args: f.args.clone(), value: f.value }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandResponse {
    pub kind: String,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
    pub revision: u64,
    pub state: Vec<FactBody>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateResponse {
    pub revision: u64,
    pub state: Vec<FactBody>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconEntryBody {
    pub phrase: String,
    pub category: String,
    pub term: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconResponse {
    pub entries: Vec<LexiconEntryBody>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

struct Inner {
    session: Session,
    /// Bumped after every evaluated imperative.
    revision: u64,
}

#[derive(Clone)]
pub struct AppState(Arc<Mutex<Inner>>);

impl AppState {
    pub fn new(session: Session) -> Self {
        AppState(Arc::new(Mutex::new(Inner { session, revision: 0 })))
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.0.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

fn respond(result: &CommandResult, revision: u64) -> (StatusCode, CommandResponse) {
    let (outcome, detail, status) = match &result.outcome {
        CommandOutcome::Ok => ("ok", None, StatusCode::OK),
        CommandOutcome::Exception { detail } => ("exception", Some(detail.clone()), StatusCode::OK),
        CommandOutcome::ParseError { variant, detail } => {
            let status = if *variant == "Empty" { StatusCode::BAD_REQUEST } else { StatusCode::OK };
            ("error", Some(format!("{variant}: {detail}")), status)
        }
        CommandOutcome::Failure { detail } => ("error", Some(format!("Failure: {detail}")), StatusCode::OK),
    };
    let body = CommandResponse {
        kind: result.kind.as_str().to_owned(),
        outcome: outcome.to_owned(),
        answer: result.answer,
        detail,
        trace: result.trace.as_ref().map(|t| t.lines()),
        revision,
        state: result.state_view.iter().map(FactBody::from).collect(),
    };
    (status, body)
}

async fn command(State(state): State<AppState>, Json(req): Json<CommandRequest>) -> (StatusCode, Json<CommandResponse>) {
    let (status, body) = tokio::task::spawn_blocking(move || {
        let mut inner = state.lock();
        let result = inner.session.run_command(&req.sentence);
        if result.evaluated_imperative() {
            inner.revision += 1;
        }
        respond(&result, inner.revision)
    })
    .await
    .expect("command task panicked");
    (status, Json(body))
}

async fn current_state(State(state): State<AppState>) -> Result<Json<StateResponse>, (StatusCode, Json<ErrorBody>)> {
    tokio::task::spawn_blocking(move || {
        let mut inner = state.lock();
        let revision = inner.revision;
        match inner.session.state_view() {
            Ok(facts) => Ok(Json(StateResponse { revision, state: facts.iter().map(FactBody::from).collect() })),
            Err(e) => Err((StatusCode::INTERNAL_SERVER_ERROR, Json(ErrorBody { error: e.to_string() }))),
        }
    })
    .await
    .expect("state task panicked")
}

async fn lexicon(State(state): State<AppState>) -> Json<LexiconResponse> {
    let inner = state.lock();
    let entries = inner
        .session
        .lexicon()
        .entries()
        .iter()
        .flat_map(|e| {
            e.readings.iter().map(|r| LexiconEntryBody {
                phrase: e.phrase_text(),
                category: r.category.to_string(),
                term: r.term.to_string(),
            })
        })
        .collect();
    Json(LexiconResponse { entries })
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/command", post(command))
        .route("/state", get(current_state))
        .route("/lexicon", get(lexicon))
        .with_state(state)
}

/// Serves until interrupted.
pub async fn serve(session: Session, addr: SocketAddr) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(session)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .context("serving")
}
