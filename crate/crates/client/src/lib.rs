//! Thin typed client for the experiment service.

use ideation_core::experiment::{
    AnalysisRecord, IdeaServed, Session, StoryReceipt, VerificationAnswer, VerificationReceipt,
};
use reqwest::{Method, RequestBuilder, Response, StatusCode};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("{status} {code}: {message}")]
    Api { status: StatusCode, code: String, message: String },
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
}

impl ClientError {
    /// Server error code such as `budget-exhausted`.
    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Api { code, .. } => Some(code),
            ClientError::Transport(_) => None,
        }
    }

    pub fn status(&self) -> Option<StatusCode> {
        match self {
            ClientError::Api { status, .. } => Some(*status),
            ClientError::Transport(e) => e.status(),
        }
    }
}

#[derive(Deserialize)]
struct ErrorBody {
    error: String,
    message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentClient {
    base: String,
    http: reqwest::Client,
    admin_token: Option<String>,
}

impl ExperimentClient {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self::with_client(base_url, reqwest::Client::new())
    }

    pub fn with_client(base_url: impl Into<String>, http: reqwest::Client) -> Self {
        Self { base: base_url.into().trim_end_matches('/').to_string(), http, admin_token: None }
    }

    pub fn with_admin_token(mut self, token: impl Into<String>) -> Self {
        self.admin_token = Some(token.into());
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    fn request(&self, method: Method, path: &str) -> RequestBuilder {
        self.http.request(method, format!("{}{}", self.base, path))
    }

    async fn checked(resp: Response) -> Result<Response, ClientError> {
        let status = resp.status();
        if status.is_success() {
            return Ok(resp);
        }
        let text = resp.text().await?;
        Err(match serde_json::from_str::<ErrorBody>(&text) {
            Ok(b) => ClientError::Api { status, code: b.error, message: b.message },
            Err(_) => ClientError::Api { status, code: "http".into(), message: text },
        })
    }

    async fn send<T: DeserializeOwned>(&self, req: RequestBuilder) -> Result<T, ClientError> {
        Ok(Self::checked(req.send().await?).await?.json().await?)
    }

    pub async fn health(&self) -> Result<serde_json::Value, ClientError> {
        self.send(self.request(Method::GET, "/health")).await
    }

    pub async fn create_session(&self) -> Result<Session, ClientError> {
        self.send(self.request(Method::POST, "/sessions")).await
    }

    pub async fn session(&self, id: &str) -> Result<Session, ClientError> {
        self.send(self.request(Method::GET, &format!("/sessions/{id}"))).await
    }

    pub async fn request_idea(&self, id: &str) -> Result<IdeaServed, ClientError> {
        self.send(self.request(Method::POST, &format!("/sessions/{id}/ideas"))).await
    }

    pub async fn submit_story(&self, id: &str, text: &str) -> Result<StoryReceipt, ClientError> {
        self.send(self.request(Method::POST, &format!("/sessions/{id}/story")).json(&json!({ "text": text })))
            .await
    }

    pub async fn submit_verification(
        &self,
        id: &str,
        answer: VerificationAnswer,
    ) -> Result<VerificationReceipt, ClientError> {
        self.send(
            self.request(Method::POST, &format!("/sessions/{id}/verification")).json(&json!({ "answer": answer })),
        )
        .await
    }

    fn admin(&self, req: RequestBuilder) -> RequestBuilder {
        match &self.admin_token {
            Some(t) => req.bearer_auth(t),
            None => req,
        }
    }

    pub async fn export(&self) -> Result<Vec<AnalysisRecord>, ClientError> {
        self.send(self.admin(self.request(Method::GET, "/export"))).await
    }

    pub async fn export_csv(&self) -> Result<String, ClientError> {
        let req = self.admin(self.request(Method::GET, "/export?format=csv"));
        Ok(Self::checked(req.send().await?).await?.text().await?)
    }
}
