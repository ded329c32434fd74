//! Transport abstraction: HTTP POST against the configured endpoint, plus a
//! scripted implementation for offline use and tests.

use std::sync::Mutex;

/// Wire error; `retryable` drives the client's backoff loop.
#[derive(Debug, Clone, thiserror::Error)]
#[error("{message}")]
pub struct TransportError {
    pub message: String,
    pub retryable: bool,
}

impl TransportError {
    pub fn retryable(message: impl Into<String>) -> Self {
        TransportError {
            message: message.into(),
            retryable: true,
        }
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        TransportError {
            message: message.into(),
            retryable: false,
        }
    }
}

/// Sends one JSON request and returns the raw response body.
pub trait Transport: Send + Sync {
    fn post(
        &self,
        endpoint: &str,
        api_key: &str,
        body: &serde_json::Value,
    ) -> Result<String, TransportError>;
}

/// Blocking HTTP transport.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new() -> Self {
        HttpTransport {
            client: reqwest::blocking::Client::builder()
                .timeout(std::time::Duration::from_secs(120))
                .build()
                .expect("client builds"),
        }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new()
    }
}

impl Transport for HttpTransport {
    fn post(
        &self,
        endpoint: &str,
        api_key: &str,
        body: &serde_json::Value,
    ) -> Result<String, TransportError> {
        let response = self
            .client
            .post(endpoint)
            .bearer_auth(api_key)
            .json(body)
            .send()
            .map_err(|e| TransportError {
                message: e.to_string(),
                // Connection-level failures are worth retrying.
                retryable: e.is_timeout() || e.is_connect() || e.is_request(),
            })?;
        let status = response.status();
        let text = response.text().map_err(|e| TransportError::retryable(e.to_string()))?;
        if status.is_success() {
            Ok(text)
        } else {
            Err(TransportError {
                message: format!("{status}: {text}"),
                retryable: status.is_server_error() || status.as_u16() == 429,
            })
        }
    }
}

/// Replays a fixed list of responses in order. Used by tests and by the
/// fixture-regeneration tooling to stand in for the real service.
pub struct ScriptedTransport {
    responses: Mutex<std::collections::VecDeque<Result<String, TransportError>>>,
}

impl ScriptedTransport {
    pub fn new(responses: Vec<Result<String, TransportError>>) -> Self {
        ScriptedTransport {
            responses: Mutex::new(responses.into()),
        }
    }

    /// Convenience: wraps each text in the service's JSON response shape.
    pub fn from_texts<I, S>(texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::new(
            texts
                .into_iter()
                .map(|t| Ok(serde_json::json!({ "text": t.as_ref() }).to_string()))
                .collect(),
        )
    }

    pub fn remaining(&self) -> usize {
        self.responses.lock().expect("lock").len()
    }
}

impl Transport for ScriptedTransport {
    fn post(
        &self,
        _endpoint: &str,
        _api_key: &str,
        _body: &serde_json::Value,
    ) -> Result<String, TransportError> {
        self.responses
            .lock()
            .expect("lock")
            .pop_front()
            .unwrap_or_else(|| Err(TransportError::fatal("scripted transport exhausted")))
    }
}
