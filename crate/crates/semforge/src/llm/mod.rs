//! LLM access with record/replay caching.
//!
//! Requests are keyed by the prompt bundle's content hash, so a populated
//! cache makes the whole extraction pipeline a deterministic offline
//! function of its inputs. Record mode persists fresh responses; replay
//! refuses to touch the network.

mod cache;
mod transport;

pub use cache::{Cache, CacheEntry};
pub use transport::{HttpTransport, ScriptedTransport, Transport, TransportError};

use std::fmt;
use std::time::Duration;

use semforge_core::fnl::{self, FnlStatement, PredicateVocabulary};
use semforge_core::prompt::PromptBundle;
use semforge_core::semlayer::TooltipRefiner;
use semforge_core::Uri;

/// How the client is allowed to obtain responses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Live,
    Record,
    Replay,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "live" => Some(Mode::Live),
            "record" => Some(Mode::Record),
            "replay" => Some(Mode::Replay),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Live => "live",
            Mode::Record => "record",
            Mode::Replay => "replay",
        }
    }
}

/// Where a response came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseMode {
    Live,
    Replay,
}

/// A completion returned by [`LlmClient::complete`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LlmResponse {
    pub text: String,
    pub mode: ResponseMode,
    pub model: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error("cache miss for prompt {hash} (snippet {snippet})")]
    CacheMiss { hash: String, snippet: u64 },
    #[error("no API credential: set {}", crate::config::API_KEY_ENV)]
    AuthMissing,
    #[error("transport failed after {attempts} attempts: {source}")]
    Transport {
        attempts: u32,
        source: TransportError,
    },
    #[error("malformed service response: {0}")]
    ResponseFormat(String),
    #[error("cache io: {0}")]
    CacheIo(#[from] std::io::Error),
}

/// Maximum transport attempts per request.
pub const MAX_ATTEMPTS: u32 = 3;

/// LLM access point. Holds the endpoint configuration, the response cache
/// and the transport implementation.
pub struct LlmClient {
    pub endpoint: String,
    pub api_key: Option<String>,
    cache: Cache,
    transport: Box<dyn Transport>,
    backoff: Duration,
}

impl LlmClient {
    pub fn new(
        endpoint: &str,
        api_key: Option<String>,
        cache: Cache,
        transport: Box<dyn Transport>,
    ) -> Self {
        LlmClient {
            endpoint: endpoint.to_string(),
            api_key,
            cache,
            transport,
            backoff: Duration::from_millis(250),
        }
    }

    /// Shrinks the retry backoff; test use.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    /// Obtains the completion for a bundle according to `mode`:
    /// live asks the service, record asks and persists (reusing an existing
    /// entry when present), replay only reads the cache.
    pub fn complete(&self, bundle: &PromptBundle, mode: Mode) -> Result<LlmResponse, LlmError> {
        match mode {
            Mode::Replay => match self.cache.load(&bundle.content_hash)? {
                Some(entry) => Ok(LlmResponse {
                    text: entry.response,
                    mode: ResponseMode::Replay,
                    model: bundle.model.clone(),
                }),
                None => Err(LlmError::CacheMiss {
                    hash: bundle.content_hash.clone(),
                    snippet: bundle.snippet_id,
                }),
            },
            Mode::Record => {
                if let Some(entry) = self.cache.load(&bundle.content_hash)? {
                    return Ok(LlmResponse {
                        text: entry.response,
                        mode: ResponseMode::Replay,
                        model: bundle.model.clone(),
                    });
                }
                let text = self.request(bundle)?;
                self.cache.store(&CacheEntry {
                    hash: bundle.content_hash.clone(),
                    model: bundle.model.clone(),
                    endpoint: self.endpoint.clone(),
                    temperature: 0,
                    snippet_id: bundle.snippet_id,
                    prompt: bundle.text.clone(),
                    response: text.clone(),
                })?;
                Ok(LlmResponse {
                    text,
                    mode: ResponseMode::Live,
                    model: bundle.model.clone(),
                })
            }
            Mode::Live => {
                let text = self.request(bundle)?;
                Ok(LlmResponse {
                    text,
                    mode: ResponseMode::Live,
                    model: bundle.model.clone(),
                })
            }
        }
    }

    fn request(&self, bundle: &PromptBundle) -> Result<String, LlmError> {
        let api_key = self.api_key.as_deref().ok_or(LlmError::AuthMissing)?;
        let body = serde_json::json!({
            "model": bundle.model,
            "prompt": bundle.text,
            "temperature": 0,
        });
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            match self.transport.post(&self.endpoint, api_key, &body) {
                Ok(raw) => return parse_response(&raw),
                Err(e) if e.retryable && attempt < MAX_ATTEMPTS => {
                    std::thread::sleep(self.backoff * 2u32.pow(attempt - 1));
                }
                Err(e) => {
                    return Err(LlmError::Transport {
                        attempts: attempt,
                        source: e,
                    })
                }
            }
        }
    }
}

/// Service responses are JSON objects carrying the completion under `text`.
fn parse_response(raw: &str) -> Result<String, LlmError> {
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| LlmError::ResponseFormat(e.to_string()))?;
    value
        .get("text")
        .and_then(|t| t.as_str())
        .map(|s| s.to_string())
        .ok_or_else(|| LlmError::ResponseFormat("missing \"text\" field".to_string()))
}

/// Removes one outer ``` fence pair when the whole payload is fenced.
pub fn strip_code_fences(text: &str) -> &str {
    let trimmed = text.trim();
    let Some(first_line_end) = trimmed.find('\n') else {
        return trimmed;
    };
    let first_line = &trimmed[..first_line_end];
    if !first_line.starts_with("```") {
        return trimmed;
    }
    let rest = &trimmed[first_line_end + 1..];
    match rest.rfind("```") {
        Some(pos) if rest[pos + 3..].trim().is_empty() => rest[..pos].trim_end(),
        _ => trimmed,
    }
}

/// Extraction failure that preserves the raw response for human review.
#[derive(Debug)]
pub enum ExtractError {
    Llm(LlmError),
    Unparseable {
        raw: String,
        diagnostics: Vec<fnl::Diagnostic>,
    },
}

impl fmt::Display for ExtractError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractError::Llm(e) => write!(f, "{e}"),
            ExtractError::Unparseable { diagnostics, .. } => {
                write!(f, "response is not parseable FNL ({} diagnostics)", diagnostics.len())
            }
        }
    }
}

impl std::error::Error for ExtractError {}

impl From<LlmError> for ExtractError {
    fn from(e: LlmError) -> Self {
        ExtractError::Llm(e)
    }
}

/// Runs one snippet extraction: completes the bundle, strips code fences and
/// parses the response as FNL statements for that snippet.
pub fn extract_snippet_fnl(
    client: &LlmClient,
    bundle: &PromptBundle,
    vocab: &PredicateVocabulary,
    mode: Mode,
) -> Result<Vec<FnlStatement>, ExtractError> {
    let response = client.complete(bundle, mode)?;
    let body = strip_code_fences(&response.text);
    let outcome = fnl::parse_fnl(body, vocab);
    if !outcome.is_clean() {
        return Err(ExtractError::Unparseable {
            raw: response.text.clone(),
            diagnostics: outcome.diagnostics,
        });
    }
    // Headers in the response are tolerated; all statements belong to the
    // bundle's snippet.
    let mut statements = Vec::new();
    for block in outcome.document.blocks.into_values() {
        statements.extend(block);
    }
    Ok(statements)
}

/// Tooltip refinement through the same cached completion path.
pub struct CachedRefiner<'a> {
    pub client: &'a LlmClient,
    pub model: String,
    pub mode: Mode,
}

impl TooltipRefiner for CachedRefiner<'_> {
    fn refine(&self, _entity: &Uri, prompt: &str) -> Result<String, String> {
        let bundle = PromptBundle {
            snippet_id: 0,
            model: self.model.clone(),
            text: prompt.to_string(),
            content_hash: semforge_core::prompt::content_hash(&self.model, prompt),
        };
        self.client
            .complete(&bundle, self.mode)
            .map(|r| r.text)
            .map_err(|e| e.to_string())
    }
}
