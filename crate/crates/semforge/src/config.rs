//! Pipeline configuration: a TOML file plus environment and CLI overrides.
//!
//! Relative paths resolve against the config file's directory. The LLM
//! credential is taken from the `SEMFORGE_LLM_API_KEY` environment variable;
//! key material found in the file itself is rejected with a warning.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::llm::Mode;

/// Environment variable holding the LLM credential.
pub const API_KEY_ENV: &str = "SEMFORGE_LLM_API_KEY";

/// Built-in prompt template, used when the config names none.
pub const DEFAULT_TEMPLATE: &str = include_str!("../assets/prompt_template.md");
/// Built-in predicate vocabulary, used when the config names none.
pub const DEFAULT_VOCABULARY: &str = include_str!("../assets/vocabulary.toml");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigIssue {
    MissingKey(String),
    BadValue { key: String, message: String },
    Warning { key: String, message: String },
}

impl ConfigIssue {
    pub fn is_warning(&self) -> bool {
        matches!(self, ConfigIssue::Warning { .. })
    }

    pub fn key(&self) -> &str {
        match self {
            ConfigIssue::MissingKey(k) => k,
            ConfigIssue::BadValue { key, .. } | ConfigIssue::Warning { key, .. } => key,
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigIssue::MissingKey(key) => write!(f, "missing required key {key:?}"),
            ConfigIssue::BadValue { key, message } => write!(f, "bad value for {key:?}: {message}"),
            ConfigIssue::Warning { key, message } => write!(f, "warning for {key:?}: {message}"),
        }
    }
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub source: PathBuf,
    /// Template file; `None` means the embedded default.
    pub template: Option<PathBuf>,
    /// Vocabulary file; `None` means the embedded default.
    pub vocabulary: Option<PathBuf>,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    pub namespace: String,
    pub mode: Mode,
    pub prompt_budget: usize,
    pub endpoint: String,
    pub model: String,
    pub api_key: Option<String>,
    pub refine_tooltips: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    source: Option<String>,
    template: Option<String>,
    vocabulary: Option<String>,
    cache_dir: Option<String>,
    output_dir: Option<String>,
    namespace: Option<String>,
    mode: Option<String>,
    prompt_budget: Option<i64>,
    #[serde(default)]
    llm: RawLlm,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLlm {
    endpoint: Option<String>,
    model: Option<String>,
    api_key: Option<String>,
    refine_tooltips: Option<bool>,
}

/// Reads and validates a config file. On success the second element carries
/// non-fatal warnings; on failure every issue names the offending key.
pub fn validate_config(
    path: &Path,
) -> Result<(PipelineConfig, Vec<ConfigIssue>), Vec<ConfigIssue>> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            return Err(vec![ConfigIssue::BadValue {
                key: "config".into(),
                message: format!("cannot read {}: {e}", path.display()),
            }])
        }
    };
    let raw: RawConfig = match toml::from_str(&text) {
        Ok(raw) => raw,
        Err(e) => {
            return Err(vec![ConfigIssue::BadValue {
                key: "config".into(),
                message: e.to_string(),
            }])
        }
    };
    let base = path.parent().unwrap_or(Path::new("."));
    resolve(raw, base)
}

fn resolve(
    raw: RawConfig,
    base: &Path,
) -> Result<(PipelineConfig, Vec<ConfigIssue>), Vec<ConfigIssue>> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let against_base = |value: &str| -> PathBuf {
        let p = PathBuf::from(value);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };

    let source = match &raw.source {
        Some(s) => {
            let p = against_base(s);
            if !p.is_file() {
                errors.push(ConfigIssue::BadValue {
                    key: "source".into(),
                    message: format!("{} is not a readable file", p.display()),
                });
            }
            p
        }
        None => {
            errors.push(ConfigIssue::MissingKey("source".into()));
            PathBuf::new()
        }
    };

    let optional_file = |key: &str, value: &Option<String>, errors: &mut Vec<ConfigIssue>| {
        value.as_ref().map(|v| {
            let p = against_base(v);
            if !p.is_file() {
                errors.push(ConfigIssue::BadValue {
                    key: key.into(),
                    message: format!("{} is not a readable file", p.display()),
                });
            }
            p
        })
    };
    let template = optional_file("template", &raw.template, &mut errors);
    let vocabulary = optional_file("vocabulary", &raw.vocabulary, &mut errors);

    let mode = match raw.mode.as_deref() {
        None => Mode::Replay,
        Some(m) => match Mode::parse(m) {
            Some(mode) => mode,
            None => {
                errors.push(ConfigIssue::BadValue {
                    key: "mode".into(),
                    message: format!("{m:?} is not one of live, record, replay"),
                });
                Mode::Replay
            }
        },
    };

    let prompt_budget = match raw.prompt_budget {
        None => 24_000,
        Some(n) if n > 0 => n as usize,
        Some(n) => {
            errors.push(ConfigIssue::BadValue {
                key: "prompt_budget".into(),
                message: format!("{n} is not a positive character count"),
            });
            0
        }
    };

    let namespace = raw.namespace.unwrap_or_else(|| "main".into());
    let endpoint = raw.llm.endpoint.unwrap_or_default();
    if endpoint.is_empty() && matches!(mode, Mode::Live | Mode::Record) {
        errors.push(ConfigIssue::BadValue {
            key: "llm.endpoint".into(),
            message: format!("required in {} mode", mode.as_str()),
        });
    }

    if raw.llm.api_key.is_some() {
        warnings.push(ConfigIssue::Warning {
            key: "llm.api_key".into(),
            message: format!("credentials in config files are ignored; set {API_KEY_ENV}"),
        });
    }
    let api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());

    if !errors.is_empty() {
        return Err(errors);
    }
    Ok((
        PipelineConfig {
            source,
            template,
            vocabulary,
            cache_dir: against_base(raw.cache_dir.as_deref().unwrap_or("cache")),
            output_dir: against_base(raw.output_dir.as_deref().unwrap_or("out")),
            namespace,
            mode,
            prompt_budget,
            endpoint,
            model: raw.llm.model.unwrap_or_else(|| "default".into()),
            api_key,
            refine_tooltips: raw.llm.refine_tooltips.unwrap_or(false),
        },
        warnings,
    ))
}

impl PipelineConfig {
    /// Template text: the configured file or the embedded default.
    pub fn template_text(&self) -> std::io::Result<String> {
        match &self.template {
            Some(path) => std::fs::read_to_string(path),
            None => Ok(DEFAULT_TEMPLATE.to_string()),
        }
    }

    /// Vocabulary TOML text: the configured file or the embedded default.
    pub fn vocabulary_text(&self) -> std::io::Result<String> {
        match &self.vocabulary {
            Some(path) => std::fs::read_to_string(path),
            None => Ok(DEFAULT_VOCABULARY.to_string()),
        }
    }
}

/// Parses vocabulary TOML (`[predicates]` table of keyword = object kind).
pub fn parse_vocabulary(
    text: &str,
) -> Result<semforge_core::fnl::PredicateVocabulary, String> {
    #[derive(Deserialize)]
    struct RawVocab {
        predicates: std::collections::BTreeMap<String, String>,
    }
    let raw: RawVocab = toml::from_str(text).map_err(|e| e.to_string())?;
    let mut entries = Vec::new();
    for (keyword, kind) in raw.predicates {
        let kind = semforge_core::fnl::ObjectKind::parse(&kind)
            .ok_or_else(|| format!("unknown object kind {kind:?} for {keyword:?}"))?;
        entries.push((keyword, kind));
    }
    semforge_core::fnl::PredicateVocabulary::new(entries).map_err(|e| e.to_string())
}
