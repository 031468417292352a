//! Server configuration, layered as: command-line flags over environment
//! variables over the config file over built-in defaults.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use ust_core::recommender::{EndpointConfig, FallbackThresholds};

use crate::error::CliError;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const DEFAULT_MODEL_PATH: &str = "model.ustm";
pub const DEFAULT_BODY_LIMIT: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct ServerConfig {
    pub bind: SocketAddr,
    pub model_path: PathBuf,
    pub body_limit: usize,
    pub recommender: Option<EndpointConfig>,
    pub fallback: FallbackThresholds,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            bind: DEFAULT_BIND.parse().expect("valid default address"),
            model_path: PathBuf::from(DEFAULT_MODEL_PATH),
            body_limit: DEFAULT_BODY_LIMIT,
            recommender: None,
            fallback: FallbackThresholds::default(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    bind: Option<SocketAddr>,
    model_path: Option<PathBuf>,
    body_limit: Option<usize>,
    recommender: Option<EndpointConfig>,
    #[serde(default)]
    fallback: Option<FallbackThresholds>,
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default, clap::Args)]
pub struct LlmArgs {
    /// Chat-completions API root, e.g. https://api.openai.com/v1 [env: UST_LLM_BASE_URL]
    #[arg(long)]
    pub llm_base_url: Option<String>,
    /// Model name sent with each request [env: UST_LLM_MODEL]
    #[arg(long)]
    pub llm_model: Option<String>,
    /// Bearer token for the endpoint [env: UST_LLM_API_KEY or OPENAI_API_KEY]
    #[arg(long, hide_env_values = true)]
    pub llm_api_key: Option<String>,
    /// Per-request timeout in seconds [env: UST_LLM_TIMEOUT_SECS]
    #[arg(long)]
    pub llm_timeout: Option<f64>,
    /// Skip the remote endpoint and use the offline rules only
    #[arg(long)]
    pub offline: bool,
}

fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.trim().is_empty())
}

impl LlmArgs {
    /// Resolves each endpoint field as flag, then environment, then `file`.
    /// No base URL anywhere means no remote endpoint.
    pub fn resolve(&self, file: Option<EndpointConfig>) -> Result<Option<EndpointConfig>, CliError> {
        if self.offline {
            return Ok(None);
        }
        let file_url = file.as_ref().map(|f| f.base_url.clone());
        let Some(base_url) = self.llm_base_url.clone().or_else(|| env_var("UST_LLM_BASE_URL")).or(file_url)
        else {
            return Ok(None);
        };

        let mut endpoint = file.unwrap_or_else(|| EndpointConfig::new(base_url.clone()));
        endpoint.base_url = base_url;
        if let Some(model) = self.llm_model.clone().or_else(|| env_var("UST_LLM_MODEL")) {
            endpoint.model = model;
        }
        if let Some(key) = self
            .llm_api_key
            .clone()
            .or_else(|| env_var("UST_LLM_API_KEY"))
            .or_else(|| env_var("OPENAI_API_KEY"))
        {
            endpoint.api_key = Some(key);
        }
        let timeout = match self.llm_timeout {
            Some(secs) => Some(secs),
            None => env_parse::<f64>("UST_LLM_TIMEOUT_SECS")?,
        };
        if let Some(secs) = timeout {
            endpoint.timeout = Duration::try_from_secs_f64(secs)
                .map_err(|_| CliError::Usage(format!("invalid LLM timeout {secs}")))?;
        }
        Ok(Some(endpoint))
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct ServeArgs {
    /// Address to listen on [env: UST_BIND]
    #[arg(long)]
    pub bind: Option<SocketAddr>,
    /// Model file to load at startup [env: UST_MODEL_PATH]
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Largest accepted request body in bytes [env: UST_BODY_LIMIT]
    #[arg(long)]
    pub body_limit: Option<usize>,
    #[command(flatten)]
    pub llm: LlmArgs,
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>, CliError> {
    match std::env::var(name) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{name}={v} is not valid"))),
        _ => Ok(None),
    }
}

impl ServerConfig {
    pub fn resolve(file: Option<&Path>, args: &ServeArgs) -> Result<Self, CliError> {
        let from_file = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let mut config = ServerConfig::default();
        if let Some(bind) = from_file.bind {
            config.bind = bind;
        }
        if let Some(model_path) = from_file.model_path {
            // relative model paths are taken relative to the config file
            config.model_path = match file.and_then(Path::parent) {
                Some(dir) if model_path.is_relative() => dir.join(model_path),
                _ => model_path,
            };
        }
        if let Some(limit) = from_file.body_limit {
            config.body_limit = limit;
        }
        if let Some(fallback) = from_file.fallback {
            config.fallback = fallback;
        }

        if let Some(bind) = env_parse("UST_BIND")? {
            config.bind = bind;
        }
        if let Some(path) = env_parse::<PathBuf>("UST_MODEL_PATH")? {
            config.model_path = path;
        }
        if let Some(limit) = env_parse("UST_BODY_LIMIT")? {
            config.body_limit = limit;
        }

        if let Some(bind) = args.bind {
            config.bind = bind;
        }
        if let Some(path) = &args.model {
            config.model_path = path.clone();
        }
        if let Some(limit) = args.body_limit {
            config.body_limit = limit;
        }
        config.recommender = args.llm.resolve(from_file.recommender)?;
        Ok(config)
    }
}

/// Model path for one-shot commands: flag, then `UST_MODEL_PATH`, then the default.
pub fn model_path(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_owned)
        .or_else(|| std::env::var_os("UST_MODEL_PATH").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_MODEL_PATH))
}
