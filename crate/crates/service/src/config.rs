use std::path::{Path, PathBuf};

use ideation_core::experiment::{AssignmentPolicy, ExperimentConfig};
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("parse {path}: {source}")]
    Parse { path: String, source: toml::de::Error },
    #[error("environment variable {name}: {message}")]
    Env { name: &'static str, message: String },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: String,
    pub port: u16,
    pub pool_path: PathBuf,
    pub log_path: PathBuf,
    /// Required for the export route; empty disables export.
    pub admin_token: String,
    pub policy: AssignmentPolicy,
    pub seed: u64,
    pub verify_all_sessions: bool,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".into(),
            port: 8080,
            pool_path: PathBuf::from("pool.csv"),
            log_path: PathBuf::from("events.jsonl"),
            admin_token: String::new(),
            policy: AssignmentPolicy::default(),
            seed: 0,
            verify_all_sessions: false,
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|source| ConfigError::Parse { path: origin.into(), source })
    }

    /// Reads the optional TOML file, then applies `IDEATION_*` environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut config = match path {
            Some(p) => {
                let origin = p.display().to_string();
                let text = std::fs::read_to_string(p)
                    .map_err(|source| ConfigError::Read { path: origin.clone(), source })?;
                Self::from_toml(&text, &origin)?
            }
            None => Self::default(),
        };
        config.apply_env(|k| std::env::var(k).ok())?;
        Ok(config)
    }

    pub fn apply_env(&mut self, get: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        fn parsed<T: std::str::FromStr>(name: &'static str, v: String) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            v.parse().map_err(|e: T::Err| ConfigError::Env { name, message: e.to_string() })
        }
        if let Some(v) = get("IDEATION_HOST") {
            self.host = v;
        }
        if let Some(v) = get("IDEATION_PORT") {
            self.port = parsed("IDEATION_PORT", v)?;
        }
        if let Some(v) = get("IDEATION_POOL") {
            self.pool_path = v.into();
        }
        if let Some(v) = get("IDEATION_LOG") {
            self.log_path = v.into();
        }
        if let Some(v) = get("IDEATION_ADMIN_TOKEN") {
            self.admin_token = v;
        }
        if let Some(v) = get("IDEATION_POLICY") {
            self.policy = parsed("IDEATION_POLICY", v)?;
        }
        if let Some(v) = get("IDEATION_SEED") {
            self.seed = parsed("IDEATION_SEED", v)?;
        }
        if let Some(v) = get("IDEATION_VERIFY_ALL") {
            self.verify_all_sessions = parsed("IDEATION_VERIFY_ALL", v)?;
        }
        Ok(())
    }

    pub fn bind_addr(&self) -> String {
        format!("{}:{}", self.host, self.port)
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig { policy: self.policy, seed: self.seed, verify_all_sessions: self.verify_all_sessions }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides_file() {
        let mut c = ServiceConfig::from_toml("port = 9000\npolicy = \"uniform\"\nseed = 3\n", "inline").unwrap();
        assert_eq!(c.policy, AssignmentPolicy::Uniform);
        c.apply_env(|k| match k {
            "IDEATION_PORT" => Some("9100".into()),
            "IDEATION_POLICY" => Some("balanced-block".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(c.port, 9100);
        assert_eq!(c.policy, AssignmentPolicy::BalancedBlock);
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn bad_env_value_is_reported() {
        let mut c = ServiceConfig::default();
        let err = c.apply_env(|k| (k == "IDEATION_PORT").then(|| "http".to_string())).unwrap_err();
        assert!(matches!(err, ConfigError::Env { name: "IDEATION_PORT", .. }));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ServiceConfig::from_toml("prot = 1\n", "inline").is_err());
    }
}
