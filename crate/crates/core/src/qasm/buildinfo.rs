//! The buildinfo file: everything an independent party needs to rebuild an
//! identical artifact.
//!
//! Serialized as `key = value` lines with keys sorted, LF endings, UTF-8.
//! Two emissions of the same value are byte-identical.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::transpile::STAGE_NAMES;

pub const SCHEMA_VERSION: u32 = 1;

/// One pipeline stage's plugin identity as recorded for verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagePluginInfo {
    pub stage_name: String,
    pub plugin_id: String,
    pub plugin_version: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildInfo {
    pub schema_version: u32,
    pub tool_version: String,
    pub source_sha256: String,
    pub backend_sha256: String,
    pub master_seed: u64,
    /// Exactly six entries, one per stage in pipeline order.
    pub stage_plugins: Vec<StagePluginInfo>,
    pub options: BTreeMap<String, String>,
    pub artifact_sha256: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum BuildInfoError {
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("buildinfo must list exactly 6 stage plugins, found {0}")]
    StageCount(usize),
    #[error("stage {index} must be `{expected}`, found `{found}`")]
    StageOrder {
        index: usize,
        expected: &'static str,
        found: String,
    },
    #[error("invalid option key `{0}`")]
    BadOptionKey(String),
}

impl BuildInfo {
    fn check(&self) -> Result<(), BuildInfoError> {
        if self.stage_plugins.len() != STAGE_NAMES.len() {
            return Err(BuildInfoError::StageCount(self.stage_plugins.len()));
        }
        for (index, (plugin, expected)) in
            self.stage_plugins.iter().zip(STAGE_NAMES).enumerate()
        {
            if plugin.stage_name != expected {
                return Err(BuildInfoError::StageOrder {
                    index,
                    expected,
                    found: plugin.stage_name.clone(),
                });
            }
        }
        for key in self.options.keys() {
            let ok = !key.is_empty()
                && key
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || "_-".contains(c));
            if !ok {
                return Err(BuildInfoError::BadOptionKey(key.clone()));
            }
        }
        Ok(())
    }

    /// Canonical sorted-key text.
    pub fn to_text(&self) -> Result<String, BuildInfoError> {
        self.check()?;
        let mut lines = vec![
            format!("artifact_sha256 = {}", self.artifact_sha256),
            format!("backend_sha256 = {}", self.backend_sha256),
            format!("master_seed = {}", self.master_seed),
            format!("schema_version = {}", self.schema_version),
            format!("source_sha256 = {}", self.source_sha256),
            format!("tool_version = {}", self.tool_version),
        ];
        for (key, value) in &self.options {
            lines.push(format!("option.{key} = {value}"));
        }
        for (index, plugin) in self.stage_plugins.iter().enumerate() {
            lines.push(format!(
                "stage.{index}.{} = {} {}",
                plugin.stage_name, plugin.plugin_id, plugin.plugin_version
            ));
        }
        lines.sort();
        let mut text = lines.join("\n");
        text.push('\n');
        Ok(text)
    }

    pub fn from_text(text: &str) -> Result<Self, BuildInfoError> {
        let mut schema_version = None;
        let mut tool_version = None;
        let mut source_sha256 = None;
        let mut backend_sha256 = None;
        let mut master_seed = None;
        let mut artifact_sha256 = None;
        let mut options = BTreeMap::new();
        let mut stages: Vec<(usize, StagePluginInfo)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let (key, value) = raw
                .split_once(" = ")
                .ok_or(BuildInfoError::Malformed { line })?;
            let invalid = |message: &str| BuildInfoError::Invalid {
                line,
                message: message.to_string(),
            };
            match key {
                "schema_version" => {
                    schema_version =
                        Some(value.parse().map_err(|_| invalid("bad schema version"))?)
                }
                "tool_version" => tool_version = Some(value.to_string()),
                "source_sha256" => source_sha256 = Some(value.to_string()),
                "backend_sha256" => backend_sha256 = Some(value.to_string()),
                "artifact_sha256" => artifact_sha256 = Some(value.to_string()),
                "master_seed" => {
                    master_seed = Some(value.parse().map_err(|_| invalid("bad master seed"))?)
                }
                _ if key.starts_with("option.") => {
                    options.insert(key["option.".len()..].to_string(), value.to_string());
                }
                _ if key.starts_with("stage.") => {
                    let mut parts = key.splitn(3, '.');
                    parts.next();
                    let index: usize = parts
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| invalid("bad stage index"))?;
                    let stage_name = parts
                        .next()
                        .ok_or_else(|| invalid("missing stage name"))?
                        .to_string();
                    let (plugin_id, plugin_version) = value
                        .split_once(' ')
                        .ok_or_else(|| invalid("expected `<plugin_id> <version>`"))?;
                    stages.push((
                        index,
                        StagePluginInfo {
                            stage_name,
                            plugin_id: plugin_id.to_string(),
                            plugin_version: plugin_version.to_string(),
                        },
                    ));
                }
                other => return Err(invalid(&format!("unknown key `{other}`"))),
            }
        }

        stages.sort_by_key(|(index, _)| *index);
        let stage_plugins = stages.into_iter().map(|(_, p)| p).collect();
        let info = BuildInfo {
            schema_version: schema_version
                .ok_or_else(|| BuildInfoError::MissingKey("schema_version".into()))?,
            tool_version: tool_version
                .ok_or_else(|| BuildInfoError::MissingKey("tool_version".into()))?,
            source_sha256: source_sha256
                .ok_or_else(|| BuildInfoError::MissingKey("source_sha256".into()))?,
            backend_sha256: backend_sha256
                .ok_or_else(|| BuildInfoError::MissingKey("backend_sha256".into()))?,
            master_seed: master_seed
                .ok_or_else(|| BuildInfoError::MissingKey("master_seed".into()))?,
            stage_plugins,
            options,
            artifact_sha256: artifact_sha256
                .ok_or_else(|| BuildInfoError::MissingKey("artifact_sha256".into()))?,
        };
        info.check()?;
        Ok(info)
    }
}
