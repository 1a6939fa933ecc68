//! Tool configuration directory: optional `decision_graph.toml`,
//! `checklist.toml`, `render.toml` and `lint.toml` files plus a `matrices/`
//! folder of dependency matrices. Missing files fall back to the defaults.

use std::path::{Path, PathBuf};

use crate::guidance::{ChecklistSpec, DecisionGraphSpec};
use crate::render::RenderConfig;
use crate::validation::LintConfig;

/// Environment variable naming the configuration directory.
pub const CONFIG_ENV: &str = "SAF_CONFIG";

#[derive(Debug, Clone)]
pub struct ToolConfig {
    pub graph: DecisionGraphSpec,
    pub checklist: ChecklistSpec,
    pub render: RenderConfig,
    pub lint: LintConfig,
    pub matrices_dir: Option<PathBuf>,
}

impl Default for ToolConfig {
    fn default() -> Self {
        Self {
            graph: DecisionGraphSpec::default_graph(),
            checklist: ChecklistSpec::default_checklist(),
            render: RenderConfig::default(),
            lint: LintConfig::default(),
            matrices_dir: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{}: {message}", path.display())]
pub struct ConfigError {
    pub path: PathBuf,
    pub message: String,
}

fn read(dir: &Path, name: &str) -> Result<Option<(PathBuf, String)>, ConfigError> {
    let path = dir.join(name);
    match std::fs::read_to_string(&path) {
        Ok(text) => Ok(Some((path, text))),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(ConfigError {
            path,
            message: e.to_string(),
        }),
    }
}

fn invalid(path: PathBuf, e: impl std::fmt::Display) -> ConfigError {
    ConfigError {
        path,
        message: e.to_string(),
    }
}

impl ToolConfig {
    pub fn load(dir: &Path) -> Result<Self, ConfigError> {
        if !dir.is_dir() {
            return Err(invalid(dir.to_path_buf(), "configuration directory does not exist"));
        }
        let mut c = Self::default();
        if let Some((p, t)) = read(dir, "decision_graph.toml")? {
            c.graph = DecisionGraphSpec::from_toml(&t).map_err(|e| invalid(p, e))?;
        }
        if let Some((p, t)) = read(dir, "checklist.toml")? {
            c.checklist = ChecklistSpec::from_toml(&t).map_err(|e| invalid(p, e))?;
        }
        if let Some((p, t)) = read(dir, "render.toml")? {
            c.render = RenderConfig::from_toml(&t).map_err(|e| invalid(p, e))?;
        }
        if let Some((p, t)) = read(dir, "lint.toml")? {
            c.lint = LintConfig::from_toml(&t).map_err(|e| invalid(p, e))?;
        }
        let matrices = dir.join("matrices");
        if matrices.is_dir() {
            c.matrices_dir = Some(matrices);
        }
        Ok(c)
    }

    /// Loads the directory named by `SAF_CONFIG`, or the defaults when unset.
    pub fn from_env() -> Result<Self, ConfigError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(dir) if !dir.is_empty() => Self::load(Path::new(&dir)),
            _ => Ok(Self::default()),
        }
    }
}
