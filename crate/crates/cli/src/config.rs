use std::path::{Path, PathBuf};
use std::time::Duration;

use chemlp::milp::{Backend, ExternalSolver, MiniOptions, SolutionFormat};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub dataset: PathBuf,
    pub targets: PathBuf,
    pub rho: usize,
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_executions")]
    pub cv_executions: usize,
    pub spec: PathBuf,
    /// Defaults to `predictor.json` in the output directory.
    #[serde(default)]
    pub predictor: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_executions() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "lowercase", deny_unknown_fields)]
pub enum SolverConfig {
    Mini {
        #[serde(default = "default_nodes")]
        node_limit: usize,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
    Cbc {
        binary: String,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
    /// Any solver driven by a template holding `{input}` and `{output}`.
    Command {
        command: String,
        format: Format,
        #[serde(default = "default_timeout")]
        timeout_secs: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Cbc,
    Highs,
}

fn default_nodes() -> usize {
    MiniOptions::default().node_limit
}

fn default_timeout() -> u64 {
    600
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::Mini { node_limit: default_nodes(), timeout_secs: default_timeout() }
    }
}

impl SolverConfig {
    pub fn backend(&self, workdir: &Path) -> Backend {
        match self {
            SolverConfig::Mini { node_limit, timeout_secs } => Backend::Mini(MiniOptions {
                node_limit: *node_limit,
                time_limit: Duration::from_secs(*timeout_secs),
                ..MiniOptions::default()
            }),
            SolverConfig::Cbc { binary, timeout_secs } => {
                let mut s = ExternalSolver::cbc(binary, Duration::from_secs(*timeout_secs));
                s.workdir = Some(workdir.to_path_buf());
                Backend::External(s)
            }
            SolverConfig::Command { command, format, timeout_secs } => Backend::External(ExternalSolver {
                command: command.clone(),
                format: match format {
                    Format::Cbc => SolutionFormat::Cbc,
                    Format::Highs => SolutionFormat::Highs,
                },
                timeout: Duration::from_secs(*timeout_secs),
                workdir: Some(workdir.to_path_buf()),
            }),
        }
    }
}

impl ProjectConfig {
    /// Reads the config; relative paths are taken from the config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let mut cfg: ProjectConfig =
            serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        if cfg.rho < 1 {
            return Err(CliError::input("rho must be at least 1"));
        }
        if cfg.cv_executions < 1 {
            return Err(CliError::input("cv_executions must be at least 1"));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.dataset);
        fix(&mut cfg.targets);
        fix(&mut cfg.spec);
        fix(&mut cfg.output_dir);
        if let Some(p) = cfg.predictor.as_mut() {
            fix(p);
        }
        Ok(cfg)
    }

    pub fn predictor_path(&self) -> PathBuf {
        self.predictor.clone().unwrap_or_else(|| self.output_dir.join("predictor.json"))
    }

    pub fn space_path(&self) -> PathBuf {
        self.output_dir.join("space.json")
    }

    pub fn features_path(&self) -> PathBuf {
        self.output_dir.join("features.csv")
    }
}
