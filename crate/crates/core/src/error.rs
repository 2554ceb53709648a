use std::path::PathBuf;

use thiserror::Error;

/// Where in the discretization a failure was detected.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Location {
    pub step: Option<usize>,
    pub time: Option<f64>,
    pub element: Option<usize>,
    pub node: Option<usize>,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if let Some(s) = self.step {
            parts.push(format!("step={s}"));
        }
        if let Some(t) = self.time {
            parts.push(format!("t={t:.6e}"));
        }
        if let Some(e) = self.element {
            parts.push(format!("element={e}"));
        }
        if let Some(n) = self.node {
            parts.push(format!("node={n}"));
        }
        if parts.is_empty() {
            write!(f, "unknown")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("degree out of supported range 0..4 (got {0})")]
    UnsupportedDegree(usize),

    #[error(
        "admissibility violated: constraint={constraint} value={value:e} stage={stage} {location}"
    )]
    Admissibility {
        constraint: &'static str,
        value: f64,
        stage: &'static str,
        location: Location,
    },

    #[error("non-finite state: stage={stage} {location}")]
    NonFinite {
        stage: &'static str,
        location: Location,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl SolverError {
    pub fn admissibility(constraint: &'static str, value: f64, stage: &'static str) -> Self {
        SolverError::Admissibility {
            constraint,
            value,
            stage,
            location: Location::default(),
        }
    }

    /// Attach step/time information to errors raised deep inside a step.
    pub fn at_step(mut self, step: usize, time: f64) -> Self {
        match &mut self {
            SolverError::Admissibility { location, .. }
            | SolverError::NonFinite { location, .. } => {
                location.step = Some(step);
                location.time = Some(time);
            }
            _ => {}
        }
        self
    }

    pub fn in_element(mut self, element: usize) -> Self {
        match &mut self {
            SolverError::Admissibility { location, .. }
            | SolverError::NonFinite { location, .. }
                if location.element.is_none() => {
                    location.element = Some(element);
                }
            _ => {}
        }
        self
    }

    pub fn is_admissibility(&self) -> bool {
        matches!(self, SolverError::Admissibility { .. })
    }

    /// Single machine-parsable line used by the CLI on failure.
    pub fn machine_line(&self) -> String {
        match self {
            SolverError::Admissibility {
                constraint,
                value,
                stage,
                location,
            } => format!(
                "error kind=admissibility constraint={constraint} value={value:e} stage={stage} {location}"
            ),
            SolverError::NonFinite { stage, location } => {
                format!("error kind=non_finite stage={stage} {location}")
            }
            SolverError::Config(msg) => format!("error kind=config message=\"{msg}\""),
            SolverError::UnsupportedDegree(n) => {
                format!("error kind=config message=\"degree out of supported range 0..4 (got {n})\"")
            }
            SolverError::Io { path, .. } | SolverError::Csv { path, .. } => {
                format!("error kind=io path={}", path.display())
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, SolverError>;
