use std::path::{Path, PathBuf};

use serde_json::json;
use tailsim_core::ModelError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad file, bad schema, bad flag.
    #[error("{}{message}", location(.path, .line))]
    Input {
        message: String,
        path: Option<PathBuf>,
        line: Option<u64>,
    },

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

fn location(path: &Option<PathBuf>, line: &Option<u64>) -> String {
    match (path, line) {
        (Some(p), Some(l)) => format!("{}:{l}: ", p.display()),
        (Some(p), None) => format!("{}: ", p.display()),
        (None, Some(l)) => format!("line {l}: "),
        (None, None) => String::new(),
    }
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError::Input {
            message: message.into(),
            path: None,
            line: None,
        }
    }

    pub fn input_at(path: &Path, line: Option<u64>, message: impl Into<String>) -> Self {
        CliError::Input {
            message: message.into(),
            path: Some(path.to_path_buf()),
            line,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => EXIT_INPUT,
            CliError::Model(ModelError::Invalid(_)) => EXIT_INPUT,
            CliError::Model(_) => EXIT_MODEL,
            CliError::Io { .. } | CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input { .. } => "input",
            CliError::Model(e) => e.kind(),
            CliError::Io { .. } => "io",
            CliError::Internal(_) => "internal",
        }
    }

    /// Machine-readable form written to stderr on failure.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        });
        if let CliError::Input { path, line, .. } = self {
            if let Some(p) = path {
                v["error"]["path"] = json!(p.display().to_string());
            }
            if let Some(l) = line {
                v["error"]["line"] = json!(l);
            }
        }
        v
    }
}

pub type CliResult<T> = Result<T, CliError>;
