use thiserror::Error;

/// Errors raised by the library.
///
/// The variants map one-to-one onto the CLI exit codes: validation problems
/// exit with 2, resource caps with 3 and failed certified inequalities with 4.
#[derive(Debug, Error)]
pub enum TlabError {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("certified inequality failed: {0}")]
    Certification(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl TlabError {
    pub fn validation(msg: impl Into<String>) -> Self {
        TlabError::Validation(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        TlabError::Resource(msg.into())
    }

    /// Prefixes the message with the pipeline stage that raised it, keeping
    /// the exit code.
    pub fn in_stage(self, stage: &str) -> Self {
        let tag = |m: String| format!("[{stage}] {m}");
        match self {
            TlabError::Validation(m) => TlabError::Validation(tag(m)),
            TlabError::Resource(m) => TlabError::Resource(tag(m)),
            TlabError::Certification(m) => TlabError::Certification(tag(m)),
            TlabError::Internal(m) => TlabError::Internal(tag(m)),
            TlabError::Parse(m) => TlabError::Parse(tag(m)),
            TlabError::Csv(e) => TlabError::Parse(tag(e.to_string())),
            TlabError::Io(e) => TlabError::Internal(tag(e.to_string())),
            TlabError::Json(e) => TlabError::Internal(tag(e.to_string())),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            TlabError::Validation(_) | TlabError::Parse(_) | TlabError::Csv(_) => 2,
            TlabError::Resource(_) => 3,
            TlabError::Certification(_) => 4,
            TlabError::Internal(_) | TlabError::Io(_) | TlabError::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, TlabError>;
