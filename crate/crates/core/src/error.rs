use std::fmt;

/// Failure categories shared by every module. The CLI prints the category
/// tag on stderr so callers can dispatch on it.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("unsupported scenario: {0}")]
    Unsupported(String),
    #[error("{}", ConfigErrors(.0))]
    Config(Vec<String>),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn category(&self) -> &'static str {
        match self {
            Error::Argument(_) => "argument",
            Error::Resource(_) => "resource",
            Error::Numeric(_) => "numeric",
            Error::Unsupported(_) => "unsupported",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}

struct ConfigErrors<'a>(&'a [String]);

impl fmt::Display for ConfigErrors<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration rejected ({} problem", self.0.len())?;
        if self.0.len() != 1 {
            write!(f, "s")?;
        }
        write!(f, ")")?;
        for e in self.0 {
            write!(f, "\n  - {e}")?;
        }
        Ok(())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
